#include "mann/dynamics.hpp"

#include <cmath>
#include <string>

#include "mann/errors.hpp"

namespace mann {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadFlag: return "BadFlag";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::NonPositiveMass: return "NonPositiveMass";
    case ErrorKind::SingularMass: return "SingularMass";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::MissingBaseline: return "MissingBaseline";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

ArmParams ArmParams::from_masses(double m1, double m2, double l1, double l2) {
  ArmParams p;
  p.m1 = m1;
  p.m2 = m2;
  p.l1 = l1;
  p.l2 = l2;
  p.validate();
  p.recompute();
  return p;
}

void ArmParams::recompute() {
  phi = (m1 + m2) * l1 * l1;
  rho = m2 * l2 * l2;
  psi = m2 * l1 * l2;
  gamma = kGravity / l1;
}

void ArmParams::validate() const {
  if (!(m1 > 0.0) || !(m2 > 0.0))
    throw Error(ErrorKind::NonPositiveMass, "link masses must be positive");
  if (!(l1 > 0.0) || !(l2 > 0.0))
    throw Error(ErrorKind::Validation, "link lengths must be positive");
}

void validate_schedule(const JumpSchedule& schedule) {
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& ev = schedule[i];
    if (!(ev.time >= 0.0))
      throw Error(ErrorKind::Validation, "jump time must be non-negative");
    if (i > 0 && !(ev.time > schedule[i - 1].time))
      throw Error(ErrorKind::Validation,
                  "jump times must be strictly increasing (event " +
                      std::to_string(i) + ")");
    if (ev.kind == JumpKind::Scale && !(ev.value > 0.0))
      throw Error(ErrorKind::NonPositiveMass,
                  "scale factor must be positive (event " +
                      std::to_string(i) + ")");
  }
}

Matrix2d mass_matrix(const ArmParams& p, const Vector2d& x) {
  const double c2 = std::cos(x[1]);
  const double off = p.rho + p.psi * c2;
  Matrix2d m;
  m << p.phi + p.rho + 2.0 * p.psi * c2, off,
       off, p.rho;
  return m;
}

Matrix2d coriolis_matrix(const ArmParams& p, const Vector2d& x,
                         const Vector2d& xdot) {
  const double ps2 = p.psi * std::sin(x[1]);
  Matrix2d v;
  v << -ps2 * xdot[1], -ps2 * (xdot[0] + xdot[1]),
        ps2 * xdot[0], 0.0;
  return v;
}

Vector2d gravity_vector(const ArmParams& p, const Vector2d& x) {
  const double c12 = std::cos(x[0] + x[1]);
  return {p.phi * p.gamma * std::cos(x[0]) + p.psi * p.gamma * c12,
          p.psi * p.gamma * c12};
}

Matrix2d mass_matrix_rate(const ArmParams& p, const Vector2d& x,
                          const Vector2d& xdot) {
  const double d = -p.psi * std::sin(x[1]) * xdot[1];
  Matrix2d m;
  m << 2.0 * d, d,
       d, 0.0;
  return m;
}

PlantDerivative plant_derivative(const ArmParams& p, const PlantState& state,
                                 const Vector2d& tau) {
  const Matrix2d m = mass_matrix(p, state.x);
  const Vector2d rhs =
      tau - coriolis_matrix(p, state.x, state.xdot) * state.xdot -
      gravity_vector(p, state.x);

  // Closed-form symmetric 2x2 eigenvalues for the condition guard.
  const double a = m(0, 0), b = m(0, 1), d = m(1, 1);
  const double det = a * d - b * b;
  const double half_tr = 0.5 * (a + d);
  const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  const double lmax = half_tr + disc;
  const double lmin = det / lmax;
  if (!(lmin > 0.0) || lmax / lmin > kMaxMassCondition)
    throw Error(ErrorKind::SingularMass,
                "inertia matrix is singular or ill-conditioned");

  PlantDerivative out;
  out.xdot = state.xdot;
  out.xddot = {(d * rhs[0] - b * rhs[1]) / det, (a * rhs[1] - b * rhs[0]) / det};
  return out;
}

ArmParams apply_jump(const ArmParams& p, const JumpEvent& event,
                     const ArmParams& initial) {
  ArmParams out = p;
  switch (event.kind) {
    case JumpKind::Scale:
      out.m1 = event.value * p.m1;
      out.m2 = event.value * p.m2;
      break;
    case JumpKind::SquaredIncrement:
      out.m1 = std::sqrt(p.m1 * p.m1 + event.value * initial.m1 * initial.m1);
      out.m2 = std::sqrt(p.m2 * p.m2 + event.value * initial.m2 * initial.m2);
      break;
  }
  if (!(out.m1 > 0.0) || !(out.m2 > 0.0) || !std::isfinite(out.m1) ||
      !std::isfinite(out.m2))
    throw Error(ErrorKind::NonPositiveMass,
                "jump at t=" + std::to_string(event.time) +
                    " produces a non-positive mass");
  out.recompute();
  return out;
}

ReferenceSample reference_eval(const ReferenceSignal& ref, double t) {
  ReferenceSample out;
  for (int j = 0; j < 2; ++j) {
    const auto& r = ref.joints[j];
    const double w = r.omega;
    const double sn = std::sin(w * t);
    out.s[j] = r.offset + r.amplitude * sn;
    out.sdot[j] = r.amplitude * w * std::cos(w * t);
    out.sddot[j] = -r.amplitude * w * w * sn;
  }
  return out;
}

}  // namespace mann
