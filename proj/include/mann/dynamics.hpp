#pragma once
// Two-link planar arm: inertia, Coriolis/centripetal and gravity terms,
// the forward plant model, abrupt mass changes and analytic references.

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace mann {

using Eigen::Matrix2d;
using Eigen::Vector2d;

inline constexpr double kGravity = 9.8;

struct ArmParams {
  double m1 = 0.8;
  double m2 = 2.3;
  double l1 = 1.0;
  double l2 = 1.0;
  double phi = 0.0;
  double rho = 0.0;
  double psi = 0.0;
  double gamma = 0.0;

  // Builds a consistent parameter set from masses and lengths.
  static ArmParams from_masses(double m1, double m2, double l1, double l2);

  // Recomputes phi, rho, psi, gamma from the masses and lengths.
  void recompute();
  void validate() const;
};

struct PlantState {
  Vector2d x = Vector2d::Zero();
  Vector2d xdot = Vector2d::Zero();
};

struct PlantDerivative {
  Vector2d xdot = Vector2d::Zero();
  Vector2d xddot = Vector2d::Zero();
};

enum class JumpKind {
  Scale,             // m_i -> value * m_i
  SquaredIncrement,  // m_i^2 -> m_i^2 + value * m_i(0)^2
};

struct JumpEvent {
  double time = 0.0;
  JumpKind kind = JumpKind::Scale;
  double value = 1.0;

  bool operator==(const JumpEvent&) const = default;
};

// Ordered list of abrupt parameter changes.
using JumpSchedule = std::vector<JumpEvent>;

void validate_schedule(const JumpSchedule& schedule);

// One joint of a reference trajectory: constant `offset + amplitude*sin(omega*t)`.
// A constant signal has amplitude 0.
struct JointReference {
  double offset = 0.0;
  double amplitude = 0.0;
  double omega = 0.0;

  static JointReference constant(double c) { return {c, 0.0, 0.0}; }
  static JointReference sinusoid(double a, double w) { return {0.0, a, w}; }

  bool operator==(const JointReference&) const = default;
};

struct ReferenceSignal {
  std::array<JointReference, 2> joints;

  bool operator==(const ReferenceSignal&) const = default;
};

struct ReferenceSample {
  Vector2d s = Vector2d::Zero();
  Vector2d sdot = Vector2d::Zero();
  Vector2d sddot = Vector2d::Zero();
};

Matrix2d mass_matrix(const ArmParams& p, const Vector2d& x);
Matrix2d coriolis_matrix(const ArmParams& p, const Vector2d& x,
                         const Vector2d& xdot);
Vector2d gravity_vector(const ArmParams& p, const Vector2d& x);

// dM/dt along a trajectory, from the chain rule through x2.
Matrix2d mass_matrix_rate(const ArmParams& p, const Vector2d& x,
                          const Vector2d& xdot);

inline constexpr double kMaxMassCondition = 1e12;

// Forward dynamics M(x) xddot = tau - Vm xdot - N(x). Throws SingularMass if
// the inertia matrix is not safely invertible.
PlantDerivative plant_derivative(const ArmParams& p, const PlantState& state,
                                 const Vector2d& tau);

// `initial` holds the parameters at t = 0 (needed by squared increments).
ArmParams apply_jump(const ArmParams& p, const JumpEvent& event,
                     const ArmParams& initial);

ReferenceSample reference_eval(const ReferenceSignal& ref, double t);

}  // namespace mann
