#include "mann/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mann/rk4.hpp"
#include "mann/simulation.hpp"

namespace mann {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult skew_symmetry() {
  const ArmParams p = ArmParams::from_masses(0.8, 2.3, 1.0, 1.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> vel(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vector2d x(ang(rng), ang(rng));
    const Vector2d xd(vel(rng), vel(rng));
    const Matrix2d s = mass_matrix_rate(p, x, xd) - 2.0 * coriolis_matrix(p, x, xd);
    worst = std::max(worst, (s + s.transpose()).cwiseAbs().maxCoeff());
  }
  return {"skew symmetry of dM/dt - 2 Vm", worst <= 1e-10, "max |S + S^T| = " + fmt(worst)};
}

CheckResult sigma_prime_gradient() {
  std::mt19937_64 rng(5);
  NetworkParams net = NetworkParams::initialize(10, 3, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd x(kInputSize);
    for (int i = 0; i < kInputSize; ++i) x[i] = g(rng);
    const MatrixXd dp = sigma_hat_prime(net, x);
    const double h = 1e-5;
    for (int j = 0; j < net.hidden(); ++j) {
      NetworkParams up = net, dn = net;
      up.b_v[j] += h;
      dn.b_v[j] -= h;
      const double fd = (hidden_layer(up, x)[j] - hidden_layer(dn, x)[j]) / (2 * h);
      worst = std::max(worst, std::abs(fd - dp(j, j)));
    }
  }
  return {"sigma_hat' matches finite differences", worst <= 1e-6, "max error = " + fmt(worst)};
}

double rk4_decay(double dt, double t_end) {
  double y = 1.0;
  const long n = std::lround(t_end / dt);
  for (long k = 0; k < n; ++k)
    y = rk4_step(y, k * dt, dt, [](double v, double) { return -v; },
                 [](double v, double d, double h) { return v + h * d; });
  return y;
}

CheckResult rk4_oracle() {
  const double err = std::abs(rk4_decay(1e-3, 1.0) - std::exp(-1.0));
  return {"RK4 vs exp(-1) at dt=1e-3", err <= 1e-10, "error = " + fmt(err)};
}

// Global error of RK4 on the oscillator y'' = -w^2 y, y(0) = 1, at t = 1.
double oscillator_error(double dt) {
  constexpr double w = 20.0;
  using Vec = Eigen::Vector2d;
  Vec y(1.0, 0.0);
  const long n = std::lround(1.0 / dt);
  for (long k = 0; k < n; ++k)
    y = rk4_step(y, k * dt, dt, [](const Vec& v, double) { return Vec(v[1], -w * w * v[0]); },
                 [](const Vec& v, const Vec& d, double h) -> Vec { return v + h * d; });
  return std::hypot(y[0] - std::cos(w), y[1] + w * std::sin(w));
}

CheckResult rk4_order() {
  // Least-squares slope of log(error) against log(dt).
  const double dts[] = {4e-3, 2e-3, 1e-3};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double dt : dts) {
    const double lx = std::log(dt), ly = std::log(oscillator_error(dt));
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double order = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  return {"RK4 convergence order", order >= 3.9, "order = " + std::to_string(order)};
}

CheckResult write_equilibrium() {
  WorkingMemory mem = WorkingMemory::empty(3, 1, KeyDesign::Representation);
  const VectorXd h_w = (VectorXd(3) << 0.2, 0.5, 0.9).finished();
  const VectorXd zero = VectorXd::Zero(3);
  AttentionWeights w{VectorXd::Ones(1), 0};
  const double dt = 1e-3;
  for (int k = 0; k < 3000; ++k)
    mem = rk4_step(
        mem, k * dt, dt,
        [&](const WorkingMemory& m, double) {
          return memory_write_derivative(m, w, h_w, zero);
        },
        [](const WorkingMemory& m, const MatrixXd& d, double h) {
          WorkingMemory out = m;
          out.h += h * d;
          return out;
        });
  const VectorXd exact = mem.c_w * h_w * (1.0 - std::exp(-3.0));
  const double err = (mem.h.col(0) - exact).cwiseAbs().maxCoeff();
  return {"memory write approaches c_w h_w", err <= 1e-6, "error = " + fmt(err)};
}

CheckResult key_convergence() {
  WorkingMemory mem = WorkingMemory::empty(2, 1, KeyDesign::State);
  mem.c_k = 1.5;
  const Vector2d target(0.3, -0.7);
  AttentionWeights w{VectorXd::Ones(1), 0};
  const double dt = 1e-3;
  for (int k = 0; k < 2000; ++k)
    mem = rk4_step(
        mem, k * dt, dt,
        [&](const WorkingMemory& m, double) {
          return key_derivative_state(m, w, target);
        },
        [](const WorkingMemory& m, const MatrixXd& d, double h) {
          WorkingMemory out = m;
          out.keys += h * d;
          return out;
        });
  const Vector2d exact = target * (1.0 - std::exp(-1.5 * 2.0));
  const double err = (mem.keys.col(0) - exact).cwiseAbs().maxCoeff();
  return {"state key approaches the query", err <= 1e-6, "error = " + fmt(err)};
}

// Short scenario-1 run checking one-hot attention and retention of
// unattended columns at every step.
CheckResult attention_invariants() {
  ScenarioSpec spec = preset(1);
  const ControllerSetup c = make_controller(spec, ControllerKind::MannProposed);
  ArmParams arm = spec.arm;
  LoopContext ctx{&arm, &spec.reference, &spec.gains, true};
  ClosedLoopState st = initial_state(spec, c, 1);
  const double dt = 2.5e-4;
  bool ok = true;
  std::string why;
  for (long k = 0; k < 40000 && ok; ++k) {
    const double t = k * dt;
    const ReferenceSample ref = reference_eval(spec.reference, t);
    const ErrorState err = error_state(st.plant, ref, spec.gains);
    const AttentionWeights att = select_attention(
        st.memory, c.attention, hidden_layer(st.net, err.x_tilde), st.plant.x);
    if (att.w.sum() != 1.0 || (att.w.array() * (1.0 - att.w.array())).any()) {
      ok = false;
      why = "non one-hot weights at t=" + std::to_string(t);
    }
    const MatrixXd before = st.memory.h;
    st = step_rk4(st, t, dt, ctx, att);
    for (int i = 0; i < st.memory.n_s; ++i)
      if (i != att.i_star && st.memory.h.col(i) != before.col(i)) {
        ok = false;
        why = "unattended column changed at t=" + std::to_string(t);
      }
    const ReferenceSample ref2 = reference_eval(spec.reference, t + dt);
    const ErrorState err2 = error_state(st.plant, ref2, spec.gains);
    const VectorXd sigma = hidden_layer(st.net, err2.x_tilde);
    if (reallocation_enabled(st.memory, c.attention.realloc) &&
        reallocation_check(st.memory, sigma))
      reallocate(st.memory, sigma, st.plant.x);
  }
  return {"one-hot attention and retention (10 s, scenario 1)", ok,
          ok ? "all steps" : why};
}

}  // namespace

std::vector<CheckResult> run_verification() {
  return {skew_symmetry(),    sigma_prime_gradient(), rk4_oracle(),
          rk4_order(),        write_equilibrium(),    key_convergence(),
          attention_invariants()};
}

}  // namespace mann
