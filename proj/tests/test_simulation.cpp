#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mann/rk4.hpp"
#include "mann/simulation.hpp"

using namespace mann;
using doctest::Approx;

namespace {

SimConfig short_config(double t_end, int sample_every = 40) {
  SimConfig c;
  c.t_end = t_end;
  c.sample_every = sample_every;
  return c;
}

ScenarioSpec without_jumps(ScenarioSpec s) {
  s.jumps.clear();
  return s;
}

}  // namespace

TEST_CASE("RK4 reproduces exp(-t)") {
  const double dt = 1e-3;
  double y = 1.0;
  for (int k = 0; k < 1000; ++k)
    y = rk4_step(
        y, k * dt, dt, [](double v, double) { return -v; },
        [](double v, double d, double h) { return v + h * d; });
  CHECK(std::abs(y - std::exp(-1.0)) <= 1e-10);
}

TEST_CASE("RK4 global error is fourth order") {
  // y'' = -w^2 y integrated to t = 1, compared with cos(w t).
  const double w = 20.0;
  using S = std::array<double, 2>;
  auto error_at = [&](double dt) {
    S y{1.0, 0.0};
    const long n = std::lround(1.0 / dt);
    for (long k = 0; k < n; ++k)
      y = rk4_step(
          y, k * dt, dt,
          [&](const S& s, double) { return S{s[1], -w * w * s[0]}; },
          [](const S& s, const S& d, double h) {
            return S{s[0] + h * d[0], s[1] + h * d[1]};
          });
    return std::abs(y[0] - std::cos(w));
  };
  const double e1 = error_at(4e-3), e2 = error_at(2e-3), e3 = error_at(1e-3);
  CHECK(std::log2(e1 / e2) >= 3.9);
  CHECK(std::log2(e2 / e3) >= 3.9);
}

TEST_CASE("zero-derivative components are untouched by a step") {
  const ScenarioSpec sc = preset(1);
  const ControllerSetup ctl = make_controller(sc, ControllerKind::MannProposed);
  ClosedLoopState st = initial_state(sc, ctl, 3);
  st.memory.n_s = 2;
  st.memory.h.col(1).setRandom();
  LoopContext ctx{&sc.arm, &sc.reference, &sc.gains, true};
  AttentionWeights att;
  att.w = Eigen::Vector2d(1, 0);
  att.i_star = 0;
  const ClosedLoopState next = step_rk4(st, 0.0, 2.5e-4, ctx, att);
  CHECK(next.memory.h.col(1) == st.memory.h.col(1));
  for (int c = 2; c < st.memory.n_max; ++c)
    CHECK(next.memory.h.col(c).isZero(0.0));
}

TEST_CASE("closed-loop derivative is pure and matches its parts") {
  const ScenarioSpec sc = preset(1);
  const ControllerSetup ctl = make_controller(sc, ControllerKind::MannHard);
  ClosedLoopState st = initial_state(sc, ctl, 2);
  st.plant.x += Vector2d(0.05, -0.02);
  st.plant.xdot = Vector2d(0.1, 0.3);
  st.net.W.setConstant(0.01);
  LoopContext ctx{&sc.arm, &sc.reference, &sc.gains, true};
  AttentionWeights att;
  att.w = VectorXd::Zero(st.memory.n_s);
  att.w[0] = 1.0;

  LoopSignals a, b;
  const auto d1 = closed_loop_derivative(st, 0.7, ctx, att, &a);
  const auto d2 = closed_loop_derivative(st, 0.7, ctx, att, &b);
  CHECK(d1.plant.xddot == d2.plant.xddot);
  CHECK(d1.net.W == d2.net.W);
  CHECK(d1.memory == d2.memory);

  // Torque composition and plant response.
  CHECK((a.tau - (-a.u_bl - a.u_ad - a.v)).cwiseAbs().maxCoeff() <= 1e-15);
  const auto pd = plant_derivative(sc.arm, st.plant, a.tau);
  CHECK((pd.xddot - d1.plant.xddot).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(d1.plant.xdot == st.plant.xdot);

  // Memory read feeds the network output.
  CHECK((a.h_o - st.memory.h.col(0)).isZero(0.0));
}

TEST_CASE("network output at the vertical equilibrium stays quiet") {
  ScenarioSpec sc = preset(1);
  sc.jumps.clear();
  sc.reference.joints[0] = JointReference::constant(std::numbers::pi / 2);
  sc.reference.joints[1] = JointReference::constant(0.0);
  const auto r = run_scenario(sc, make_controller(sc, ControllerKind::NN),
                              short_config(5.0));
  double worst = 0.0;
  for (const auto& rec : r.trace) worst = std::max(worst, rec.e.norm());
  CHECK(worst <= 1e-9);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const ScenarioSpec sc = without_jumps(preset(1));
  const ControllerSetup ctl = make_controller(sc, ControllerKind::MannProposed);
  const auto a = run_scenario(sc, ctl, short_config(2.0));
  const auto b = run_scenario(sc, ctl, short_config(2.0));
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    REQUIRE(a.trace[i].x == b.trace[i].x);
    REQUIRE(a.trace[i].tau == b.trace[i].tau);
  }
  SimConfig other = short_config(2.0);
  other.seed = 2;
  const auto c = run_scenario(sc, ctl, other);
  CHECK(c.trace.back().tau != a.trace.back().tau);
}

TEST_CASE("trace sampling and layout") {
  const ScenarioSpec sc = without_jumps(preset(1));
  const ControllerSetup ctl = make_controller(sc, ControllerKind::MannProposed);
  const auto r = run_scenario(sc, ctl, short_config(1.0, 40));
  REQUIRE(r.trace.size() == 101);
  CHECK(r.trace.front().t == 0.0);
  CHECK(r.trace.back().t == Approx(1.0));
  for (const auto& rec : r.trace) {
    REQUIRE(rec.sigma.size() == sc.hidden);
    REQUIRE(rec.w_r.size() == sc.memory.n_max);
    REQUIRE(rec.dist.size() == sc.memory.n_max);
    REQUIRE(rec.n_s >= 1);
    REQUIRE(std::abs(rec.w_r.sum() - 1.0) <= 1e-12);
    for (int i = rec.n_s; i < sc.memory.n_max; ++i)
      REQUIRE(std::isnan(rec.dist[i]));
  }
  const auto nn = run_scenario(sc, make_controller(sc, ControllerKind::NN),
                               short_config(0.1));
  CHECK(nn.trace.front().i_star == -1);
  CHECK(nn.trace.front().sigma.size() == sc.hidden_equivalent);
}

TEST_CASE("hard attention is one-hot and unattended locations retain contents") {
  const ScenarioSpec sc = without_jumps(preset(1));
  const ControllerSetup ctl = make_controller(sc, ControllerKind::MannHard);
  ClosedLoopState st = initial_state(sc, ctl, 1);
  for (int c = 0; c < st.memory.n_max; ++c)
    st.memory.h.col(c).setConstant(0.1 * (c + 1));
  LoopContext ctx{&sc.arm, &sc.reference, &sc.gains, true};
  const double dt = 2.5e-4;
  for (int k = 0; k < 4000; ++k) {
    const double t = k * dt;
    const auto err = error_state(st.plant, reference_eval(sc.reference, t),
                                 sc.gains);
    const auto att = select_attention(st.memory, ctl.attention,
                                      hidden_layer(st.net, err.x_tilde),
                                      st.plant.x);
    REQUIRE(att.w.sum() == 1.0);
    REQUIRE(att.w.maxCoeff() == 1.0);
    const ClosedLoopState next = step_rk4(st, t, dt, ctx, att);
    for (int c = 0; c < st.memory.n_s; ++c)
      if (c != att.i_star) REQUIRE(next.memory.h.col(c) == st.memory.h.col(c));
    st = next;
  }
}

TEST_CASE("jumps land on the grid and only change the future") {
  ScenarioSpec sc = without_jumps(preset(1));
  const ControllerSetup ctl = make_controller(sc, ControllerKind::MannHard);
  const auto base = run_scenario(sc, ctl, short_config(1.0, 1));
  sc.jumps = {{0.5, JumpKind::Scale, 2.0}};
  const auto jumped = run_scenario(sc, ctl, short_config(1.0, 1));
  REQUIRE(base.trace.size() == jumped.trace.size());
  const long k_jump = std::lround(0.5 / 2.5e-4);
  for (long i = 0; i <= k_jump; ++i) REQUIRE(base.trace[i].x == jumped.trace[i].x);
  // Position is continuous at the jump, acceleration is not.
  CHECK(base.trace[k_jump + 1].x != jumped.trace[k_jump + 1].x);
  CHECK((base.trace[k_jump + 1].x - jumped.trace[k_jump + 1].x).norm() < 1e-6);
  REQUIRE(jumped.summary.jumps.size() == 1);
  CHECK(jumped.summary.jumps[0].time == Approx(0.5));
}

TEST_CASE("jumps at or after the end are rejected") {
  ScenarioSpec sc = without_jumps(preset(1));
  sc.jumps = {{2.0, JumpKind::Scale, 2.0}};
  const auto ctl = make_controller(sc, ControllerKind::NN);
  try {
    run_scenario(sc, ctl, short_config(2.0));
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
  }
}

TEST_CASE("leaving the divergence bound raises an error with the last record") {
  // Tracking the reference alone gives |x| + |xdot| > 0.5 within 1 s.
  const ScenarioSpec sc = without_jumps(preset(1));
  const auto ctl = make_controller(sc, ControllerKind::NN);
  SimConfig cfg = short_config(5.0);
  cfg.divergence_bound = 0.5;
  try {
    run_scenario(sc, ctl, cfg);
    FAIL("expected divergence");
  } catch (const DivergedError& e) {
    CHECK(e.kind() == ErrorKind::Diverged);
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 1.0);
    CHECK(e.last_record().t <= e.time());
  }
}

TEST_CASE("reallocation grows memory during the initial phase only") {
  ScenarioSpec sc = preset(1);
  sc.jumps.resize(2);  // t = 5 and t = 25
  const ControllerSetup ctl = make_controller(sc, ControllerKind::MannProposed);
  const auto r = run_scenario(sc, ctl, short_config(60.0));
  int prev = 1;
  for (const auto& rec : r.trace) {
    REQUIRE(rec.n_s >= prev);
    prev = rec.n_s;
  }
  CHECK(r.reallocations == r.trace.back().n_s - 1);
}

TEST_CASE("bad simulation settings") {
  SimConfig c;
  c.dt = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SimConfig{};
  c.sample_every = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}
