#include "mann/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mann/rk4.hpp"

namespace mann {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorKind::Validation, "dt must be positive");
  if (!std::isfinite(t_end))
    throw Error(ErrorKind::Validation, "t_end must be finite");
  if (sample_every < 1)
    throw Error(ErrorKind::Validation, "sample_every must be at least 1");
  if (!(divergence_bound > 0.0))
    throw Error(ErrorKind::Validation, "divergence bound must be positive");
}

ClosedLoopDerivative closed_loop_derivative(const ClosedLoopState& state,
                                            double t, const LoopContext& ctx,
                                            const AttentionWeights& attention,
                                            LoopSignals* signals) {
  const ControllerGains& gains = *ctx.gains;
  const NetworkParams& net = state.net;
  const WorkingMemory& mem = state.memory;

  const ReferenceSample ref = reference_eval(*ctx.reference, t);
  const ErrorState err = error_state(state.plant, ref, gains);
  const VectorXd sigma = hidden_layer(net, err.x_tilde);

  VectorXd h_o = VectorXd::Zero(net.hidden());
  double memory_norm = 0.0;
  if (ctx.use_memory) {
    h_o = memory_read(mem, attention);
    memory_norm = mem.active_norm();
  }

  const Vector2d u_ad = nn_output(net, sigma, h_o);
  const Vector2d u_bl = baseline_term(err.r, gains);
  const Vector2d v = robustifying_term(net, memory_norm, err.r, gains);
  const Vector2d tau = total_torque(u_bl, u_ad, v);

  ClosedLoopDerivative d;
  d.plant = plant_derivative(*ctx.arm, state.plant, tau);
  d.net = weight_derivatives(net, err, gains);
  if (ctx.use_memory) {
    const VectorXd correction = net.W * err.r;
    d.memory = memory_write_derivative(mem, attention, sigma, correction);
    if (mem.key == KeyDesign::State)
      d.keys = key_derivative_state(mem, attention, state.plant.x);
  }

  if (signals) {
    signals->ref = ref;
    signals->err = err;
    signals->sigma = sigma;
    signals->h_o = h_o;
    signals->u_ad = u_ad;
    signals->u_bl = u_bl;
    signals->v = v;
    signals->tau = tau;
  }
  return d;
}

ClosedLoopState advance(const ClosedLoopState& y, const ClosedLoopDerivative& k,
                        double h) {
  ClosedLoopState out = y;
  out.plant.x += h * k.plant.xdot;
  out.plant.xdot += h * k.plant.xddot;
  out.net.W += h * k.net.W;
  out.net.b_w += h * k.net.b_w;
  out.net.V += h * k.net.V;
  out.net.b_v += h * k.net.b_v;
  if (k.memory.size() > 0) out.memory.h += h * k.memory;
  if (k.keys.size() > 0) out.memory.keys += h * k.keys;
  return out;
}

ClosedLoopState step_rk4(const ClosedLoopState& state, double t, double dt,
                         const LoopContext& ctx,
                         const AttentionWeights& attention) {
  return rk4_step(
      state, t, dt,
      [&](const ClosedLoopState& y, double tt) {
        return closed_loop_derivative(y, tt, ctx, attention);
      },
      [](const ClosedLoopState& y, const ClosedLoopDerivative& k, double h) {
        return advance(y, k, h);
      });
}

namespace {

WorkingMemory make_memory(const ScenarioSpec& scenario,
                          const ControllerSetup& controller) {
  WorkingMemory mem = WorkingMemory::empty(
      controller.hidden, controller.use_memory ? scenario.memory.n_max : 1,
      controller.attention.key);
  mem.c_w = scenario.memory.c_w;
  mem.c_k = scenario.memory.c_k;
  mem.theta = scenario.memory.theta;
  return mem;
}

bool finite_state(const ClosedLoopState& s) {
  return s.plant.x.allFinite() && s.plant.xdot.allFinite() &&
         s.net.W.allFinite() && s.net.V.allFinite() && s.net.b_v.allFinite() &&
         s.net.b_w.allFinite() && s.memory.h.allFinite() &&
         s.memory.keys.allFinite();
}

}  // namespace

ClosedLoopState initial_state(const ScenarioSpec& scenario,
                              const ControllerSetup& controller,
                              std::uint64_t seed) {
  ClosedLoopState state;
  const ReferenceSample ref0 = reference_eval(scenario.reference, 0.0);
  state.plant.x = ref0.s;
  state.plant.xdot = ref0.sdot;
  state.net = NetworkParams::initialize(controller.hidden, seed);
  state.memory = make_memory(scenario, controller);
  if (!controller.use_memory) return state;

  WorkingMemory& mem = state.memory;
  const bool grows = controller.attention.kind == AttentionKind::Hard &&
                     controller.attention.realloc != Reallocation::Off;
  if (grows) {
    // Single location seeded with the current hidden representation.
    const ErrorState err = error_state(state.plant, ref0, scenario.gains);
    mem.n_s = 1;
    mem.h.col(0) = mem.c_w * hidden_layer(state.net, err.x_tilde);
    if (mem.key == KeyDesign::State) mem.keys.col(0) = state.plant.x;
  } else {
    // Fixed-size baselines: every location active, contents zero, state keys
    // spread by small distinct offsets around the initial position.
    mem.n_s = mem.n_max;
    if (mem.key == KeyDesign::State)
      for (int i = 0; i < mem.n_max; ++i)
        mem.keys.col(i) = state.plant.x + Vector2d::Constant(1e-3 * i);
  }
  return state;
}

namespace {

TraceRecord make_record(double t, const ClosedLoopState& state,
                        const LoopSignals& sig, const AttentionWeights& att,
                        const ControllerSetup& controller, bool fired) {
  TraceRecord rec;
  rec.t = t;
  rec.x = state.plant.x;
  rec.xdot = state.plant.xdot;
  rec.s = sig.ref.s;
  rec.e = sig.err.e;
  rec.r = sig.err.r;
  rec.tau = sig.tau;
  rec.u_ad = sig.u_ad;
  rec.sigma = sig.sigma;
  rec.h_o = sig.h_o;
  rec.a_r_fired = fired;
  if (controller.use_memory) {
    const WorkingMemory& mem = state.memory;
    rec.n_s = mem.n_s;
    rec.i_star = att.i_star;
    rec.w_r = VectorXd::Zero(mem.n_max);
    rec.w_r.head(mem.n_s) = att.w;
    rec.dist = VectorXd::Constant(mem.n_max,
                                  std::numeric_limits<double>::quiet_NaN());
    rec.dist.head(mem.n_s) = mem.key == KeyDesign::State
                                 ? state_key_distances(mem, state.plant.x)
                                 : content_distances(mem, sig.sigma);
  }
  return rec;
}

}  // namespace

RunResult run_scenario(const ScenarioSpec& scenario,
                       const ControllerSetup& controller,
                       const SimConfig& config,
                       const StepObserver& observer) {
  scenario.validate();
  config.validate();

  RunResult result;
  result.scenario = scenario;
  result.controller = controller;
  result.config = config;

  const double t_end = config.t_end > 0.0 ? config.t_end : scenario.duration;
  const double dt = config.dt;
  const long n_steps = std::lround(t_end / dt);

  // Jumps land on the nearest grid point.
  std::multimap<long, JumpEvent> jump_at;
  std::vector<double> jump_times;
  for (const auto& ev : scenario.jumps) {
    if (!(ev.time < t_end))
      throw Error(ErrorKind::Validation,
                  "jump at t=" + std::to_string(ev.time) +
                      " is not before the end of the run");
    const long k = std::lround(ev.time / dt);
    jump_at.emplace(k, ev);
    jump_times.push_back(static_cast<double>(k) * dt);
  }

  const ArmParams initial_arm = scenario.arm;
  ArmParams arm = scenario.arm;
  LoopContext ctx{&arm, &scenario.reference, &scenario.gains,
                  controller.use_memory};

  ClosedLoopState state = initial_state(scenario, controller, config.seed);
  Trace full;  // retained for summary computation
  bool fired_since_sample = false;
  TraceRecord last;

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    for (auto [it, end] = jump_at.equal_range(k); it != end; ++it)
      arm = apply_jump(arm, it->second, initial_arm);

    AttentionWeights att;
    if (controller.use_memory) {
      const ReferenceSample ref = reference_eval(scenario.reference, t);
      const ErrorState err = error_state(state.plant, ref, scenario.gains);
      att = select_attention(state.memory, controller.attention,
                             hidden_layer(state.net, err.x_tilde),
                             state.plant.x);
    }

    const bool sample = k % config.sample_every == 0 || k == n_steps;
    if (sample) {
      LoopSignals sig;
      closed_loop_derivative(state, t, ctx, att, &sig);
      last = make_record(t, state, sig, att, controller, fired_since_sample);
      fired_since_sample = false;
      full.push_back(last);
    }
    if (k == n_steps) break;

    if (observer) {
      ClosedLoopState next = step_rk4(state, t, dt, ctx, att);
      observer(t, state, att, next);
      state = std::move(next);
    } else {
      state = step_rk4(state, t, dt, ctx, att);
    }
    const double t_next = static_cast<double>(k + 1) * dt;

    if (!finite_state(state) ||
        state.plant.x.norm() + state.plant.xdot.norm() >
            config.divergence_bound) {
      std::ostringstream msg;
      msg << "closed loop diverged at t=" << t_next << " (" << controller.label
          << ", scenario " << scenario.id << ")";
      throw DivergedError(t_next, last, msg.str());
    }

    if (controller.use_memory &&
        reallocation_enabled(state.memory, controller.attention.realloc)) {
      const ReferenceSample ref = reference_eval(scenario.reference, t_next);
      const ErrorState err = error_state(state.plant, ref, scenario.gains);
      const VectorXd sigma_now = hidden_layer(state.net, err.x_tilde);
      if (reallocation_check(state.memory, sigma_now)) {
        reallocate(state.memory, sigma_now, state.plant.x);
        ++result.reallocations;
        fired_since_sample = true;
      }
    }
  }

  result.summary = summarize(full, jump_times);
  for (const auto& rec : full)
    if (rec.t >= 5.0)
      result.max_error_after_5s = std::max(result.max_error_after_5s,
                                           rec.e.norm());
  if (config.keep_trace) result.trace = std::move(full);
  return result;
}

}  // namespace mann
