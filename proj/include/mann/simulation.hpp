#pragma once
// Fixed-step closed-loop simulation of the arm, controller, network weights
// and working memory as a single augmented ODE.

#include <cstdint>
#include <functional>
#include <vector>

#include "mann/dynamics.hpp"
#include "mann/errors.hpp"
#include "mann/memory.hpp"
#include "mann/metrics.hpp"
#include "mann/neurocontroller.hpp"
#include "mann/scenario.hpp"

namespace mann {

struct SimConfig {
  double dt = 2.5e-4;
  double t_end = 0.0;  // <= 0 uses the scenario duration
  int sample_every = 40;
  double divergence_bound = 1e3;
  std::uint64_t seed = 1;
  bool keep_trace = true;

  void validate() const;
};

struct ClosedLoopState {
  PlantState plant;
  NetworkParams net;
  WorkingMemory memory;
};

struct ClosedLoopDerivative {
  PlantDerivative plant;
  NetworkDerivative net;
  MatrixXd memory;  // hidden x n_max
  MatrixXd keys;    // 2 x n_max, state keys only
};

// Quantities computed along the way by one derivative evaluation.
struct LoopSignals {
  ReferenceSample ref;
  ErrorState err;
  VectorXd sigma;
  VectorXd h_o;
  Vector2d u_ad = Vector2d::Zero();
  Vector2d u_bl = Vector2d::Zero();
  Vector2d v = Vector2d::Zero();
  Vector2d tau = Vector2d::Zero();
};

struct LoopContext {
  const ArmParams* arm = nullptr;
  const ReferenceSignal* reference = nullptr;
  const ControllerGains* gains = nullptr;
  bool use_memory = true;
};

// `attention` is held over the whole step; it is ignored when the context
// has no memory.
ClosedLoopDerivative closed_loop_derivative(const ClosedLoopState& state,
                                            double t, const LoopContext& ctx,
                                            const AttentionWeights& attention,
                                            LoopSignals* signals = nullptr);

ClosedLoopState advance(const ClosedLoopState& y, const ClosedLoopDerivative& k,
                        double h);

ClosedLoopState step_rk4(const ClosedLoopState& state, double t, double dt,
                         const LoopContext& ctx,
                         const AttentionWeights& attention);

struct TraceRecord {
  double t = 0.0;
  Vector2d x, xdot, s, e, r, tau, u_ad;
  VectorXd sigma;
  VectorXd h_o;
  VectorXd w_r;   // padded to n_max with zeros
  VectorXd dist;  // content or key distances, NaN for inactive locations
  int n_s = 0;
  int i_star = -1;
  bool a_r_fired = false;
};

using Trace = std::vector<TraceRecord>;

class DivergedError : public Error {
 public:
  DivergedError(double time, TraceRecord last, const std::string& what)
      : Error(ErrorKind::Diverged, what), time_(time), last_(std::move(last)) {}

  double time() const { return time_; }
  const TraceRecord& last_record() const { return last_; }

 private:
  double time_;
  TraceRecord last_;
};

struct RunResult {
  ScenarioSpec scenario;
  ControllerSetup controller;
  SimConfig config;
  Trace trace;  // empty when config.keep_trace is false
  RunSummary summary;
  int reallocations = 0;
  double max_error_after_5s = 0.0;  // max |e|_2 for t >= 5
};

// Initial closed-loop state: perfect initial tracking, seeded weights and
// the memory layout of the chosen controller variant.
ClosedLoopState initial_state(const ScenarioSpec& scenario,
                              const ControllerSetup& controller,
                              std::uint64_t seed);

// Called once per integration step with the state before and after it and
// the attention held over the step (empty without memory). Reallocation, if
// any, happens after the call.
using StepObserver =
    std::function<void(double t, const ClosedLoopState& before,
                       const AttentionWeights& attention,
                       const ClosedLoopState& after)>;

RunResult run_scenario(const ScenarioSpec& scenario,
                       const ControllerSetup& controller,
                       const SimConfig& config,
                       const StepObserver& observer = {});

}  // namespace mann
