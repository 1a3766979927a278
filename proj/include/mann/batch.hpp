#pragma once
// Batches of independent closed-loop runs. The serial runner is the
// reference; the OpenMP runner must reproduce it bit for bit.

#include <optional>
#include <string>
#include <vector>

#include "mann/simulation.hpp"

namespace mann {

struct RunRequest {
  ScenarioSpec scenario;
  ControllerSetup controller;
  SimConfig config;
};

struct RunOutcome {
  std::optional<RunResult> result;
  std::optional<ErrorKind> error;
  std::string message;
  double failure_time = 0.0;  // Diverged only

  bool ok() const { return result.has_value(); }
};

RunOutcome run_one(const RunRequest& request);

std::vector<RunOutcome> run_batch_serial(const std::vector<RunRequest>& requests);

// threads <= 0 uses the OpenMP default.
std::vector<RunOutcome> run_batch_parallel(
    const std::vector<RunRequest>& requests, int threads = 0);

}  // namespace mann
