#include "mann/batch.hpp"

#include <omp.h>

namespace mann {

RunOutcome run_one(const RunRequest& request) {
  RunOutcome out;
  try {
    out.result = run_scenario(request.scenario, request.controller,
                              request.config);
  } catch (const DivergedError& e) {
    out.error = e.kind();
    out.message = e.what();
    out.failure_time = e.time();
  } catch (const Error& e) {
    out.error = e.kind();
    out.message = e.what();
  }
  return out;
}

std::vector<RunOutcome> run_batch_serial(
    const std::vector<RunRequest>& requests) {
  std::vector<RunOutcome> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(run_one(r));
  return out;
}

std::vector<RunOutcome> run_batch_parallel(
    const std::vector<RunRequest>& requests, int threads) {
  std::vector<RunOutcome> out(requests.size());
  const long n = static_cast<long>(requests.size());
  if (threads <= 0) threads = omp_get_max_threads();
  // Runs differ a lot in cost, so hand them out one at a time.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) out[i] = run_one(requests[i]);
  return out;
}

}  // namespace mann
