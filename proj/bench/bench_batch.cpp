// Times the serial reference batch runner against the OpenMP runner on the
// same set of closed-loop runs and checks that their results agree exactly.
//
//   bench_batch [t_end seconds = 20] [threads = all]

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "mann/batch.hpp"

using namespace mann;

int main(int argc, char** argv) {
  const double t_end = argc > 1 ? std::atof(argv[1]) : 20.0;
  const int threads = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();

  std::vector<RunRequest> requests;
  for (int id = 0; id < kPresetCount; ++id) {
    ScenarioSpec sc = preset(id);
    JumpSchedule kept;
    for (const auto& ev : sc.jumps)
      if (ev.time < t_end) kept.push_back(ev);
    sc.jumps = kept;
    for (auto kind : {ControllerKind::NN, ControllerKind::MannSoft,
                      ControllerKind::MannHard, ControllerKind::MannProposed}) {
      SimConfig cfg;
      cfg.t_end = t_end;
      cfg.keep_trace = false;
      requests.push_back({sc, make_controller(sc, kind), cfg});
    }
  }

  double t0 = omp_get_wtime();
  const auto serial = run_batch_serial(requests);
  const double serial_s = omp_get_wtime() - t0;

  t0 = omp_get_wtime();
  const auto parallel = run_batch_parallel(requests, threads);
  const double parallel_s = omp_get_wtime() - t0;

  int mismatches = 0;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const bool both_ok = serial[i].ok() && parallel[i].ok();
    if (!both_ok || serial[i].result->summary.srmse !=
                        parallel[i].result->summary.srmse)
      ++mismatches;
  }

  const double sim_seconds = t_end * static_cast<double>(requests.size());
  std::printf("runs            %zu x %.1f s simulated\n", requests.size(), t_end);
  std::printf("serial          %8.2f s  (%.1f sim-s per wall-s)\n", serial_s,
              sim_seconds / serial_s);
  std::printf("openmp (%2d thr) %8.2f s  (%.1f sim-s per wall-s)\n", threads,
              parallel_s, sim_seconds / parallel_s);
  std::printf("speedup         %8.2fx\n", serial_s / parallel_s);
  std::printf("mismatches      %d\n", mismatches);
  return mismatches == 0 ? 0 : 1;
}
