#pragma once
// Tracking-error metrics and the comparison-table layout.

#include <array>
#include <string>
#include <vector>

namespace mann {

struct TraceRecord;

struct JumpResponse {
  double time = 0.0;
  std::array<double, 2> peak{};         // max |e_j| in the window
  std::array<double, 2> oscillation{};  // RMS of e_j minus its 1 s moving mean
};

struct RunSummary {
  std::array<double, 2> srmse{};        // rad, whole run
  std::array<double, 2> srmse_after{};  // rad, t >= t_cut
  double t_cut = 10.0;
  std::vector<JumpResponse> jumps;
};

inline constexpr double kJumpWindow = 5.0;
inline constexpr double kMovingAverageSpan = 1.0;

// sqrt(mean(e_joint^2)) over samples with t >= t_start. Throws EmptyWindow.
double srmse(const std::vector<TraceRecord>& trace, int joint, double t_start);

// Peak and oscillation index over [t_jump, t_jump + window).
JumpResponse jump_response(const std::vector<TraceRecord>& trace,
                           double t_jump, double window = kJumpWindow);

RunSummary summarize(const std::vector<TraceRecord>& trace,
                     const std::vector<double>& jump_times,
                     double t_cut = 10.0);

struct LabeledSummary {
  std::string label;
  RunSummary summary;
};

struct ComparisonTable {
  struct Row {
    std::string label;
    std::array<double, 2> srmse_e3{};  // SRMSE x 10^3
  };
  std::vector<Row> rows;
  std::string baseline;
  std::string proposed;
  std::array<double, 2> reduction_pct{};  // 100 (I - II) / I
  bool after_cut = false;
};

// Per-joint SRMSE x 10^3 for every row plus the reduction from `baseline`
// (I) to `proposed` (II). Throws MissingBaseline if either label is absent.
ComparisonTable comparison_table(const std::vector<LabeledSummary>& summaries,
                                 const std::string& baseline,
                                 const std::string& proposed,
                                 bool after_cut = false);

inline double reduction_percent(double baseline, double proposed) {
  return 100.0 * (baseline - proposed) / baseline;
}

std::string render(const ComparisonTable& table);

}  // namespace mann
