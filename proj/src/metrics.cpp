#include "mann/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "mann/errors.hpp"
#include "mann/simulation.hpp"

namespace mann {

double srmse(const Trace& trace, int joint, double t_start) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& rec : trace) {
    if (rec.t < t_start) continue;
    sum += rec.e[joint] * rec.e[joint];
    ++count;
  }
  if (count == 0)
    throw Error(ErrorKind::EmptyWindow,
                "no samples at or after t=" + std::to_string(t_start));
  return std::sqrt(sum / static_cast<double>(count));
}

JumpResponse jump_response(const Trace& trace, double t_jump, double window) {
  JumpResponse out;
  out.time = t_jump;
  const double t_stop = t_jump + window;
  const double half_span = 0.5 * kMovingAverageSpan;
  // Half-sample slack so grid round-off does not move window edges.
  const double eps = 1e-9;

  auto lo = std::lower_bound(trace.begin(), trace.end(), t_jump - eps,
                             [](const TraceRecord& r, double t) { return r.t < t; });
  auto hi = std::lower_bound(lo, trace.end(), t_stop - eps,
                             [](const TraceRecord& r, double t) { return r.t < t; });
  if (lo == hi) return out;

  for (int j = 0; j < 2; ++j) {
    double peak = 0.0;
    double sq = 0.0;
    // Centered moving average, truncated at the ends of the trace.
    auto a = trace.begin();
    auto b = trace.begin();
    double running = 0.0;
    for (auto it = lo; it != hi; ++it) {
      peak = std::max(peak, std::abs(it->e[j]));
      while (b != trace.end() && b->t <= it->t + half_span + eps) {
        running += b->e[j];
        ++b;
      }
      while (a != b && a->t < it->t - half_span - eps) {
        running -= a->e[j];
        ++a;
      }
      const double mean = running / static_cast<double>(b - a);
      const double dev = it->e[j] - mean;
      sq += dev * dev;
    }
    out.peak[j] = peak;
    out.oscillation[j] = std::sqrt(sq / static_cast<double>(hi - lo));
  }
  return out;
}

RunSummary summarize(const Trace& trace, const std::vector<double>& jump_times,
                     double t_cut) {
  RunSummary s;
  s.t_cut = t_cut;
  for (int j = 0; j < 2; ++j) {
    s.srmse[j] = srmse(trace, j, -1.0);
    s.srmse_after[j] =
        trace.empty() || trace.back().t < t_cut ? 0.0 : srmse(trace, j, t_cut);
  }
  for (double t : jump_times) s.jumps.push_back(jump_response(trace, t));
  return s;
}

ComparisonTable comparison_table(const std::vector<LabeledSummary>& summaries,
                                 const std::string& baseline,
                                 const std::string& proposed, bool after_cut) {
  ComparisonTable table;
  table.baseline = baseline;
  table.proposed = proposed;
  table.after_cut = after_cut;
  const ComparisonTable::Row* base_row = nullptr;
  const ComparisonTable::Row* prop_row = nullptr;
  for (const auto& ls : summaries) {
    const auto& src = after_cut ? ls.summary.srmse_after : ls.summary.srmse;
    table.rows.push_back({ls.label, {1e3 * src[0], 1e3 * src[1]}});
  }
  for (const auto& row : table.rows) {
    if (row.label == baseline) base_row = &row;
    if (row.label == proposed) prop_row = &row;
  }
  if (!base_row || !prop_row)
    throw Error(ErrorKind::MissingBaseline,
                "comparison needs rows '" + baseline + "' and '" + proposed +
                    "'");
  for (int j = 0; j < 2; ++j)
    table.reduction_pct[j] =
        reduction_percent(base_row->srmse_e3[j], prop_row->srmse_e3[j]);
  return table;
}

std::string render(const ComparisonTable& table) {
  std::size_t width = 28;
  for (const auto& row : table.rows) width = std::max(width, row.label.size() + 2);
  std::ostringstream os;
  os << "SRMSE x 10^3" << (table.after_cut ? " (t >= 10)" : "") << "\n";
  os << std::left << std::setw(static_cast<int>(width)) << "Joint angle"
     << std::right << std::setw(10) << "1" << std::setw(10) << "2" << "\n";
  os << std::fixed << std::setprecision(2);
  for (const auto& row : table.rows)
    os << std::left << std::setw(static_cast<int>(width)) << row.label
       << std::right << std::setw(10) << row.srmse_e3[0] << std::setw(10)
       << row.srmse_e3[1] << "\n";
  const std::string red = "% Reduction (I -> II)";
  os << std::left << std::setw(static_cast<int>(width)) << red << std::right
     << std::setw(9) << table.reduction_pct[0] << "%" << std::setw(9)
     << table.reduction_pct[1] << "%\n";
  os << "  I = " << table.baseline << ", II = " << table.proposed << "\n";
  return os.str();
}

}  // namespace mann
