#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mann/simulation.hpp"

namespace mann {

// Column names in file order. Vector fields expand to name_1 .. name_k with
// widths taken from the first record (or from `hidden` / `n_max` when the
// trace is empty).
std::vector<std::string> trace_columns(const Trace& trace, int hidden = 0,
                                       int n_max = 0);

void write_trace_csv(const Trace& trace, const std::filesystem::path& path,
                     int hidden = 0, int n_max = 0);
Trace read_trace_csv(const std::filesystem::path& path);

nlohmann::json to_json(const RunSummary& summary);
nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const ComparisonTable& table);

// One labeled entry of a summary document.
nlohmann::json run_entry(const RunResult& result);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
void write_summary_json(const std::vector<RunResult>& runs,
                        const std::filesystem::path& path);

}  // namespace mann
