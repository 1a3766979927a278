#include "mann/trace_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mann {

namespace {

void add_vector(std::vector<std::string>& cols, const std::string& name,
                long n) {
  for (long i = 1; i <= n; ++i) cols.push_back(name + "_" + std::to_string(i));
}

void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!line.empty()) line.push_back(',');
  line += buf;
}

template <class Vec>
void put_all(std::string& line, const Vec& v) {
  for (long i = 0; i < v.size(); ++i) put(line, v[i]);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

long count_prefix(const std::vector<std::string>& cols,
                  const std::string& name) {
  long n = 0;
  for (const auto& c : cols)
    if (c.rfind(name + "_", 0) == 0 &&
        c.find_first_not_of("0123456789", name.size() + 1) == std::string::npos)
      ++n;
  return n;
}

}  // namespace

std::vector<std::string> trace_columns(const Trace& trace, int hidden,
                                       int n_max) {
  long n_hidden = hidden, n_loc = n_max;
  if (!trace.empty()) {
    n_hidden = trace.front().sigma.size();
    n_loc = trace.front().w_r.size();
  }
  std::vector<std::string> cols{"t"};
  for (const char* name : {"x", "xdot", "s", "e", "r", "tau", "u_ad"})
    add_vector(cols, name, 2);
  add_vector(cols, "sigma", n_hidden);
  add_vector(cols, "h_o", n_hidden);
  add_vector(cols, "w_r", n_loc);
  add_vector(cols, "dist", n_loc);
  cols.insert(cols.end(), {"n_s", "i_star", "a_r_fired"});
  return cols;
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path,
                     int hidden, int n_max) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  for (const auto& c : trace_columns(trace, hidden, n_max)) {
    if (!line.empty()) line.push_back(',');
    line += c;
  }
  out << line << '\n';
  for (const auto& rec : trace) {
    line.clear();
    put(line, rec.t);
    for (const Vector2d* v :
         {&rec.x, &rec.xdot, &rec.s, &rec.e, &rec.r, &rec.tau, &rec.u_ad})
      put_all(line, *v);
    put_all(line, rec.sigma);
    put_all(line, rec.h_o);
    put_all(line, rec.w_r);
    put_all(line, rec.dist);
    line += "," + std::to_string(rec.n_s) + "," + std::to_string(rec.i_star) +
            "," + (rec.a_r_fired ? "1" : "0");
    out << line << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::Parse, path.string() + ": missing header");
  const auto cols = split(line);
  const long n_hidden = count_prefix(cols, "sigma");
  const long n_loc = count_prefix(cols, "w_r");
  const std::size_t expected = 1 + 14 + 2 * n_hidden + 2 * n_loc + 3;
  if (cols.size() != expected)
    throw Error(ErrorKind::Parse, path.string() + ": unexpected header");

  Trace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = split(line);
    if (cells.size() != expected)
      throw Error(ErrorKind::Parse, path.string() + ":" +
                                        std::to_string(line_no) +
                                        ": wrong number of fields");
    std::size_t c = 0;
    auto next = [&] { return std::strtod(cells[c++].c_str(), nullptr); };
    TraceRecord rec;
    rec.t = next();
    for (Vector2d* v :
         {&rec.x, &rec.xdot, &rec.s, &rec.e, &rec.r, &rec.tau, &rec.u_ad}) {
      (*v)[0] = next();
      (*v)[1] = next();
    }
    auto read_vec = [&](VectorXd& v, long n) {
      v.resize(n);
      for (long i = 0; i < n; ++i) v[i] = next();
    };
    read_vec(rec.sigma, n_hidden);
    read_vec(rec.h_o, n_hidden);
    read_vec(rec.w_r, n_loc);
    read_vec(rec.dist, n_loc);
    rec.n_s = std::atoi(cells[c++].c_str());
    rec.i_star = std::atoi(cells[c++].c_str());
    rec.a_r_fired = cells[c++] == "1";
    trace.push_back(std::move(rec));
  }
  return trace;
}

nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& j : s.jumps)
    jumps.push_back({{"time", j.time},
                     {"peak_error", j.peak},
                     {"oscillation_index", j.oscillation}});
  return {{"srmse", s.srmse},
          {"srmse_e3", {1e3 * s.srmse[0], 1e3 * s.srmse[1]}},
          {"srmse_after", s.srmse_after},
          {"srmse_after_e3", {1e3 * s.srmse_after[0], 1e3 * s.srmse_after[1]}},
          {"t_cut", s.t_cut},
          {"jumps", jumps}};
}

nlohmann::json to_json(const SimConfig& c) {
  return {{"dt", c.dt},
          {"t_end", c.t_end},
          {"sample_every", c.sample_every},
          {"divergence_bound", c.divergence_bound},
          {"seed", c.seed}};
}

nlohmann::json to_json(const ComparisonTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"label", r.label}, {"srmse_e3", r.srmse_e3}});
  return {{"rows", rows},
          {"baseline", t.baseline},
          {"proposed", t.proposed},
          {"reduction_pct", t.reduction_pct},
          {"after_cut", t.after_cut}};
}

nlohmann::json run_entry(const RunResult& r) {
  return {{"label", r.controller.label},
          {"controller", to_json(r.controller)},
          {"scenario_id", r.scenario.id},
          {"scenario", to_json(r.scenario)},
          {"config", to_json(r.config)},
          {"summary", to_json(r.summary)},
          {"reallocations", r.reallocations},
          {"max_error_after_5s", r.max_error_after_5s}};
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_summary_json(const std::vector<RunResult>& runs,
                        const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["runs"] = nlohmann::json::array();
  for (const auto& r : runs) doc["runs"].push_back(run_entry(r));
  write_json(doc, path);
}

}  // namespace mann
