// mannctl: run, compare and verify memory-augmented NN arm controllers.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mann/batch.hpp"
#include "mann/trace_io.hpp"
#include "mann/verify.hpp"

namespace fs = std::filesystem;
using namespace mann;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadFlag:
    case ErrorKind::Parse:
    case ErrorKind::Validation: return 2;
    case ErrorKind::Diverged: return 3;
    case ErrorKind::SingularMass:
    case ErrorKind::NonPositiveMass: return 4;
    case ErrorKind::Io: return 5;
    default: return 1;
  }
}

int report(ErrorKind kind, const std::string& message) {
  nlohmann::json err{{"error", to_string(kind)}, {"message", message}};
  std::cerr << err.dump() << std::endl;
  return exit_code(kind);
}

struct CommonOptions {
  std::string scenario = "1";
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  std::optional<int> sample_every;
  std::string out;
  std::string key;
};

ScenarioSpec resolve_scenario(const std::string& arg) {
  int id = -1;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), id);
  if (ec == std::errc() && ptr == arg.data() + arg.size()) {
    if (id < 0 || id >= kPresetCount)
      throw Error(ErrorKind::BadFlag, "--scenario must be 0.." +
                                          std::to_string(kPresetCount - 1) +
                                          " or a file");
    return preset(id);
  }
  if (!fs::exists(arg))
    throw Error(ErrorKind::BadFlag, "--scenario: no preset or file named '" + arg + "'");
  return load_scenario_file(arg);
}

// Applies command-line overrides so that the echoed scenario and config
// describe exactly what ran.
std::pair<ScenarioSpec, SimConfig> resolve(const CommonOptions& o) {
  ScenarioSpec spec = resolve_scenario(o.scenario);
  SimConfig cfg;
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw Error(ErrorKind::BadFlag, "--dt must be positive");
    cfg.dt = *o.dt;
    if (!o.sample_every)
      cfg.sample_every = std::max(1, static_cast<int>(std::lround(0.01 / cfg.dt)));
  }
  if (o.sample_every) {
    if (*o.sample_every < 1) throw Error(ErrorKind::BadFlag, "--sample-every must be >= 1");
    cfg.sample_every = *o.sample_every;
  }
  if (o.t_end) {
    if (!(*o.t_end > 0.0)) throw Error(ErrorKind::BadFlag, "--t-end must be positive");
    spec.duration = *o.t_end;
    std::erase_if(spec.jumps, [&](const JumpEvent& ev) { return !(ev.time < spec.duration); });
  }
  if (o.seed) spec.seed = *o.seed;
  if (!o.key.empty()) {
    if (o.key == "state") spec.attention.key = KeyDesign::State;
    else if (o.key == "rep") spec.attention.key = KeyDesign::Representation;
    else throw Error(ErrorKind::BadFlag, "--key must be state or rep");
  }
  cfg.seed = spec.seed;
  spec.validate();
  cfg.validate();
  return {spec, cfg};
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MANN_OUT_DIR"); env && *env) return env;
  return "mann_out";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << text;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Preset 0..6 or a YAML scenario file");
  cmd->add_option("--dt", o.dt, "Integration step in seconds");
  cmd->add_option("--t-end", o.t_end, "Simulated duration in seconds");
  cmd->add_option("--seed", o.seed, "Weight-initialization seed");
  cmd->add_option("--sample-every", o.sample_every, "Trace decimation in steps");
  cmd->add_option("--key", o.key, "Key design for MANN controllers: state|rep");
  cmd->add_option("--out", o.out, "Output directory (default $MANN_OUT_DIR or ./mann_out)");
}

int do_run(const CommonOptions& o, const std::string& controller_flag,
           const std::string& realloc_flag) {
  auto [spec, cfg] = resolve(o);
  const auto kind = parse_controller_id(controller_flag);
  if (!kind)
    throw Error(ErrorKind::BadFlag, "--controller must be nn, mann-soft, mann-hard or mann-proposed");
  std::optional<Reallocation> realloc;
  if (!realloc_flag.empty()) {
    if (realloc_flag == "off") realloc = Reallocation::Off;
    else if (realloc_flag == "initial") realloc = Reallocation::InitialPhase;
    else if (realloc_flag == "always") realloc = Reallocation::Always;
    else throw Error(ErrorKind::BadFlag, "--realloc must be off, initial or always");
  }
  const ControllerSetup setup = make_controller(spec, *kind, std::nullopt, realloc);

  const RunResult result = run_scenario(spec, setup, cfg);
  const fs::path dir = output_dir(o.out);
  fs::create_directories(dir);
  write_trace_csv(result.trace, dir / "trace.csv", setup.hidden,
                  setup.use_memory ? spec.memory.n_max : 0);
  write_summary_json({result}, dir / "summary.json");
  write_text(dir / "scenario.yaml", serialize_scenario(spec));
  std::cout << result.controller.label << "  SRMSE x10^3: " << 1e3 * result.summary.srmse[0]
            << ", " << 1e3 * result.summary.srmse[1] << "  (t>=10: "
            << 1e3 * result.summary.srmse_after[0] << ", "
            << 1e3 * result.summary.srmse_after[1] << ")  reallocations: "
            << result.reallocations << "\n"
            << "wrote " << dir.string() << "\n";
  return 0;
}

int do_compare(const CommonOptions& o, bool serial, int threads) {
  auto [spec, cfg] = resolve(o);
  std::vector<RunRequest> requests;
  for (auto kind : {ControllerKind::NN, ControllerKind::MannSoft,
                    ControllerKind::MannHard, ControllerKind::MannProposed})
    requests.push_back({spec, make_controller(spec, kind), cfg});

  const auto outcomes = serial ? run_batch_serial(requests)
                               : run_batch_parallel(requests, threads);
  for (const auto& oc : outcomes)
    if (!oc.ok()) throw Error(*oc.error, oc.message);

  const fs::path dir = output_dir(o.out);
  fs::create_directories(dir);
  std::vector<RunResult> runs;
  std::vector<LabeledSummary> summaries;
  for (const auto& oc : outcomes) {
    const RunResult& r = *oc.result;
    const fs::path sub = dir / controller_id(r.controller.kind);
    fs::create_directories(sub);
    write_trace_csv(r.trace, sub / "trace.csv");
    summaries.push_back({r.controller.label, r.summary});
    runs.push_back(r);
  }
  const auto& lbl = [&](int i) { return requests[i].controller.label; };
  const ComparisonTable vs_soft = comparison_table(summaries, lbl(1), lbl(3));
  const ComparisonTable vs_hard = comparison_table(summaries, lbl(2), lbl(3), true);

  nlohmann::json doc;
  doc["scenario_id"] = spec.id;
  doc["runs"] = nlohmann::json::array();
  for (const auto& r : runs) {
    auto entry = run_entry(r);
    entry["trace"] = controller_id(r.controller.kind) + "/trace.csv";
    doc["runs"].push_back(entry);
  }
  doc["tables"] = {to_json(vs_soft), to_json(vs_hard)};
  write_json(doc, dir / "summary.json");
  const std::string text = "Scenario " + spec.id + "\n\n" + render(vs_soft) + "\n" + render(vs_hard);
  write_text(dir / "comparison.txt", text);
  std::cout << text << "\nwrote " << dir.string() << "\n";
  return 0;
}

int do_verify() {
  bool all = true;
  for (const auto& c : run_verification()) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
    all = all && c.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-augmented neural adaptive control of a two-link arm"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string controller = "mann-proposed";
  std::string realloc;
  auto* run = app.add_subcommand("run", "Simulate one controller on one scenario");
  add_common(run, run_opts);
  run->add_option("--controller", controller, "nn | mann-soft | mann-hard | mann-proposed");
  run->add_option("--realloc", realloc, "off | initial | always");

  CommonOptions cmp_opts;
  bool serial = false;
  int threads = 0;
  auto* compare = app.add_subcommand("compare", "Run all four controllers and tabulate SRMSE");
  add_common(compare, cmp_opts);
  compare->add_flag("--serial", serial, "Use the serial reference runner");
  compare->add_option("--threads", threads, "OpenMP threads (default: all)");

  auto* verify = app.add_subcommand("verify", "Run the property and oracle self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(ErrorKind::BadFlag, e.what());
  }

  try {
    if (*run) return do_run(run_opts, controller, realloc);
    if (*compare) return do_compare(cmp_opts, serial, threads);
    if (*verify) return do_verify();
  } catch (const Error& e) {
    return report(e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report(ErrorKind::Io, e.what());
  }
  return 0;
}
