#include "mann/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "mann/errors.hpp"

namespace mann {

namespace {

bool same_arm(const ArmParams& a, const ArmParams& b) {
  return a.m1 == b.m1 && a.m2 == b.m2 && a.l1 == b.l1 && a.l2 == b.l2 &&
         a.phi == b.phi && a.rho == b.rho && a.psi == b.psi &&
         a.gamma == b.gamma;
}

bool same_gains(const ControllerGains& a, const ControllerGains& b) {
  return a.Kv == b.Kv && a.kv == b.kv && a.kappa == b.kappa && a.Cw == b.Cw &&
         a.Cv == b.Cv && a.Lambda == b.Lambda && a.Zm == b.Zm;
}

bool same_attention(const AttentionConfig& a, const AttentionConfig& b) {
  return a.kind == b.kind && a.key == b.key && a.realloc == b.realloc &&
         a.beta == b.beta;
}

}  // namespace

bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
  return a.id == b.id && same_arm(a.arm, b.arm) && a.reference == b.reference &&
         a.jumps == b.jumps && same_gains(a.gains, b.gains) &&
         a.memory == b.memory && a.hidden == b.hidden &&
         a.hidden_equivalent == b.hidden_equivalent &&
         same_attention(a.attention, b.attention) && a.duration == b.duration &&
         a.seed == b.seed;
}

void ScenarioSpec::validate() const {
  arm.validate();
  gains.validate();
  validate_schedule(jumps);
  if (!(duration > 0.0))
    throw Error(ErrorKind::Validation, "duration must be positive");
  if (hidden < 1 || hidden_equivalent < 1)
    throw Error(ErrorKind::Validation, "hidden widths must be at least 1");
  if (memory.n_max < 1)
    throw Error(ErrorKind::Validation, "memory capacity must be at least 1");
  if (!(memory.c_w > 0.0))
    throw Error(ErrorKind::Validation, "c_w must be positive");
  if (!(memory.c_k > 0.0))
    throw Error(ErrorKind::Validation, "c_k must be positive");
  if (!(memory.theta >= 0.0))
    throw Error(ErrorKind::Validation, "theta must be non-negative");
  if (!(attention.beta >= 0.0))
    throw Error(ErrorKind::Validation, "beta must be non-negative");
  for (const auto& j : reference.joints)
    if (!std::isfinite(j.offset) || !std::isfinite(j.amplitude) ||
        !std::isfinite(j.omega))
      throw Error(ErrorKind::Validation, "reference must be finite");
}

JumpSchedule periodic_scaling_schedule() {
  const double r2 = std::sqrt(2.0), r5 = std::sqrt(5.0);
  const double rh = std::sqrt(0.5), r01 = std::sqrt(0.1), r10 = std::sqrt(10.0);
  const double times[] = {5,   25,  50,  75,  90,  110, 130, 150,
                          170, 190, 210, 230, 250, 270, 290, 310};
  const double factors[] = {r2,  r2,  std::sqrt(2.5), 0.63, rh, rh,
                            r01, r10, r2,             r5,   std::sqrt(0.2),
                            rh,  r01, r10,            r2,   r5};
  JumpSchedule s;
  for (int i = 0; i < 16; ++i) s.push_back({times[i], JumpKind::Scale, factors[i]});
  return s;
}

JumpSchedule squared_increment_schedule(double period, double fraction,
                                        double t_end) {
  if (!(period > 0.0))
    throw Error(ErrorKind::Validation, "increment period must be positive");
  JumpSchedule s;
  for (int k = 1; k * period < t_end; ++k)
    s.push_back({k * period, JumpKind::SquaredIncrement, fraction});
  return s;
}

ScenarioSpec preset(int id) {
  ScenarioSpec s;
  s.id = std::to_string(id);
  const auto sine = JointReference::sinusoid(1.0, 0.5);
  const auto zero = JointReference::constant(0.0);
  s.reference.joints = {sine, zero};
  s.jumps = periodic_scaling_schedule();
  switch (id) {
    case 0:
      s.arm = ArmParams::from_masses(0.8, 2.3, 1.0, 2.0);
      s.jumps = {{10.0, JumpKind::Scale, 2.0},
                 {20.0, JumpKind::Scale, std::sqrt(2.0)},
                 {40.0, JumpKind::Scale, 1.0 / std::sqrt(2.0)}};
      s.duration = 60.0;
      break;
    case 1:
      break;
    case 2:
      s.reference.joints[1] = JointReference::constant(0.1);
      break;
    case 3:
      s.jumps = squared_increment_schedule(20.0, 0.2, s.duration);
      break;
    case 4:
      s.arm = ArmParams::from_masses(3.0, 2.0, 1.0, 1.0);
      break;
    case 5:
      s.arm = ArmParams::from_masses(0.8, 2.3, 1.0, 2.0);
      s.reference.joints = {zero, sine};
      break;
    case 6:
      s.arm = ArmParams::from_masses(0.8, 2.3, 1.0, 2.0);
      s.reference.joints = {zero, JointReference::constant(0.1)};
      s.memory.theta = 0.25;
      break;
    default:
      throw Error(ErrorKind::BadFlag,
                  "unknown scenario preset " + std::to_string(id));
  }
  return s;
}

// ---------------------------------------------------------------------------
// YAML scenario documents

namespace {

[[noreturn]] void parse_fail(const YAML::Node& node, const std::string& msg) {
  const auto mark = node.Mark();
  std::ostringstream os;
  if (!mark.is_null()) os << "line " << mark.line + 1 << ": ";
  os << msg;
  throw Error(ErrorKind::Parse, os.str());
}

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) parse_fail(node, where + " must be a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key))
      parse_fail(kv.first, "unknown field '" + key + "' in " + where);
  }
}

template <class T>
void read(const YAML::Node& parent, const char* key, T& out,
          const std::string& where) {
  const YAML::Node n = parent[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    parse_fail(n, "field '" + where + "." + key + "' has the wrong type");
  }
}

JointReference read_joint(const YAML::Node& n, const std::string& where) {
  check_keys(n, where, {"offset", "amplitude", "omega"});
  JointReference j;
  read(n, "offset", j.offset, where);
  read(n, "amplitude", j.amplitude, where);
  read(n, "omega", j.omega, where);
  return j;
}

KeyDesign parse_key(const YAML::Node& n) {
  const auto v = n.as<std::string>();
  if (v == "state") return KeyDesign::State;
  if (v == "rep" || v == "representation") return KeyDesign::Representation;
  parse_fail(n, "attention.key must be 'state' or 'rep'");
}

Reallocation parse_realloc(const YAML::Node& n) {
  const auto v = n.as<std::string>();
  if (v == "off") return Reallocation::Off;
  if (v == "initial") return Reallocation::InitialPhase;
  if (v == "always") return Reallocation::Always;
  parse_fail(n, "attention.realloc must be off, initial or always");
}

const char* key_name(KeyDesign k) {
  return k == KeyDesign::State ? "state" : "rep";
}

const char* realloc_name(Reallocation r) {
  switch (r) {
    case Reallocation::Off: return "off";
    case Reallocation::InitialPhase: return "initial";
    case Reallocation::Always: return "always";
  }
  return "off";
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(e.mark.line + 1) +
                                      ": " + e.msg);
  }
  if (!doc || doc.IsNull() || (doc.IsMap() && doc.size() == 0))
    throw Error(ErrorKind::Validation,
                "scenario document is empty: no reference signal given");
  check_keys(doc, "scenario",
             {"id", "base", "seed", "duration", "arm", "reference", "jumps",
              "squared_increments", "gains", "memory", "network", "attention"});

  int base = 1;
  read(doc, "base", base, "scenario");
  if (base < 0 || base >= kPresetCount)
    parse_fail(doc["base"], "base must name a preset 0.." +
                                std::to_string(kPresetCount - 1));
  ScenarioSpec s = preset(base);
  s.id = "file";
  read(doc, "id", s.id, "scenario");
  read(doc, "seed", s.seed, "scenario");
  read(doc, "duration", s.duration, "scenario");

  if (const auto arm = doc["arm"]) {
    check_keys(arm, "arm", {"m1", "m2", "l1", "l2"});
    read(arm, "m1", s.arm.m1, "arm");
    read(arm, "m2", s.arm.m2, "arm");
    read(arm, "l1", s.arm.l1, "arm");
    read(arm, "l2", s.arm.l2, "arm");
    s.arm.validate();
    s.arm.recompute();
  }

  if (const auto ref = doc["reference"]) {
    check_keys(ref, "reference", {"joint1", "joint2"});
    if (ref["joint1"]) s.reference.joints[0] = read_joint(ref["joint1"], "reference.joint1");
    if (ref["joint2"]) s.reference.joints[1] = read_joint(ref["joint2"], "reference.joint2");
  }

  if (const auto jumps = doc["jumps"]) {
    if (!jumps.IsSequence()) parse_fail(jumps, "jumps must be a list");
    s.jumps.clear();
    for (const auto& ev : jumps) {
      check_keys(ev, "jump", {"t", "scale", "squared_increment"});
      JumpEvent j;
      if (!ev["t"]) parse_fail(ev, "jump needs a time 't'");
      read(ev, "t", j.time, "jump");
      if (ev["scale"] && ev["squared_increment"])
        parse_fail(ev, "jump must have exactly one of scale, squared_increment");
      if (ev["scale"]) {
        j.kind = JumpKind::Scale;
        read(ev, "scale", j.value, "jump");
      } else if (ev["squared_increment"]) {
        j.kind = JumpKind::SquaredIncrement;
        read(ev, "squared_increment", j.value, "jump");
      } else {
        parse_fail(ev, "jump needs 'scale' or 'squared_increment'");
      }
      s.jumps.push_back(j);
    }
  }

  if (const auto inc = doc["squared_increments"]) {
    if (doc["jumps"])
      parse_fail(inc, "give either jumps or squared_increments, not both");
    check_keys(inc, "squared_increments", {"period", "fraction"});
    double period = 20.0, fraction = 0.2;
    read(inc, "period", period, "squared_increments");
    read(inc, "fraction", fraction, "squared_increments");
    s.jumps = squared_increment_schedule(period, fraction, s.duration);
  }

  if (const auto g = doc["gains"]) {
    check_keys(g, "gains", {"Kv", "kv", "kappa", "Cw", "Cv", "Zm", "Lambda"});
    read(g, "Kv", s.gains.Kv, "gains");
    read(g, "kv", s.gains.kv, "gains");
    read(g, "kappa", s.gains.kappa, "gains");
    read(g, "Cw", s.gains.Cw, "gains");
    read(g, "Cv", s.gains.Cv, "gains");
    read(g, "Zm", s.gains.Zm, "gains");
    if (const auto lam = g["Lambda"]) {
      std::vector<std::vector<double>> rows;
      try {
        if (lam.IsScalar()) {
          const double v = lam.as<double>();
          rows = {{v, 0.0}, {0.0, v}};
        } else {
          rows = lam.as<std::vector<std::vector<double>>>();
        }
      } catch (const YAML::Exception&) {
        parse_fail(lam, "gains.Lambda must be a scalar or a 2x2 list");
      }
      if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
        parse_fail(lam, "gains.Lambda must be 2x2");
      s.gains.Lambda << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
    }
  }

  if (const auto m = doc["memory"]) {
    check_keys(m, "memory", {"c_w", "theta", "n_max", "c_k"});
    read(m, "c_w", s.memory.c_w, "memory");
    read(m, "theta", s.memory.theta, "memory");
    read(m, "n_max", s.memory.n_max, "memory");
    read(m, "c_k", s.memory.c_k, "memory");
  }

  if (const auto n = doc["network"]) {
    check_keys(n, "network", {"hidden", "hidden_equivalent"});
    read(n, "hidden", s.hidden, "network");
    read(n, "hidden_equivalent", s.hidden_equivalent, "network");
  }

  if (const auto a = doc["attention"]) {
    check_keys(a, "attention", {"key", "realloc", "beta"});
    if (a["key"]) s.attention.key = parse_key(a["key"]);
    if (a["realloc"]) s.attention.realloc = parse_realloc(a["realloc"]);
    read(a, "beta", s.attention.beta, "attention");
  }

  s.validate();
  return s;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string serialize_scenario(const ScenarioSpec& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << s.id;
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "duration" << YAML::Value << s.duration;
  out << YAML::Key << "arm" << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "m1" << YAML::Value << s.arm.m1 << YAML::Key << "m2"
      << YAML::Value << s.arm.m2 << YAML::Key << "l1" << YAML::Value << s.arm.l1
      << YAML::Key << "l2" << YAML::Value << s.arm.l2 << YAML::EndMap;
  out << YAML::Key << "reference" << YAML::Value << YAML::BeginMap;
  for (int j = 0; j < 2; ++j) {
    const auto& r = s.reference.joints[j];
    out << YAML::Key << (j == 0 ? "joint1" : "joint2") << YAML::Value
        << YAML::Flow << YAML::BeginMap << YAML::Key << "offset" << YAML::Value
        << r.offset << YAML::Key << "amplitude" << YAML::Value << r.amplitude
        << YAML::Key << "omega" << YAML::Value << r.omega << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "jumps" << YAML::Value << YAML::BeginSeq;
  for (const auto& ev : s.jumps)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "t" << YAML::Value
        << ev.time << YAML::Key
        << (ev.kind == JumpKind::Scale ? "scale" : "squared_increment")
        << YAML::Value << ev.value << YAML::EndMap;
  out << YAML::EndSeq;
  const auto& g = s.gains;
  out << YAML::Key << "gains" << YAML::Value << YAML::BeginMap << YAML::Key
      << "Kv" << YAML::Value << g.Kv << YAML::Key << "kv" << YAML::Value << g.kv
      << YAML::Key << "kappa" << YAML::Value << g.kappa << YAML::Key << "Cw"
      << YAML::Value << g.Cw << YAML::Key << "Cv" << YAML::Value << g.Cv
      << YAML::Key << "Zm" << YAML::Value << g.Zm << YAML::Key << "Lambda"
      << YAML::Value << YAML::Flow << YAML::BeginSeq << YAML::BeginSeq
      << g.Lambda(0, 0) << g.Lambda(0, 1) << YAML::EndSeq << YAML::BeginSeq
      << g.Lambda(1, 0) << g.Lambda(1, 1) << YAML::EndSeq << YAML::EndSeq
      << YAML::EndMap;
  out << YAML::Key << "memory" << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "c_w" << YAML::Value << s.memory.c_w << YAML::Key
      << "theta" << YAML::Value << s.memory.theta << YAML::Key << "n_max"
      << YAML::Value << s.memory.n_max << YAML::Key << "c_k" << YAML::Value
      << s.memory.c_k << YAML::EndMap;
  out << YAML::Key << "network" << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "hidden" << YAML::Value << s.hidden << YAML::Key
      << "hidden_equivalent" << YAML::Value << s.hidden_equivalent
      << YAML::EndMap;
  out << YAML::Key << "attention" << YAML::Value << YAML::Flow
      << YAML::BeginMap << YAML::Key << "key" << YAML::Value
      << key_name(s.attention.key) << YAML::Key << "realloc" << YAML::Value
      << realloc_name(s.attention.realloc) << YAML::Key << "beta"
      << YAML::Value << s.attention.beta << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& ev : s.jumps)
    jumps.push_back({{"t", ev.time},
                     {"kind", ev.kind == JumpKind::Scale ? "scale"
                                                         : "squared_increment"},
                     {"value", ev.value}});
  nlohmann::json ref = nlohmann::json::array();
  for (const auto& r : s.reference.joints)
    ref.push_back(
        {{"offset", r.offset}, {"amplitude", r.amplitude}, {"omega", r.omega}});
  const auto& g = s.gains;
  return {
      {"id", s.id},
      {"seed", s.seed},
      {"duration", s.duration},
      {"arm",
       {{"m1", s.arm.m1}, {"m2", s.arm.m2}, {"l1", s.arm.l1}, {"l2", s.arm.l2},
        {"phi", s.arm.phi}, {"rho", s.arm.rho}, {"psi", s.arm.psi},
        {"gamma", s.arm.gamma}}},
      {"reference", ref},
      {"jumps", jumps},
      {"gains",
       {{"Kv", g.Kv}, {"kv", g.kv}, {"kappa", g.kappa}, {"Cw", g.Cw},
        {"Cv", g.Cv}, {"Zm", g.Zm},
        {"Lambda",
         {{g.Lambda(0, 0), g.Lambda(0, 1)}, {g.Lambda(1, 0), g.Lambda(1, 1)}}}}},
      {"memory",
       {{"c_w", s.memory.c_w}, {"theta", s.memory.theta},
        {"n_max", s.memory.n_max}, {"c_k", s.memory.c_k}}},
      {"network",
       {{"hidden", s.hidden}, {"hidden_equivalent", s.hidden_equivalent}}},
      {"attention",
       {{"key", key_name(s.attention.key)},
        {"realloc", realloc_name(s.attention.realloc)},
        {"beta", s.attention.beta}}},
  };
}

// ---------------------------------------------------------------------------
// Controller variants

std::string controller_id(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::NN: return "nn";
    case ControllerKind::MannSoft: return "mann-soft";
    case ControllerKind::MannHard: return "mann-hard";
    case ControllerKind::MannProposed: return "mann-proposed";
  }
  return "";
}

std::optional<ControllerKind> parse_controller_id(const std::string& id) {
  for (auto k : {ControllerKind::NN, ControllerKind::MannSoft,
                 ControllerKind::MannHard, ControllerKind::MannProposed})
    if (controller_id(k) == id) return k;
  return std::nullopt;
}

ControllerSetup make_controller(const ScenarioSpec& spec, ControllerKind kind,
                                std::optional<KeyDesign> key,
                                std::optional<Reallocation> realloc) {
  ControllerSetup c;
  c.kind = kind;
  c.attention = spec.attention;
  if (key) c.attention.key = *key;
  const std::string key_tag =
      c.attention.key == KeyDesign::State ? ", state key" : "";
  switch (kind) {
    case ControllerKind::NN:
      c.hidden = spec.hidden_equivalent;
      c.use_memory = false;
      c.attention.realloc = Reallocation::Off;
      c.label = "NN (N=" + std::to_string(c.hidden) + ")";
      return c;
    case ControllerKind::MannSoft:
      c.attention.kind = AttentionKind::Soft;
      c.attention.realloc = Reallocation::Off;
      c.label = "MANN soft";
      break;
    case ControllerKind::MannHard:
      c.attention.kind = AttentionKind::Hard;
      c.attention.realloc = realloc.value_or(Reallocation::Off);
      c.label = "MANN hard";
      break;
    case ControllerKind::MannProposed:
      c.attention.kind = AttentionKind::Hard;
      if (realloc == Reallocation::Off)
        throw Error(ErrorKind::BadFlag,
                    "mann-proposed needs reallocation; use mann-hard instead");
      c.attention.realloc = realloc.value_or(spec.attention.realloc);
      if (c.attention.realloc == Reallocation::Off)
        c.attention.realloc = Reallocation::InitialPhase;
      c.label = "MANN proposed";
      break;
  }
  if (realloc && kind == ControllerKind::MannSoft && *realloc != Reallocation::Off)
    throw Error(ErrorKind::BadFlag,
                "reallocation is only defined for hard attention");
  c.hidden = spec.hidden;
  c.use_memory = true;
  std::string extra = key_tag;
  if (kind == ControllerKind::MannProposed &&
      c.attention.realloc == Reallocation::Always)
    extra += ", realloc always";
  c.label += " (N=" + std::to_string(c.hidden) + extra + ")";
  return c;
}

nlohmann::json to_json(const ControllerSetup& c) {
  return {{"id", controller_id(c.kind)},
          {"hidden", c.hidden},
          {"memory", c.use_memory},
          {"attention", c.attention.kind == AttentionKind::Soft ? "soft" : "hard"},
          {"key", key_name(c.attention.key)},
          {"realloc", realloc_name(c.attention.realloc)},
          {"beta", c.attention.beta}};
}

}  // namespace mann
