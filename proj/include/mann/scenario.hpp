#pragma once
// Scenario descriptions: plant, references, jump schedule, gains and memory
// configuration, plus the built-in presets and the YAML scenario format.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mann/dynamics.hpp"
#include "mann/memory.hpp"
#include "mann/neurocontroller.hpp"

namespace mann {

struct MemoryConfig {
  double c_w = 0.75;
  double theta = 0.2;
  int n_max = 5;
  double c_k = 1.0;

  bool operator==(const MemoryConfig&) const = default;
};

struct ScenarioSpec {
  std::string id = "1";
  ArmParams arm = ArmParams::from_masses(0.8, 2.3, 1.0, 1.0);
  ReferenceSignal reference;
  JumpSchedule jumps;
  ControllerGains gains;
  MemoryConfig memory;
  int hidden = 10;             // MANN hidden width
  int hidden_equivalent = 14;  // parameter-matched plain NN width
  AttentionConfig attention;   // key design, reallocation mode, soft beta
  double duration = 330.0;
  std::uint64_t seed = 1;

  void validate() const;
};

bool operator==(const ScenarioSpec& a, const ScenarioSpec& b);

inline constexpr int kPresetCount = 7;

// Presets 0..6: 0 is the reallocation case study, 1..6 the comparison
// scenarios.
ScenarioSpec preset(int id);

// Mass-scaling sequence shared by scenarios 1, 2, 4, 5 and 6.
JumpSchedule periodic_scaling_schedule();
// m_i^2 += fraction * m_i(0)^2 every `period` seconds, strictly before t_end.
JumpSchedule squared_increment_schedule(double period, double fraction,
                                        double t_end);

// YAML scenario document. A `base` key picks the preset that supplies
// defaults (preset 1 when absent).
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario_file(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioSpec& spec);

nlohmann::json to_json(const ScenarioSpec& spec);

enum class ControllerKind { NN, MannSoft, MannHard, MannProposed };

struct ControllerSetup {
  ControllerKind kind = ControllerKind::MannProposed;
  int hidden = 10;
  bool use_memory = true;
  AttentionConfig attention;
  std::string label;
};

std::string controller_id(ControllerKind kind);
std::optional<ControllerKind> parse_controller_id(const std::string& id);

// Fills in width, attention and reallocation for one controller variant.
// Overrides apply to the MANN variants only.
ControllerSetup make_controller(const ScenarioSpec& spec, ControllerKind kind,
                                std::optional<KeyDesign> key = std::nullopt,
                                std::optional<Reallocation> realloc =
                                    std::nullopt);

nlohmann::json to_json(const ControllerSetup& setup);

}  // namespace mann
