#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrl/agent.hpp"
#include "hrl/curriculum.hpp"
#include "hrl/subtasks.hpp"

namespace hrl {

enum class RunMode { kCurriculum, kFlat };

std::string_view to_string(RunMode mode);
RunMode run_mode_from_string(std::string_view name);

// One training run. Omitted fields take the defaults below (learning rate
// 0.0007, batch 32, trajectory length 40, per-task thresholds); the seed has
// no default.
struct ExperimentConfig {
  Task task = Task::kBm;
  RunMode mode = RunMode::kCurriculum;
  LearnerKind learner = LearnerKind::kPpo;
  std::uint64_t seed = 0;
  long sample_limit = 500000;
  std::string output_dir = "runs";
  DqnConfig dqn;
  PpoConfig ppo;
  std::vector<double> thresholds;    // empty: task defaults
  std::vector<SubtaskSpec> subtasks; // empty: task decomposition
  int test_window = 10;
  int test_interval = 25;
  bool fresh_heads = false;
  int eval_episodes = 30;
  GridNavConfig gridnav;

  // Decomposition and thresholds with defaults resolved.
  std::vector<SubtaskSpec> resolved_subtasks() const;
  std::vector<double> resolved_thresholds() const;
  SubtaskSpec evaluation_task() const;
  CurriculumSpec curriculum_spec() const;
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

inline constexpr int kEvalEpisodes = 30;

// Reads and validates a config file. Unknown keys, type errors and invariant
// violations throw ValidationError with the file name and line.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);
// A complete config (all defaults written out) for task/mode.
ExperimentConfig default_config(Task task, RunMode mode, std::uint64_t seed);

// JSON forms. from_json functions reject unknown keys.
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MiniBuildState& s);
MiniBuildState minibuild_state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MiniBuildConfig& c);
MiniBuildConfig minibuild_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridNavConfig& c);
GridNavConfig gridnav_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SubtaskSpec& s);
SubtaskSpec subtask_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DqnConfig& c);
DqnConfig dqn_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PpoConfig& c);
PpoConfig ppo_config_from_json(const nlohmann::json& j);

std::string config_hash(const ExperimentConfig& c);

AgentShape agent_shape_for(const SubtaskSpec& task);
std::unique_ptr<Agent> make_agent(const ExperimentConfig& c, const AgentShape& shape, Rng& init_rng);

}  // namespace hrl
