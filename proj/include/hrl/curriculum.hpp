#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrl/agent.hpp"
#include "hrl/subtasks.hpp"

namespace hrl {

struct CurriculumSpec {
  std::vector<SubtaskSpec> subtasks;
  std::vector<double> thresholds;
  long sample_limit = 0;  // n, counted in environment steps
  int test_window = 10;   // episodes averaged by the running-average test
  int test_interval = 25; // completed episodes between tests
  bool fresh_heads = false;

  int stage_count() const { return static_cast<int>(subtasks.size()); }
  // floor(n / m)
  long per_subtask_cap() const { return sample_limit / stage_count(); }
  void validate() const;
};

enum class SubtaskStatus { kThresholdMet, kBudgetExhausted, kAborted, kNotStarted };

std::string_view to_string(SubtaskStatus status);
SubtaskStatus status_from_string(std::string_view name);

struct CurvePoint {
  long cumulative_samples = 0;  // across the whole run, at episode end
  double episode_reward = 0.0;
  double running_average = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

struct SubtaskReport {
  std::string name;
  double threshold = 0.0;
  long sample_cap = 0;
  long samples_used = 0;
  int episodes = 0;
  int tests = 0;
  std::optional<double> final_running_average;
  SubtaskStatus status = SubtaskStatus::kNotStarted;
  std::vector<CurvePoint> curve;
  bool operator==(const SubtaskReport&) const = default;
};

struct AdvancementEvent {
  int subtask = 0;
  long samples_used = 0;
  long cumulative_samples = 0;
  std::optional<double> running_average;
  double threshold = 0.0;
  SubtaskStatus status = SubtaskStatus::kBudgetExhausted;
  bool operator==(const AdvancementEvent&) const = default;
};

struct EvalReport {
  int episodes = 0;
  double mean_reward = 0.0;
  double max_reward = 0.0;
  double success_rate = 0.0;  // share of episodes ending in a terminal state
  std::vector<double> rewards;
  std::string checkpoint_hash;
  bool operator==(const EvalReport&) const = default;
};

struct CurriculumReport {
  std::string task;
  std::string mode;  // "curriculum" or "flat"
  std::string learner;
  std::uint64_t seed = 0;
  long sample_limit = 0;
  long total_samples = 0;
  std::vector<SubtaskReport> subtasks;
  std::vector<AdvancementEvent> events;
  bool aborted = false;
  std::string abort_reason;
  std::optional<EvalReport> final_eval;
  bool operator==(const CurriculumReport&) const = default;
};

// Steps an environment under an agent's behaviour policy, carrying an
// unfinished episode over to the next call.
class EpisodeCollector {
 public:
  explicit EpisodeCollector(std::unique_ptr<Environment> env);

  struct Batch {
    std::vector<ExperienceTuple> experiences;
    std::vector<double> episode_rewards;       // completed episodes, in order
    std::vector<std::size_t> episode_ends;     // index into experiences after each episode
  };

  Batch collect(Agent& agent, long budget, Rng& rng);
  Environment& env() { return *env_; }

 private:
  std::unique_ptr<Environment> env_;
  StateVec state_;
  bool in_episode_ = false;
  double episode_reward_ = 0.0;
  int episode_steps_ = 0;
};

// At most budget environment steps; |experiences| equals steps consumed.
EpisodeCollector::Batch explore_collect(EpisodeCollector& collector, Agent& agent, long budget,
                                        Rng& rng);

// Mean of the last `window` episode rewards (all of them when fewer);
// nullopt when no episode has finished.
std::optional<double> test_running_average(std::span<const double> episode_rewards, int window);

using EnvFactory = std::function<std::unique_ptr<Environment>(const SubtaskSpec&, int stage)>;

EnvFactory default_env_factory(double gamma = 0.99);

// Sequential subtask training: per subtask, collect a chunk, learn, and
// every test_interval episodes compare the running average to the
// threshold; advance on success or once floor(n/m) samples are spent.
CurriculumReport run_curriculum(const CurriculumSpec& spec, Agent& agent, Rng& rng,
                                const EnvFactory& factory = default_env_factory());

// The same loop on the final task alone with the whole budget and no early
// advancement.
CurriculumReport run_flat_baseline(const SubtaskSpec& final_task, Agent& agent, long sample_limit,
                                   Rng& rng, int test_window = 10, int test_interval = 25,
                                   const EnvFactory& factory = default_env_factory());

// Greedy rollouts of agent on a fresh environment.
EvalReport evaluate(const Agent& agent, Environment& env, int episodes, Rng& rng);

}  // namespace hrl
