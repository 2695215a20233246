#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "hrl/dqn.hpp"
#include "hrl/ppo.hpp"
#include "hrl/replay.hpp"

namespace hrl {

enum class LearnerKind { kTabular, kDqn, kPpo };

std::string_view to_string(LearnerKind kind);
LearnerKind learner_from_string(std::string_view name);

struct LearnStats {
  long updates = 0;
  double last_loss = 0.0;
};

// A learner as seen by the curriculum executor: an exploring behaviour
// policy, a greedy evaluation policy and an update rule over collected
// experience.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual LearnerKind kind() const = 0;
  virtual ActionId act(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng) = 0;
  virtual ActionId act_greedy(const StateVec& state,
                              const std::optional<StateVec>& goal) const = 0;
  virtual LearnStats learn(std::span<const ExperienceTuple> experiences, Rng& rng) = 0;
  // Called when the executor enters a subtask. Exploration restarts; with
  // fresh_head the output layer is re-initialised.
  virtual void begin_subtask(int index, bool fresh_head, Rng& rng);
  // Environment steps collected between learn() calls.
  virtual int collect_chunk() const = 0;
  virtual nlohmann::json checkpoint() const = 0;
};

// Shared shape information for building agents.
struct AgentShape {
  int state_dim = 1;
  int goal_dim = 0;
  int action_count = 1;
  std::vector<double> feature_scale;
};

class TabularAgent final : public Agent {
 public:
  TabularAgent(const AgentShape& shape, const DqnConfig& config);

  LearnerKind kind() const override { return LearnerKind::kTabular; }
  ActionId act(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng) override;
  ActionId act_greedy(const StateVec& state, const std::optional<StateVec>& goal) const override;
  LearnStats learn(std::span<const ExperienceTuple> experiences, Rng& rng) override;
  void begin_subtask(int index, bool fresh_head, Rng& rng) override;
  int collect_chunk() const override { return 1; }
  nlohmann::json checkpoint() const override;

  TabularQ& q() { return q_; }
  const TabularQ& q() const { return q_; }
  long steps() const { return steps_; }

 private:
  AgentShape shape_;
  DqnConfig config_;
  TabularQ q_;
  long steps_ = 0;
};

class DqnAgent final : public Agent {
 public:
  DqnAgent(const AgentShape& shape, const DqnConfig& config, Rng& init_rng);

  LearnerKind kind() const override { return LearnerKind::kDqn; }
  ActionId act(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng) override;
  ActionId act_greedy(const StateVec& state, const std::optional<StateVec>& goal) const override;
  LearnStats learn(std::span<const ExperienceTuple> experiences, Rng& rng) override;
  void begin_subtask(int index, bool fresh_head, Rng& rng) override;
  int collect_chunk() const override { return 40; }
  nlohmann::json checkpoint() const override;

  const DqnLearner& learner() const { return learner_; }
  DqnLearner& learner() { return learner_; }
  const ReplayBuffer& buffer() const { return buffer_; }

 private:
  AgentShape shape_;
  DqnConfig config_;
  DqnLearner learner_;
  ReplayBuffer buffer_;
  std::vector<ExperienceTuple> episode_;  // pending hindsight relabeling
  long steps_in_subtask_ = 0;
  long steps_seen_ = 0;
};

class PpoAgent final : public Agent {
 public:
  PpoAgent(const AgentShape& shape, const PpoConfig& config, Rng& init_rng);

  LearnerKind kind() const override { return LearnerKind::kPpo; }
  ActionId act(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng) override;
  ActionId act_greedy(const StateVec& state, const std::optional<StateVec>& goal) const override;
  LearnStats learn(std::span<const ExperienceTuple> experiences, Rng& rng) override;
  void begin_subtask(int index, bool fresh_head, Rng& rng) override;
  int collect_chunk() const override { return config_.trajectory_length; }
  nlohmann::json checkpoint() const override;

  const PpoLearner& learner() const { return learner_; }
  PpoLearner& learner() { return learner_; }

 private:
  AgentShape shape_;
  PpoConfig config_;
  PpoLearner learner_;
};

// Re-initialises the output layer of net.
void reinit_output_layer(Mlp& net, Rng& rng);

// Checkpoint JSON: {"format": "hrl-checkpoint", "version": 1, "kind": ...,
// "layout": {...}, "networks" | "table": ..., "config_hash": ...}.
inline constexpr int kCheckpointVersion = 1;

// Rebuilds a greedy-capable agent. Throws ValidationError on a bad format,
// an unknown version, or (when expected is given) a layout mismatch.
std::unique_ptr<Agent> agent_from_checkpoint(const nlohmann::json& checkpoint,
                                             const std::optional<AgentShape>& expected = {});

// FNV-1a over the serialized parameters.
std::string checkpoint_hash(const nlohmann::json& checkpoint);

nlohmann::json mlp_to_json(const MlpQ& q);
MlpQ mlp_from_json(const nlohmann::json& j);

}  // namespace hrl
