#pragma once

#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hrl/mdp.hpp"
#include "hrl/mlp.hpp"
#include "hrl/optimizer.hpp"
#include "hrl/replay.hpp"

namespace hrl {

class QFunction {
 public:
  virtual ~QFunction() = default;
  virtual int action_count() const = 0;
  // One value per action. Goal-conditioned functions expect a goal.
  virtual std::vector<double> values(const StateVec& state,
                                     const std::optional<StateVec>& goal) const = 0;
};

struct StateVecHash {
  std::size_t operator()(const StateVec& v) const noexcept;
};

// Action-value table keyed by the (state, goal) feature concatenation.
// Unvisited entries read as initial_value.
class TabularQ final : public QFunction {
 public:
  explicit TabularQ(int action_count, double initial_value = 0.0)
      : action_count_(action_count), initial_(initial_value) {}

  int action_count() const override { return action_count_; }
  std::vector<double> values(const StateVec& state,
                             const std::optional<StateVec>& goal) const override;

  double get(const StateVec& state, const std::optional<StateVec>& goal, ActionId a) const;
  void set(const StateVec& state, const std::optional<StateVec>& goal, ActionId a, double v);
  // One Q-learning step towards target with step size alpha.
  void update(const StateVec& state, const std::optional<StateVec>& goal, ActionId a,
              double target, double alpha);

  std::size_t entries() const { return table_.size(); }
  const std::unordered_map<StateVec, std::vector<double>, StateVecHash>& table() const {
    return table_;
  }
  bool all_finite() const;

 private:
  static StateVec key(const StateVec& state, const std::optional<StateVec>& goal);

  int action_count_;
  double initial_;
  std::unordered_map<StateVec, std::vector<double>, StateVecHash> table_;
};

// Q-network: input is scale .* state, followed by scale .* goal when
// goal-conditioned (goal_dim > 0).
class MlpQ final : public QFunction {
 public:
  MlpQ() = default;
  MlpQ(int state_dim, int goal_dim, int action_count, const std::vector<int>& hidden,
       std::vector<double> feature_scale = {});

  int action_count() const override { return net_.output_size(); }
  int state_dim() const { return state_dim_; }
  int goal_dim() const { return goal_dim_; }
  const std::vector<double>& feature_scale() const { return scale_; }
  std::vector<double> values(const StateVec& state,
                             const std::optional<StateVec>& goal) const override;

  // Columns are samples. goals may be empty when goal_dim == 0.
  Eigen::MatrixXd make_input(std::span<const StateVec* const> states,
                             std::span<const StateVec* const> goals) const;
  void write_input(const StateVec& state, const std::optional<StateVec>& goal,
                   Eigen::Ref<Eigen::VectorXd> column) const;

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

 private:
  int state_dim_ = 0;
  int goal_dim_ = 0;
  std::vector<double> scale_;
  Mlp net_;
};

// Greedy action with ties broken towards the lowest index.
ActionId argmax_action(const std::vector<double>& q);

// Uniform random action with probability epsilon, else greedy.
ActionId epsilon_greedy(const QFunction& q, const StateVec& state,
                        const std::optional<StateVec>& goal, double epsilon, Rng& rng);

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  long decay_steps = 100000;

  // Linear interpolation from start to end over decay_steps, then flat.
  double value(long step) const;
  void validate() const;
  bool operator==(const EpsilonSchedule&) const = default;
};

// reward if terminal, else reward + gamma * max_a target(next_state, a).
// Truncated transitions bootstrap.
double bellman_target(double reward, const StateVec& next_state, bool terminal, bool truncated,
                      const QFunction& target, double gamma,
                      const std::optional<StateVec>& goal = std::nullopt);

struct TdLoss {
  double loss = 0.0;
  Eigen::VectorXd grad;  // with respect to the online network only
};

// Mean squared TD error over the batch.
TdLoss td_loss(std::span<const ExperienceTuple* const> batch, const MlpQ& online,
               const MlpQ& target, double gamma);
TdLoss td_loss(std::span<const ExperienceTuple> batch, const MlpQ& online, const MlpQ& target,
               double gamma);

struct DqnConfig {
  double learning_rate = 0.0007;
  int batch_size = 32;
  double gamma = 0.99;
  int target_sync_interval = 500;
  EpsilonSchedule epsilon;
  int buffer_capacity = 100000;
  int train_every = 1;        // environment steps per gradient update
  int learning_starts = 500;  // buffer size before updates begin
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double max_grad_norm = 10.0;
  std::vector<int> hidden{64, 64};
  RelabelStrategy relabel = RelabelStrategy::kNone;
  double tabular_alpha = 0.1;

  void validate() const;
  bool operator==(const DqnConfig&) const = default;
};

// Online and target networks plus optimizer state.
class DqnLearner {
 public:
  DqnLearner(MlpQ online, const DqnConfig& config);

  // One gradient step on the TD loss of a uniformly sampled batch; syncs the
  // target network every target_sync_interval updates. Returns the loss.
  double update(const ReplayBuffer& buffer, Rng& rng);

  MlpQ& online() { return online_; }
  const MlpQ& online() const { return online_; }
  const MlpQ& target() const { return target_; }
  long updates() const { return updates_; }
  void sync_target() { target_ = online_; }

 private:
  DqnConfig config_;
  MlpQ online_;
  MlpQ target_;
  std::unique_ptr<Optimizer> optimizer_;
  long updates_ = 0;
};

double dqn_update(DqnLearner& learner, const ReplayBuffer& buffer, Rng& rng);

}  // namespace hrl
