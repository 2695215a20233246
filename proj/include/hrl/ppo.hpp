#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hrl/dqn.hpp"
#include "hrl/optimizer.hpp"

namespace hrl {

struct PpoConfig {
  int trajectory_length = 40;
  double clip_epsilon = 0.2;
  int epochs_per_batch = 4;
  int minibatch_size = 32;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double gae_lambda = 0.95;
  double gamma = 0.99;
  double learning_rate = 0.0007;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double max_grad_norm = 10.0;
  bool normalize_advantages = true;
  std::vector<int> hidden{64, 64};

  void validate() const;
  bool operator==(const PpoConfig&) const = default;
};

// Column-wise softmax with max subtraction.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

struct LossAndGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
  double entropy = 0.0;        // mean policy entropy (actor loss only)
  double clip_fraction = 0.0;  // share of samples whose clipped term was active
};

// Clipped surrogate: -mean(min(r A, clip(r, 1-eps, 1+eps) A)) - c_ent * mean(H)
// with r = exp(log pi(a|s) - old_log_prob). inputs is input_size x batch.
LossAndGrad ppo_actor_loss(const Mlp& actor, const Eigen::MatrixXd& inputs,
                           std::span<const ActionId> actions, std::span<const double> advantages,
                           std::span<const double> old_log_probs, double clip_epsilon,
                           double entropy_coef);

// value_coef * mean((V(s) - return)^2).
LossAndGrad ppo_critic_loss(const Mlp& critic, const Eigen::MatrixXd& inputs,
                            std::span<const double> returns, double value_coef);

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantage + value, the critic's regression target
};

// Exponentially weighted multi-step advantages. values[t] = V(s_t),
// next_values[t] = V(s_{t+1}). Terminal steps do not bootstrap; terminal or
// truncated steps end the lambda chain.
Advantages compute_gae(std::span<const ExperienceTuple> segment, std::span<const double> values,
                       std::span<const double> next_values, double gamma, double lambda);

struct PpoDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  int gradient_steps = 0;
};

// Actor (logits per action) and critic (single output) over the same
// scaled state/goal input layout.
class PpoLearner {
 public:
  PpoLearner(MlpQ actor, MlpQ critic, const PpoConfig& config);

  // One PPO round over freshly collected on-policy tuples: old log-probs and
  // values come from the current parameters. Throws NumericError on NaN.
  PpoDiagnostics update(std::span<const ExperienceTuple> segment, Rng& rng);

  std::vector<double> action_probabilities(const StateVec& state,
                                           const std::optional<StateVec>& goal) const;
  ActionId sample_action(const StateVec& state, const std::optional<StateVec>& goal,
                         Rng& rng) const;
  ActionId mode_action(const StateVec& state, const std::optional<StateVec>& goal) const;

  MlpQ& actor() { return actor_; }
  const MlpQ& actor() const { return actor_; }
  MlpQ& critic() { return critic_; }
  const MlpQ& critic() const { return critic_; }
  const PpoConfig& config() const { return config_; }

 private:
  PpoConfig config_;
  MlpQ actor_;
  MlpQ critic_;
  std::unique_ptr<Optimizer> actor_opt_;
  std::unique_ptr<Optimizer> critic_opt_;
};

PpoDiagnostics ppo_update(PpoLearner& learner, std::span<const ExperienceTuple> segment,
                          Rng& rng);

}  // namespace hrl
