#include "hrl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hrl/error.hpp"

namespace hrl {

void PpoConfig::validate() const {
  if (trajectory_length < 1) throw ValidationError("ppo.trajectory_length must be >= 1");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0))
    throw ValidationError("ppo.clip_epsilon must lie in (0, 1)");
  if (epochs_per_batch < 1) throw ValidationError("ppo.epochs_per_batch must be >= 1");
  if (minibatch_size < 1) throw ValidationError("ppo.minibatch_size must be >= 1");
  if (value_coef < 0.0 || entropy_coef < 0.0)
    throw ValidationError("ppo loss coefficients must be non-negative");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw ValidationError("ppo.gae_lambda must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("ppo.gamma must lie in [0, 1]");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("ppo.learning_rate must be non-negative");
  for (int h : hidden)
    if (h < 1) throw ValidationError("hidden layer widths must be positive");
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const double m = logits.col(j).maxCoeff();
    p.col(j) = (logits.col(j).array() - m).exp().matrix();
    p.col(j) /= p.col(j).sum();
  }
  return p;
}

LossAndGrad ppo_actor_loss(const Mlp& actor, const Eigen::MatrixXd& inputs,
                           std::span<const ActionId> actions, std::span<const double> advantages,
                           std::span<const double> old_log_probs, double clip_epsilon,
                           double entropy_coef) {
  const Eigen::Index n = inputs.cols();
  if (n == 0) throw ContractViolation("empty PPO batch");
  if (static_cast<Eigen::Index>(actions.size()) != n ||
      static_cast<Eigen::Index>(advantages.size()) != n ||
      static_cast<Eigen::Index>(old_log_probs.size()) != n)
    throw ContractViolation("PPO batch arrays disagree in length");

  Mlp::Cache cache;
  const Eigen::MatrixXd logits = actor.forward(inputs, &cache);
  const Eigen::MatrixXd probs = softmax_columns(logits);
  const double inv_n = 1.0 / static_cast<double>(n);

  LossAndGrad out;
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(logits.rows(), n);
  int clipped = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int a = actions[j];
    const double log_p = std::log(probs(a, j));
    const double ratio = std::exp(log_p - old_log_probs[j]);
    const double adv = advantages[j];
    const double unclipped = ratio * adv;
    const double clipped_term =
        std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon) * adv;
    // The gradient flows only through the unclipped branch when it is the
    // minimum.
    double dloss_dlogp = 0.0;
    if (unclipped <= clipped_term) {
      out.loss -= unclipped * inv_n;
      dloss_dlogp = -unclipped * inv_n;
    } else {
      out.loss -= clipped_term * inv_n;
      ++clipped;
    }
    const auto p = probs.col(j).array();
    const Eigen::ArrayXd log_probs = p.max(1e-300).log();
    const double h = -(p * log_probs).sum();
    out.entropy += h * inv_n;
    out.loss -= entropy_coef * h * inv_n;

    // d log p_a / d z = onehot(a) - p ;  dH / d z = -p * (log p + H)
    Eigen::ArrayXd g = -dloss_dlogp * p;
    g[a] += dloss_dlogp;
    g += entropy_coef * inv_n * p * (log_probs + h);
    upstream.col(j) = g.matrix();
  }
  out.clip_fraction = static_cast<double>(clipped) * inv_n;
  out.grad = actor.backward(cache, upstream);
  return out;
}

LossAndGrad ppo_critic_loss(const Mlp& critic, const Eigen::MatrixXd& inputs,
                            std::span<const double> returns, double value_coef) {
  const Eigen::Index n = inputs.cols();
  if (n == 0) throw ContractViolation("empty PPO batch");
  if (static_cast<Eigen::Index>(returns.size()) != n)
    throw ContractViolation("returns length differs from batch");
  if (critic.output_size() != 1) throw ContractViolation("critic must have one output");
  Mlp::Cache cache;
  const Eigen::MatrixXd v = critic.forward(inputs, &cache);
  LossAndGrad out;
  Eigen::MatrixXd upstream(1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double err = v(0, j) - returns[j];
    out.loss += value_coef * err * err / static_cast<double>(n);
    upstream(0, j) = 2.0 * value_coef * err / static_cast<double>(n);
  }
  out.grad = critic.backward(cache, upstream);
  return out;
}

Advantages compute_gae(std::span<const ExperienceTuple> segment, std::span<const double> values,
                       std::span<const double> next_values, double gamma, double lambda) {
  const std::size_t n = segment.size();
  if (values.size() != n || next_values.size() != n)
    throw ContractViolation("value arrays differ from segment length");
  Advantages out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const ExperienceTuple& t = segment[k];
    const double bootstrap = t.terminal ? 0.0 : gamma * next_values[k];
    const double delta = t.reward + bootstrap - values[k];
    const bool episode_end = t.terminal || t.truncated;
    // Segment boundaries that do not end an episode still cut the chain:
    // the next tuple (if any) belongs to the same episode only when chained.
    const bool chained = !episode_end && k + 1 < n && segment[k + 1].state == t.next_state;
    running = delta + (chained ? gamma * lambda * running : 0.0);
    out.advantages[k] = running;
    out.returns[k] = running + values[k];
  }
  return out;
}

PpoLearner::PpoLearner(MlpQ actor, MlpQ critic, const PpoConfig& config)
    : config_(config),
      actor_(std::move(actor)),
      critic_(std::move(critic)),
      actor_opt_(make_optimizer(config.optimizer, config.learning_rate)),
      critic_opt_(make_optimizer(config.optimizer, config.learning_rate)) {
  config_.validate();
  if (critic_.action_count() != 1) throw ValidationError("critic must have one output");
}

std::vector<double> PpoLearner::action_probabilities(const StateVec& state,
                                                     const std::optional<StateVec>& goal) const {
  const auto logits = actor_.values(state, goal);
  Eigen::Map<const Eigen::VectorXd> z(logits.data(), static_cast<Eigen::Index>(logits.size()));
  const Eigen::MatrixXd p = softmax_columns(z);
  return {p.data(), p.data() + p.size()};
}

ActionId PpoLearner::sample_action(const StateVec& state, const std::optional<StateVec>& goal,
                                   Rng& rng) const {
  const auto p = action_probabilities(state, goal);
  double u = rng.uniform01();
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (u < p[a]) return static_cast<ActionId>(a);
    u -= p[a];
  }
  return static_cast<ActionId>(p.size() - 1);
}

ActionId PpoLearner::mode_action(const StateVec& state,
                                 const std::optional<StateVec>& goal) const {
  return argmax_action(actor_.values(state, goal));
}

namespace {

std::vector<double> row_values(const Mlp& critic, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd v = critic.forward(x);
  return {v.data(), v.data() + v.size()};
}

void check_finite(const Eigen::VectorXd& g, const char* what) {
  if (!g.allFinite()) throw NumericError(std::string("non-finite ") + what + " gradient");
}

}  // namespace

PpoDiagnostics PpoLearner::update(std::span<const ExperienceTuple> segment, Rng& rng) {
  PpoDiagnostics diag;
  const std::size_t n = segment.size();
  if (n == 0) return diag;

  std::vector<const StateVec*> states, next_states, goals;
  for (const auto& t : segment) {
    states.push_back(&t.state);
    next_states.push_back(&t.next_state);
    if (actor_.goal_dim() > 0) goals.push_back(&*t.goal);
  }
  const Eigen::MatrixXd x = actor_.make_input(states, goals);
  const Eigen::MatrixXd x_next = critic_.make_input(next_states, goals);

  const auto values = row_values(critic_.net(), x);
  const auto next_values = row_values(critic_.net(), x_next);
  Advantages adv = compute_gae(segment, values, next_values, config_.gamma, config_.gae_lambda);

  std::vector<double> norm_adv = adv.advantages;
  if (config_.normalize_advantages && n > 1) {
    const double mean = std::accumulate(norm_adv.begin(), norm_adv.end(), 0.0) / n;
    double var = 0.0;
    for (double a : norm_adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : norm_adv) a = sd > 1e-8 ? (a - mean) / sd : 0.0;
  }

  std::vector<ActionId> actions;
  for (const auto& t : segment) actions.push_back(t.action);
  const Eigen::MatrixXd old_probs = softmax_columns(actor_.net().forward(x));
  std::vector<double> old_log_probs(n);
  for (std::size_t j = 0; j < n; ++j)
    old_log_probs[j] = std::log(old_probs(actions[j], static_cast<Eigen::Index>(j)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t mb = static_cast<std::size_t>(config_.minibatch_size);
  for (int epoch = 0; epoch < config_.epochs_per_batch; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t end = std::min(n, start + mb);
      const auto m = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd xb(x.rows(), m);
      std::vector<ActionId> ab;
      std::vector<double> advb, oldb, retb;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t j = order[k];
        xb.col(static_cast<Eigen::Index>(k - start)) = x.col(static_cast<Eigen::Index>(j));
        ab.push_back(actions[j]);
        advb.push_back(norm_adv[j]);
        oldb.push_back(old_log_probs[j]);
        retb.push_back(adv.returns[j]);
      }
      LossAndGrad pl = ppo_actor_loss(actor_.net(), xb, ab, advb, oldb, config_.clip_epsilon,
                                      config_.entropy_coef);
      LossAndGrad vl = ppo_critic_loss(critic_.net(), xb, retb, config_.value_coef);
      check_finite(pl.grad, "policy");
      check_finite(vl.grad, "value");
      clip_grad_norm(pl.grad, config_.max_grad_norm);
      clip_grad_norm(vl.grad, config_.max_grad_norm);
      actor_opt_->step(actor_.net().params(), pl.grad);
      critic_opt_->step(critic_.net().params(), vl.grad);
      diag.policy_loss = pl.loss;
      diag.value_loss = vl.loss;
      diag.entropy = pl.entropy;
      diag.clip_fraction = pl.clip_fraction;
      ++diag.gradient_steps;
    }
  }
  if (!actor_.net().all_finite() || !critic_.net().all_finite())
    throw NumericError("non-finite PPO parameters");
  return diag;
}

PpoDiagnostics ppo_update(PpoLearner& learner, std::span<const ExperienceTuple> segment,
                          Rng& rng) {
  return learner.update(segment, rng);
}

}  // namespace hrl
