#include "hrl/dqn.hpp"

#include <bit>
#include <cmath>

#include "hrl/error.hpp"

namespace hrl {

std::size_t StateVecHash::operator()(const StateVec& v) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (double x : v) {
    h ^= std::bit_cast<std::uint64_t>(x + 0.0);  // folds -0.0 into 0.0
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

StateVec TabularQ::key(const StateVec& state, const std::optional<StateVec>& goal) {
  if (!goal) return state;
  StateVec k = state;
  k.insert(k.end(), goal->begin(), goal->end());
  return k;
}

std::vector<double> TabularQ::values(const StateVec& state,
                                     const std::optional<StateVec>& goal) const {
  auto it = table_.find(key(state, goal));
  if (it == table_.end()) return std::vector<double>(action_count_, initial_);
  return it->second;
}

double TabularQ::get(const StateVec& state, const std::optional<StateVec>& goal,
                     ActionId a) const {
  check_action(a, action_count_);
  auto it = table_.find(key(state, goal));
  return it == table_.end() ? initial_ : it->second[a];
}

void TabularQ::set(const StateVec& state, const std::optional<StateVec>& goal, ActionId a,
                   double v) {
  check_action(a, action_count_);
  auto [it, inserted] =
      table_.try_emplace(key(state, goal), std::vector<double>(action_count_, initial_));
  it->second[a] = v;
}

void TabularQ::update(const StateVec& state, const std::optional<StateVec>& goal, ActionId a,
                      double target, double alpha) {
  const double q = get(state, goal, a);
  set(state, goal, a, q + alpha * (target - q));
}

bool TabularQ::all_finite() const {
  for (const auto& [k, row] : table_)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return true;
}

MlpQ::MlpQ(int state_dim, int goal_dim, int action_count, const std::vector<int>& hidden,
           std::vector<double> feature_scale)
    : state_dim_(state_dim), goal_dim_(goal_dim), scale_(std::move(feature_scale)) {
  if (goal_dim != 0 && goal_dim != state_dim)
    throw ValidationError("goals must share the state encoding");
  if (scale_.empty()) scale_.assign(state_dim, 1.0);
  if (static_cast<int>(scale_.size()) != state_dim)
    throw ValidationError("feature_scale length must equal state_dim");
  MlpLayout layout;
  layout.sizes.push_back(state_dim + goal_dim);
  layout.sizes.insert(layout.sizes.end(), hidden.begin(), hidden.end());
  layout.sizes.push_back(action_count);
  net_ = Mlp(layout);
}

void MlpQ::write_input(const StateVec& state, const std::optional<StateVec>& goal,
                       Eigen::Ref<Eigen::VectorXd> column) const {
  if (static_cast<int>(state.size()) != state_dim_)
    throw ContractViolation("state has wrong dimension for this Q-network");
  for (int i = 0; i < state_dim_; ++i) column[i] = scale_[i] * state[i];
  if (goal_dim_ > 0) {
    if (!goal || static_cast<int>(goal->size()) != goal_dim_)
      throw ContractViolation("goal missing or of wrong dimension");
    for (int i = 0; i < goal_dim_; ++i) column[state_dim_ + i] = scale_[i] * (*goal)[i];
  } else if (goal) {
    throw ContractViolation("goal given to a Q-network without goal inputs");
  }
}

Eigen::MatrixXd MlpQ::make_input(std::span<const StateVec* const> states,
                                 std::span<const StateVec* const> goals) const {
  Eigen::MatrixXd x(state_dim_ + goal_dim_, static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) {
    std::optional<StateVec> g;
    if (goal_dim_ > 0) g = *goals[j];
    write_input(*states[j], g, x.col(static_cast<Eigen::Index>(j)));
  }
  return x;
}

std::vector<double> MlpQ::values(const StateVec& state,
                                 const std::optional<StateVec>& goal) const {
  Eigen::VectorXd x(state_dim_ + goal_dim_);
  write_input(state, goal, x);
  const Eigen::MatrixXd out = net_.forward(x);
  return {out.data(), out.data() + out.size()};
}

ActionId argmax_action(const std::vector<double>& q) {
  ActionId best = 0;
  for (std::size_t a = 1; a < q.size(); ++a)
    if (q[a] > q[best]) best = static_cast<ActionId>(a);
  return best;
}

ActionId epsilon_greedy(const QFunction& q, const StateVec& state,
                        const std::optional<StateVec>& goal, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform01() < epsilon) return rng.uniform_int(q.action_count());
  return argmax_action(q.values(state, goal));
}

double EpsilonSchedule::value(long step) const {
  if (decay_steps <= 0 || step >= decay_steps) return end;
  const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
  return start + (end - start) * frac;
}

void EpsilonSchedule::validate() const {
  if (!(start >= 0.0 && start <= 1.0 && end >= 0.0 && end <= 1.0))
    throw ValidationError("epsilon values must lie in [0, 1]");
  if (end > start) throw ValidationError("eps_end must not exceed eps_start");
  if (decay_steps < 0) throw ValidationError("decay_steps must be non-negative");
}

double bellman_target(double reward, const StateVec& next_state, bool terminal, bool,
                      const QFunction& target, double gamma, const std::optional<StateVec>& goal) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
  if (terminal || gamma == 0.0) return reward;
  const auto q = target.values(next_state, goal);
  return reward + gamma * q[argmax_action(q)];
}

TdLoss td_loss(std::span<const ExperienceTuple* const> batch, const MlpQ& online,
               const MlpQ& target, double gamma) {
  if (batch.empty()) throw ContractViolation("td_loss needs a non-empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  std::vector<const StateVec*> states, next_states, goals;
  for (const ExperienceTuple* t : batch) {
    states.push_back(&t->state);
    next_states.push_back(&t->next_state);
    if (online.goal_dim() > 0) {
      if (!t->goal) throw ContractViolation("goal-conditioned loss on a tuple without goal");
      goals.push_back(&*t->goal);
    }
  }
  Mlp::Cache cache;
  const Eigen::MatrixXd q = online.net().forward(online.make_input(states, goals), &cache);
  const Eigen::MatrixXd q_next = target.net().forward(target.make_input(next_states, goals));

  TdLoss out;
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const ExperienceTuple& t = *batch[j];
    double y = t.reward;
    if (!t.terminal && gamma != 0.0) y += gamma * q_next.col(j).maxCoeff();
    const double err = q(t.action, j) - y;
    out.loss += err * err;
    upstream(t.action, j) = 2.0 * err / static_cast<double>(n);
  }
  out.loss /= static_cast<double>(n);
  out.grad = online.net().backward(cache, upstream);
  return out;
}

TdLoss td_loss(std::span<const ExperienceTuple> batch, const MlpQ& online, const MlpQ& target,
               double gamma) {
  std::vector<const ExperienceTuple*> ptrs;
  for (const auto& t : batch) ptrs.push_back(&t);
  return td_loss(std::span<const ExperienceTuple* const>(ptrs), online, target, gamma);
}

void DqnConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("dqn.learning_rate must be non-negative");
  if (batch_size < 1) throw ValidationError("dqn.batch_size must be at least 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("dqn.gamma must lie in [0, 1]");
  if (target_sync_interval < 1) throw ValidationError("dqn.target_sync_interval must be >= 1");
  if (buffer_capacity < 1) throw ValidationError("dqn.buffer_capacity must be >= 1");
  if (train_every < 1) throw ValidationError("dqn.train_every must be >= 1");
  if (learning_starts < 0) throw ValidationError("dqn.learning_starts must be >= 0");
  if (!(tabular_alpha > 0.0 && tabular_alpha <= 1.0))
    throw ValidationError("dqn.tabular_alpha must lie in (0, 1]");
  for (int h : hidden)
    if (h < 1) throw ValidationError("hidden layer widths must be positive");
  epsilon.validate();
}

DqnLearner::DqnLearner(MlpQ online, const DqnConfig& config)
    : config_(config),
      online_(std::move(online)),
      target_(online_),
      optimizer_(make_optimizer(config.optimizer, config.learning_rate)) {}

double DqnLearner::update(const ReplayBuffer& buffer, Rng& rng) {
  const auto idx = buffer.sample_indices(static_cast<std::size_t>(config_.batch_size), rng);
  std::vector<const ExperienceTuple*> batch;
  batch.reserve(idx.size());
  for (std::size_t i : idx) batch.push_back(&buffer.at(i));
  TdLoss td = td_loss(std::span<const ExperienceTuple* const>(batch), online_, target_,
                      config_.gamma);
  if (!td.grad.allFinite() || !std::isfinite(td.loss))
    throw NumericError("non-finite TD gradient");
  clip_grad_norm(td.grad, config_.max_grad_norm);
  optimizer_->step(online_.net().params(), td.grad);
  if (!online_.net().all_finite()) throw NumericError("non-finite Q-network parameters");
  if (++updates_ % config_.target_sync_interval == 0) sync_target();
  return td.loss;
}

double dqn_update(DqnLearner& learner, const ReplayBuffer& buffer, Rng& rng) {
  return learner.update(buffer, rng);
}

}  // namespace hrl
