#include "hrl/replay.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hrl/error.hpp"

namespace hrl {

bool GoalPredicate::matches(const StateVec& achieved, const StateVec& goal) const {
  if (achieved.size() != goal.size())
    throw ContractViolation("goal and state dimensions differ");
  for (std::size_t i = 0; i < goal.size(); ++i)
    if (std::abs(achieved[i] - goal[i]) > tolerance) return false;
  return true;
}

double goal_reward(const StateVec& state, ActionId, const StateVec& next_state,
                   const StateVec& goal, const GoalPredicate& predicate) {
  if (state.size() != goal.size()) throw ContractViolation("goal and state dimensions differ");
  return predicate.matches(next_state, goal) ? 0.0 : -1.0;
}

std::vector<ExperienceTuple> relabel_hindsight(const std::vector<ExperienceTuple>& trajectory,
                                               RelabelStrategy strategy,
                                               const GoalPredicate& predicate) {
  if (trajectory.empty()) throw ContractViolation("cannot relabel an empty trajectory");
  if (strategy != RelabelStrategy::kFinal) return {};
  const StateVec achieved = trajectory.back().next_state;
  std::vector<ExperienceTuple> out;
  out.reserve(trajectory.size());
  for (const ExperienceTuple& t : trajectory) {
    ExperienceTuple r = t;
    r.goal = achieved;
    r.reward = goal_reward(t.state, t.action, t.next_state, achieved, predicate);
    r.terminal = r.reward == 0.0;
    r.truncated = !r.terminal && t.truncated;
    out.push_back(std::move(r));
  }
  return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ValidationError("replay capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(ExperienceTuple tuple) {
  if (!std::isfinite(tuple.reward)) throw DomainError("non-finite reward pushed to replay");
  if (items_.size() < capacity_) {
    items_.push_back(std::move(tuple));
  } else {
    items_[head_] = std::move(tuple);
    head_ = (head_ + 1) % capacity_;
  }
  ++insertions_;
}

const ExperienceTuple& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw ContractViolation("replay index out of range");
  return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0) return {};
  if (items_.empty()) throw ContractViolation("cannot sample from an empty replay buffer");
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = rng.uniform_index(items_.size());
  return idx;
}

std::vector<ExperienceTuple> ReplayBuffer::sample_uniform(std::size_t batch_size,
                                                          Rng& rng) const {
  std::vector<ExperienceTuple> out;
  for (std::size_t i : sample_indices(batch_size, rng)) out.push_back(at(i));
  return out;
}

void ReplayBuffer::dump_jsonl(std::ostream& os) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const ExperienceTuple& t = at(i);
    nlohmann::json j{{"seq", sequence(i)},         {"state", t.state},
                     {"action", t.action},         {"reward", t.reward},
                     {"next_state", t.next_state}, {"terminal", t.terminal},
                     {"truncated", t.truncated}};
    j["goal"] = t.goal ? nlohmann::json(*t.goal) : nlohmann::json(nullptr);
    os << j.dump() << '\n';
  }
}

}  // namespace hrl
