#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hrl/mdp.hpp"

namespace hrl {

// Sparse goal test: matches when the first goal.size() features of a state
// equal the goal within tolerance.
struct GoalPredicate {
  double tolerance = 1e-9;

  bool matches(const StateVec& achieved, const StateVec& goal) const;
};

// 0 when next_state satisfies the goal, -1 otherwise. Throws
// ContractViolation if goal and state dimensions differ.
double goal_reward(const StateVec& state, ActionId action, const StateVec& next_state,
                   const StateVec& goal, const GoalPredicate& predicate = {});

enum class RelabelStrategy { kNone, kFinal };

// Copies of every tuple with the goal replaced by the trajectory's achieved
// final state; rewards are recomputed and a tuple is terminal exactly when
// it reaches the new goal. Throws ContractViolation on an empty trajectory.
std::vector<ExperienceTuple> relabel_hindsight(const std::vector<ExperienceTuple>& trajectory,
                                               RelabelStrategy strategy,
                                               const GoalPredicate& predicate = {});

// Fixed-capacity FIFO ring of experience tuples.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(ExperienceTuple tuple);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  // Total pushes so far, including evicted tuples.
  std::uint64_t insertions() const { return insertions_; }

  // i = 0 is the oldest retained tuple.
  const ExperienceTuple& at(std::size_t i) const;
  // Sequence number (insertion order) of the i-th oldest tuple.
  std::uint64_t sequence(std::size_t i) const { return insertions_ - size() + i; }

  // batch_size draws with replacement. Throws ContractViolation when empty
  // and batch_size > 0.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
  std::vector<ExperienceTuple> sample_uniform(std::size_t batch_size, Rng& rng) const;

  // One JSON object per line, oldest first, tagged with sequence numbers.
  void dump_jsonl(std::ostream& os) const;

 private:
  std::size_t capacity_;
  std::vector<ExperienceTuple> items_;
  std::size_t head_ = 0;  // slot of the oldest tuple once full
  std::uint64_t insertions_ = 0;
};

}  // namespace hrl
