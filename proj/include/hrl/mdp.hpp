#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrl/rng.hpp"

namespace hrl {

// Flat numeric feature vector. Each environment documents its own layout.
using StateVec = std::vector<double>;

// Index into [0, action_count).
using ActionId = int;

struct MdpSpec {
  int state_dim = 1;
  int action_count = 1;
  double gamma = 0.99;
  int max_steps = 1;
  // Optional per-feature multiplier applied before features reach a
  // function approximator. Empty means identity.
  std::vector<double> feature_scale;

  void validate() const;
};

struct StepResult {
  StateVec next_state;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;  // horizon hit; bootstrappable
};

struct ExperienceTuple {
  StateVec state;
  ActionId action = 0;
  double reward = 0.0;
  StateVec next_state;
  bool terminal = false;
  bool truncated = false;
  std::optional<StateVec> goal;
};

struct Trajectory {
  StateVec initial_state;
  std::vector<ExperienceTuple> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  std::vector<double> rewards() const;
  double total_reward() const;
  // Throws ContractViolation if chaining or single-terminal invariants fail.
  void check_invariants() const;
};

// Common interface of every environment. Instances are single-threaded and
// independently owned.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const MdpSpec& spec() const = 0;
  virtual std::string name() const = 0;
  virtual StateVec reset(Rng& rng) = 0;
  // Precondition: action in [0, action_count). Violations throw
  // ContractViolation.
  virtual StepResult step(ActionId action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;

  // Goal-conditioned environments expose the active goal; the reward then
  // follows the sparse 0/-1 goal convention.
  virtual std::optional<StateVec> goal() const { return std::nullopt; }
  virtual void set_goal(const StateVec& goal);
};

using PolicyFn =
    std::function<ActionId(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng)>;

// Sum of gamma^i * rewards[i]. Throws DomainError on non-finite input or
// gamma outside [0, 1].
double discounted_return(std::span<const double> rewards, double gamma);

// Resets env, then steps it with policy until terminal or truncated. When
// goal is given it is installed on the environment after reset.
Trajectory rollout_episode(Environment& env, const PolicyFn& policy, Rng& rng,
                           const std::optional<StateVec>& goal = std::nullopt);

void check_action(ActionId action, int action_count);

}  // namespace hrl
