#pragma once

#include <iosfwd>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hrl/dqn.hpp"
#include "hrl/gridnav.hpp"
#include "hrl/minibuild.hpp"

namespace hrl {

// Deterministic model that can be expanded state by state.
class TransitionModel {
 public:
  virtual ~TransitionModel() = default;
  virtual std::vector<StateVec> initial_states() const = 0;
  virtual int action_count() const = 0;
  virtual double gamma() const = 0;
  virtual bool is_terminal(const StateVec& s) const = 0;

  struct Outcome {
    StateVec next;
    double reward = 0.0;
    bool terminal = false;
  };
  virtual Outcome transition(const StateVec& s, ActionId a) const = 0;
};

// Fixed start and goal; waypoint chains are not supported.
class GridNavModel final : public TransitionModel {
 public:
  GridNavModel(GridNavConfig config, double gamma);
  std::vector<StateVec> initial_states() const override;
  int action_count() const override { return kGridActionCount; }
  double gamma() const override { return gamma_; }
  bool is_terminal(const StateVec& s) const override;
  Outcome transition(const StateVec& s, ActionId a) const override;

 private:
  GridNavConfig config_;
  double gamma_;
};

// Tick is part of the state; states at the horizon are terminal.
class MiniBuildModel final : public TransitionModel {
 public:
  MiniBuildModel(MiniBuildConfig config, double gamma);
  std::vector<StateVec> initial_states() const override;
  int action_count() const override { return kMiniBuildActionCount; }
  double gamma() const override { return gamma_; }
  bool is_terminal(const StateVec& s) const override;
  Outcome transition(const StateVec& s, ActionId a) const override;

 private:
  MiniBuildConfig config_;
  double gamma_;
};

// Explicit MDP. Transitions are lists of (probability, next, reward) per
// (state, action), so stochastic tables are representable.
struct TabularMdp {
  struct Branch {
    int next = 0;
    double probability = 1.0;
    double reward = 0.0;
  };

  std::vector<StateVec> states;
  int action_count = 1;
  double gamma = 0.99;
  std::vector<bool> terminal;
  std::vector<std::vector<Branch>> transitions;  // index state * action_count + action
  std::unordered_map<StateVec, int, StateVecHash> index;

  int state_count() const { return static_cast<int>(states.size()); }
  const std::vector<Branch>& at(int s, ActionId a) const {
    return transitions[static_cast<std::size_t>(s) * action_count + a];
  }
  int find(const StateVec& s) const;
  int add_state(StateVec s, bool is_terminal);
  void validate() const;
};

// Breadth-first closure from the model's initial states. Terminal states
// are not expanded. Throws StateOverflowError past max_states.
TabularMdp enumerate_mdp(const TransitionModel& model, std::size_t max_states = 100000);

struct ValueIterationResult {
  std::vector<std::vector<double>> q;  // [state][action]
  std::vector<double> v;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;

  std::vector<int> greedy_policy() const;
};

// Synchronous Bellman optimality sweeps until the sup-norm change is below
// tolerance. Throws ConvergenceError past max_iterations.
ValueIterationResult value_iterate(const TabularMdp& mdp, double tolerance = 1e-8,
                                   int max_iterations = 100000);

// Exact evaluation of a stochastic policy ([state][action] probabilities)
// by iterative sweeps to tolerance.
std::vector<double> policy_return(const TabularMdp& mdp,
                                  const std::vector<std::vector<double>>& policy,
                                  double tolerance = 1e-10, int max_iterations = 1000000);
// Deterministic policy overload.
std::vector<double> policy_return(const TabularMdp& mdp, const std::vector<int>& policy,
                                  double tolerance = 1e-10, int max_iterations = 1000000);

// Greedy policy of an arbitrary Q-function over the enumerated states.
std::vector<int> greedy_policy_of(const TabularMdp& mdp, const QFunction& q,
                                  const std::optional<StateVec>& goal = std::nullopt);

// CSV: one row per state, columns state features then q_<action>, v.
void write_q_csv(std::ostream& os, const TabularMdp& mdp, const ValueIterationResult& result);

}  // namespace hrl
