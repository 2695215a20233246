#include "hrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include "hrl/error.hpp"

namespace hrl {

GridNavModel::GridNavModel(GridNavConfig config, double gamma)
    : config_(std::move(config)), gamma_(gamma) {
  config_.validate();
  if (!config_.waypoints.empty())
    throw ValidationError("GridNavModel does not support waypoint chains");
}

std::vector<StateVec> GridNavModel::initial_states() const {
  return {encode_cell(config_.start, config_)};
}

bool GridNavModel::is_terminal(const StateVec& s) const {
  return decode_cell(s, config_) == config_.goal;
}

TransitionModel::Outcome GridNavModel::transition(const StateVec& s, ActionId a) const {
  const GridNavStep step = gridnav_step(decode_cell(s, config_), a, config_.goal, config_);
  return {encode_cell(step.next, config_), step.reward, step.reached_goal};
}

MiniBuildModel::MiniBuildModel(MiniBuildConfig config, double gamma)
    : config_(std::move(config)), gamma_(gamma) {
  config_.validate();
}

std::vector<StateVec> MiniBuildModel::initial_states() const {
  MiniBuildState s = config_.initial;
  s.tick = 0;
  return {encode(s)};
}

bool MiniBuildModel::is_terminal(const StateVec& s) const {
  return decode_minibuild(s).tick >= config_.horizon;
}

TransitionModel::Outcome MiniBuildModel::transition(const StateVec& s, ActionId a) const {
  const MiniBuildTransition tr = minibuild_transition(decode_minibuild(s), a, config_);
  return {encode(tr.next), tr.reward, tr.truncated};
}

int TabularMdp::find(const StateVec& s) const {
  auto it = index.find(s);
  return it == index.end() ? -1 : it->second;
}

int TabularMdp::add_state(StateVec s, bool is_terminal) {
  const int id = state_count();
  index.emplace(s, id);
  states.push_back(std::move(s));
  terminal.push_back(is_terminal);
  transitions.resize(states.size() * static_cast<std::size_t>(action_count));
  return id;
}

void TabularMdp::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in [0, 1]");
  for (int s = 0; s < state_count(); ++s) {
    if (terminal[s]) continue;
    for (int a = 0; a < action_count; ++a) {
      const auto& br = at(s, a);
      if (br.empty()) throw ValidationError("transition table is not total");
      double p = 0.0;
      for (const auto& b : br) {
        if (b.next < 0 || b.next >= state_count()) throw ValidationError("dangling transition");
        p += b.probability;
      }
      if (std::abs(p - 1.0) > 1e-9) throw ValidationError("transition probabilities must sum to 1");
    }
  }
}

TabularMdp enumerate_mdp(const TransitionModel& model, std::size_t max_states) {
  TabularMdp mdp;
  mdp.action_count = model.action_count();
  mdp.gamma = model.gamma();
  std::deque<int> frontier;
  for (StateVec s : model.initial_states()) {
    if (mdp.find(s) >= 0) continue;
    const bool term = model.is_terminal(s);
    frontier.push_back(mdp.add_state(std::move(s), term));
  }
  while (!frontier.empty()) {
    const int s = frontier.front();
    frontier.pop_front();
    if (mdp.terminal[s]) continue;
    for (int a = 0; a < mdp.action_count; ++a) {
      TransitionModel::Outcome o = model.transition(mdp.states[s], a);
      int next = mdp.find(o.next);
      if (next < 0) {
        if (mdp.states.size() >= max_states)
          throw StateOverflowError("state enumeration exceeded " + std::to_string(max_states) +
                                   " states");
        const bool term = o.terminal || model.is_terminal(o.next);
        next = mdp.add_state(std::move(o.next), term);
        frontier.push_back(next);
      }
      mdp.transitions[static_cast<std::size_t>(s) * mdp.action_count + a] = {
          {next, 1.0, o.reward}};
    }
  }
  return mdp;
}

std::vector<int> ValueIterationResult::greedy_policy() const {
  std::vector<int> pi(q.size());
  for (std::size_t s = 0; s < q.size(); ++s) pi[s] = argmax_action(q[s]);
  return pi;
}

ValueIterationResult value_iterate(const TabularMdp& mdp, double tolerance, int max_iterations) {
  mdp.validate();
  const int n = mdp.state_count();
  const int na = mdp.action_count;
  ValueIterationResult r;
  r.v.assign(n, 0.0);
  r.q.assign(n, std::vector<double>(na, 0.0));
  std::vector<double> next_v(n, 0.0);
  for (int it = 1; it <= max_iterations; ++it) {
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
      if (mdp.terminal[s]) {
        next_v[s] = 0.0;
        continue;
      }
      double best = -INFINITY;
      for (int a = 0; a < na; ++a) {
        double q = 0.0;
        for (const auto& b : mdp.at(s, a))
          q += b.probability * (b.reward + mdp.gamma * r.v[b.next]);
        r.q[s][a] = q;
        best = std::max(best, q);
      }
      next_v[s] = best;
      residual = std::max(residual, std::abs(best - r.v[s]));
    }
    r.v.swap(next_v);
    r.iterations = it;
    r.residual = residual;
    r.residual_history.push_back(residual);
    if (residual < tolerance) return r;
  }
  throw ConvergenceError("value iteration did not converge within " +
                         std::to_string(max_iterations) + " sweeps");
}

std::vector<double> policy_return(const TabularMdp& mdp,
                                  const std::vector<std::vector<double>>& policy,
                                  double tolerance, int max_iterations) {
  mdp.validate();
  const int n = mdp.state_count();
  if (static_cast<int>(policy.size()) != n)
    throw ContractViolation("policy must cover every state");
  std::vector<double> v(n, 0.0), next(n, 0.0);
  for (int it = 0; it < max_iterations; ++it) {
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
      if (mdp.terminal[s]) {
        next[s] = 0.0;
        continue;
      }
      double acc = 0.0;
      for (int a = 0; a < mdp.action_count; ++a) {
        const double pa = policy[s][a];
        if (pa == 0.0) continue;
        for (const auto& b : mdp.at(s, a))
          acc += pa * b.probability * (b.reward + mdp.gamma * v[b.next]);
      }
      next[s] = acc;
      residual = std::max(residual, std::abs(acc - v[s]));
    }
    v.swap(next);
    if (residual < tolerance) return v;
  }
  throw ConvergenceError("policy evaluation did not converge");
}

std::vector<double> policy_return(const TabularMdp& mdp, const std::vector<int>& policy,
                                  double tolerance, int max_iterations) {
  std::vector<std::vector<double>> stochastic(policy.size(),
                                              std::vector<double>(mdp.action_count, 0.0));
  for (std::size_t s = 0; s < policy.size(); ++s) {
    check_action(policy[s], mdp.action_count);
    stochastic[s][policy[s]] = 1.0;
  }
  return policy_return(mdp, stochastic, tolerance, max_iterations);
}

std::vector<int> greedy_policy_of(const TabularMdp& mdp, const QFunction& q,
                                  const std::optional<StateVec>& goal) {
  std::vector<int> pi(mdp.state_count());
  for (int s = 0; s < mdp.state_count(); ++s) pi[s] = argmax_action(q.values(mdp.states[s], goal));
  return pi;
}

void write_q_csv(std::ostream& os, const TabularMdp& mdp, const ValueIterationResult& result) {
  const std::size_t dim = mdp.states.empty() ? 0 : mdp.states.front().size();
  for (std::size_t i = 0; i < dim; ++i) os << "s" << i << ',';
  for (int a = 0; a < mdp.action_count; ++a) os << "q_" << a << ',';
  os << "v\n";
  char buf[32];
  for (int s = 0; s < mdp.state_count(); ++s) {
    for (double x : mdp.states[s]) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      os << buf << ',';
    }
    for (double q : result.q[s]) {
      std::snprintf(buf, sizeof buf, "%.17g", q);
      os << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", result.v[s]);
    os << buf << '\n';
  }
}

}  // namespace hrl
