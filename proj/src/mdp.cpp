#include "hrl/mdp.hpp"

#include <cmath>

#include "hrl/error.hpp"

namespace hrl {

void MdpSpec::validate() const {
  if (state_dim < 1) throw ValidationError("state_dim must be positive");
  if (action_count < 1) throw ValidationError("action_count must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in [0, 1]");
  if (max_steps < 1) throw ValidationError("max_steps must be positive");
  if (!feature_scale.empty() && static_cast<int>(feature_scale.size()) != state_dim)
    throw ValidationError("feature_scale length must equal state_dim");
}

std::vector<double> Trajectory::rewards() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& t : steps) out.push_back(t.reward);
  return out;
}

double Trajectory::total_reward() const {
  double sum = 0.0;
  for (const auto& t : steps) sum += t.reward;
  return sum;
}

void Trajectory::check_invariants() const {
  if (steps.empty()) return;
  if (steps.front().state != initial_state)
    throw ContractViolation("trajectory does not start at its initial state");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& t = steps[i];
    if (t.terminal && t.truncated)
      throw ContractViolation("tuple is both terminal and truncated");
    if (t.terminal && i + 1 != steps.size())
      throw ContractViolation("terminal tuple is not the last");
    if (i + 1 < steps.size() && t.next_state != steps[i + 1].state)
      throw ContractViolation("trajectory tuples do not chain");
  }
}

void Environment::set_goal(const StateVec&) {
  throw ContractViolation(name() + " is not goal-conditioned");
}

void check_action(ActionId action, int action_count) {
  if (action < 0 || action >= action_count)
    throw ContractViolation("action " + std::to_string(action) + " outside [0, " +
                            std::to_string(action_count) + ")");
}

double discounted_return(std::span<const double> rewards, double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0)
    throw DomainError("gamma must lie in [0, 1]");
  // Horner form from the back: r0 + g*(r1 + g*(r2 + ...)).
  double acc = 0.0;
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) {
    if (!std::isfinite(*it)) throw DomainError("non-finite reward");
    acc = *it + gamma * acc;
  }
  return acc;
}

Trajectory rollout_episode(Environment& env, const PolicyFn& policy, Rng& rng,
                           const std::optional<StateVec>& goal) {
  const MdpSpec& spec = env.spec();
  Trajectory traj;
  StateVec state = env.reset(rng);
  if (goal) env.set_goal(*goal);
  traj.initial_state = state;
  for (int t = 0; t < spec.max_steps; ++t) {
    const std::optional<StateVec> active_goal = env.goal();
    const ActionId action = policy(state, active_goal, rng);
    check_action(action, spec.action_count);
    StepResult res = env.step(action);
    if (!res.terminal && t + 1 == spec.max_steps) res.truncated = true;
    ExperienceTuple tuple{state, action, res.reward, res.next_state, res.terminal, res.truncated,
                          active_goal};
    traj.steps.push_back(std::move(tuple));
    state = std::move(res.next_state);
    if (res.terminal || res.truncated) break;
  }
  return traj;
}

}  // namespace hrl
