#include "hrl/gridnav.hpp"

#include <cmath>
#include <cstdlib>

#include "hrl/error.hpp"

namespace hrl {

void GridNavConfig::validate() const {
  if (width < 1 || height < 1) throw ValidationError("grid dimensions must be positive");
  if (!inside(start)) throw ValidationError("start cell outside the grid");
  if (!inside(goal)) throw ValidationError("goal cell outside the grid");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    if (!inside(waypoints[i])) throw ValidationError("waypoint outside the grid");
    for (std::size_t j = 0; j < i; ++j)
      if (waypoints[i] == waypoints[j]) throw ValidationError("waypoints must be distinct");
  }
  if (max_steps < 1) throw ValidationError("max_steps must be positive");
  if (!std::isfinite(step_reward) || !std::isfinite(goal_reward))
    throw ValidationError("rewards must be finite");
  if (random_goal && width * height < 2)
    throw ValidationError("random goals need at least two cells");
}

int grid_state_dim(const GridNavConfig& c) {
  return c.encoding == GridEncoding::kCoordinates ? 2 : c.width + c.height;
}

StateVec encode_cell(Cell c, const GridNavConfig& config) {
  if (config.encoding == GridEncoding::kCoordinates)
    return {static_cast<double>(c.x), static_cast<double>(c.y)};
  StateVec v(config.width + config.height, 0.0);
  v[c.x] = 1.0;
  v[config.width + c.y] = 1.0;
  return v;
}

Cell decode_cell(const StateVec& v, const GridNavConfig& config) {
  if (static_cast<int>(v.size()) != grid_state_dim(config))
    throw ContractViolation("grid state has wrong length");
  if (config.encoding == GridEncoding::kCoordinates)
    return {static_cast<int>(v[0]), static_cast<int>(v[1])};
  Cell c{-1, -1};
  for (int i = 0; i < config.width; ++i)
    if (v[i] > 0.5) c.x = i;
  for (int j = 0; j < config.height; ++j)
    if (v[config.width + j] > 0.5) c.y = j;
  if (!config.inside(c)) throw ContractViolation("grid state does not decode to a cell");
  return c;
}

Cell move(Cell c, ActionId action, const GridNavConfig& config) {
  check_action(action, kGridActionCount);
  Cell n = c;
  switch (action) {
    case kUp: ++n.y; break;
    case kDown: --n.y; break;
    case kLeft: --n.x; break;
    case kRight: ++n.x; break;
  }
  return config.inside(n) ? n : c;
}

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

GridNavStep gridnav_step(Cell position, ActionId action, Cell active_goal,
                         const GridNavConfig& config) {
  GridNavStep out;
  out.next = move(position, action, config);
  out.reached_goal = out.next == active_goal;
  out.reward = out.reached_goal ? config.goal_reward : config.step_reward;
  return out;
}

GridNavEnv::GridNavEnv(GridNavConfig config, double gamma) : config_(std::move(config)) {
  config_.validate();
  spec_.state_dim = grid_state_dim(config_);
  spec_.action_count = kGridActionCount;
  spec_.gamma = gamma;
  spec_.max_steps = config_.max_steps;
  if (config_.encoding == GridEncoding::kCoordinates)
    spec_.feature_scale = {1.0 / std::max(1, config_.width - 1),
                           1.0 / std::max(1, config_.height - 1)};
  spec_.validate();
  position_ = config_.start;
  final_goal_ = config_.goal;
}

StateVec GridNavEnv::reset(Rng& rng) {
  position_ = config_.start;
  final_goal_ = config_.goal;
  if (config_.random_start)
    position_ = {rng.uniform_int(config_.width), rng.uniform_int(config_.height)};
  if (config_.random_goal) {
    do {
      final_goal_ = {rng.uniform_int(config_.width), rng.uniform_int(config_.height)};
    } while (final_goal_ == position_);
  }
  next_waypoint_ = 0;
  steps_ = 0;
  return encode_cell(position_, config_);
}

Cell GridNavEnv::active_goal() const {
  return next_waypoint_ < config_.waypoints.size() ? config_.waypoints[next_waypoint_]
                                                   : final_goal_;
}

StepResult GridNavEnv::step(ActionId action) {
  const bool final_leg = next_waypoint_ >= config_.waypoints.size();
  const GridNavStep s = gridnav_step(position_, action, active_goal(), config_);
  position_ = s.next;
  ++steps_;
  StepResult out;
  out.next_state = encode_cell(position_, config_);
  out.reward = s.reward;
  if (s.reached_goal) {
    if (final_leg)
      out.terminal = true;
    else
      ++next_waypoint_;
  }
  out.truncated = !out.terminal && steps_ >= config_.max_steps;
  return out;
}

std::unique_ptr<Environment> GridNavEnv::clone() const {
  return std::make_unique<GridNavEnv>(*this);
}

std::optional<StateVec> GridNavEnv::goal() const {
  if (!config_.sparse_goal_reward()) return std::nullopt;
  return encode_cell(active_goal(), config_);
}

void GridNavEnv::set_goal(const StateVec& goal) {
  const Cell g = decode_cell(goal, config_);
  if (!config_.waypoints.empty())
    throw ContractViolation("cannot override the goal of a waypoint chain");
  if (!config_.inside(g)) throw ContractViolation("goal cell outside the grid");
  final_goal_ = g;
}

}  // namespace hrl
