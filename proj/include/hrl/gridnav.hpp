#pragma once

#include <vector>

#include "hrl/mdp.hpp"

namespace hrl {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

enum class GridEncoding {
  kCoordinates,  // [x, y]
  kOneHot,       // one-hot x (width entries) followed by one-hot y (height entries)
};

enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kGridActionCount = 4;

// Grid navigation. y grows with kUp. Each step costs step_reward; the step
// that enters the active goal yields goal_reward instead. Waypoints are
// visited in order before the final goal; only the final goal terminates.
struct GridNavConfig {
  int width = 5;
  int height = 5;
  Cell start{0, 0};
  Cell goal{4, 4};
  std::vector<Cell> waypoints;
  double step_reward = -1.0;
  double goal_reward = 0.0;
  int max_steps = 100;
  GridEncoding encoding = GridEncoding::kCoordinates;
  bool random_start = false;  // resample start each reset
  bool random_goal = false;   // resample goal each reset (distinct from start)

  void validate() const;
  bool inside(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  // True when rewards follow the sparse goal convention (-1 per step, 0 on
  // reaching the goal); only then are goals exposed on tuples.
  bool sparse_goal_reward() const { return step_reward == -1.0 && goal_reward == 0.0; }
  bool operator==(const GridNavConfig&) const = default;
};

int grid_state_dim(const GridNavConfig& config);
StateVec encode_cell(Cell c, const GridNavConfig& config);
Cell decode_cell(const StateVec& v, const GridNavConfig& config);
Cell move(Cell c, ActionId action, const GridNavConfig& config);
int manhattan(Cell a, Cell b);

struct GridNavStep {
  Cell next;
  double reward = 0.0;
  bool reached_goal = false;
};

// Pure move against a given active goal; off-grid moves keep position.
GridNavStep gridnav_step(Cell position, ActionId action, Cell active_goal,
                         const GridNavConfig& config);

class GridNavEnv final : public Environment {
 public:
  explicit GridNavEnv(GridNavConfig config, double gamma = 0.99);

  const MdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "gridnav"; }
  StateVec reset(Rng& rng) override;
  StepResult step(ActionId action) override;
  std::unique_ptr<Environment> clone() const override;
  std::optional<StateVec> goal() const override;
  void set_goal(const StateVec& goal) override;

  Cell position() const { return position_; }
  Cell active_goal() const;
  const GridNavConfig& config() const { return config_; }

 private:
  GridNavConfig config_;
  MdpSpec spec_;
  Cell position_;
  Cell final_goal_;
  std::size_t next_waypoint_ = 0;
  int steps_ = 0;
};

}  // namespace hrl
