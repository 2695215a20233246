#include <doctest.h>

#include <set>

#include "hrl/error.hpp"
#include "hrl/gridnav.hpp"
#include "hrl/rng.hpp"

using namespace hrl;

TEST_CASE("gridnav_step examples") {
  GridNavConfig cfg;
  cfg.width = cfg.height = 3;
  cfg.goal = {2, 2};
  GridNavStep s = gridnav_step({0, 0}, kRight, cfg.goal, cfg);
  CHECK(s.next == Cell{1, 0});
  CHECK(s.reward == -1.0);
  CHECK_FALSE(s.reached_goal);

  s = gridnav_step({2, 1}, kUp, cfg.goal, cfg);
  CHECK(s.next == Cell{2, 2});
  CHECK(s.reward == 0.0);
  CHECK(s.reached_goal);

  s = gridnav_step({0, 0}, kLeft, cfg.goal, cfg);
  CHECK(s.next == Cell{0, 0});
  s = gridnav_step({0, 0}, kDown, cfg.goal, cfg);
  CHECK(s.next == Cell{0, 0});
  s = gridnav_step({2, 2}, kRight, {0, 0}, cfg);
  CHECK(s.next == Cell{2, 2});
}

TEST_CASE("environment terminates at the goal") {
  GridNavConfig cfg;
  cfg.width = cfg.height = 3;
  cfg.goal = {1, 0};
  GridNavEnv env(cfg);
  Rng rng(0);
  env.reset(rng);
  const StepResult r = env.step(kRight);
  CHECK(r.terminal);
  CHECK(r.reward == 0.0);
  CHECK(decode_cell(r.next_state, cfg) == Cell{1, 0});
}

TEST_CASE("encodings round trip") {
  for (GridEncoding enc : {GridEncoding::kCoordinates, GridEncoding::kOneHot}) {
    GridNavConfig cfg;
    cfg.width = 4;
    cfg.height = 6;
    cfg.encoding = enc;
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 6; ++y) {
        const StateVec v = encode_cell({x, y}, cfg);
        CHECK(v.size() == static_cast<std::size_t>(grid_state_dim(cfg)));
        CHECK(decode_cell(v, cfg) == Cell{x, y});
      }
  }
  GridNavConfig onehot;
  onehot.encoding = GridEncoding::kOneHot;
  CHECK(grid_state_dim(onehot) == 10);
}

TEST_CASE("waypoints are visited in order; only the final goal terminates") {
  GridNavConfig cfg;
  cfg.width = cfg.height = 3;
  cfg.start = {0, 0};
  cfg.goal = {2, 0};
  cfg.waypoints = {{1, 0}};
  GridNavEnv env(cfg);
  Rng rng(0);
  env.reset(rng);
  CHECK(env.active_goal() == Cell{1, 0});
  StepResult r = env.step(kRight);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.terminal);
  CHECK(env.active_goal() == Cell{2, 0});
  r = env.step(kRight);
  CHECK(r.terminal);
}

TEST_CASE("goals are exposed only under the sparse reward convention") {
  GridNavConfig cfg;
  GridNavEnv sparse(cfg);
  Rng rng(0);
  sparse.reset(rng);
  REQUIRE(sparse.goal());
  CHECK(decode_cell(*sparse.goal(), cfg) == cfg.goal);

  cfg.goal_reward = -1.0;
  GridNavEnv dense(cfg);
  dense.reset(rng);
  CHECK_FALSE(dense.goal());
}

TEST_CASE("set_goal overrides the final goal") {
  GridNavConfig cfg;
  GridNavEnv env(cfg);
  Rng rng(0);
  env.reset(rng);
  env.set_goal(encode_cell({1, 0}, cfg));
  CHECK(env.step(kRight).terminal);
  CHECK_THROWS_AS(env.set_goal(encode_cell({9, 9}, GridNavConfig{10, 10})), ContractViolation);
}

TEST_CASE("random start and goal are distinct and cover the grid") {
  GridNavConfig cfg;
  cfg.width = cfg.height = 4;
  cfg.goal = {3, 3};
  cfg.random_start = cfg.random_goal = true;
  GridNavEnv env(cfg);
  Rng rng(2);
  std::set<std::pair<int, int>> starts;
  for (int i = 0; i < 2000; ++i) {
    const StateVec s = env.reset(rng);
    const Cell c = decode_cell(s, cfg);
    CHECK_FALSE(c == env.active_goal());
    starts.insert({c.x, c.y});
  }
  CHECK(starts.size() == 16);
}

TEST_CASE("config validation") {
  GridNavConfig cfg;
  cfg.goal = {5, 5};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = GridNavConfig{};
  cfg.waypoints = {{1, 1}, {1, 1}};
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = GridNavConfig{};
  cfg.width = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("manhattan distance") {
  CHECK(manhattan({0, 0}, {3, 4}) == 7);
  CHECK(manhattan({2, 2}, {2, 2}) == 0);
}
