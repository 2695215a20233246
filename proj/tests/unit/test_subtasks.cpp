#include <doctest.h>

#include <limits>

#include "hrl/error.hpp"
#include "hrl/subtasks.hpp"

using namespace hrl;

TEST_CASE("decomposition names and default thresholds") {
  const auto cmag = decomposition(Task::kCmag);
  REQUIRE(cmag.size() == 5);
  const char* cmag_names[] = {"CMAG", "BuildRefinery", "CollectGasWithRefineries",
                              "BuildRefineryAndCollectGas", "CMAG"};
  for (int i = 0; i < 5; ++i) CHECK(cmag[i].name == cmag_names[i]);
  CHECK(default_thresholds(Task::kCmag) == std::vector<double>{300, 5, 5, 5, 500});

  const auto bm = decomposition(Task::kBm);
  REQUIRE(bm.size() == 4);
  const char* bm_names[] = {"BuildSupplyDepots", "BuildBarracks", "BuildMarinesWithBarracks", "BM"};
  for (int i = 0; i < 4; ++i) CHECK(bm[i].name == bm_names[i]);
  CHECK(default_thresholds(Task::kBm) == std::vector<double>{7, 7, 7, 2});
}

TEST_CASE("subtask_factory examples") {
  const SubtaskSpec c0 = subtask_factory(Task::kCmag, 0);
  CHECK(c0.reward_mode() == RewardMode::kCollectAll);
  CHECK(c0.initial_condition() == pristine_state());
  CHECK(c0.threshold == 300);
  CHECK(c0.minibuild().horizon == kCmagHorizon);

  const SubtaskSpec b3 = subtask_factory(Task::kBm, 3);
  CHECK(b3.reward_mode() == RewardMode::kMarineTrained);
  CHECK(b3.initial_condition() == pristine_state());
  CHECK(b3.threshold == 2);
  CHECK(b3.minibuild().horizon == kBmHorizon);

  const SubtaskSpec c4 = subtask_factory(Task::kCmag, 4);
  CHECK(c4.reward_mode() == RewardMode::kCollectAll);
  CHECK(c4.threshold == 500);
  CHECK(c4.initial_condition() == pristine_state());
}

TEST_CASE("out-of-range stages throw") {
  CHECK_THROWS_AS(subtask_factory(Task::kCmag, 5), ValidationError);
  CHECK_THROWS_AS(subtask_factory(Task::kBm, 4), ValidationError);
  CHECK_THROWS_AS(subtask_factory(Task::kBm, -1), ValidationError);
}

TEST_CASE("intermediate stages preload the previous subgoal") {
  const SubtaskSpec barracks = subtask_factory(Task::kBm, 1);
  CHECK(barracks.reward_mode() == RewardMode::kBarracksBuilt);
  CHECK(barracks.initial_condition().depots == 1);
  CHECK(barracks.initial_condition().minerals == 300);
  CHECK(barracks.initial_condition().supply_cap == 23);

  const SubtaskSpec marines = subtask_factory(Task::kBm, 2);
  CHECK(marines.reward_mode() == RewardMode::kMarineTrained);
  CHECK(marines.initial_condition().barracks == 1);

  const SubtaskSpec gas = subtask_factory(Task::kCmag, 2);
  CHECK(gas.reward_mode() == RewardMode::kGasOnly);
  CHECK(gas.initial_condition().refineries == 2);
}

TEST_CASE("chain_initial_condition examples and idempotence") {
  const SubtaskSpec refinery = subtask_factory(Task::kCmag, 1);
  const MiniBuildState after = chain_initial_condition(refinery, pristine_state());
  CHECK(after.refineries == 2);

  const SubtaskSpec depots = subtask_factory(Task::kBm, 0);
  CHECK(chain_initial_condition(depots, pristine_state()).depots == 1);

  for (Task t : {Task::kCmag, Task::kBm})
    for (const SubtaskSpec& s : decomposition(t)) {
      const MiniBuildState once = chain_initial_condition(s, s.initial_condition());
      CHECK(chain_initial_condition(s, once) == once);
    }
}

TEST_CASE("chain_initial_condition rejects invalid achieved states") {
  MiniBuildState bad = pristine_state();
  bad.supply_used = 99;
  CHECK_THROWS_AS(chain_initial_condition(subtask_factory(Task::kBm, 0), bad), ValidationError);
}

TEST_CASE("every stage validates and builds an environment") {
  for (Task t : {Task::kCmag, Task::kBm})
    for (const SubtaskSpec& s : decomposition(t)) {
      CHECK_NOTHROW(s.validate());
      auto env = make_environment(s);
      CHECK(env->spec().action_count == kMiniBuildActionCount);
      CHECK(env->spec().state_dim == kMiniBuildStateDim);
    }
}

TEST_CASE("gridnav decomposition: one leg per waypoint then the full task") {
  GridNavConfig g;
  g.waypoints = {{2, 0}, {2, 2}};
  const auto legs = gridnav_decomposition(g);
  REQUIRE(legs.size() == 3);
  CHECK(legs[0].gridnav().start == Cell{0, 0});
  CHECK(legs[0].gridnav().goal == Cell{2, 0});
  CHECK(legs[1].gridnav().start == Cell{2, 0});
  CHECK(legs[1].gridnav().goal == Cell{2, 2});
  CHECK(legs[2].gridnav() == g);
}

TEST_CASE("threshold must be finite") {
  SubtaskSpec s = subtask_factory(Task::kBm, 0);
  s.threshold = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("task names") {
  CHECK(task_from_string("BM") == Task::kBm);
  CHECK(task_from_string("CMAG") == Task::kCmag);
  CHECK(task_from_string("GridNav") == Task::kGridNav);
  CHECK_THROWS_AS(task_from_string("Zerg"), ValidationError);
}
