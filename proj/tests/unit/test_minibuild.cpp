#include <doctest.h>

#include <cstring>

#include "hrl/error.hpp"
#include "hrl/minibuild.hpp"
#include "hrl/rng.hpp"

using namespace hrl;

namespace {

constexpr ActionId act(MiniBuildAction a) { return static_cast<ActionId>(a); }

MiniBuildState with_miners(int n) {
  MiniBuildState s = pristine_state();
  s.scv_idle -= n;
  s.scv_minerals = n;
  return s;
}

}  // namespace

TEST_CASE("pristine reset: 12 idle SCVs, supply 12/15, no minerals") {
  Rng rng(0);
  const StateVec v = minibuild_reset(MiniBuildConfig{}, pristine_state(), rng);
  REQUIRE(v.size() == static_cast<std::size_t>(kMiniBuildStateDim));
  CHECK(v[2] == 12);
  CHECK(v[9] == 12);
  CHECK(v[10] == 15);
  CHECK(v[0] == 0);
  CHECK(v[11] == 0);
}

TEST_CASE("reset rejects invariant-violating templates") {
  Rng rng(0);
  MiniBuildState s = pristine_state();
  s.supply_used = 20;
  s.scv_idle = 20;
  s.supply_cap = 15;
  CHECK_THROWS_AS(minibuild_reset(MiniBuildConfig{}, s, rng), ValidationError);
  MiniBuildState neg = pristine_state();
  neg.minerals = -1;
  CHECK_THROWS_AS(minibuild_reset(MiniBuildConfig{}, neg, rng), ValidationError);
  MiniBuildState gas = pristine_state();
  gas.scv_idle = 11;
  gas.scv_gas = 1;
  CHECK_THROWS_AS(minibuild_reset(MiniBuildConfig{}, gas, rng), ValidationError);
  MiniBuildState rax = pristine_state();
  rax.barracks = 1;
  CHECK_THROWS_AS(minibuild_reset(MiniBuildConfig{}, rax, rng), ValidationError);
}

TEST_CASE("reset zeroes the tick") {
  MiniBuildState s = pristine_state();
  s.tick = 50;
  Rng rng(0);
  CHECK(minibuild_reset(MiniBuildConfig{}, s, rng)[11] == 0);
}

TEST_CASE("four miners harvest 20 minerals under CollectAll") {
  MiniBuildState s = with_miners(4);
  const StepResult r = minibuild_step(s, act(MiniBuildAction::kNoOp), MiniBuildConfig{});
  CHECK(s.minerals == 20);
  CHECK(r.reward == 20.0);
  CHECK(s.tick == 1);
}

TEST_CASE("unaffordable refinery is a no-op but harvest still applies") {
  MiniBuildState s = with_miners(2);
  s.minerals = 40;
  minibuild_step(s, act(MiniBuildAction::kBuildRefinery), MiniBuildConfig{});
  CHECK(s.refineries == 0);
  CHECK(s.minerals == 50);
}

TEST_CASE("barracks need a depot regardless of minerals") {
  MiniBuildState s = pristine_state();
  s.minerals = 10000;
  minibuild_step(s, act(MiniBuildAction::kBuildBarracks), MiniBuildConfig{});
  CHECK(s.barracks == 0);
  CHECK(s.minerals == 10000);
  minibuild_step(s, act(MiniBuildAction::kBuildDepot), MiniBuildConfig{});
  CHECK(s.depots == 1);
  CHECK(s.supply_cap == 23);
  minibuild_step(s, act(MiniBuildAction::kBuildBarracks), MiniBuildConfig{});
  CHECK(s.barracks == 1);
  CHECK(s.minerals == 10000 - 100 - 150);
}

TEST_CASE("marines need barracks and free supply") {
  MiniBuildConfig cfg;
  cfg.reward_mode = RewardMode::kMarineTrained;
  MiniBuildState s = pristine_state();
  s.minerals = 1000;
  StepResult r = minibuild_step(s, act(MiniBuildAction::kTrainMarine), cfg);
  CHECK(s.marines == 0);
  CHECK(r.reward == 0.0);
  s.depots = 1;
  s.barracks = 1;
  for (int i = 0; i < 3; ++i) {
    r = minibuild_step(s, act(MiniBuildAction::kTrainMarine), cfg);
    CHECK(r.reward == 1.0);
  }
  CHECK(s.supply_used == 15);
  r = minibuild_step(s, act(MiniBuildAction::kTrainMarine), cfg);
  CHECK(s.marines == 3);
  CHECK(r.reward == 0.0);
}

TEST_CASE("builder rewards are +5 per structure") {
  MiniBuildState s = pristine_state();
  s.minerals = 1000;
  MiniBuildConfig cfg;
  cfg.reward_mode = RewardMode::kDepotBuilt;
  CHECK(minibuild_step(s, act(MiniBuildAction::kBuildDepot), cfg).reward == 5.0);
  cfg.reward_mode = RewardMode::kBarracksBuilt;
  CHECK(minibuild_step(s, act(MiniBuildAction::kBuildBarracks), cfg).reward == 5.0);
  cfg.reward_mode = RewardMode::kRefineryBuilt;
  CHECK(minibuild_step(s, act(MiniBuildAction::kBuildRefinery), cfg).reward == 5.0);
  CHECK(minibuild_step(s, act(MiniBuildAction::kBuildRefinery), cfg).reward == 5.0);
  // Refinery cap of 2.
  CHECK(minibuild_step(s, act(MiniBuildAction::kBuildRefinery), cfg).reward == 0.0);
  CHECK(s.refineries == 2);
}

TEST_CASE("gas assignment respects slots and takes idle SCVs first") {
  MiniBuildState s = with_miners(4);
  s.refineries = 1;
  MiniBuildConfig cfg;
  cfg.reward_mode = RewardMode::kGasOnly;
  for (int i = 0; i < 5; ++i) minibuild_step(s, act(MiniBuildAction::kAssignToGas), cfg);
  CHECK(s.scv_gas == 3);
  CHECK(s.scv_idle == 5);
  CHECK(s.scv_minerals == 4);
  const StepResult r = minibuild_step(s, act(MiniBuildAction::kNoOp), cfg);
  CHECK(r.reward == 12.0);

  MiniBuildState t = with_miners(12);
  t.refineries = 1;
  minibuild_step(t, act(MiniBuildAction::kAssignToGas), cfg);
  CHECK(t.scv_minerals == 11);
  CHECK(t.scv_gas == 1);
}

TEST_CASE("mineral saturation caps income at 16 harvesters") {
  MiniBuildState s = pristine_state();
  s.scv_idle = 0;
  s.scv_minerals = 20;
  s.supply_used = 20;
  s.supply_cap = 23;
  s.depots = 1;
  CHECK(minibuild_step(s, act(MiniBuildAction::kNoOp), MiniBuildConfig{}).reward == 80.0);
}

TEST_CASE("truncation at the horizon") {
  MiniBuildConfig cfg;
  cfg.horizon = 3;
  MiniBuildState s = pristine_state();
  CHECK_FALSE(minibuild_step(s, 0, cfg).truncated);
  CHECK_FALSE(minibuild_step(s, 0, cfg).truncated);
  const StepResult last = minibuild_step(s, 0, cfg);
  CHECK(last.truncated);
  CHECK_FALSE(last.terminal);
}

TEST_CASE("transitions are pure and bitwise repeatable") {
  Rng rng(3);
  MiniBuildConfig cfg;
  MiniBuildState s = pristine_state();
  for (int t = 0; t < 100; ++t) {
    const ActionId a = rng.uniform_int(kMiniBuildActionCount);
    const MiniBuildTransition x = minibuild_transition(s, a, cfg);
    const MiniBuildTransition y = minibuild_transition(s, a, cfg);
    CHECK(x.next == y.next);
    CHECK(std::memcmp(&x.reward, &y.reward, sizeof(double)) == 0);
    s = x.next;
  }
}

TEST_CASE("encode and decode round trip") {
  MiniBuildState s = pristine_state();
  s.minerals = 123;
  s.gas = 7;
  s.refineries = 1;
  s.scv_idle = 9;
  s.scv_gas = 3;
  s.tick = 17;
  const MiniBuildState back = decode_minibuild(encode(s));
  CHECK(back == s);
}

TEST_CASE("CollectAll and MarineTrained totals over random episodes") {
  Rng rng(19);
  for (RewardMode mode : {RewardMode::kCollectAll, RewardMode::kMarineTrained}) {
    MiniBuildConfig cfg;
    cfg.reward_mode = mode;
    MiniBuildEnv env(cfg);
    for (int e = 0; e < 300; ++e) {
      env.reset(rng);
      const MiniBuildState start = env.state();
      double total = 0.0;
      bool done = false;
      while (!done) {
        const StepResult r = env.step(rng.uniform_int(kMiniBuildActionCount));
        total += r.reward;
        done = r.truncated || r.terminal;
        validate_state(env.state(), cfg);
      }
      const MiniBuildState& end = env.state();
      if (mode == RewardMode::kCollectAll)
        CHECK(total == static_cast<double>(end.minerals_collected_total + end.gas_collected_total -
                                           start.minerals_collected_total -
                                           start.gas_collected_total));
      else
        CHECK(total == static_cast<double>(end.marines - start.marines));
      CHECK(end.minerals_collected_total + start.minerals ==
            end.minerals + end.minerals_spent_total);
      CHECK(end.gas_collected_total + start.gas == end.gas + end.gas_spent_total);
    }
  }
}

TEST_CASE("config validation") {
  MiniBuildConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.cost_marine = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = MiniBuildConfig{};
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = MiniBuildConfig{};
  cfg.gas_yield = -4;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("reward mode names round trip") {
  for (RewardMode m : {RewardMode::kCollectAll, RewardMode::kRefineryBuilt, RewardMode::kGasOnly,
                       RewardMode::kGasAndRefinery, RewardMode::kDepotBuilt,
                       RewardMode::kBarracksBuilt, RewardMode::kMarineTrained})
    CHECK(reward_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(reward_mode_from_string("Nope"), ValidationError);
}
