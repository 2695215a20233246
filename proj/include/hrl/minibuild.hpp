#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "hrl/mdp.hpp"

namespace hrl {

// Deterministic RTS-economy environment. SCVs harvest minerals and gas;
// refineries gate gas, depots raise supply and gate barracks, barracks gate
// marines. Builds complete instantly and illegal actions are no-ops.

enum class MiniBuildAction : int {
  kNoOp = 0,
  kAssignToMinerals,
  kAssignToGas,
  kBuildScv,
  kBuildRefinery,
  kBuildDepot,
  kBuildBarracks,
  kTrainMarine,
};
inline constexpr int kMiniBuildActionCount = 8;

enum class RewardMode {
  kCollectAll,      // minerals + gas harvested this tick
  kRefineryBuilt,   // +5 per refinery
  kGasOnly,         // gas harvested this tick
  kGasAndRefinery,  // +5 per refinery plus gas harvested
  kDepotBuilt,      // +5 per depot
  kBarracksBuilt,   // +5 per barracks
  kMarineTrained,   // +1 per marine
};

std::string_view to_string(RewardMode mode);
RewardMode reward_mode_from_string(std::string_view name);

struct MiniBuildState {
  std::int64_t minerals = 0;
  std::int64_t gas = 0;
  std::int64_t scv_idle = 12;
  std::int64_t scv_minerals = 0;
  std::int64_t scv_gas = 0;
  std::int64_t refineries = 0;
  std::int64_t depots = 0;
  std::int64_t barracks = 0;
  std::int64_t marines = 0;
  std::int64_t supply_used = 12;
  std::int64_t supply_cap = 15;
  std::int64_t tick = 0;
  std::int64_t minerals_collected_total = 0;
  std::int64_t gas_collected_total = 0;
  std::int64_t minerals_spent_total = 0;
  std::int64_t gas_spent_total = 0;

  std::int64_t scv_total() const { return scv_idle + scv_minerals + scv_gas; }
  bool operator==(const MiniBuildState&) const = default;
};

struct MiniBuildConfig {
  int cost_scv = 50;
  int cost_refinery = 75;
  int cost_depot = 100;
  int cost_barracks = 150;
  int cost_marine = 50;
  int mineral_yield = 5;  // per harvesting SCV per tick
  int gas_yield = 4;      // per gas SCV per tick
  int depot_supply = 8;
  int mineral_saturation = 16;
  int refinery_cap = 2;
  int gas_slots_per_refinery = 3;
  int supply_max = 200;
  int horizon = 120;
  RewardMode reward_mode = RewardMode::kCollectAll;
  MiniBuildState initial;

  void validate() const;
  bool operator==(const MiniBuildConfig&) const = default;
};

inline constexpr int kCmagHorizon = 240;
inline constexpr int kBmHorizon = 120;

// 12 idle SCVs, supply 12/15, no resources or structures.
MiniBuildState pristine_state();

// Throws ValidationError naming the first broken invariant: non-negativity,
// supply_used <= supply_cap, supply_used == SCVs + marines, gas slots,
// refinery cap, depot prerequisite for barracks.
void validate_state(const MiniBuildState& s, const MiniBuildConfig& config);

// Feature layout (12 entries, raw counts):
//   0 minerals, 1 gas, 2 scv_idle, 3 scv_minerals, 4 scv_gas, 5 refineries,
//   6 depots, 7 barracks, 8 marines, 9 supply_used, 10 supply_cap, 11 tick
inline constexpr int kMiniBuildStateDim = 12;
StateVec encode(const MiniBuildState& s);
// Inverse of encode for the dynamics-relevant fields; bookkeeping totals are
// zeroed.
MiniBuildState decode_minibuild(const StateVec& v);

struct MiniBuildTransition {
  MiniBuildState next;
  double reward = 0.0;
  bool truncated = false;
};

// Pure transition: action effect (if affordable and permitted), then harvest,
// then reward per the configured mode, then tick advance.
MiniBuildTransition minibuild_transition(const MiniBuildState& s, ActionId action,
                                         const MiniBuildConfig& config);

MdpSpec minibuild_mdp_spec(const MiniBuildConfig& config, double gamma = 0.99);

class MiniBuildEnv final : public Environment {
 public:
  explicit MiniBuildEnv(MiniBuildConfig config, double gamma = 0.99);

  const MdpSpec& spec() const override { return spec_; }
  std::string name() const override { return "minibuild"; }
  StateVec reset(Rng& rng) override;
  StepResult step(ActionId action) override;
  std::unique_ptr<Environment> clone() const override;

  const MiniBuildState& state() const { return state_; }
  const MiniBuildConfig& config() const { return config_; }

 private:
  MiniBuildConfig config_;
  MdpSpec spec_;
  MiniBuildState state_;
};

// Validates init, then returns its encoding with tick and collected totals
// reset.
StateVec minibuild_reset(const MiniBuildConfig& config, const MiniBuildState& init, Rng& rng);

StepResult minibuild_step(MiniBuildState& state, ActionId action, const MiniBuildConfig& config);

}  // namespace hrl
