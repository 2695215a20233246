#include "hrl/minibuild.hpp"

#include <algorithm>

#include "hrl/error.hpp"

namespace hrl {

namespace {

constexpr std::array<std::pair<RewardMode, std::string_view>, 7> kModeNames{{
    {RewardMode::kCollectAll, "CollectAll"},
    {RewardMode::kRefineryBuilt, "RefineryBuilt"},
    {RewardMode::kGasOnly, "GasOnly"},
    {RewardMode::kGasAndRefinery, "GasAndRefinery"},
    {RewardMode::kDepotBuilt, "DepotBuilt"},
    {RewardMode::kBarracksBuilt, "BarracksBuilt"},
    {RewardMode::kMarineTrained, "MarineTrained"},
}};

constexpr double kBuildReward = 5.0;

}  // namespace

std::string_view to_string(RewardMode mode) {
  for (const auto& [m, name] : kModeNames)
    if (m == mode) return name;
  return "?";
}

RewardMode reward_mode_from_string(std::string_view name) {
  for (const auto& [m, n] : kModeNames)
    if (n == name) return m;
  throw ValidationError("unknown reward mode '" + std::string(name) + "'");
}

MiniBuildState pristine_state() { return MiniBuildState{}; }

void validate_state(const MiniBuildState& s, const MiniBuildConfig& c) {
  const std::pair<std::int64_t, const char*> counts[] = {
      {s.minerals, "minerals"},     {s.gas, "gas"},
      {s.scv_idle, "scv_idle"},     {s.scv_minerals, "scv_minerals"},
      {s.scv_gas, "scv_gas"},       {s.refineries, "refineries"},
      {s.depots, "depots"},         {s.barracks, "barracks"},
      {s.marines, "marines"},       {s.supply_used, "supply_used"},
      {s.supply_cap, "supply_cap"}, {s.tick, "tick"},
  };
  for (const auto& [v, name] : counts)
    if (v < 0) throw ValidationError(std::string(name) + " is negative");
  if (s.supply_used > s.supply_cap)
    throw ValidationError("supply_used " + std::to_string(s.supply_used) + " exceeds supply_cap " +
                          std::to_string(s.supply_cap));
  if (s.supply_used != s.scv_total() + s.marines)
    throw ValidationError("supply_used must equal SCVs plus marines");
  if (s.refineries > c.refinery_cap) throw ValidationError("refineries exceed the refinery cap");
  if (s.scv_gas > c.gas_slots_per_refinery * s.refineries)
    throw ValidationError("more gas SCVs than refinery slots");
  if (s.barracks > 0 && s.depots == 0) throw ValidationError("barracks without a supply depot");
}

void MiniBuildConfig::validate() const {
  for (int v : {cost_scv, cost_refinery, cost_depot, cost_barracks, cost_marine, mineral_yield,
                gas_yield, depot_supply, mineral_saturation, gas_slots_per_refinery})
    if (v <= 0) throw ValidationError("costs and yields must be strictly positive");
  if (refinery_cap < 0) throw ValidationError("refinery_cap must be non-negative");
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  validate_state(initial, *this);
}

StateVec encode(const MiniBuildState& s) {
  return {static_cast<double>(s.minerals),     static_cast<double>(s.gas),
          static_cast<double>(s.scv_idle),     static_cast<double>(s.scv_minerals),
          static_cast<double>(s.scv_gas),      static_cast<double>(s.refineries),
          static_cast<double>(s.depots),       static_cast<double>(s.barracks),
          static_cast<double>(s.marines),      static_cast<double>(s.supply_used),
          static_cast<double>(s.supply_cap),   static_cast<double>(s.tick)};
}

MiniBuildState decode_minibuild(const StateVec& v) {
  if (v.size() != kMiniBuildStateDim) throw ContractViolation("MiniBuild state has wrong length");
  auto at = [&](int i) { return static_cast<std::int64_t>(v[i]); };
  MiniBuildState s;
  s.minerals = at(0);
  s.gas = at(1);
  s.scv_idle = at(2);
  s.scv_minerals = at(3);
  s.scv_gas = at(4);
  s.refineries = at(5);
  s.depots = at(6);
  s.barracks = at(7);
  s.marines = at(8);
  s.supply_used = at(9);
  s.supply_cap = at(10);
  s.tick = at(11);
  s.minerals_collected_total = 0;
  s.gas_collected_total = 0;
  return s;
}

MiniBuildTransition minibuild_transition(const MiniBuildState& s, ActionId action,
                                         const MiniBuildConfig& c) {
  check_action(action, kMiniBuildActionCount);
  MiniBuildTransition out{s, 0.0, false};
  MiniBuildState& n = out.next;
  int refineries_built = 0;
  int depots_built = 0;
  int barracks_built = 0;
  int marines_trained = 0;

  auto spend = [&](int cost) {
    if (n.minerals < cost) return false;
    n.minerals -= cost;
    n.minerals_spent_total += cost;
    return true;
  };

  switch (static_cast<MiniBuildAction>(action)) {
    case MiniBuildAction::kNoOp:
      break;
    case MiniBuildAction::kAssignToMinerals:
      if (n.scv_idle > 0) {
        --n.scv_idle;
        ++n.scv_minerals;
      } else if (n.scv_gas > 0) {
        --n.scv_gas;
        ++n.scv_minerals;
      }
      break;
    case MiniBuildAction::kAssignToGas:
      if (n.scv_gas < c.gas_slots_per_refinery * n.refineries) {
        if (n.scv_idle > 0) {
          --n.scv_idle;
          ++n.scv_gas;
        } else if (n.scv_minerals > 0) {
          --n.scv_minerals;
          ++n.scv_gas;
        }
      }
      break;
    case MiniBuildAction::kBuildScv:
      if (n.supply_used < n.supply_cap && spend(c.cost_scv)) {
        ++n.scv_idle;
        ++n.supply_used;
      }
      break;
    case MiniBuildAction::kBuildRefinery:
      if (n.refineries < c.refinery_cap && spend(c.cost_refinery)) {
        ++n.refineries;
        refineries_built = 1;
      }
      break;
    case MiniBuildAction::kBuildDepot:
      if (spend(c.cost_depot)) {
        ++n.depots;
        n.supply_cap = std::min<std::int64_t>(n.supply_cap + c.depot_supply, c.supply_max);
        depots_built = 1;
      }
      break;
    case MiniBuildAction::kBuildBarracks:
      if (n.depots > 0 && spend(c.cost_barracks)) {
        ++n.barracks;
        barracks_built = 1;
      }
      break;
    case MiniBuildAction::kTrainMarine:
      if (n.barracks > 0 && n.supply_used < n.supply_cap && spend(c.cost_marine)) {
        ++n.marines;
        ++n.supply_used;
        marines_trained = 1;
      }
      break;
  }

  const std::int64_t mineral_income =
      static_cast<std::int64_t>(c.mineral_yield) *
      std::min<std::int64_t>(n.scv_minerals, c.mineral_saturation);
  const std::int64_t gas_income = static_cast<std::int64_t>(c.gas_yield) * n.scv_gas;
  n.minerals += mineral_income;
  n.gas += gas_income;
  n.minerals_collected_total += mineral_income;
  n.gas_collected_total += gas_income;

  switch (c.reward_mode) {
    case RewardMode::kCollectAll:
      out.reward = static_cast<double>(mineral_income + gas_income);
      break;
    case RewardMode::kRefineryBuilt:
      out.reward = kBuildReward * refineries_built;
      break;
    case RewardMode::kGasOnly:
      out.reward = static_cast<double>(gas_income);
      break;
    case RewardMode::kGasAndRefinery:
      out.reward = kBuildReward * refineries_built + static_cast<double>(gas_income);
      break;
    case RewardMode::kDepotBuilt:
      out.reward = kBuildReward * depots_built;
      break;
    case RewardMode::kBarracksBuilt:
      out.reward = kBuildReward * barracks_built;
      break;
    case RewardMode::kMarineTrained:
      out.reward = static_cast<double>(marines_trained);
      break;
  }

  ++n.tick;
  out.truncated = n.tick >= c.horizon;
  return out;
}

MdpSpec minibuild_mdp_spec(const MiniBuildConfig& config, double gamma) {
  MdpSpec spec;
  spec.state_dim = kMiniBuildStateDim;
  spec.action_count = kMiniBuildActionCount;
  spec.gamma = gamma;
  spec.max_steps = config.horizon;
  spec.feature_scale = {1.0 / 500, 1.0 / 500, 1.0 / 12, 1.0 / 16, 1.0 / 6,  1.0 / 2,
                        1.0 / 4,   1.0 / 4,   1.0 / 16, 1.0 / 32, 1.0 / 32,
                        1.0 / config.horizon};
  return spec;
}

StateVec minibuild_reset(const MiniBuildConfig& config, const MiniBuildState& init, Rng&) {
  validate_state(init, config);
  MiniBuildState s = init;
  s.tick = 0;
  return encode(s);
}

StepResult minibuild_step(MiniBuildState& state, ActionId action, const MiniBuildConfig& config) {
  MiniBuildTransition tr = minibuild_transition(state, action, config);
  state = tr.next;
  return StepResult{encode(state), tr.reward, false, tr.truncated};
}

MiniBuildEnv::MiniBuildEnv(MiniBuildConfig config, double gamma)
    : config_(std::move(config)), spec_(minibuild_mdp_spec(config_, gamma)) {
  config_.validate();
  spec_.validate();
  state_ = config_.initial;
}

StateVec MiniBuildEnv::reset(Rng& rng) {
  StateVec v = minibuild_reset(config_, config_.initial, rng);
  state_ = config_.initial;
  state_.tick = 0;
  return v;
}

StepResult MiniBuildEnv::step(ActionId action) { return minibuild_step(state_, action, config_); }

std::unique_ptr<Environment> MiniBuildEnv::clone() const {
  return std::make_unique<MiniBuildEnv>(*this);
}

}  // namespace hrl
