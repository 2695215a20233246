#include "hrl/subtasks.hpp"

#include <algorithm>
#include <cmath>

#include "hrl/error.hpp"

namespace hrl {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kCmag: return "CMAG";
    case Task::kBm: return "BM";
    case Task::kGridNav: return "GridNav";
  }
  return "?";
}

Task task_from_string(std::string_view name) {
  if (name == "CMAG") return Task::kCmag;
  if (name == "BM") return Task::kBm;
  if (name == "GridNav") return Task::kGridNav;
  throw ValidationError("unknown task '" + std::string(name) + "'");
}

void SubtaskSpec::validate() const {
  if (!std::isfinite(threshold)) throw ValidationError("subtask threshold must be finite");
  std::visit([](const auto& cfg) { cfg.validate(); }, env);
}

int stage_count(Task task) {
  switch (task) {
    case Task::kCmag: return 5;
    case Task::kBm: return 4;
    case Task::kGridNav: break;
  }
  throw ValidationError("GridNav decompositions are built from a grid config");
}

std::vector<double> default_thresholds(Task task) {
  switch (task) {
    case Task::kCmag: return {300, 5, 5, 5, 500};
    case Task::kBm: return {7, 7, 7, 2};
    case Task::kGridNav: break;
  }
  throw ValidationError("GridNav has no fixed thresholds");
}

namespace {

struct StageDef {
  const char* name;
  RewardMode mode;
  bool full_game;  // starts pristine instead of chaining
};

const StageDef kCmagStages[] = {
    {"CMAG", RewardMode::kCollectAll, true},
    {"BuildRefinery", RewardMode::kRefineryBuilt, false},
    {"CollectGasWithRefineries", RewardMode::kGasOnly, false},
    {"BuildRefineryAndCollectGas", RewardMode::kGasAndRefinery, false},
    {"CMAG", RewardMode::kCollectAll, true},
};

const StageDef kBmStages[] = {
    {"BuildSupplyDepots", RewardMode::kDepotBuilt, false},
    {"BuildBarracks", RewardMode::kBarracksBuilt, false},
    {"BuildMarinesWithBarracks", RewardMode::kMarineTrained, false},
    {"BM", RewardMode::kMarineTrained, true},
};

MiniBuildConfig stage_config(const StageDef& def, int horizon, const MiniBuildState& init) {
  MiniBuildConfig cfg;
  cfg.horizon = horizon;
  cfg.reward_mode = def.mode;
  cfg.initial = init;
  return cfg;
}

}  // namespace

SubtaskSpec subtask_factory(Task task, int stage) {
  const int count = stage_count(task);
  if (stage < 0 || stage >= count)
    throw ValidationError("stage " + std::to_string(stage) + " out of range for " +
                          std::string(to_string(task)));
  const StageDef* defs = task == Task::kCmag ? kCmagStages : kBmStages;
  const int horizon = task == Task::kCmag ? kCmagHorizon : kBmHorizon;
  const auto thresholds = default_thresholds(task);

  MiniBuildState init = pristine_state();
  if (!defs[stage].full_game && stage > 0) {
    const SubtaskSpec prev = subtask_factory(task, stage - 1);
    init = chain_initial_condition(prev, pristine_state());
  }
  SubtaskSpec spec{defs[stage].name, stage_config(defs[stage], horizon, init), thresholds[stage]};
  spec.validate();
  return spec;
}

std::vector<SubtaskSpec> decomposition(Task task) {
  std::vector<SubtaskSpec> out;
  for (int i = 0; i < stage_count(task); ++i) out.push_back(subtask_factory(task, i));
  return out;
}

SubtaskSpec final_task(Task task) { return subtask_factory(task, stage_count(task) - 1); }

MiniBuildState chain_initial_condition(const SubtaskSpec& prev, const MiniBuildState& achieved) {
  const MiniBuildConfig& cfg = prev.minibuild();
  validate_state(achieved, cfg);
  MiniBuildState t = achieved;
  t.tick = 0;
  t.minerals_collected_total = 0;
  t.gas_collected_total = 0;
  t.minerals_spent_total = 0;
  t.gas_spent_total = 0;

  auto at_least = [](std::int64_t& field, std::int64_t v) { field = std::max(field, v); };
  auto ensure_depots = [&](std::int64_t n) {
    if (t.depots < n) {
      t.supply_cap = std::min<std::int64_t>(t.supply_cap + cfg.depot_supply * (n - t.depots),
                                            cfg.supply_max);
      t.depots = n;
    }
  };

  switch (cfg.reward_mode) {
    case RewardMode::kDepotBuilt:
      ensure_depots(1);
      at_least(t.minerals, 300);
      break;
    case RewardMode::kBarracksBuilt:
      ensure_depots(1);
      at_least(t.barracks, 1);
      at_least(t.minerals, 100);
      break;
    case RewardMode::kRefineryBuilt:
      at_least(t.refineries, cfg.refinery_cap);
      break;
    case RewardMode::kCollectAll:
    case RewardMode::kGasOnly:
      at_least(t.minerals, 150);
      break;
    case RewardMode::kGasAndRefinery:
    case RewardMode::kMarineTrained:
      break;
  }
  validate_state(t, cfg);
  return t;
}

std::vector<SubtaskSpec> gridnav_decomposition(const GridNavConfig& base) {
  base.validate();
  std::vector<SubtaskSpec> out;
  Cell from = base.start;
  for (std::size_t k = 0; k < base.waypoints.size(); ++k) {
    GridNavConfig leg = base;
    leg.waypoints.clear();
    leg.start = from;
    leg.goal = base.waypoints[k];
    const int d = manhattan(leg.start, leg.goal);
    // Undiscounted return of an optimal leg is -(d - 1); allow a 50% detour.
    out.push_back({"Leg" + std::to_string(k), leg, -1.5 * d});
    from = base.waypoints[k];
  }
  int total = 0;
  Cell prev = base.start;
  for (const Cell& w : base.waypoints) {
    total += manhattan(prev, w);
    prev = w;
  }
  total += manhattan(prev, base.goal);
  out.push_back({"GridNav", base, -1.5 * total});
  return out;
}

std::unique_ptr<Environment> make_environment(const SubtaskSpec& spec, double gamma) {
  if (spec.is_minibuild()) return std::make_unique<MiniBuildEnv>(spec.minibuild(), gamma);
  return std::make_unique<GridNavEnv>(spec.gridnav(), gamma);
}

}  // namespace hrl
