#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hrl/gridnav.hpp"
#include "hrl/minibuild.hpp"

namespace hrl {

enum class Task { kCmag, kBm, kGridNav };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

// One customized minigame of a decomposition: its environment (reward mode
// and preloaded initial condition included) and its advancement threshold.
struct SubtaskSpec {
  std::string name;
  std::variant<MiniBuildConfig, GridNavConfig> env;
  double threshold = 0.0;

  bool is_minibuild() const { return std::holds_alternative<MiniBuildConfig>(env); }
  const MiniBuildConfig& minibuild() const { return std::get<MiniBuildConfig>(env); }
  const GridNavConfig& gridnav() const { return std::get<GridNavConfig>(env); }
  RewardMode reward_mode() const { return minibuild().reward_mode; }
  const MiniBuildState& initial_condition() const { return minibuild().initial; }

  void validate() const;
  bool operator==(const SubtaskSpec&) const = default;
};

// CMAG: [CMAG, BuildRefinery, CollectGasWithRefineries,
//        BuildRefineryAndCollectGas, CMAG], thresholds [300, 5, 5, 5, 500].
// BM:   [BuildSupplyDepots, BuildBarracks, BuildMarinesWithBarracks, BM],
//       thresholds [7, 7, 7, 2].
int stage_count(Task task);
SubtaskSpec subtask_factory(Task task, int stage);
std::vector<SubtaskSpec> decomposition(Task task);
std::vector<double> default_thresholds(Task task);

// The full minigame a decomposition finishes on (its last stage).
SubtaskSpec final_task(Task task);

// Template for the stage after prev: achieved, with tick and bookkeeping
// cleared and raised to at least what prev's subgoal guarantees. Idempotent.
//
//   DepotBuilt     -> depots >= 1, minerals >= 300
//   BarracksBuilt  -> depots >= 1, barracks >= 1, minerals >= 100
//   RefineryBuilt  -> refineries >= 2
//   CollectAll     -> minerals >= 150
//   GasOnly        -> minerals >= 150
//   GasAndRefinery, MarineTrained -> no additional guarantees
MiniBuildState chain_initial_condition(const SubtaskSpec& prev, const MiniBuildState& achieved);

// GridNav decomposition: one stage per waypoint leg (start of leg k is
// waypoint k-1), then the full start-to-goal task.
std::vector<SubtaskSpec> gridnav_decomposition(const GridNavConfig& base);

std::unique_ptr<Environment> make_environment(const SubtaskSpec& spec, double gamma = 0.99);

}  // namespace hrl
