#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrl/config.hpp"
#include "hrl/curriculum.hpp"

namespace hrl {

struct TrainResult {
  CurriculumReport report;
  nlohmann::json checkpoint;  // includes "eval_task" and "config_hash"
};

// Runs the configured curriculum or flat baseline, then the greedy
// evaluation protocol on the final task. Fully determined by the config.
TrainResult train(const ExperimentConfig& config);

// Greedy evaluation of a checkpoint on its recorded evaluation task (or the
// given one). Throws ValidationError on a layout mismatch.
EvalReport evaluate_checkpoint(const nlohmann::json& checkpoint, int episodes, Rng& rng,
                               const std::optional<SubtaskSpec>& task = std::nullopt);

// Output directory: output_dir, placed under $HRL_OUTPUT_ROOT when that is
// set and output_dir is relative.
std::filesystem::path resolve_output_dir(const std::string& output_dir);

// Writes config.json, report.json, checkpoint.json and curves/NN_<name>.csv.
void write_run(const ExperimentConfig& config, const TrainResult& result,
               const std::filesystem::path& dir);

nlohmann::json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CurriculumReport& r);
CurriculumReport report_from_json(const nlohmann::json& j);

// Columns: cumulative_samples,episode_reward,running_average
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> read_curve_csv(std::istream& is);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// ---- comparison -----------------------------------------------------------

struct StallFlag {
  std::string run;
  int subtask = 0;
  std::string name;
};

struct ComparisonRow {
  std::string label;  // run label, or "median"
  double curriculum_mean = 0.0;
  double flat_mean = 0.0;
  double delta_mean = 0.0;
  double curriculum_max = 0.0;
  double flat_max = 0.0;
  double delta_max = 0.0;
};

struct AlignedPoint {
  long samples = 0;
  double curriculum_running_average = 0.0;
  double flat_running_average = 0.0;
};

struct ComparisonSummary {
  std::vector<ComparisonRow> rows;
  std::vector<AlignedPoint> curve;  // from the first run pair
  std::vector<StallFlag> stalls;
};

// A subtask stalls when at least 95% of its episode rewards sit at the
// curve's minimum (flat, with at most rare spikes).
bool is_stalled(const SubtaskReport& subtask);

// Pairs curriculum[i] with flat[i]; reports must share task and budget and
// carry a final evaluation. With several pairs a median row is appended.
ComparisonSummary compare_runs(const std::vector<CurriculumReport>& curriculum,
                               const std::vector<CurriculumReport>& flat, int grid_points = 20);
nlohmann::json to_json(const ComparisonSummary& s);

double median(std::vector<double> values);

}  // namespace hrl
