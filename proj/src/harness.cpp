#include "hrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hrl/error.hpp"

namespace hrl {

using nlohmann::json;

namespace {

// JSON has no infinity; flat-baseline thresholds are written as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string curve_file_name(int index, const std::string& name) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d_", index);
  return std::string(buf) + name + ".csv";
}

}  // namespace

TrainResult train(const ExperimentConfig& config) {
  config.validate();
  Rng root(config.seed);
  Rng init_rng = root.split();
  Rng run_rng = root.split();
  Rng eval_rng = root.split();

  const SubtaskSpec final_task = config.evaluation_task();
  const AgentShape shape = agent_shape_for(final_task);
  auto agent = make_agent(config, shape, init_rng);

  TrainResult result;
  if (config.mode == RunMode::kCurriculum) {
    result.report = config.sample_limit > 0
                        ? run_curriculum(config.curriculum_spec(), *agent, run_rng)
                        : CurriculumReport{};
    result.report.mode = "curriculum";
    result.report.learner = std::string(to_string(config.learner));
  } else {
    result.report = run_flat_baseline(final_task, *agent, config.sample_limit, run_rng,
                                      config.test_window, config.test_interval);
  }
  result.report.task = std::string(to_string(config.task));
  result.report.seed = config.seed;
  result.report.sample_limit = config.sample_limit;

  auto env = make_environment(final_task);
  result.report.final_eval = evaluate(*agent, *env, config.eval_episodes, eval_rng);

  result.checkpoint = agent->checkpoint();
  result.checkpoint["eval_task"] = to_json(final_task);
  result.checkpoint["config_hash"] = config_hash(config);
  return result;
}

EvalReport evaluate_checkpoint(const json& checkpoint, int episodes, Rng& rng,
                               const std::optional<SubtaskSpec>& task) {
  SubtaskSpec spec;
  if (task) {
    spec = *task;
  } else {
    if (!checkpoint.contains("eval_task"))
      throw ValidationError("checkpoint has no evaluation task; pass one explicitly");
    spec = subtask_from_json(checkpoint["eval_task"]);
  }
  spec.validate();
  const auto agent = agent_from_checkpoint(checkpoint, agent_shape_for(spec));
  auto env = make_environment(spec);
  return evaluate(*agent, *env, episodes, rng);
}

std::filesystem::path resolve_output_dir(const std::string& output_dir) {
  std::filesystem::path p(output_dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("HRL_OUTPUT_ROOT"); root && *root)
      return std::filesystem::path(root) / p;
  }
  return p;
}

void write_run(const ExperimentConfig& config, const TrainResult& result,
               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "curves");
  write_json_file(dir / "config.json", to_json(config));
  write_json_file(dir / "report.json", to_json(result.report));
  write_json_file(dir / "checkpoint.json", result.checkpoint);
  for (std::size_t i = 0; i < result.report.subtasks.size(); ++i) {
    const auto& sub = result.report.subtasks[i];
    std::ofstream out(dir / "curves" / curve_file_name(static_cast<int>(i), sub.name));
    if (!out) throw ValidationError("cannot write curve for " + sub.name);
    write_curve_csv(out, sub.curve);
  }
}

// ---- report JSON -----------------------------------------------------------

json to_json(const EvalReport& r) {
  return {{"episodes", r.episodes},
          {"mean_reward", r.mean_reward},
          {"max_reward", r.max_reward},
          {"success_rate", r.success_rate},
          {"rewards", r.rewards},
          {"checkpoint_hash", r.checkpoint_hash}};
}

EvalReport eval_report_from_json(const json& j) {
  EvalReport r;
  r.episodes = j.at("episodes").get<int>();
  r.mean_reward = j.at("mean_reward").get<double>();
  r.max_reward = j.at("max_reward").get<double>();
  r.success_rate = j.at("success_rate").get<double>();
  r.rewards = j.at("rewards").get<std::vector<double>>();
  r.checkpoint_hash = j.at("checkpoint_hash").get<std::string>();
  return r;
}

json to_json(const CurriculumReport& r) {
  json subs = json::array();
  for (const auto& s : r.subtasks) {
    json curve = json::array();
    for (const auto& p : s.curve)
      curve.push_back({p.cumulative_samples, p.episode_reward, p.running_average});
    subs.push_back({{"name", s.name},
                    {"threshold", number_or_null(s.threshold)},
                    {"sample_cap", s.sample_cap},
                    {"samples_used", s.samples_used},
                    {"episodes", s.episodes},
                    {"tests", s.tests},
                    {"final_running_average", optional_number(s.final_running_average)},
                    {"status", std::string(to_string(s.status))},
                    {"curve", curve}});
  }
  json events = json::array();
  for (const auto& e : r.events)
    events.push_back({{"subtask", e.subtask},
                      {"samples_used", e.samples_used},
                      {"cumulative_samples", e.cumulative_samples},
                      {"running_average", optional_number(e.running_average)},
                      {"threshold", number_or_null(e.threshold)},
                      {"status", std::string(to_string(e.status))}});
  return {{"task", r.task},
          {"mode", r.mode},
          {"learner", r.learner},
          {"seed", r.seed},
          {"sample_limit", r.sample_limit},
          {"total_samples", r.total_samples},
          {"subtasks", subs},
          {"events", events},
          {"aborted", r.aborted},
          {"abort_reason", r.abort_reason},
          {"final_eval", r.final_eval ? to_json(*r.final_eval) : json(nullptr)}};
}

CurriculumReport report_from_json(const json& j) {
  try {
    CurriculumReport r;
    r.task = j.at("task").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.learner = j.at("learner").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.sample_limit = j.at("sample_limit").get<long>();
    r.total_samples = j.at("total_samples").get<long>();
    for (const auto& s : j.at("subtasks")) {
      SubtaskReport sub;
      sub.name = s.at("name").get<std::string>();
      sub.threshold = number_or_inf(s.at("threshold"));
      sub.sample_cap = s.at("sample_cap").get<long>();
      sub.samples_used = s.at("samples_used").get<long>();
      sub.episodes = s.at("episodes").get<int>();
      sub.tests = s.at("tests").get<int>();
      sub.final_running_average = optional_from(s.at("final_running_average"));
      sub.status = status_from_string(s.at("status").get<std::string>());
      for (const auto& p : s.at("curve"))
        sub.curve.push_back({p.at(0).get<long>(), p.at(1).get<double>(), p.at(2).get<double>()});
      r.subtasks.push_back(std::move(sub));
    }
    for (const auto& e : j.at("events")) {
      AdvancementEvent ev;
      ev.subtask = e.at("subtask").get<int>();
      ev.samples_used = e.at("samples_used").get<long>();
      ev.cumulative_samples = e.at("cumulative_samples").get<long>();
      ev.running_average = optional_from(e.at("running_average"));
      ev.threshold = number_or_inf(e.at("threshold"));
      ev.status = status_from_string(e.at("status").get<std::string>());
      r.events.push_back(ev);
    }
    r.aborted = j.at("aborted").get<bool>();
    r.abort_reason = j.at("abort_reason").get<std::string>();
    if (!j.at("final_eval").is_null()) r.final_eval = eval_report_from_json(j.at("final_eval"));
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

// ---- curves ----------------------------------------------------------------

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "cumulative_samples,episode_reward,running_average\n";
  os << std::setprecision(17);
  for (const auto& p : curve)
    os << p.cumulative_samples << ',' << p.episode_reward << ',' << p.running_average << '\n';
}

std::vector<CurvePoint> read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "cumulative_samples,episode_reward,running_average")
    throw ValidationError("curve CSV has an unexpected header");
  std::vector<CurvePoint> out;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    CurvePoint p;
    char c1 = 0, c2 = 0;
    if (!(ls >> p.cumulative_samples >> c1 >> p.episode_reward >> c2 >> p.running_average) ||
        c1 != ',' || c2 != ',')
      throw ValidationError("curve CSV row " + std::to_string(row) + " is malformed");
    out.push_back(p);
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// ---- comparison ------------------------------------------------------------

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool is_stalled(const SubtaskReport& subtask) {
  if (subtask.curve.empty()) return false;
  double lo = subtask.curve.front().episode_reward;
  for (const auto& p : subtask.curve) lo = std::min(lo, p.episode_reward);
  std::size_t at_min = 0;
  for (const auto& p : subtask.curve)
    if (p.episode_reward <= lo) ++at_min;
  return static_cast<double>(at_min) >= 0.95 * static_cast<double>(subtask.curve.size());
}

namespace {

// Running average of the last curve point at or before `samples`.
double running_average_at(const CurriculumReport& r, long samples) {
  double value = 0.0;
  for (const auto& s : r.subtasks)
    for (const auto& p : s.curve) {
      if (p.cumulative_samples > samples) return value;
      value = p.running_average;
    }
  return value;
}

}  // namespace

ComparisonSummary compare_runs(const std::vector<CurriculumReport>& curriculum,
                               const std::vector<CurriculumReport>& flat, int grid_points) {
  if (curriculum.empty() || curriculum.size() != flat.size())
    throw ValidationError("comparison needs the same positive number of curriculum and flat runs");
  if (grid_points < 1) throw ValidationError("grid_points must be positive");
  ComparisonSummary out;
  std::vector<double> cm, fm, dm, cx, fx, dx;
  for (std::size_t i = 0; i < curriculum.size(); ++i) {
    const auto& c = curriculum[i];
    const auto& f = flat[i];
    if (c.task != f.task) throw ValidationError("runs differ in task: " + c.task + " vs " + f.task);
    if (c.sample_limit != f.sample_limit)
      throw ValidationError("runs differ in sample budget: " + std::to_string(c.sample_limit) +
                            " vs " + std::to_string(f.sample_limit));
    if (!c.final_eval || !f.final_eval) throw ValidationError("runs must carry a final evaluation");
    ComparisonRow row;
    row.label = "seed " + std::to_string(c.seed);
    row.curriculum_mean = c.final_eval->mean_reward;
    row.flat_mean = f.final_eval->mean_reward;
    row.delta_mean = row.curriculum_mean - row.flat_mean;
    row.curriculum_max = c.final_eval->max_reward;
    row.flat_max = f.final_eval->max_reward;
    row.delta_max = row.curriculum_max - row.flat_max;
    cm.push_back(row.curriculum_mean);
    fm.push_back(row.flat_mean);
    dm.push_back(row.delta_mean);
    cx.push_back(row.curriculum_max);
    fx.push_back(row.flat_max);
    dx.push_back(row.delta_max);
    out.rows.push_back(row);

    for (const auto* r : {&c, &f})
      for (std::size_t k = 0; k < r->subtasks.size(); ++k)
        if (is_stalled(r->subtasks[k]))
          out.stalls.push_back({r->mode + " seed " + std::to_string(r->seed), static_cast<int>(k),
                                r->subtasks[k].name});
  }
  if (curriculum.size() > 1) {
    out.rows.push_back({"median", median(cm), median(fm), median(dm), median(cx), median(fx),
                        median(dx)});
  }
  const long budget = curriculum.front().sample_limit;
  for (int g = 1; g <= grid_points; ++g) {
    const long s = budget * g / grid_points;
    out.curve.push_back(
        {s, running_average_at(curriculum.front(), s), running_average_at(flat.front(), s)});
  }
  return out;
}

json to_json(const ComparisonSummary& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"label", r.label},
                    {"curriculum_mean", r.curriculum_mean},
                    {"flat_mean", r.flat_mean},
                    {"delta_mean", r.delta_mean},
                    {"curriculum_max", r.curriculum_max},
                    {"flat_max", r.flat_max},
                    {"delta_max", r.delta_max}});
  json curve = json::array();
  for (const auto& p : s.curve)
    curve.push_back({{"samples", p.samples},
                     {"curriculum_running_average", p.curriculum_running_average},
                     {"flat_running_average", p.flat_running_average}});
  json stalls = json::array();
  for (const auto& f : s.stalls)
    stalls.push_back({{"run", f.run}, {"subtask", f.subtask}, {"name", f.name}});
  return {{"rows", rows}, {"curve", curve}, {"stalls", stalls}};
}

}  // namespace hrl
