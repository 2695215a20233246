#include "hrl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "hrl/error.hpp"

namespace hrl {

using nlohmann::json;

namespace {

// Carries the offending key so parse_config can report its line.
struct KeyedError : ValidationError {
  KeyedError(std::string key, const std::string& what)
      : ValidationError(what), key(std::move(key)) {}
  std::string key;
};

void expect_keys(const json& j, std::initializer_list<std::string_view> allowed,
                 const std::string& ctx) {
  if (!j.is_object()) throw KeyedError("", ctx + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw KeyedError(k, "unknown key '" + k + "' in " + ctx);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw KeyedError(key, ctx + "." + key + ": " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw KeyedError("", ctx + " is missing required key '" + key + "'");
  T out{};
  read(j, key, out, ctx);
  return out;
}

json cell_json(Cell c) { return json::array({c.x, c.y}); }

Cell cell_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw KeyedError(key, std::string(key) + " must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string_view to_string(RunMode mode) {
  return mode == RunMode::kCurriculum ? "curriculum" : "flat";
}

RunMode run_mode_from_string(std::string_view name) {
  if (name == "curriculum") return RunMode::kCurriculum;
  if (name == "flat") return RunMode::kFlat;
  throw ValidationError("unknown mode '" + std::string(name) + "'");
}

// ---- MiniBuild -------------------------------------------------------------

json to_json(const MiniBuildState& s) {
  return {{"minerals", s.minerals},
          {"gas", s.gas},
          {"scv_idle", s.scv_idle},
          {"scv_minerals", s.scv_minerals},
          {"scv_gas", s.scv_gas},
          {"refineries", s.refineries},
          {"depots", s.depots},
          {"barracks", s.barracks},
          {"marines", s.marines},
          {"supply_used", s.supply_used},
          {"supply_cap", s.supply_cap}};
}

MiniBuildState minibuild_state_from_json(const json& j) {
  const std::string ctx = "initial";
  expect_keys(j,
              {"minerals", "gas", "scv_idle", "scv_minerals", "scv_gas", "refineries", "depots",
               "barracks", "marines", "supply_used", "supply_cap"},
              ctx);
  MiniBuildState s = pristine_state();
  read(j, "minerals", s.minerals, ctx);
  read(j, "gas", s.gas, ctx);
  read(j, "scv_idle", s.scv_idle, ctx);
  read(j, "scv_minerals", s.scv_minerals, ctx);
  read(j, "scv_gas", s.scv_gas, ctx);
  read(j, "refineries", s.refineries, ctx);
  read(j, "depots", s.depots, ctx);
  read(j, "barracks", s.barracks, ctx);
  read(j, "marines", s.marines, ctx);
  read(j, "supply_used", s.supply_used, ctx);
  read(j, "supply_cap", s.supply_cap, ctx);
  return s;
}

json to_json(const MiniBuildConfig& c) {
  return {{"costs",
           {{"scv", c.cost_scv},
            {"refinery", c.cost_refinery},
            {"depot", c.cost_depot},
            {"barracks", c.cost_barracks},
            {"marine", c.cost_marine}}},
          {"mineral_yield", c.mineral_yield},
          {"gas_yield", c.gas_yield},
          {"depot_supply", c.depot_supply},
          {"mineral_saturation", c.mineral_saturation},
          {"refinery_cap", c.refinery_cap},
          {"gas_slots_per_refinery", c.gas_slots_per_refinery},
          {"supply_max", c.supply_max},
          {"horizon", c.horizon},
          {"reward_mode", std::string(to_string(c.reward_mode))},
          {"initial", to_json(c.initial)}};
}

MiniBuildConfig minibuild_config_from_json(const json& j) {
  const std::string ctx = "minibuild";
  expect_keys(j,
              {"costs", "mineral_yield", "gas_yield", "depot_supply", "mineral_saturation",
               "refinery_cap", "gas_slots_per_refinery", "supply_max", "horizon", "reward_mode",
               "initial"},
              ctx);
  MiniBuildConfig c;
  if (j.contains("costs")) {
    const json& k = j["costs"];
    expect_keys(k, {"scv", "refinery", "depot", "barracks", "marine"}, "costs");
    read(k, "scv", c.cost_scv, "costs");
    read(k, "refinery", c.cost_refinery, "costs");
    read(k, "depot", c.cost_depot, "costs");
    read(k, "barracks", c.cost_barracks, "costs");
    read(k, "marine", c.cost_marine, "costs");
  }
  read(j, "mineral_yield", c.mineral_yield, ctx);
  read(j, "gas_yield", c.gas_yield, ctx);
  read(j, "depot_supply", c.depot_supply, ctx);
  read(j, "mineral_saturation", c.mineral_saturation, ctx);
  read(j, "refinery_cap", c.refinery_cap, ctx);
  read(j, "gas_slots_per_refinery", c.gas_slots_per_refinery, ctx);
  read(j, "supply_max", c.supply_max, ctx);
  read(j, "horizon", c.horizon, ctx);
  if (j.contains("reward_mode")) {
    try {
      c.reward_mode = reward_mode_from_string(j["reward_mode"].get<std::string>());
    } catch (const std::exception& e) {
      throw KeyedError("reward_mode", e.what());
    }
  }
  if (j.contains("initial")) c.initial = minibuild_state_from_json(j["initial"]);
  return c;
}

// ---- GridNav ---------------------------------------------------------------

json to_json(const GridNavConfig& c) {
  json wp = json::array();
  for (Cell w : c.waypoints) wp.push_back(cell_json(w));
  return {{"width", c.width},
          {"height", c.height},
          {"start", cell_json(c.start)},
          {"goal", cell_json(c.goal)},
          {"waypoints", wp},
          {"step_reward", c.step_reward},
          {"goal_reward", c.goal_reward},
          {"max_steps", c.max_steps},
          {"encoding", c.encoding == GridEncoding::kOneHot ? "onehot" : "coordinates"},
          {"random_start", c.random_start},
          {"random_goal", c.random_goal}};
}

GridNavConfig gridnav_config_from_json(const json& j) {
  const std::string ctx = "gridnav";
  expect_keys(j,
              {"width", "height", "start", "goal", "waypoints", "step_reward", "goal_reward",
               "max_steps", "encoding", "random_start", "random_goal"},
              ctx);
  GridNavConfig c;
  read(j, "width", c.width, ctx);
  read(j, "height", c.height, ctx);
  if (j.contains("start")) c.start = cell_from(j["start"], "start");
  if (j.contains("goal")) c.goal = cell_from(j["goal"], "goal");
  if (j.contains("waypoints")) {
    if (!j["waypoints"].is_array()) throw KeyedError("waypoints", "waypoints must be an array");
    for (const auto& w : j["waypoints"]) c.waypoints.push_back(cell_from(w, "waypoints"));
  }
  read(j, "step_reward", c.step_reward, ctx);
  read(j, "goal_reward", c.goal_reward, ctx);
  read(j, "max_steps", c.max_steps, ctx);
  if (j.contains("encoding")) {
    const std::string e = j["encoding"].get<std::string>();
    if (e == "onehot")
      c.encoding = GridEncoding::kOneHot;
    else if (e == "coordinates")
      c.encoding = GridEncoding::kCoordinates;
    else
      throw KeyedError("encoding", "encoding must be 'onehot' or 'coordinates'");
  }
  read(j, "random_start", c.random_start, ctx);
  read(j, "random_goal", c.random_goal, ctx);
  return c;
}

// ---- subtasks --------------------------------------------------------------

json to_json(const SubtaskSpec& s) {
  json j{{"name", s.name}, {"threshold", s.threshold}};
  if (s.is_minibuild())
    j["minibuild"] = to_json(s.minibuild());
  else
    j["gridnav"] = to_json(s.gridnav());
  return j;
}

SubtaskSpec subtask_from_json(const json& j) {
  expect_keys(j, {"name", "threshold", "minibuild", "gridnav"}, "subtask");
  SubtaskSpec s;
  s.name = require<std::string>(j, "name", "subtask");
  s.threshold = require<double>(j, "threshold", "subtask");
  if (j.contains("minibuild") == j.contains("gridnav"))
    throw KeyedError("", "subtask needs exactly one of 'minibuild' or 'gridnav'");
  if (j.contains("minibuild"))
    s.env = minibuild_config_from_json(j["minibuild"]);
  else
    s.env = gridnav_config_from_json(j["gridnav"]);
  return s;
}

// ---- learners --------------------------------------------------------------

json to_json(const DqnConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"gamma", c.gamma},
          {"target_sync_interval", c.target_sync_interval},
          {"epsilon",
           {{"start", c.epsilon.start}, {"end", c.epsilon.end}, {"decay_steps", c.epsilon.decay_steps}}},
          {"buffer_capacity", c.buffer_capacity},
          {"train_every", c.train_every},
          {"learning_starts", c.learning_starts},
          {"optimizer", std::string(to_string(c.optimizer))},
          {"max_grad_norm", c.max_grad_norm},
          {"hidden", c.hidden},
          {"relabel", c.relabel == RelabelStrategy::kFinal ? "final" : "none"},
          {"tabular_alpha", c.tabular_alpha}};
}

DqnConfig dqn_config_from_json(const json& j) {
  const std::string ctx = "dqn";
  expect_keys(j,
              {"learning_rate", "batch_size", "gamma", "target_sync_interval", "epsilon",
               "buffer_capacity", "train_every", "learning_starts", "optimizer", "max_grad_norm",
               "hidden", "relabel", "tabular_alpha"},
              ctx);
  DqnConfig c;
  read(j, "learning_rate", c.learning_rate, ctx);
  read(j, "batch_size", c.batch_size, ctx);
  read(j, "gamma", c.gamma, ctx);
  read(j, "target_sync_interval", c.target_sync_interval, ctx);
  if (j.contains("epsilon")) {
    const json& e = j["epsilon"];
    expect_keys(e, {"start", "end", "decay_steps"}, "dqn.epsilon");
    read(e, "start", c.epsilon.start, "dqn.epsilon");
    read(e, "end", c.epsilon.end, "dqn.epsilon");
    read(e, "decay_steps", c.epsilon.decay_steps, "dqn.epsilon");
  }
  read(j, "buffer_capacity", c.buffer_capacity, ctx);
  read(j, "train_every", c.train_every, ctx);
  read(j, "learning_starts", c.learning_starts, ctx);
  if (j.contains("optimizer")) {
    try {
      c.optimizer = optimizer_from_string(j["optimizer"].get<std::string>());
    } catch (const std::exception& e) {
      throw KeyedError("optimizer", e.what());
    }
  }
  read(j, "max_grad_norm", c.max_grad_norm, ctx);
  read(j, "hidden", c.hidden, ctx);
  if (j.contains("relabel")) {
    const std::string r = j["relabel"].get<std::string>();
    if (r == "final")
      c.relabel = RelabelStrategy::kFinal;
    else if (r == "none")
      c.relabel = RelabelStrategy::kNone;
    else
      throw KeyedError("relabel", "relabel must be 'none' or 'final'");
  }
  read(j, "tabular_alpha", c.tabular_alpha, ctx);
  return c;
}

json to_json(const PpoConfig& c) {
  return {{"trajectory_length", c.trajectory_length},
          {"clip_epsilon", c.clip_epsilon},
          {"epochs_per_batch", c.epochs_per_batch},
          {"minibatch_size", c.minibatch_size},
          {"value_coef", c.value_coef},
          {"entropy_coef", c.entropy_coef},
          {"gae_lambda", c.gae_lambda},
          {"gamma", c.gamma},
          {"learning_rate", c.learning_rate},
          {"optimizer", std::string(to_string(c.optimizer))},
          {"max_grad_norm", c.max_grad_norm},
          {"normalize_advantages", c.normalize_advantages},
          {"hidden", c.hidden}};
}

PpoConfig ppo_config_from_json(const json& j) {
  const std::string ctx = "ppo";
  expect_keys(j,
              {"trajectory_length", "clip_epsilon", "epochs_per_batch", "minibatch_size",
               "value_coef", "entropy_coef", "gae_lambda", "gamma", "learning_rate", "optimizer",
               "max_grad_norm", "normalize_advantages", "hidden"},
              ctx);
  PpoConfig c;
  read(j, "trajectory_length", c.trajectory_length, ctx);
  read(j, "clip_epsilon", c.clip_epsilon, ctx);
  read(j, "epochs_per_batch", c.epochs_per_batch, ctx);
  read(j, "minibatch_size", c.minibatch_size, ctx);
  read(j, "value_coef", c.value_coef, ctx);
  read(j, "entropy_coef", c.entropy_coef, ctx);
  read(j, "gae_lambda", c.gae_lambda, ctx);
  read(j, "gamma", c.gamma, ctx);
  read(j, "learning_rate", c.learning_rate, ctx);
  if (j.contains("optimizer")) {
    try {
      c.optimizer = optimizer_from_string(j["optimizer"].get<std::string>());
    } catch (const std::exception& e) {
      throw KeyedError("optimizer", e.what());
    }
  }
  read(j, "max_grad_norm", c.max_grad_norm, ctx);
  read(j, "normalize_advantages", c.normalize_advantages, ctx);
  read(j, "hidden", c.hidden, ctx);
  return c;
}

// ---- experiment ------------------------------------------------------------

std::vector<SubtaskSpec> ExperimentConfig::resolved_subtasks() const {
  if (!subtasks.empty()) return subtasks;
  if (task == Task::kGridNav) return gridnav_decomposition(gridnav);
  return decomposition(task);
}

std::vector<double> ExperimentConfig::resolved_thresholds() const {
  if (!thresholds.empty()) return thresholds;
  std::vector<double> out;
  for (const auto& s : resolved_subtasks()) out.push_back(s.threshold);
  return out;
}

SubtaskSpec ExperimentConfig::evaluation_task() const { return resolved_subtasks().back(); }

CurriculumSpec ExperimentConfig::curriculum_spec() const {
  CurriculumSpec spec;
  spec.subtasks = resolved_subtasks();
  spec.thresholds = resolved_thresholds();
  spec.sample_limit = sample_limit;
  spec.test_window = test_window;
  spec.test_interval = test_interval;
  spec.fresh_heads = fresh_heads;
  return spec;
}

void ExperimentConfig::validate() const {
  if (sample_limit < 0) throw ValidationError("sample_limit must be non-negative");
  if (eval_episodes < 1) throw ValidationError("eval_episodes must be positive");
  if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
  dqn.validate();
  ppo.validate();
  if (task == Task::kGridNav) gridnav.validate();
  const auto subs = resolved_subtasks();
  for (const auto& s : subs) s.validate();
  if (!thresholds.empty() && thresholds.size() != subs.size())
    throw ValidationError("thresholds length must equal the number of subtasks");
  for (double t : resolved_thresholds())
    if (!std::isfinite(t)) throw ValidationError("thresholds must be finite");
  if (mode == RunMode::kCurriculum && sample_limit > 0) curriculum_spec().validate();
}

json to_json(const ExperimentConfig& c) {
  json j{{"task", std::string(to_string(c.task))},
         {"mode", std::string(to_string(c.mode))},
         {"learner", std::string(to_string(c.learner))},
         {"seed", c.seed},
         {"sample_limit", c.sample_limit},
         {"output_dir", c.output_dir},
         {"dqn", to_json(c.dqn)},
         {"ppo", to_json(c.ppo)},
         {"curriculum",
          {{"thresholds", c.resolved_thresholds()},
           {"test_window", c.test_window},
           {"test_interval", c.test_interval},
           {"fresh_heads", c.fresh_heads}}},
         {"eval_episodes", c.eval_episodes}};
  if (c.task == Task::kGridNav) j["gridnav"] = to_json(c.gridnav);
  if (!c.subtasks.empty()) {
    json subs = json::array();
    for (const auto& s : c.subtasks) subs.push_back(to_json(s));
    j["subtasks"] = subs;
  }
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  const std::string ctx = "config";
  expect_keys(j,
              {"task", "mode", "learner", "seed", "sample_limit", "output_dir", "dqn", "ppo",
               "curriculum", "eval_episodes", "gridnav", "subtasks"},
              ctx);
  ExperimentConfig c;
  try {
    c.task = task_from_string(require<std::string>(j, "task", ctx));
  } catch (const KeyedError&) {
    throw;
  } catch (const std::exception& e) {
    throw KeyedError("task", e.what());
  }
  if (j.contains("mode")) {
    try {
      c.mode = run_mode_from_string(j["mode"].get<std::string>());
    } catch (const std::exception& e) {
      throw KeyedError("mode", e.what());
    }
  }
  if (j.contains("learner")) {
    try {
      c.learner = learner_from_string(j["learner"].get<std::string>());
    } catch (const std::exception& e) {
      throw KeyedError("learner", e.what());
    }
  }
  if (!j.contains("seed"))
    throw KeyedError("", "config must set an explicit 'seed' (no wall-clock default)");
  read(j, "seed", c.seed, ctx);
  read(j, "sample_limit", c.sample_limit, ctx);
  read(j, "output_dir", c.output_dir, ctx);
  if (j.contains("dqn")) c.dqn = dqn_config_from_json(j["dqn"]);
  if (j.contains("ppo")) c.ppo = ppo_config_from_json(j["ppo"]);
  if (j.contains("curriculum")) {
    const json& k = j["curriculum"];
    expect_keys(k, {"thresholds", "test_window", "test_interval", "fresh_heads"}, "curriculum");
    read(k, "thresholds", c.thresholds, "curriculum");
    read(k, "test_window", c.test_window, "curriculum");
    read(k, "test_interval", c.test_interval, "curriculum");
    read(k, "fresh_heads", c.fresh_heads, "curriculum");
  }
  read(j, "eval_episodes", c.eval_episodes, ctx);
  if (j.contains("gridnav")) c.gridnav = gridnav_config_from_json(j["gridnav"]);
  if (j.contains("subtasks")) {
    if (!j["subtasks"].is_array()) throw KeyedError("subtasks", "subtasks must be an array");
    for (const auto& s : j["subtasks"]) c.subtasks.push_back(subtask_from_json(s));
  }
  // Thresholds equal to the defaults are stored implicitly so that a
  // round trip through to_json compares equal.
  if (!c.thresholds.empty()) {
    std::vector<double> defaults;
    for (const auto& s : c.resolved_subtasks()) defaults.push_back(s.threshold);
    if (defaults == c.thresholds) c.thresholds.clear();
  }
  try {
    c.validate();
  } catch (const KeyedError&) {
    throw;
  } catch (const ValidationError& e) {
    // Point at the first field name the message mentions.
    static const std::regex field(R"(([a-z_]+)\.([a-z_]+))");
    std::smatch m;
    const std::string what = e.what();
    std::string key;
    if (std::regex_search(what, m, field)) key = m[2];
    else {
      static const std::regex bare(R"(^([a-z_]+) )");
      if (std::regex_search(what, m, bare)) key = m[1];
    }
    throw KeyedError(key, what);
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ValidationError(origin + ":" + std::to_string(line) + ": JSON syntax error: " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const KeyedError& e) {
    long line = 0;
    if (!e.key.empty()) {
      const std::size_t pos = text.find("\"" + e.key + "\"");
      if (pos != std::string::npos) line = 1 + std::count(text.begin(), text.begin() + pos, '\n');
    }
    const std::string where = line > 0 ? origin + ":" + std::to_string(line) : origin;
    throw ValidationError(where + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write config file " + path.string());
  out << to_json(config).dump(2) << '\n';
}

ExperimentConfig default_config(Task task, RunMode mode, std::uint64_t seed) {
  ExperimentConfig c;
  c.task = task;
  c.mode = mode;
  c.seed = seed;
  if (task == Task::kGridNav) {
    c.learner = LearnerKind::kDqn;
    c.sample_limit = 100000;
  }
  c.output_dir = "runs/" + std::string(to_string(task)) + "-" + std::string(to_string(mode)) +
                 "-" + std::to_string(seed);
  return c;
}

std::string config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AgentShape agent_shape_for(const SubtaskSpec& task) {
  const auto env = make_environment(task);
  AgentShape shape;
  shape.state_dim = env->spec().state_dim;
  shape.action_count = env->spec().action_count;
  shape.feature_scale = env->spec().feature_scale;
  Rng rng(0);
  env->reset(rng);
  if (env->goal()) shape.goal_dim = shape.state_dim;
  return shape;
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& c, const AgentShape& shape,
                                  Rng& init_rng) {
  switch (c.learner) {
    case LearnerKind::kTabular: return std::make_unique<TabularAgent>(shape, c.dqn);
    case LearnerKind::kDqn: return std::make_unique<DqnAgent>(shape, c.dqn, init_rng);
    case LearnerKind::kPpo: return std::make_unique<PpoAgent>(shape, c.ppo, init_rng);
  }
  throw ValidationError("unknown learner");
}

}  // namespace hrl
