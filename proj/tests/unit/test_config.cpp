#include <doctest.h>

#include <filesystem>
#include <string>

#include "hrl/config.hpp"
#include "hrl/error.hpp"

using namespace hrl;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal BM config takes the default thresholds") {
  const auto c = parse_config(R"({"task": "BM", "mode": "curriculum", "seed": 1})");
  CHECK(c.resolved_thresholds() == std::vector<double>{7, 7, 7, 2});
  CHECK(c.resolved_subtasks().size() == 4);
  CHECK(c.learner == LearnerKind::kPpo);
  CHECK(c.sample_limit == 500000);
}

TEST_CASE("defaults match the documented hyperparameters") {
  const auto c = parse_config(R"({"task": "CMAG", "seed": 3})");
  CHECK(c.ppo.learning_rate == 0.0007);
  CHECK(c.dqn.learning_rate == 0.0007);
  CHECK(c.dqn.batch_size == 32);
  CHECK(c.ppo.trajectory_length == 40);
  CHECK(c.eval_episodes == 30);
  CHECK(c.resolved_thresholds() == std::vector<double>{300, 5, 5, 5, 500});
  const auto d = default_config(Task::kGridNav, RunMode::kFlat, 4);
  CHECK(d.learner == LearnerKind::kDqn);
  CHECK(d.sample_limit == 100000);
  CHECK(d.output_dir == "runs/GridNav-flat-4");
}

TEST_CASE("negative learning rate is rejected with its line") {
  const std::string text =
      "{\n  \"task\": \"BM\",\n  \"seed\": 1,\n  \"ppo\": {\n    \"learning_rate\": -0.1\n  }\n}\n";
  const std::string msg = error_of(text);
  CHECK(msg.find("cfg.json:5") != std::string::npos);
  CHECK(msg.find("learning_rate") != std::string::npos);
}

TEST_CASE("unknown keys are reported with their line") {
  const std::string msg = error_of("{\n  \"seed\": 1,\n  \"task\": \"BM\",\n  \"learnig_rate\": 1\n}");
  CHECK(msg.find("cfg.json:4") != std::string::npos);
  CHECK(msg.find("learnig_rate") != std::string::npos);
}

TEST_CASE("other malformed configs") {
  CHECK(error_of(R"({"task": "BM"})").find("seed") != std::string::npos);
  CHECK(error_of(R"({"task": "BM", "seed": 1,)").find("cfg.json:1") != std::string::npos);
  CHECK(error_of(R"({"task": "XX", "seed": 1})").find("XX") != std::string::npos);
  CHECK_FALSE(error_of(R"({"task": "BM", "seed": "one"})").empty());
  CHECK_FALSE(error_of(R"({"task": "BM", "seed": 1, "sample_limit": 2})").empty());
  CHECK_FALSE(error_of(R"({"task": "BM", "seed": 1, "curriculum": {"thresholds": [1, 2]}})").empty());
  CHECK_FALSE(error_of(R"({"task": "BM", "seed": 1, "dqn": {"epsilon": {"start": 2}}})").empty());
  CHECK_FALSE(error_of(R"({"task": "BM", "seed": 1, "eval_episodes": 0})").empty());
  CHECK_FALSE(error_of("[1, 2]").empty());
}

TEST_CASE("save and load round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "hrl_config_test";
  std::filesystem::create_directories(dir);
  for (Task t : {Task::kBm, Task::kCmag, Task::kGridNav}) {
    for (RunMode m : {RunMode::kCurriculum, RunMode::kFlat}) {
      ExperimentConfig c = default_config(t, m, 11);
      c.dqn.hidden = {5, 6};
      c.ppo.clip_epsilon = 0.3;
      c.fresh_heads = true;
      const auto path = dir / "c.json";
      save_config(c, path);
      CHECK(load_config(path) == c);
      CHECK(config_from_json(to_json(c)) == c);
    }
  }
  ExperimentConfig custom = default_config(Task::kBm, RunMode::kCurriculum, 1);
  custom.thresholds = {1, 2, 3, 4};
  CHECK(config_from_json(to_json(custom)) == custom);
  std::filesystem::remove_all(dir);
}

TEST_CASE("repository configs load") {
  for (const char* name : {"bm_curriculum.json", "bm_flat.json", "gridnav_her.json",
                           "gridnav_noher.json"}) {
    CAPTURE(name);
    const auto c = load_config(std::filesystem::path(HRL_SOURCE_DIR) / "configs" / name);
    CHECK(c.seed == 1);
  }
}

TEST_CASE("config hash ignores the output directory only") {
  ExperimentConfig a = default_config(Task::kBm, RunMode::kFlat, 1);
  ExperimentConfig b = a;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("agent shapes and factory") {
  const auto bm = agent_shape_for(final_task(Task::kBm));
  CHECK(bm.goal_dim == 0);
  CHECK(bm.state_dim == kMiniBuildStateDim);
  GridNavConfig g;
  const auto gs = agent_shape_for(SubtaskSpec{"nav", g, 0.0});
  CHECK(gs.goal_dim == gs.state_dim);
  g.goal_reward = 10.0;
  CHECK(agent_shape_for(SubtaskSpec{"nav", g, 0.0}).goal_dim == 0);
  ExperimentConfig c = default_config(Task::kBm, RunMode::kFlat, 1);
  Rng rng(0);
  for (LearnerKind k : {LearnerKind::kTabular, LearnerKind::kDqn, LearnerKind::kPpo}) {
    c.learner = k;
    CHECK(make_agent(c, bm, rng)->kind() == k);
  }
}
