#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>

#include <CLI11.hpp>

#include "hrl/error.hpp"
#include "hrl/harness.hpp"
#include "hrl/oracle.hpp"

namespace hrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A run directory or a file inside one.
fs::path resolve_artifact(const std::string& arg, const char* file) {
  fs::path p(arg);
  if (fs::is_directory(p)) p /= file;
  if (!fs::exists(p)) throw ValidationError("no such file: " + p.string());
  return p;
}

void print_rows(std::ostream& out, const ComparisonSummary& s) {
  out << std::left << std::setw(14) << "run" << std::right;
  for (const char* h : {"cur_mean", "flat_mean", "d_mean", "cur_max", "flat_max", "d_max"})
    out << std::setw(11) << h;
  out << '\n' << std::fixed << std::setprecision(3);
  for (const auto& r : s.rows) {
    out << std::left << std::setw(14) << r.label << std::right;
    for (double v : {r.curriculum_mean, r.flat_mean, r.delta_mean, r.curriculum_max, r.flat_max,
                     r.delta_max})
      out << std::setw(11) << v;
    out << '\n';
  }
  for (const auto& f : s.stalls)
    out << "stall: " << f.run << " subtask " << f.subtask << " (" << f.name << ")\n";
  out.unsetf(std::ios::fixed);
}

GridNavConfig oracle_grid(const std::string& env) {
  static const std::regex pat(R"(gridnav(\d+))");
  std::smatch m;
  if (!std::regex_match(env, m, pat))
    throw ValidationError("unknown oracle environment '" + env + "' (expected gridnavN)");
  const int n = std::stoi(m[1]);
  if (n < 2 || n > 64) throw ValidationError("oracle grid size must be in [2, 64]");
  GridNavConfig cfg;
  cfg.width = cfg.height = n;
  cfg.start = {0, 0};
  cfg.goal = {n - 1, n - 1};
  cfg.max_steps = 4 * n * n;
  return cfg;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical RL with expert subgoal curricula", "hrl"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Run a curriculum or flat training run");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  train_cmd->add_option("--config", config_path, "Experiment config JSON")->required();
  train_cmd->add_option("--seed", seed, "Override the config seed");
  train_cmd->add_option("--out", out_dir, "Override the output directory");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  std::string checkpoint_path;
  int episodes = kEvalEpisodes;
  std::uint64_t eval_seed = 0;
  std::string eval_out;
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint.json or its run directory")
      ->required();
  eval_cmd->add_option("--episodes", episodes, "Evaluation episodes")->capture_default_str();
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed")->capture_default_str();
  eval_cmd->add_option("--out", eval_out, "Also write the report to this file");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Compare curriculum and flat runs");
  std::vector<std::string> cur_runs, flat_runs;
  int grid = 20;
  std::string compare_out;
  compare_cmd->add_option("--curriculum", cur_runs, "Curriculum run dirs or report files")
      ->required();
  compare_cmd->add_option("--flat", flat_runs, "Flat run dirs or report files")->required();
  compare_cmd->add_option("--grid", grid, "Points on the aligned curve")->capture_default_str();
  compare_cmd->add_option("--out", compare_out, "Also write the summary JSON to this file");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Value-iteration Q* table for a small MDP");
  std::string oracle_env;
  double gamma = 0.99;
  std::string oracle_out = "oracle";
  oracle_cmd->add_option("--env", oracle_env, "gridnavN (N x N grid, corner to corner)")
      ->required();
  oracle_cmd->add_option("--gamma", gamma, "Discount")->capture_default_str();
  oracle_cmd->add_option("--out", oracle_out, "Output directory")->capture_default_str();

  // dump-config
  auto* dump_cmd = app.add_subcommand("dump-config", "Print a complete default config");
  std::string task_name = "BM", mode_name = "curriculum";
  std::uint64_t dump_seed = 1;
  dump_cmd->add_option("--task", task_name, "CMAG, BM or GridNav")->capture_default_str();
  dump_cmd->add_option("--mode", mode_name, "curriculum or flat")->capture_default_str();
  dump_cmd->add_option("--seed", dump_seed, "Seed to record")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << app.help() << '\n';
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*train_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      if (seed) cfg.seed = *seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const fs::path dir = resolve_output_dir(cfg.output_dir);
      const TrainResult result = train(cfg);
      write_run(cfg, result, dir);
      const auto& ev = *result.report.final_eval;
      out << "run written to " << dir.string() << '\n'
          << "samples " << result.report.total_samples << ", eval mean " << ev.mean_reward
          << ", max " << ev.max_reward << " over " << ev.episodes << " episodes\n";
      return result.report.aborted ? 3 : 0;
    }
    if (*eval_cmd) {
      const json ckpt = read_json_file(resolve_artifact(checkpoint_path, "checkpoint.json"));
      Rng rng(eval_seed);
      const EvalReport report = evaluate_checkpoint(ckpt, episodes, rng);
      const json j = to_json(report);
      if (!eval_out.empty()) {
        const fs::path p = resolve_output_dir(eval_out);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_json_file(p, j);
      }
      out << j.dump(2) << '\n';
      return 0;
    }
    if (*compare_cmd) {
      std::vector<CurriculumReport> cur, flat;
      for (const auto& r : cur_runs)
        cur.push_back(report_from_json(read_json_file(resolve_artifact(r, "report.json"))));
      for (const auto& r : flat_runs)
        flat.push_back(report_from_json(read_json_file(resolve_artifact(r, "report.json"))));
      const ComparisonSummary s = compare_runs(cur, flat, grid);
      print_rows(out, s);
      if (!compare_out.empty()) {
        const fs::path p = resolve_output_dir(compare_out);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_json_file(p, to_json(s));
      }
      return 0;
    }
    if (*oracle_cmd) {
      const GridNavModel model(oracle_grid(oracle_env), gamma);
      const TabularMdp mdp = enumerate_mdp(model);
      const ValueIterationResult vi = value_iterate(mdp);
      const fs::path dir = resolve_output_dir(oracle_out);
      fs::create_directories(dir);
      const fs::path file = dir / (oracle_env + "_qstar.csv");
      std::ofstream f(file);
      if (!f) throw ValidationError("cannot write " + file.string());
      write_q_csv(f, mdp, vi);
      out << "Q* for " << mdp.state_count() << " states written to " << file.string() << " ("
          << vi.iterations << " sweeps)\n";
      return 0;
    }
    if (*dump_cmd) {
      const ExperimentConfig cfg =
          default_config(task_from_string(task_name), run_mode_from_string(mode_name), dump_seed);
      out << to_json(cfg).dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace hrl
