#include "hrl/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hrl/error.hpp"

namespace hrl {

void CurriculumSpec::validate() const {
  if (subtasks.empty()) throw ValidationError("curriculum needs at least one subtask");
  if (thresholds.size() != subtasks.size())
    throw ValidationError("thresholds length must equal the number of subtasks");
  for (double t : thresholds)
    if (std::isnan(t)) throw ValidationError("thresholds must not be NaN");
  if (sample_limit < static_cast<long>(subtasks.size()))
    throw ValidationError("sample_limit must be at least the number of subtasks");
  if (test_window < 1) throw ValidationError("test_window must be positive");
  if (test_interval < 1) throw ValidationError("test_interval must be positive");
  for (const auto& s : subtasks) s.validate();
}

std::string_view to_string(SubtaskStatus status) {
  switch (status) {
    case SubtaskStatus::kThresholdMet: return "threshold-met";
    case SubtaskStatus::kBudgetExhausted: return "budget-exhausted";
    case SubtaskStatus::kAborted: return "aborted";
    case SubtaskStatus::kNotStarted: return "not-started";
  }
  return "?";
}

SubtaskStatus status_from_string(std::string_view name) {
  for (auto s : {SubtaskStatus::kThresholdMet, SubtaskStatus::kBudgetExhausted,
                 SubtaskStatus::kAborted, SubtaskStatus::kNotStarted})
    if (to_string(s) == name) return s;
  throw ValidationError("unknown subtask status '" + std::string(name) + "'");
}

EpisodeCollector::EpisodeCollector(std::unique_ptr<Environment> env) : env_(std::move(env)) {}

EpisodeCollector::Batch EpisodeCollector::collect(Agent& agent, long budget, Rng& rng) {
  Batch batch;
  const MdpSpec& spec = env_->spec();
  for (long k = 0; k < budget; ++k) {
    if (!in_episode_) {
      state_ = env_->reset(rng);
      in_episode_ = true;
      episode_reward_ = 0.0;
      episode_steps_ = 0;
    }
    const std::optional<StateVec> goal = env_->goal();
    const ActionId action = agent.act(state_, goal, rng);
    check_action(action, spec.action_count);
    StepResult res = env_->step(action);
    ++episode_steps_;
    if (!res.terminal && episode_steps_ >= spec.max_steps) res.truncated = true;
    episode_reward_ += res.reward;
    batch.experiences.push_back(
        {state_, action, res.reward, res.next_state, res.terminal, res.truncated, goal});
    state_ = std::move(res.next_state);
    if (res.terminal || res.truncated) {
      in_episode_ = false;
      batch.episode_rewards.push_back(episode_reward_);
      batch.episode_ends.push_back(batch.experiences.size());
    }
  }
  return batch;
}

EpisodeCollector::Batch explore_collect(EpisodeCollector& collector, Agent& agent, long budget,
                                        Rng& rng) {
  return collector.collect(agent, budget, rng);
}

std::optional<double> test_running_average(std::span<const double> episode_rewards, int window) {
  if (episode_rewards.empty() || window < 1) return std::nullopt;
  const std::size_t k = std::min<std::size_t>(episode_rewards.size(), window);
  const auto tail = episode_rewards.last(k);
  return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(k);
}

EnvFactory default_env_factory(double gamma) {
  return [gamma](const SubtaskSpec& s, int) { return make_environment(s, gamma); };
}

namespace {

void run_stage(const CurriculumSpec& spec, int i, long cap, Agent& agent, Rng& rng,
               const EnvFactory& factory, CurriculumReport& report) {
  SubtaskReport& sub = report.subtasks[i];
  sub.status = SubtaskStatus::kBudgetExhausted;
  const double threshold = spec.thresholds[i];
  agent.begin_subtask(i, spec.fresh_heads, rng);
  EpisodeCollector collector(factory(spec.subtasks[i], i));
  std::vector<double> rewards;
  int episodes_at_last_test = 0;
  const long chunk = std::max(1, agent.collect_chunk());

  long c = 0;
  while (c < cap) {
    const long budget = std::min(chunk, cap - c);
    EpisodeCollector::Batch batch = explore_collect(collector, agent, budget, rng);
    const long consumed = static_cast<long>(batch.experiences.size());
    // Curve points carry the cumulative sample count at each episode's end.
    for (std::size_t e = 0; e < batch.episode_rewards.size(); ++e) {
      rewards.push_back(batch.episode_rewards[e]);
      const long at = report.total_samples + static_cast<long>(batch.episode_ends[e]);
      sub.curve.push_back({at, batch.episode_rewards[e],
                           *test_running_average(rewards, spec.test_window)});
    }
    c += consumed;
    report.total_samples += consumed;
    sub.samples_used = c;
    sub.episodes = static_cast<int>(rewards.size());

    agent.learn(batch.experiences, rng);

    if (static_cast<int>(rewards.size()) - episodes_at_last_test >= spec.test_interval) {
      episodes_at_last_test = static_cast<int>(rewards.size());
      ++sub.tests;
      const auto avg = test_running_average(rewards, spec.test_window);
      sub.final_running_average = avg;
      if (avg && *avg >= threshold) {
        sub.status = SubtaskStatus::kThresholdMet;
        break;
      }
    }
  }
  if (sub.status == SubtaskStatus::kBudgetExhausted)
    sub.final_running_average = test_running_average(rewards, spec.test_window);
  report.events.push_back(
      {i, c, report.total_samples, sub.final_running_average, threshold, sub.status});
}

CurriculumReport execute(const CurriculumSpec& spec, Agent& agent, Rng& rng,
                         const EnvFactory& factory, const char* mode) {
  CurriculumReport report;
  report.mode = mode;
  report.learner = std::string(to_string(agent.kind()));
  report.sample_limit = spec.sample_limit;
  const long cap = spec.per_subtask_cap();
  for (int i = 0; i < spec.stage_count(); ++i)
  {
    SubtaskReport sub;
    sub.name = spec.subtasks[i].name;
    sub.threshold = spec.thresholds[i];
    sub.sample_cap = cap;
    report.subtasks.push_back(std::move(sub));
  }
  for (int i = 0; i < spec.stage_count(); ++i) {
    try {
      run_stage(spec, i, cap, agent, rng, factory, report);
    } catch (const NumericError& e) {
      report.subtasks[i].status = SubtaskStatus::kAborted;
      report.events.push_back({i, report.subtasks[i].samples_used, report.total_samples,
                               report.subtasks[i].final_running_average, spec.thresholds[i],
                               SubtaskStatus::kAborted});
      report.aborted = true;
      report.abort_reason = e.what();
      break;
    }
  }
  return report;
}

}  // namespace

CurriculumReport run_curriculum(const CurriculumSpec& spec, Agent& agent, Rng& rng,
                                const EnvFactory& factory) {
  spec.validate();
  return execute(spec, agent, rng, factory, "curriculum");
}

CurriculumReport run_flat_baseline(const SubtaskSpec& final_task, Agent& agent, long sample_limit,
                                   Rng& rng, int test_window, int test_interval,
                                   const EnvFactory& factory) {
  if (sample_limit <= 0) {
    CurriculumReport empty;
    empty.mode = "flat";
    empty.learner = std::string(to_string(agent.kind()));
    return empty;
  }
  CurriculumSpec spec;
  spec.subtasks = {final_task};
  spec.thresholds = {std::numeric_limits<double>::infinity()};
  spec.sample_limit = sample_limit;
  spec.test_window = test_window;
  spec.test_interval = test_interval;
  spec.validate();
  return execute(spec, agent, rng, factory, "flat");
}

EvalReport evaluate(const Agent& agent, Environment& env, int episodes, Rng& rng) {
  if (episodes < 1) throw ValidationError("evaluation needs at least one episode");
  EvalReport r;
  r.episodes = episodes;
  const MdpSpec& spec = env.spec();
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    StateVec state = env.reset(rng);
    double total = 0.0;
    for (int t = 0; t < spec.max_steps; ++t) {
      const ActionId a = agent.act_greedy(state, env.goal());
      StepResult res = env.step(a);
      total += res.reward;
      state = std::move(res.next_state);
      if (res.terminal) ++successes;
      if (res.terminal || res.truncated) break;
    }
    r.rewards.push_back(total);
  }
  r.mean_reward = std::accumulate(r.rewards.begin(), r.rewards.end(), 0.0) / episodes;
  r.max_reward = *std::max_element(r.rewards.begin(), r.rewards.end());
  r.success_rate = static_cast<double>(successes) / episodes;
  r.checkpoint_hash = checkpoint_hash(agent.checkpoint());
  return r;
}

}  // namespace hrl
