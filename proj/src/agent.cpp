#include "hrl/agent.hpp"

#include <cstdio>

#include "hrl/error.hpp"

namespace hrl {

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kTabular: return "tabular";
    case LearnerKind::kDqn: return "dqn";
    case LearnerKind::kPpo: return "ppo";
  }
  return "?";
}

LearnerKind learner_from_string(std::string_view name) {
  if (name == "tabular") return LearnerKind::kTabular;
  if (name == "dqn") return LearnerKind::kDqn;
  if (name == "ppo") return LearnerKind::kPpo;
  throw ValidationError("unknown learner '" + std::string(name) + "'");
}

void Agent::begin_subtask(int, bool, Rng&) {}

void reinit_output_layer(Mlp& net, Rng& rng) {
  const auto& sizes = net.layout().sizes;
  const int in = sizes[sizes.size() - 2];
  const int out = sizes.back();
  const Eigen::Index count = static_cast<Eigen::Index>(in) * out + out;
  const Eigen::Index off = net.params().size() - count;
  const double a = std::sqrt(6.0 / (in + out));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(in) * out; ++i)
    net.params()[off + i] = rng.uniform(-a, a);
  net.params().tail(out).setZero();
}

namespace {

nlohmann::json shape_json(const AgentShape& s) {
  return {{"state_dim", s.state_dim},
          {"goal_dim", s.goal_dim},
          {"action_count", s.action_count},
          {"feature_scale", s.feature_scale}};
}

AgentShape shape_from_json(const nlohmann::json& j) {
  AgentShape s;
  s.state_dim = j.at("state_dim").get<int>();
  s.goal_dim = j.at("goal_dim").get<int>();
  s.action_count = j.at("action_count").get<int>();
  s.feature_scale = j.at("feature_scale").get<std::vector<double>>();
  return s;
}

bool same_shape(const AgentShape& a, const AgentShape& b) {
  return a.state_dim == b.state_dim && a.goal_dim == b.goal_dim &&
         a.action_count == b.action_count;
}

nlohmann::json header(LearnerKind kind, const AgentShape& shape) {
  return {{"format", "hrl-checkpoint"},
          {"version", kCheckpointVersion},
          {"kind", std::string(to_string(kind))},
          {"layout", shape_json(shape)}};
}

std::vector<int> hidden_of(const MlpLayout& l) {
  return {l.sizes.begin() + 1, l.sizes.end() - 1};
}

}  // namespace

nlohmann::json mlp_to_json(const MlpQ& q) {
  const Eigen::VectorXd& p = q.net().params();
  return {{"sizes", q.net().layout().sizes},
          {"state_dim", q.state_dim()},
          {"goal_dim", q.goal_dim()},
          {"feature_scale", q.feature_scale()},
          {"params", std::vector<double>(p.data(), p.data() + p.size())}};
}

MlpQ mlp_from_json(const nlohmann::json& j) {
  const auto sizes = j.at("sizes").get<std::vector<int>>();
  if (sizes.size() < 2) throw ValidationError("checkpoint network has too few layers");
  MlpQ q(j.at("state_dim").get<int>(), j.at("goal_dim").get<int>(), sizes.back(),
         std::vector<int>(sizes.begin() + 1, sizes.end() - 1),
         j.at("feature_scale").get<std::vector<double>>());
  if (q.net().layout().sizes != sizes) throw ValidationError("checkpoint layout is inconsistent");
  const auto params = j.at("params").get<std::vector<double>>();
  q.net().set_params(Eigen::Map<const Eigen::VectorXd>(params.data(),
                                                       static_cast<Eigen::Index>(params.size())));
  return q;
}

// ---- tabular ---------------------------------------------------------------

TabularAgent::TabularAgent(const AgentShape& shape, const DqnConfig& config)
    : shape_(shape), config_(config), q_(shape.action_count) {
  config_.validate();
}

ActionId TabularAgent::act(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng) {
  return epsilon_greedy(q_, state, goal, config_.epsilon.value(steps_++), rng);
}

ActionId TabularAgent::act_greedy(const StateVec& state,
                                  const std::optional<StateVec>& goal) const {
  return argmax_action(q_.values(state, goal));
}

LearnStats TabularAgent::learn(std::span<const ExperienceTuple> experiences, Rng&) {
  LearnStats stats;
  for (const ExperienceTuple& t : experiences) {
    const double y =
        bellman_target(t.reward, t.next_state, t.terminal, t.truncated, q_, config_.gamma, t.goal);
    const double err = y - q_.get(t.state, t.goal, t.action);
    q_.update(t.state, t.goal, t.action, y, config_.tabular_alpha);
    stats.last_loss = err * err;
    ++stats.updates;
  }
  if (!q_.all_finite()) throw NumericError("non-finite Q table");
  return stats;
}

void TabularAgent::begin_subtask(int, bool fresh_head, Rng&) {
  steps_ = 0;
  if (fresh_head) q_ = TabularQ(shape_.action_count);
}

nlohmann::json TabularAgent::checkpoint() const {
  nlohmann::json j = header(kind(), shape_);
  nlohmann::json rows = nlohmann::json::array();
  // Sorted for a canonical, reproducible dump.
  std::vector<std::pair<StateVec, std::vector<double>>> entries(q_.table().begin(),
                                                                q_.table().end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [k, v] : entries) rows.push_back({{"key", k}, {"values", v}});
  j["table"] = rows;
  return j;
}

// ---- DQN -------------------------------------------------------------------

namespace {

MlpQ make_q(const AgentShape& shape, const std::vector<int>& hidden, int outputs, Rng& rng) {
  MlpQ q(shape.state_dim, shape.goal_dim, outputs, hidden, shape.feature_scale);
  q.net().init(rng);
  return q;
}

}  // namespace

DqnAgent::DqnAgent(const AgentShape& shape, const DqnConfig& config, Rng& init_rng)
    : shape_(shape),
      config_(config),
      learner_(make_q(shape, config.hidden, shape.action_count, init_rng), config),
      buffer_(static_cast<std::size_t>(config.buffer_capacity)) {
  config_.validate();
}

ActionId DqnAgent::act(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng) {
  const double eps = config_.epsilon.value(steps_in_subtask_++);
  return epsilon_greedy(learner_.online(), state, goal, eps, rng);
}

ActionId DqnAgent::act_greedy(const StateVec& state, const std::optional<StateVec>& goal) const {
  return argmax_action(learner_.online().values(state, goal));
}

LearnStats DqnAgent::learn(std::span<const ExperienceTuple> experiences, Rng& rng) {
  LearnStats stats;
  for (const ExperienceTuple& t : experiences) {
    buffer_.push(t);
    if (config_.relabel == RelabelStrategy::kFinal && t.goal) {
      episode_.push_back(t);
      if (t.terminal || t.truncated) {
        for (auto& r : relabel_hindsight(episode_, config_.relabel)) buffer_.push(std::move(r));
        episode_.clear();
      }
    }
    ++steps_seen_;
    if (static_cast<long>(buffer_.size()) >= config_.learning_starts &&
        steps_seen_ % config_.train_every == 0) {
      stats.last_loss = learner_.update(buffer_, rng);
      ++stats.updates;
    }
  }
  return stats;
}

void DqnAgent::begin_subtask(int, bool fresh_head, Rng& rng) {
  steps_in_subtask_ = 0;
  episode_.clear();
  if (fresh_head) {
    reinit_output_layer(learner_.online().net(), rng);
    learner_.sync_target();
  }
}

nlohmann::json DqnAgent::checkpoint() const {
  nlohmann::json j = header(kind(), shape_);
  j["networks"] = {{"q", mlp_to_json(learner_.online())}};
  return j;
}

// ---- PPO -------------------------------------------------------------------

PpoAgent::PpoAgent(const AgentShape& shape, const PpoConfig& config, Rng& init_rng)
    : shape_(shape),
      config_(config),
      learner_(make_q(shape, config.hidden, shape.action_count, init_rng),
               make_q(shape, config.hidden, 1, init_rng), config) {
  // Small initial logits give a near-uniform starting policy.
  learner_.actor().net().params().tail(
      static_cast<Eigen::Index>(config.hidden.empty() ? shape.state_dim + shape.goal_dim
                                                      : config.hidden.back()) *
          shape.action_count +
      shape.action_count) *= 0.01;
}

ActionId PpoAgent::act(const StateVec& state, const std::optional<StateVec>& goal, Rng& rng) {
  return learner_.sample_action(state, goal, rng);
}

ActionId PpoAgent::act_greedy(const StateVec& state, const std::optional<StateVec>& goal) const {
  return learner_.mode_action(state, goal);
}

LearnStats PpoAgent::learn(std::span<const ExperienceTuple> experiences, Rng& rng) {
  const PpoDiagnostics d = learner_.update(experiences, rng);
  return {d.gradient_steps, d.policy_loss + d.value_loss};
}

void PpoAgent::begin_subtask(int, bool fresh_head, Rng& rng) {
  if (fresh_head) {
    reinit_output_layer(learner_.actor().net(), rng);
    reinit_output_layer(learner_.critic().net(), rng);
  }
}

nlohmann::json PpoAgent::checkpoint() const {
  nlohmann::json j = header(kind(), shape_);
  j["networks"] = {{"actor", mlp_to_json(learner_.actor())},
                   {"critic", mlp_to_json(learner_.critic())}};
  return j;
}

// ---- loading ---------------------------------------------------------------

std::unique_ptr<Agent> agent_from_checkpoint(const nlohmann::json& j,
                                             const std::optional<AgentShape>& expected) {
  if (!j.is_object() || j.value("format", "") != "hrl-checkpoint")
    throw ValidationError("not an hrl checkpoint");
  if (j.at("version").get<int>() != kCheckpointVersion)
    throw ValidationError("unsupported checkpoint version");
  const AgentShape shape = shape_from_json(j.at("layout"));
  if (expected && !same_shape(shape, *expected))
    throw ValidationError("checkpoint layout does not match the task (state_dim " +
                          std::to_string(shape.state_dim) + ", actions " +
                          std::to_string(shape.action_count) + ")");
  const LearnerKind kind = learner_from_string(j.at("kind").get<std::string>());
  Rng rng(0);
  switch (kind) {
    case LearnerKind::kTabular: {
      auto agent = std::make_unique<TabularAgent>(shape, DqnConfig{});
      for (const auto& row : j.at("table")) {
        const auto key = row.at("key").get<StateVec>();
        const auto values = row.at("values").get<std::vector<double>>();
        if (static_cast<int>(values.size()) != shape.action_count)
          throw ValidationError("checkpoint table row has wrong width");
        const StateVec state(key.begin(), key.begin() + shape.state_dim);
        std::optional<StateVec> goal;
        if (shape.goal_dim > 0) goal = StateVec(key.begin() + shape.state_dim, key.end());
        for (int a = 0; a < shape.action_count; ++a) agent->q().set(state, goal, a, values[a]);
      }
      return agent;
    }
    case LearnerKind::kDqn: {
      MlpQ q = mlp_from_json(j.at("networks").at("q"));
      DqnConfig cfg;
      cfg.hidden = hidden_of(q.net().layout());
      auto agent = std::make_unique<DqnAgent>(shape, cfg, rng);
      if (agent->learner().online().net().layout() != q.net().layout())
        throw ValidationError("checkpoint network layout mismatch");
      agent->learner().online().net().set_params(q.net().params());
      agent->learner().sync_target();
      return agent;
    }
    case LearnerKind::kPpo: {
      MlpQ actor = mlp_from_json(j.at("networks").at("actor"));
      MlpQ critic = mlp_from_json(j.at("networks").at("critic"));
      PpoConfig cfg;
      cfg.hidden = hidden_of(actor.net().layout());
      auto agent = std::make_unique<PpoAgent>(shape, cfg, rng);
      if (agent->learner().actor().net().layout() != actor.net().layout() ||
          agent->learner().critic().net().layout() != critic.net().layout())
        throw ValidationError("checkpoint network layout mismatch");
      agent->learner().actor().net().set_params(actor.net().params());
      agent->learner().critic().net().set_params(critic.net().params());
      return agent;
    }
  }
  throw ValidationError("unknown checkpoint kind");
}

std::string checkpoint_hash(const nlohmann::json& checkpoint) {
  // Metadata (config hash, evaluation task) does not affect the hash.
  nlohmann::json core;
  for (const char* key : {"kind", "layout", "networks", "table"})
    if (checkpoint.contains(key)) core[key] = checkpoint[key];
  const std::string s = core.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hrl
