#include <doctest.h>

#include <cmath>
#include <deque>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hrl/error.hpp"
#include "hrl/gridnav.hpp"
#include "hrl/replay.hpp"
#include "hrl/rng.hpp"

using namespace hrl;

namespace {

ExperienceTuple tuple(double id) { return {{id}, 0, 0.0, {id + 1}, false, false, std::nullopt}; }

// A -1/0 goal-conditioned path along the x axis from 0 to len.
std::vector<ExperienceTuple> path(int len, double goal) {
  std::vector<ExperienceTuple> out;
  for (int i = 0; i < len; ++i) {
    StateVec s{static_cast<double>(i)}, n{static_cast<double>(i + 1)};
    const double r = goal_reward(s, 3, n, {goal});
    out.push_back({s, 3, r, n, r == 0.0, false, StateVec{goal}});
  }
  return out;
}

}  // namespace

TEST_CASE("FIFO push examples") {
  ReplayBuffer b(2);
  b.push(tuple(1));
  CHECK(b.size() == 1);
  b.push(tuple(2));
  b.push(tuple(3));
  REQUIRE(b.size() == 2);
  CHECK(b.at(0).state[0] == 2);
  CHECK(b.at(1).state[0] == 3);
  CHECK(b.insertions() == 3);
  CHECK(b.sequence(0) == 1);
}

TEST_CASE("filling to capacity keeps exactly those tuples") {
  ReplayBuffer b(5);
  for (int i = 0; i < 5; ++i) b.push(tuple(i));
  for (int i = 0; i < 5; ++i) CHECK(b.at(i).state[0] == i);
}

TEST_CASE("sampling examples") {
  ReplayBuffer b(4);
  Rng rng(0);
  CHECK_THROWS_AS(b.sample_uniform(1, rng), ContractViolation);
  CHECK(b.sample_uniform(0, rng).empty());
  b.push(tuple(9));
  const auto four = b.sample_uniform(4, rng);
  REQUIRE(four.size() == 4);
  for (const auto& t : four) CHECK(t.state[0] == 9);
}

TEST_CASE("uniform sampling frequencies within 3 sigma and chi-square bound") {
  ReplayBuffer b(100);
  for (int i = 0; i < 100; ++i) b.push(tuple(i));
  Rng rng(123);
  std::vector<int> counts(100, 0);
  const int draws = 100000;
  for (std::size_t idx : b.sample_indices(draws, rng)) ++counts[idx];
  const double p = 0.01;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  double chi2 = 0.0;
  int outside = 0;
  for (int c : counts) {
    if (std::abs(c - mean) > 3 * sigma) ++outside;
    chi2 += (c - mean) * (c - mean) / mean;
  }
  // 100 cells: expect ~0.27 outside 3 sigma; allow a couple.
  CHECK(outside <= 2);
  // 99 dof, 0.999 quantile ~ 148.2
  CHECK(chi2 < 148.2);
}

TEST_CASE("FIFO order survives 10^4 random push/sample interleavings") {
  Rng rng(77);
  ReplayBuffer b(37);
  std::deque<double> model;
  double next = 0;
  for (int step = 0; step < 10000; ++step) {
    if (rng.bernoulli(0.6)) {
      b.push(tuple(next));
      model.push_back(next);
      next += 1;
      if (model.size() > 37) model.pop_front();
    } else if (!b.empty()) {
      for (std::size_t i : b.sample_indices(5, rng)) REQUIRE(i < b.size());
    }
    REQUIRE(b.size() == model.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      REQUIRE(b.at(i).state[0] == model[i]);
      REQUIRE(b.sequence(i) == static_cast<std::uint64_t>(model[i]));
    }
  }
}

TEST_CASE("goal_reward examples") {
  CHECK(goal_reward({0, 0}, 0, {1, 2}, {1, 2}) == 0.0);
  CHECK(goal_reward({0, 0}, 0, {1, 3}, {1, 2}) == -1.0);
  CHECK_THROWS_AS(goal_reward({0, 0}, 0, {1, 2}, {1, 2, 3}), ContractViolation);
  GoalPredicate loose{0.1};
  CHECK(goal_reward({0.0}, 0, {1.05}, {1.0}, loose) == 0.0);
}

TEST_CASE("GridNav episode reaching the goal in k steps returns the sparse sum") {
  GridNavConfig cfg;
  cfg.width = 6;
  cfg.height = 1;
  cfg.goal = {4, 0};
  GridNavEnv env(cfg);
  Rng rng(0);
  env.reset(rng);
  std::vector<double> rewards;
  for (int i = 0; i < 4; ++i) rewards.push_back(env.step(kRight).reward);
  const double gamma = 0.9;
  double expect = 0.0;
  for (int i = 0; i < 3; ++i) expect -= std::pow(gamma, i);
  CHECK(discounted_return(rewards, gamma) == doctest::Approx(expect));
}

TEST_CASE("relabeling a failed trajectory") {
  const auto traj = path(5, 10.0);
  const auto out = relabel_hindsight(traj, RelabelStrategy::kFinal);
  REQUIRE(out.size() == traj.size());
  int zeros = 0;
  for (const auto& t : out) {
    CHECK(*t.goal == StateVec{5.0});
    CHECK(t.reward == goal_reward(t.state, t.action, t.next_state, *t.goal));
    zeros += t.reward == 0.0;
  }
  CHECK(zeros == 1);
  CHECK(out.back().reward == 0.0);
  CHECK(out.back().terminal);
  // Originals untouched.
  CHECK(*traj[0].goal == StateVec{10.0});
}

TEST_CASE("relabeling a successful trajectory is a fixed point") {
  const auto traj = path(4, 4.0);
  const auto out = relabel_hindsight(traj, RelabelStrategy::kFinal);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(*out[i].goal == *traj[i].goal);
    CHECK(out[i].reward == traj[i].reward);
    CHECK(out[i].terminal == traj[i].terminal);
  }
}

TEST_CASE("length-1 relabel and empty input") {
  const auto out = relabel_hindsight(path(1, 7.0), RelabelStrategy::kFinal);
  REQUIRE(out.size() == 1);
  CHECK(out[0].reward == 0.0);
  CHECK(out[0].terminal);
  CHECK_THROWS_AS(relabel_hindsight({}, RelabelStrategy::kFinal), ContractViolation);
}

TEST_CASE("relabeled tuples are goal-consistent on random walks") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ExperienceTuple> traj;
    double x = 0.0;
    const int len = 1 + rng.uniform_int(20);
    const double goal = 100.0;
    for (int i = 0; i < len; ++i) {
      const double nx = x + (rng.bernoulli(0.5) ? 1.0 : -1.0);
      traj.push_back({{x}, 0, -1.0, {nx}, false, i + 1 == len, StateVec{goal}});
      x = nx;
    }
    const auto out = relabel_hindsight(traj, RelabelStrategy::kFinal);
    REQUIRE(out.size() == traj.size());
    for (const auto& t : out) {
      CHECK(t.reward == goal_reward(t.state, t.action, t.next_state, *t.goal));
      CHECK_FALSE((t.terminal && t.truncated));
    }
  }
}

TEST_CASE("jsonl dump has one parseable line per tuple") {
  ReplayBuffer b(3);
  for (int i = 0; i < 5; ++i) b.push(tuple(i));
  std::ostringstream os;
  b.dump_jsonl(os);
  std::istringstream is(os.str());
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["seq"].get<int>() == n + 2);
    ++n;
  }
  CHECK(n == 3);
}
