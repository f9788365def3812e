#include <doctest.h>

#include <cmath>
#include <vector>

#include "ao2/errors.hpp"
#include "ao2/learning.hpp"
#include "oracles.hpp"

using namespace ao2;

namespace {

// one interior node per step so each path owns distinct edges
struct Chain {
  OptionPool pool{1, 2};
  std::vector<DecisionPath> paths;

  explicit Chain(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = pool.add_interior(std::vector<double>{static_cast<double>(i)});
      DecisionPath p;
      p.steps.push_back({id, 0, pool.leaf_id(0)});
      paths.push_back(p);
    }
  }
  double weight(std::size_t i) const { return pool.node(paths[i].steps[0].node).children[0].weight; }
};

}  // namespace

TEST_CASE("trace buffer keeps the newest L paths") {
  TraceBuffer buf(2);
  CHECK_THROWS_AS(TraceBuffer(0), ContractViolation);
  Chain c(3);
  buf.push(c.paths[0], 1.0);
  buf.push(c.paths[1], 2.0);
  buf.push(c.paths[2], 3.0);
  CHECK(buf.size() == 2);
  CHECK(buf.at(0).reward == 3.0);
  CHECK(buf.at(1).reward == 2.0);
  buf.clear();
  CHECK(buf.empty());
}

TEST_CASE("apply_rewards") {
  SUBCASE("L = 1 credits only the newest path") {
    Chain c(2);
    TraceBuffer buf(1);
    buf.push(c.paths[0], 1.0);
    apply_rewards(buf, c.pool, 0.9);
    buf.push(c.paths[1], 2.0);
    apply_rewards(buf, c.pool, 0.9);
    CHECK(c.weight(0) == 1.0);
    CHECK(c.weight(1) == 2.0);
  }
  SUBCASE("L = 2, gamma = 0.5, rewards 1 then 1") {
    Chain c(2);
    TraceBuffer buf(2);
    buf.push(c.paths[0], 1.0);
    apply_rewards(buf, c.pool, 0.5);
    buf.push(c.paths[1], 1.0);
    apply_rewards(buf, c.pool, 0.5);
    CHECK(c.weight(0) == 1.5);
    CHECK(c.weight(1) == 1.0);
  }
  SUBCASE("gamma = 0 ignores history") {
    Chain c(4);
    TraceBuffer buf(4);
    for (std::size_t i = 0; i < 4; ++i) {
      buf.push(c.paths[i], 1.0);
      apply_rewards(buf, c.pool, 0.0);
    }
    for (std::size_t i = 0; i < 4; ++i) CHECK(c.weight(i) == 1.0);
  }
  SUBCASE("L = 5, gamma = 0.9 gives a geometric sequence") {
    Chain c(5);
    TraceBuffer buf(5);
    for (std::size_t i = 0; i < 4; ++i) buf.push(c.paths[i], 0.0);
    buf.push(c.paths[4], 1.0);
    apply_rewards(buf, c.pool, 0.9);
    const double expect[] = {0.6561, 0.729, 0.81, 0.9, 1.0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(c.weight(i) == doctest::Approx(expect[i]).epsilon(1e-15));
  }
  SUBCASE("edges deleted since recording are skipped") {
    Chain c(2);
    TraceBuffer buf(2);
    buf.push(c.paths[0], 0.0);
    c.pool.node(c.paths[0].steps[0].node).children.clear();
    buf.push(c.paths[1], 1.0);
    CHECK_NOTHROW(apply_rewards(buf, c.pool, 0.5));
    CHECK(c.weight(1) == 1.0);
  }
}

TEST_CASE("accommodate") {
  const auto ones = AttentionWeights::ones(2);
  OptionPool pool(2, 2);
  const auto root = pool.add_interior(std::vector<double>{0, 0});
  SUBCASE("identical observation assimilates") {
    CHECK_FALSE(accommodate(pool, root, std::vector<double>{0, 0}, ones, 0.99).has_value());
    CHECK(pool.size() == 3);
  }
  SUBCASE("dissimilar observation grows a child") {
    const std::vector<double> u{0.3, 0.0};
    const auto id = accommodate(pool, root, u, ones, 0.99, 12);
    REQUIRE(id.has_value());
    CHECK(pool.node(*id).value == u);
    CHECK(pool.node(*id).created_step == 12);
    CHECK(pool.node(root).find_edge(*id) != nullptr);
    CHECK(find_most_similar(pool, u, ones) == *id);
  }
  SUBCASE("a similar interior child blocks accommodation") {
    const auto child = pool.add_interior(std::vector<double>{1, 1});
    pool.add_edge(root, child);
    CHECK_FALSE(accommodate(pool, root, std::vector<double>{1, 1.005}, ones, 0.99).has_value());
  }
  SUBCASE("score exactly at the threshold still accommodates") {
    // distance 1/9 -> score 0.9 (not > 0.9)
    const auto id = accommodate(pool, root, std::vector<double>{1.0 / 9.0, 0}, ones,
                                similarity_from_distance(1.0 / 9.0));
    CHECK(id.has_value());
  }
  CHECK_THROWS_AS(accommodate(pool, 0, std::vector<double>{0, 0}, ones, 0.9), ContractViolation);
}

TEST_CASE("update_attention") {
  const AttentionWeights w({1, 1, 1});
  const std::vector<double> u{0.5, 0, -0.5};
  const std::vector<double> v{0, 0, 0};
  const auto up = update_attention(w, u, v, 0.04, true);
  CHECK(up[0] == doctest::Approx(1.02).epsilon(1e-15));
  CHECK(up[1] == 1.0);
  CHECK(up[2] == doctest::Approx(0.98).epsilon(1e-15));
  const auto down = update_attention(w, u, v, 0.04, false);
  CHECK(down[0] == doctest::Approx(0.98).epsilon(1e-15));
  CHECK(down[2] == doctest::Approx(1.02).epsilon(1e-15));
  const auto same = update_attention(w, u, u, 0.04, true);
  CHECK(std::vector<double>(same.values().begin(), same.values().end()) ==
        std::vector<double>{1, 1, 1});
  const auto floor = update_attention(w, std::vector<double>{-1000, 0, 0}, v, 0.04, true);
  CHECK(floor[0] == kAttentionFloor);
  CHECK_THROWS_AS(update_attention(w, std::vector<double>{0}, v, 0.04, true), ContractViolation);
}

TEST_CASE("learner: first step bootstraps and returns action 0") {
  Learner learner(2, 3, {});
  const auto d = learner.step(std::vector<double>{0.2, -0.1}, 99.0);
  REQUIRE(d.has_value());
  CHECK(d->action == 0);
  CHECK(d->created.has_value());
  CHECK(learner.pool().interior_count() == 1);
  CHECK(learner.trace().size() == 1);
  for (const auto& n : learner.pool().nodes()) {
    for (const auto& e : n.children) CHECK(e.weight == 0.0);
  }
  CHECK_THROWS_AS(learner.step(std::vector<double>{0.2}, 0.0), ContractViolation);
}

TEST_CASE("learner: episode end clears the trace") {
  LearnerConfig cfg;
  cfg.learning.trace_length = 5;
  Learner learner(1, 2, cfg);
  learner.step(std::vector<double>{0}, 0.0);
  learner.step(std::vector<double>{1}, 1.0);
  CHECK(learner.trace().size() == 2);
  CHECK_FALSE(learner.step(std::vector<double>{2}, 1.0, StepStatus::Terminated).has_value());
  CHECK(learner.trace().empty());
}

TEST_CASE("learner: rewards reach the last five paths with a geometric discount") {
  LearnerConfig cfg;
  cfg.learning.trace_length = 5;
  cfg.learning.gamma = 0.9;
  cfg.learning.accommodation_threshold = 0.99;
  cfg.prune_every = 0;
  Learner learner(1, 2, cfg);
  // observations 10 apart: every step creates its own node
  for (int i = 0; i < 6; ++i) learner.step(std::vector<double>{10.0 * i}, 0.0);
  learner.step(std::vector<double>{60.0}, 1.0);
  const auto& pool = learner.pool();
  // node for step i has id 2 + i; the reward for step 5's action reaches steps 1..5
  const double expect[] = {0.0, 0.6561, 0.729, 0.81, 0.9, 1.0};
  for (int i = 0; i < 6; ++i) {
    const auto& n = pool.node(static_cast<NodeId>(2 + i));
    double total = 0.0;
    for (const auto& e : n.children) total += e.weight;
    CHECK(total == doctest::Approx(expect[i]).epsilon(1e-15));
  }
}

TEST_CASE("learner: zero-reward episodes leave weights unchanged") {
  LearnerConfig cfg;
  cfg.learning.trace_length = 7;
  Learner learner(2, 2, cfg);
  std::mt19937_64 rng(3);
  for (int ep = 0; ep < 5; ++ep) {
    for (int t = 0; t < 40; ++t) learner.step(ao2test::real_vector(rng, 2), 0.0);
    learner.step(ao2test::real_vector(rng, 2), 0.0, StepStatus::Truncated);
  }
  for (const auto& n : learner.pool().nodes()) {
    for (const auto& e : n.children) CHECK(e.weight == 0.0);
  }
}

TEST_CASE("learner: pool never shrinks between cleansing runs") {
  LearnerConfig cfg;
  cfg.prune_every = 0;
  Learner learner(3, 2, cfg);
  std::mt19937_64 rng(9);
  std::size_t last = 0;
  for (int t = 0; t < 2000; ++t) {
    learner.step(ao2test::real_vector(rng, 3), ao2test::uniform(rng, -1, 1));
    CHECK(learner.pool().size() >= last);
    last = learner.pool().size();
  }
  CHECK(learner.pool().validate().empty());
}

TEST_CASE("learner: attention adaptation stays positive") {
  LearnerConfig cfg;
  cfg.adapt_attention = true;
  cfg.learning.beta = 0.5;
  Learner learner(2, 2, cfg);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 3000; ++t) {
    learner.step(ao2test::real_vector(rng, 2, 50.0), ao2test::uniform(rng, -1, 1));
    for (double w : learner.attention().values()) REQUIRE(w > 0.0);
  }
}

TEST_CASE("learner: reward centering flushes the baseline at termination") {
  LearnerConfig cfg;
  cfg.reward_centering = true;
  cfg.baseline_rate = 0.5;
  cfg.learning.trace_length = 1;
  cfg.learning.accommodation_threshold = 0.5;
  Learner learner(1, 2, cfg);
  learner.step(std::vector<double>{0}, 0.0);
  learner.step(std::vector<double>{0}, 1.0);
  CHECK(learner.baseline() != 0.0);
  learner.step(std::vector<double>{0}, 1.0, StepStatus::Terminated);
  CHECK(learner.trace().empty());
}

TEST_CASE("learner: config validation") {
  LearnerConfig cfg;
  cfg.learning.trace_length = 0;
  CHECK_THROWS_AS(Learner(1, 2, cfg), ConfigError);
  cfg = {};
  cfg.learning.gamma = 1.5;
  CHECK_THROWS_AS(Learner(1, 2, cfg), ConfigError);
  cfg = {};
  cfg.attention = {1.0, 2.0};
  CHECK_THROWS_AS(Learner(1, 2, cfg), ConfigError);
}

TEST_CASE("assimilation matches the brute-force discounted sum") {
  const auto exact = ao2test::check_assimilation_oracle(21, 100, true);
  INFO(exact.detail);
  CHECK(exact.passed);
  const auto tolerant = ao2test::check_assimilation_oracle(22, 100, false);
  INFO(tolerant.detail);
  CHECK(tolerant.passed);
}
