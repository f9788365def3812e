#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ao2/errors.hpp"
#include "ao2/inference.hpp"
#include "oracles.hpp"

using namespace ao2;

namespace {

// leaves 0, 1; f = 2 at the origin, s = 3 at (1, 1), edge f -> s
OptionPool three_node_pool() {
  OptionPool pool(2, 2);
  const auto f = pool.add_interior(std::vector<double>{0, 0});
  const auto s = pool.add_interior(std::vector<double>{1, 1});
  pool.add_edge(f, s);
  pool.node(s).children[0].weight = -1.0;
  pool.node(s).children[1].weight = 4.0;
  return pool;
}

}  // namespace

TEST_CASE("find_most_similar") {
  OptionPool pool(2, 2);
  const auto ones = AttentionWeights::ones(2);
  CHECK_THROWS_AS(find_most_similar(pool, std::vector<double>{0, 0}, ones), NoSchema);
  const auto a = pool.add_interior(std::vector<double>{0, 0});
  const auto b = pool.add_interior(std::vector<double>{1, 1});
  CHECK(find_most_similar(pool, std::vector<double>{0.1, 0}, ones) == a);
  CHECK(find_most_similar(pool, std::vector<double>{1, 1}, ones) == b);
  CHECK(find_most_similar(pool, std::vector<double>{0.5, 0.5}, ones) == a);  // tie
  CHECK(find_most_similar(pool, std::vector<double>{1, 0}, ones) == a);      // tie
}

TEST_CASE("select_action: fresh node ties to action 0") {
  OptionPool pool(2, 2);
  pool.add_interior(std::vector<double>{0, 0});
  const auto sel = select_action(pool, std::vector<double>{3, 3}, AttentionWeights::ones(2), {});
  CHECK(sel.path.action_index == 0);
  REQUIRE(sel.path.steps.size() == 1);
  CHECK(sel.path.steps[0].node == 2);
  CHECK(sel.path.steps[0].child == pool.leaf_id(0));
  CHECK(sel.hop_distances == std::vector<double>{6.0});
}

TEST_CASE("select_action: closer descendant through f -> s") {
  const auto pool = three_node_pool();
  const auto ones = AttentionWeights::ones(2);
  const std::vector<double> u{0.9, 0.9};
  const auto sel = select_action_from(pool, 2, u, ones, {});
  CHECK(sel.matched == 2);
  CHECK(sel.selected == 3);
  CHECK(sel.path.action_index == 1);
  CHECK(sel.path.node_ids() == std::vector<NodeId>{2, 3});
  REQUIRE(sel.path.steps.size() == 2);
  CHECK(sel.path.steps[0].child == 3);
  CHECK(sel.path.steps[1].child == pool.leaf_id(1));
  // the global scan matches s directly
  const auto global = select_action(pool, u, ones, {});
  CHECK(global.matched == 3);
  CHECK(global.path.action_index == 1);
}

TEST_CASE("select_action: argmax over action weights") {
  OptionPool pool(1, 2);
  const auto n = pool.add_interior(std::vector<double>{0});
  pool.node(n).children[0].weight = 2.0;
  pool.node(n).children[1].weight = -5.0;
  CHECK(select_action(pool, std::vector<double>{0}, AttentionWeights::ones(1), {})
            .path.action_index == 0);
}

TEST_CASE("select_action: interior fallback when action edges were pruned") {
  OptionPool pool(1, 2);
  const auto n = pool.add_interior(std::vector<double>{0});
  const auto m = pool.add_interior(std::vector<double>{10});
  pool.add_edge(n, m, 1.0);
  pool.node(n).children.erase(pool.node(n).children.begin(), pool.node(n).children.begin() + 2);
  pool.node(m).children[1].weight = 3.0;
  const auto sel = select_action(pool, std::vector<double>{0}, AttentionWeights::ones(1), {});
  CHECK(sel.selected == n);
  CHECK(sel.path.action_index == 1);
  CHECK(sel.path.node_ids() == std::vector<NodeId>{n, m});
}

TEST_CASE("select_action: NoAction when nothing is reachable") {
  OptionPool pool(1, 2);
  const auto n = pool.add_interior(std::vector<double>{0});
  pool.node(n).children.clear();
  CHECK_THROWS_AS(select_action(pool, std::vector<double>{0}, AttentionWeights::ones(1), {}),
                  NoAction);
}

TEST_CASE("action value rules") {
  Edge e;
  e.weight = 6.0;
  e.visits = 3;
  CHECK(action_value(e, ActionValueRule::Total) == 6.0);
  CHECK(action_value(e, ActionValueRule::Mean) == 2.0);
  e.visits = 0;
  CHECK(std::isinf(action_value(e, ActionValueRule::Mean)));
  CHECK(action_value_rule_from_string("mean") == ActionValueRule::Mean);
  CHECK(std::string(to_string(ActionValueRule::Total)) == "total");
  CHECK_THROWS_AS(action_value_rule_from_string("median"), ConfigError);
}

TEST_CASE("epsilon_greedy") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(epsilon_greedy(1, 3, 0.0, rng) == 1);
  for (int i = 0; i < 1000; ++i) CHECK(epsilon_greedy(0, 2, 1.0, rng) == 1);
  const int n = 100000;
  int switched = 0;
  for (int i = 0; i < n; ++i) switched += epsilon_greedy(2, 4, 0.1, rng) != 2;
  const double sigma = std::sqrt(n * 0.1 * 0.9);
  CHECK(std::abs(switched - n * 0.1) <= 3 * sigma);
  const std::vector<std::size_t> avail{0, 3};
  for (int i = 0; i < 100; ++i) CHECK(epsilon_greedy(0, avail, 1.0, rng) == 3);
  CHECK_THROWS_AS(epsilon_greedy(1, avail, 0.5, rng), ContractViolation);
}

TEST_CASE("smooth_action") {
  CHECK(smooth_action(2.0, -2.0, 1.0) == 2.0);
  CHECK(smooth_action(2.0, -2.0, 0.9) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(smooth_action(1.0, 1.0, 0.9) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("uniform01 stays in [0, 1)") {
  std::mt19937_64 rng(1);
  double lo = 1, hi = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = uniform01(rng);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("levels 1 and 2 agree with the exhaustive scan") {
  const auto r = ao2test::check_inference_bruteforce(11, 2000);
  INFO(r.detail);
  CHECK(r.passed);
}
