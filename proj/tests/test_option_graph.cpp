#include <doctest.h>

#include <vector>

#include "ao2/errors.hpp"
#include "ao2/option_graph.hpp"

using namespace ao2;

namespace {

OptionNode interior(std::vector<double> v) {
  OptionNode n;
  n.value = std::move(v);
  return n;
}

}  // namespace

TEST_CASE("distance: hand-evaluated cases") {
  const auto ones = AttentionWeights::ones(3);
  CHECK(distance(std::vector<double>{1, 2, 3}, interior({1, 2, 3}), ones) == 0.0);
  CHECK(distance(std::vector<double>{0, 0, 0}, interior({0.1, 0.1, -0.1}), ones) ==
        doctest::Approx(0.3).epsilon(1e-15));
  const AttentionWeights w({2.2, 2.4, 0.7});
  CHECK(distance(std::vector<double>{0, 0, 0}, interior({0.1, 0.1, -0.1}), w) ==
        doctest::Approx(0.53).epsilon(1e-15));
}

TEST_CASE("distance: contract errors") {
  const auto ones = AttentionWeights::ones(3);
  CHECK_THROWS_AS(distance(std::vector<double>{0, 0}, interior({0, 0, 0}), ones), ContractViolation);
  OptionPool pool(3, 2);
  CHECK_THROWS_AS(distance(std::vector<double>{0, 0, 0}, pool.node(0), ones), ContractViolation);
}

TEST_CASE("similarity score") {
  CHECK(similarity_from_distance(0.0) == 1.0);
  CHECK(similarity_from_distance(0.3) == doctest::Approx(0.7692).epsilon(1e-4));
  // the 0.9 threshold corresponds to distance 1/9
  CHECK(similarity_from_distance(1.0 / 9.0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(similarity_from_distance(0.1) > 0.9);
  CHECK(similarity_from_distance(0.12) < 0.9);
}

TEST_CASE("attention weights must be positive") {
  CHECK_THROWS_AS(AttentionWeights({1.0, 0.0}), ContractViolation);
  CHECK_THROWS_AS(AttentionWeights({-1.0}), ContractViolation);
  CHECK(AttentionWeights::ones(4).size() == 4);
}

TEST_CASE("pool layout: leaves first, interior nodes get one edge per action") {
  OptionPool pool(2, 3);
  CHECK(pool.size() == 3);
  CHECK(pool.interior_count() == 0);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(pool.node(pool.leaf_id(a)).is_leaf());
    CHECK(pool.node(pool.leaf_id(a)).action_index == a);
  }
  const auto id = pool.add_interior(std::vector<double>{0.5, -0.5}, 7);
  CHECK(id == 3);
  const auto& n = pool.node(id);
  CHECK(n.created_step == 7);
  REQUIRE(n.children.size() == 3);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(n.children[a].child == pool.leaf_id(a));
    CHECK(n.children[a].weight == 0.0);
  }
  CHECK(pool.validate().empty());
  CHECK_THROWS_AS(pool.node(99), LookupError);
  CHECK_THROWS_AS(pool.add_edge(id, id + 1), LookupError);
  CHECK_THROWS_AS(pool.add_edge(0, id), ContractViolation);
  CHECK_THROWS_AS(pool.add_edge(id, 0), ContractViolation);  // duplicate
  CHECK_THROWS_AS(pool.add_interior(std::vector<double>{1.0}), ContractViolation);
}

TEST_CASE("descendants") {
  OptionPool pool(1, 2);
  const auto a = pool.add_interior(std::vector<double>{0.0});
  SUBCASE("single node") { CHECK(descendants(pool, a, 10) == std::vector<NodeId>{a}); }
  SUBCASE("cycle terminates") {
    const auto b = pool.add_interior(std::vector<double>{1.0});
    pool.add_edge(a, b);
    pool.add_edge(b, a);
    CHECK(descendants(pool, a, 10) == std::vector<NodeId>{a, b});
  }
  SUBCASE("depth bound") {
    const auto b = pool.add_interior(std::vector<double>{1.0});
    const auto c = pool.add_interior(std::vector<double>{2.0});
    pool.add_edge(a, b);
    pool.add_edge(b, c);
    CHECK(descendants(pool, a, 1) == std::vector<NodeId>{a, b});
    CHECK(descendants(pool, a, 2) == std::vector<NodeId>{a, b, c});
    CHECK(descendants(pool, a, 0) == std::vector<NodeId>{a});
  }
  CHECK_THROWS_AS(descendants(pool, 42, 3), LookupError);
}

TEST_CASE("prune_children") {
  OptionPool pool(2, 2);
  const auto ones = AttentionWeights::ones(2);
  const auto root = pool.add_interior(std::vector<double>{0, 0});
  const auto near = pool.add_interior(std::vector<double>{0.1, 0});
  const auto far = pool.add_interior(std::vector<double>{5, 5});
  pool.add_edge(root, near);
  pool.add_edge(root, far);
  CHECK(prune_children(pool, root, 4, ones) == 0);
  CHECK(prune_children(pool, root, 1, ones) == 1);
  CHECK(pool.node(root).find_edge(near) != nullptr);
  CHECK(pool.node(root).find_edge(far) == nullptr);
  // leaves are never pruned
  CHECK(prune_children(pool, near, 0, ones) == 0);
  CHECK(pool.node(near).children.size() == 2);
  CHECK(pool.size() == 5);  // nodes survive, only edges go
  CHECK_THROWS_AS(prune_children(pool, 99, 1, ones), LookupError);
}

TEST_CASE("prune_actions") {
  SUBCASE("keeps the heaviest") {
    OptionPool pool(1, 3);
    const auto n = pool.add_interior(std::vector<double>{0});
    pool.node(n).children[0].weight = 3.0;
    pool.node(n).children[1].weight = 1.0;
    pool.node(n).children[2].weight = 2.0;
    CHECK(prune_actions(pool, n, 2) == 1);
    CHECK(pool.node(n).find_edge(pool.leaf_id(1)) == nullptr);
    CHECK(pool.node(n).find_edge(pool.leaf_id(0)) != nullptr);
    CHECK(pool.node(n).find_edge(pool.leaf_id(2)) != nullptr);
  }
  SUBCASE("single action edge") {
    OptionPool pool(1, 1);
    const auto n = pool.add_interior(std::vector<double>{0});
    CHECK(prune_actions(pool, n, 1) == 0);
  }
  SUBCASE("ties drop the higher action index") {
    OptionPool pool(1, 2);
    const auto n = pool.add_interior(std::vector<double>{0});
    pool.node(n).children[0].weight = 2.0;
    pool.node(n).children[1].weight = 2.0;
    CHECK(prune_actions(pool, n, 1) == 1);
    CHECK(pool.node(n).find_edge(pool.leaf_id(0)) != nullptr);
    CHECK(pool.node(n).find_edge(pool.leaf_id(1)) == nullptr);
  }
  SUBCASE("interior edges untouched") {
    OptionPool pool(1, 2);
    const auto n = pool.add_interior(std::vector<double>{0});
    const auto m = pool.add_interior(std::vector<double>{1});
    pool.add_edge(n, m, -10.0);
    CHECK(prune_actions(pool, n, 1) == 1);
    CHECK(pool.node(n).find_edge(m) != nullptr);
  }
}
