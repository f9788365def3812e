#include <doctest.h>

#include "oracles.hpp"

// The acceptance runner repeats these with 10^4 trials and other seeds.

namespace {
void require(const ao2test::CheckResult& r) {
  INFO(r.detail);
  CHECK(r.passed);
}
}  // namespace

TEST_CASE("property: similarity identity and symmetry") {
  require(ao2test::check_similarity_identity(1, 10000));
}
TEST_CASE("property: similarity is strictly decreasing in distance") {
  require(ao2test::check_similarity_monotone(2, 10000));
}
TEST_CASE("property: argmin invariant under power-of-two attention scaling") {
  require(ao2test::check_argmin_scaling(3, 10000));
}
TEST_CASE("property: accommodation threshold law") {
  require(ao2test::check_accommodation_law(4, 10000));
}
TEST_CASE("property: trace cleared at every episode end") {
  require(ao2test::check_trace_clearing(5, 10000));
}
TEST_CASE("property: identical seeds give identical runs") {
  require(ao2test::check_run_determinism(6, 300));
}
