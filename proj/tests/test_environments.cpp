#include <doctest.h>

#include <cmath>
#include <random>

#include "ao2/environments.hpp"
#include "ao2/errors.hpp"
#include "ao2/inference.hpp"
#include "ao2/oracle.hpp"

#ifndef AO2_TEST_DATA_DIR
#error "AO2_TEST_DATA_DIR must point at tests/data"
#endif

using namespace ao2;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("cartpole: zero state pushed right") {
  const auto t = cartpole_step({}, 1);
  CHECK(t.next.x == 0.0);
  CHECK(t.next.theta == 0.0);
  CHECK(t.next.x_dot == doctest::Approx(0.19512).epsilon(1e-4));
  CHECK(t.next.theta_dot == doctest::Approx(-0.29268).epsilon(1e-4));
  CHECK_FALSE(t.failed);
  CHECK(t.reward == 1.0);
  CHECK_THROWS_AS(cartpole_step({}, 2), ContractViolation);
}

TEST_CASE("cartpole: angle past the limit ends the episode") {
  CartPole env;
  std::mt19937_64 rng(1);
  env.reset(rng);
  env.set_state({0.0, 0.0, 0.2, 2.0});
  const auto r = env.step(1, 0.0);
  CHECK(env.state().theta > kCartPoleThetaLimit);
  CHECK(r.done);
  CHECK_FALSE(r.truncated);
  CHECK_THROWS_AS(env.step(0, 0.0), ContractViolation);
}

TEST_CASE("cartpole: 200-step limit and return equals step count") {
  CartPole env;
  std::mt19937_64 rng(2);
  env.reset(rng);
  double ret = 0.0;
  int steps = 0;
  StepResult r;
  do {
    const auto& s = env.state();
    r = env.step(s.theta + 0.5 * s.theta_dot > 0 ? 1 : 0, 0.0);
    ++steps;
    ret += r.reward;
  } while (!r.done);
  CHECK(ret == static_cast<double>(steps));
  CHECK(steps <= 200);
  if (steps == 200) CHECK(r.truncated);
}

TEST_CASE("pendulum: equilibrium, hand-evaluated swing and clipping") {
  // sin(0 + pi) is 1.2e-16 in floating point, as in the reference step
  const auto rest = pendulum_step({0.0, 0.0}, 0.0);
  CHECK(std::abs(rest.next.theta) < 1e-15);
  CHECK(std::abs(rest.next.theta_dot) < 1e-15);
  CHECK(rest.reward == 0.0);
  const auto swing = pendulum_step({kPi, 0.0}, 2.0);
  CHECK(swing.next.theta_dot == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(swing.reward == doctest::Approx(-(kPi * kPi + 0.004)).epsilon(1e-12));
  CHECK(swing.reward == doctest::Approx(-9.8736).epsilon(1e-4));
  const auto clipped = pendulum_step({0.4, -1.0}, 5.0);
  const auto at_limit = pendulum_step({0.4, -1.0}, 2.0);
  CHECK(clipped.next.theta == at_limit.next.theta);
  CHECK(clipped.next.theta_dot == at_limit.next.theta_dot);
  CHECK(clipped.reward == at_limit.reward);
}

TEST_CASE("pendulum: reward is never positive") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20000; ++i) {
    const PendulumState s{uniform01(rng) * 20 - 10, uniform01(rng) * 16 - 8};
    CHECK(pendulum_step(s, uniform01(rng) * 6 - 3).reward <= 0.0);
  }
}

TEST_CASE("pendulum: episodes are truncated at 200 steps") {
  Pendulum env(9);
  std::mt19937_64 rng(3);
  const auto obs = env.reset(rng);
  CHECK(obs.size() == 3);
  StepResult r;
  int steps = 0;
  do {
    r = env.step(4, discretize_action(4, std::get<ContinuousActions>(env.spec().actions)));
    ++steps;
  } while (!r.done);
  CHECK(steps == 200);
  CHECK(r.truncated);
}

TEST_CASE("acrobot: terminal test and rewards") {
  CHECK_FALSE(acrobot_terminal({0, 0, 0, 0}));
  CHECK(acrobot_terminal({kPi, 0, 0, 0}));
  const auto t = acrobot_step({0, 0, 0, 0}, 1);
  CHECK_FALSE(t.terminal);
  CHECK(t.reward == -1.0);
  CHECK_THROWS_AS(acrobot_step({}, 3), ContractViolation);
}

TEST_CASE("acrobot: return is minus the step count, bounded by 500") {
  Acrobot env;
  std::mt19937_64 rng(4);
  env.reset(rng);
  double ret = 0.0;
  int steps = 0;
  StepResult r;
  do {
    r = env.step(1, 0.0);
    ret += r.reward;
    ++steps;
  } while (!r.done);
  CHECK(steps == 500);
  CHECK(ret == -500.0);
  CHECK(r.truncated);
}

TEST_CASE("discretize_action") {
  const ContinuousActions g{-2.0, 2.0, 9};
  CHECK(discretize_action(4, g) == 0.0);
  CHECK(discretize_action(0, g) == -2.0);
  CHECK(discretize_action(8, g) == 2.0);
  CHECK(discretize_action(6, g) == 1.0);
  CHECK_THROWS_AS(discretize_action(9, g), ContractViolation);
}

TEST_CASE("environments by name") {
  for (const auto& name : environment_names()) {
    const auto env = make_environment(name);
    std::mt19937_64 a(8), b(8);
    CHECK(env->reset(a) == make_environment(name)->reset(b));
  }
  CHECK(make_environment("cartpole-v0")->spec().action_count() == 2);
  CHECK(make_environment("pendulum-v0", 5)->spec().action_count() == 5);
  CHECK(make_environment("acrobot-v1")->spec().obs_dim == 6);
  CHECK_THROWS_AS(make_environment("mountaincar-v0"), ConfigError);
}

TEST_CASE("dynamics match the reference transition table") {
  const auto rows = read_oracle_table(AO2_TEST_DATA_DIR "/oracle_table.csv");
  CHECK(rows.size() == 60);
  for (const auto& row : rows) {
    const auto c = check_oracle_row(row);
    INFO(row.env << " max_error " << c.max_error);
    CHECK(c.passed(kOracleTolerance));
  }
}
