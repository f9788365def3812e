#pragma once

// Native CartPole-v0, Pendulum-v0 and Acrobot-v1 with the reference
// classic-control dynamics, rewards and termination rules.
//
// Randomness comes from std::mt19937_64 (fully specified by the C++ standard)
// through uniform01(), so initial states are reproducible across platforms.

#include <array>
#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace ao2 {

struct DiscreteActions {
  std::size_t count = 0;
};

// [lo, hi] sampled on an evenly spaced grid of `count` points.
struct ContinuousActions {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

using ActionMode = std::variant<DiscreteActions, ContinuousActions>;

struct EnvironmentSpec {
  std::string name;
  std::size_t obs_dim = 0;
  ActionMode actions;
  int max_steps = 0;

  std::size_t action_count() const;
  bool continuous() const { return std::holds_alternative<ContinuousActions>(actions); }
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  bool truncated = false;  // done only because max_steps was reached
  int steps_elapsed = 0;
};

double discretize_action(std::size_t index, const ContinuousActions& grid);

// ---- pure dynamics (one transition, no step counting) ----

struct CartPoleState {
  double x = 0.0, x_dot = 0.0, theta = 0.0, theta_dot = 0.0;
};
struct PendulumState {
  double theta = 0.0, theta_dot = 0.0;
};
struct AcrobotState {
  double theta1 = 0.0, theta2 = 0.0, dtheta1 = 0.0, dtheta2 = 0.0;
};

struct CartPoleTransition {
  CartPoleState next;
  double reward;
  bool failed;
};
struct PendulumTransition {
  PendulumState next;
  double reward;
};
struct AcrobotTransition {
  AcrobotState next;
  double reward;
  bool terminal;
};

inline constexpr double kCartPoleThetaLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
inline constexpr double kCartPoleXLimit = 2.4;

// action 0 = push left, 1 = push right
CartPoleTransition cartpole_step(const CartPoleState& s, std::size_t action);
// torque is clipped to [-2, 2]
PendulumTransition pendulum_step(const PendulumState& s, double torque);
// action 0, 1, 2 = torque -1, 0, +1
AcrobotTransition acrobot_step(const AcrobotState& s, std::size_t action);
bool acrobot_terminal(const AcrobotState& s);

std::vector<double> cartpole_observation(const CartPoleState& s);
std::vector<double> pendulum_observation(const PendulumState& s);
std::vector<double> acrobot_observation(const AcrobotState& s);

// ---- episodic environments ----

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvironmentSpec& spec() const = 0;
  virtual std::vector<double> reset(std::mt19937_64& rng) = 0;
  // Discrete environments take the action index; continuous ones take the
  // executable command value.
  virtual StepResult step(std::size_t action_index, double command) = 0;
  virtual bool done() const = 0;
};

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              std::size_t pendulum_grid = 9);
std::vector<std::string> environment_names();

class CartPole final : public Environment {
 public:
  CartPole();
  const EnvironmentSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::mt19937_64& rng) override;
  StepResult step(std::size_t action_index, double command) override;
  bool done() const override { return done_; }
  void set_state(const CartPoleState& s) { state_ = s; done_ = false; steps_ = 0; }
  const CartPoleState& state() const { return state_; }

 private:
  EnvironmentSpec spec_;
  CartPoleState state_;
  int steps_ = 0;
  bool done_ = true;
};

class Pendulum final : public Environment {
 public:
  explicit Pendulum(std::size_t grid = 9);
  const EnvironmentSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::mt19937_64& rng) override;
  StepResult step(std::size_t action_index, double command) override;
  bool done() const override { return done_; }
  void set_state(const PendulumState& s) { state_ = s; done_ = false; steps_ = 0; }
  const PendulumState& state() const { return state_; }

 private:
  EnvironmentSpec spec_;
  PendulumState state_;
  int steps_ = 0;
  bool done_ = true;
};

class Acrobot final : public Environment {
 public:
  Acrobot();
  const EnvironmentSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::mt19937_64& rng) override;
  StepResult step(std::size_t action_index, double command) override;
  bool done() const override { return done_; }
  void set_state(const AcrobotState& s) { state_ = s; done_ = false; steps_ = 0; }
  const AcrobotState& state() const { return state_; }

 private:
  EnvironmentSpec spec_;
  AcrobotState state_;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace ao2
