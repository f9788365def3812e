#include "ao2/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ao2/errors.hpp"
#include "ao2/inference.hpp"

namespace ao2 {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Python's floor-mod based normalisation into [-pi, pi).
double angle_normalize(double x) {
  const double two_pi = 2.0 * kPi;
  double m = std::fmod(x + kPi, two_pi);
  if (m < 0.0) m += two_pi;
  return m - kPi;
}

double wrap(double x, double lo, double hi) {
  const double diff = hi - lo;
  while (x > hi) x -= diff;
  while (x < lo) x += diff;
  return x;
}

// CartPole constants
constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassPole + kMassCart;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kHalfLength;
constexpr double kForceMag = 10.0;
constexpr double kTau = 0.02;

// Pendulum constants
constexpr double kPendulumG = 10.0;
constexpr double kPendulumM = 1.0;
constexpr double kPendulumL = 1.0;
constexpr double kPendulumDt = 0.05;
constexpr double kPendulumMaxSpeed = 8.0;
constexpr double kPendulumMaxTorque = 2.0;

// Acrobot constants
constexpr double kAcroDt = 0.2;
constexpr double kLinkLength1 = 1.0;
constexpr double kLinkMass1 = 1.0;
constexpr double kLinkMass2 = 1.0;
constexpr double kLinkCom1 = 0.5;
constexpr double kLinkCom2 = 0.5;
constexpr double kLinkMoi = 1.0;
constexpr double kMaxVel1 = 4.0 * kPi;
constexpr double kMaxVel2 = 9.0 * kPi;

using Vec4 = std::array<double, 4>;

// Equations of motion ("book" variant of the reference implementation).
Vec4 acrobot_derivs(const Vec4& s, double a) {
  const double m1 = kLinkMass1, m2 = kLinkMass2, l1 = kLinkLength1;
  const double lc1 = kLinkCom1, lc2 = kLinkCom2, I1 = kLinkMoi, I2 = kLinkMoi;
  const double g = 9.8;
  const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];
  const double d1 =
      m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * std::cos(theta2)) + I1 + I2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + I2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - kPi / 2.0);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - kPi / 2) + phi2;
  const double ddtheta2 =
      (a + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
      (m2 * lc2 * lc2 + I2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

Vec4 axpy(const Vec4& y, double h, const Vec4& k) {
  return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]};
}

}  // namespace

std::size_t EnvironmentSpec::action_count() const {
  return std::visit([](const auto& a) { return a.count; }, actions);
}

double discretize_action(std::size_t index, const ContinuousActions& grid) {
  if (grid.count < 2) throw ContractViolation("continuous action grid needs >= 2 points");
  if (index >= grid.count) {
    throw ContractViolation("action index " + std::to_string(index) + " outside grid of " +
                            std::to_string(grid.count));
  }
  return grid.lo + static_cast<double>(index) * (grid.hi - grid.lo) /
                       static_cast<double>(grid.count - 1);
}

CartPoleTransition cartpole_step(const CartPoleState& s, std::size_t action) {
  if (action > 1) throw ContractViolation("cartpole action must be 0 or 1");
  const double force = action == 1 ? kForceMag : -kForceMag;
  const double costheta = std::cos(s.theta);
  const double sintheta = std::sin(s.theta);
  const double temp =
      (force + kPoleMassLength * (s.theta_dot * s.theta_dot) * sintheta) / kTotalMass;
  const double thetaacc = (kGravity * sintheta - costheta * temp) /
                          (kHalfLength * (4.0 / 3.0 - kMassPole * (costheta * costheta) / kTotalMass));
  const double xacc = temp - kPoleMassLength * thetaacc * costheta / kTotalMass;

  CartPoleTransition t;
  t.next.x = s.x + kTau * s.x_dot;
  t.next.x_dot = s.x_dot + kTau * xacc;
  t.next.theta = s.theta + kTau * s.theta_dot;
  t.next.theta_dot = s.theta_dot + kTau * thetaacc;
  t.failed = t.next.x < -kCartPoleXLimit || t.next.x > kCartPoleXLimit ||
             t.next.theta < -kCartPoleThetaLimit || t.next.theta > kCartPoleThetaLimit;
  t.reward = 1.0;
  return t;
}

PendulumTransition pendulum_step(const PendulumState& s, double torque) {
  const double u = std::clamp(torque, -kPendulumMaxTorque, kPendulumMaxTorque);
  const double th = s.theta;
  const double thdot = s.theta_dot;
  const double wrapped = angle_normalize(th);
  const double costs = wrapped * wrapped + 0.1 * thdot * thdot + 0.001 * (u * u);

  const double g = kPendulumG, m = kPendulumM, l = kPendulumL, dt = kPendulumDt;
  const double newthdot =
      thdot + (-3 * g / (2 * l) * std::sin(th + kPi) + 3.0 / (m * l * l) * u) * dt;
  PendulumTransition t;
  t.next.theta = th + newthdot * dt;
  t.next.theta_dot = std::clamp(newthdot, -kPendulumMaxSpeed, kPendulumMaxSpeed);
  t.reward = -costs;
  return t;
}

bool acrobot_terminal(const AcrobotState& s) {
  return -std::cos(s.theta1) - std::cos(s.theta2 + s.theta1) > 1.0;
}

AcrobotTransition acrobot_step(const AcrobotState& s, std::size_t action) {
  if (action > 2) throw ContractViolation("acrobot action must be 0, 1 or 2");
  const double torque = static_cast<double>(action) - 1.0;
  const Vec4 y0{s.theta1, s.theta2, s.dtheta1, s.dtheta2};
  const double dt = kAcroDt;
  const double dt2 = dt / 2.0;
  const Vec4 k1 = acrobot_derivs(y0, torque);
  const Vec4 k2 = acrobot_derivs(axpy(y0, dt2, k1), torque);
  const Vec4 k3 = acrobot_derivs(axpy(y0, dt2, k2), torque);
  const Vec4 k4 = acrobot_derivs(axpy(y0, dt, k3), torque);
  Vec4 y;
  for (std::size_t i = 0; i < 4; ++i) {
    y[i] = y0[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  AcrobotTransition t;
  t.next.theta1 = wrap(y[0], -kPi, kPi);
  t.next.theta2 = wrap(y[1], -kPi, kPi);
  t.next.dtheta1 = std::clamp(y[2], -kMaxVel1, kMaxVel1);
  t.next.dtheta2 = std::clamp(y[3], -kMaxVel2, kMaxVel2);
  t.terminal = acrobot_terminal(t.next);
  t.reward = t.terminal ? 0.0 : -1.0;
  return t;
}

std::vector<double> cartpole_observation(const CartPoleState& s) {
  return {s.x, s.x_dot, s.theta, s.theta_dot};
}

std::vector<double> pendulum_observation(const PendulumState& s) {
  return {std::cos(s.theta), std::sin(s.theta), s.theta_dot};
}

std::vector<double> acrobot_observation(const AcrobotState& s) {
  return {std::cos(s.theta1), std::sin(s.theta1), std::cos(s.theta2),
          std::sin(s.theta2), s.dtheta1,          s.dtheta2};
}

// ---- CartPole ----

CartPole::CartPole() : spec_{"cartpole-v0", 4, DiscreteActions{2}, 200} {}

std::vector<double> CartPole::reset(std::mt19937_64& rng) {
  state_.x = uniform(rng, -0.05, 0.05);
  state_.x_dot = uniform(rng, -0.05, 0.05);
  state_.theta = uniform(rng, -0.05, 0.05);
  state_.theta_dot = uniform(rng, -0.05, 0.05);
  steps_ = 0;
  done_ = false;
  return cartpole_observation(state_);
}

StepResult CartPole::step(std::size_t action_index, double /*command*/) {
  if (done_) throw ContractViolation("cartpole episode already finished; call reset()");
  const auto t = cartpole_step(state_, action_index);
  state_ = t.next;
  ++steps_;
  StepResult r{cartpole_observation(state_), t.reward, false, false, steps_};
  r.truncated = !t.failed && steps_ >= spec_.max_steps;
  r.done = t.failed || r.truncated;
  done_ = r.done;
  return r;
}

// ---- Pendulum ----

Pendulum::Pendulum(std::size_t grid)
    : spec_{"pendulum-v0", 3, ContinuousActions{-kPendulumMaxTorque, kPendulumMaxTorque, grid}, 200} {
  if (grid < 2) throw ConfigError("pendulum action grid needs at least 2 points");
}

std::vector<double> Pendulum::reset(std::mt19937_64& rng) {
  state_.theta = uniform(rng, -kPi, kPi);
  state_.theta_dot = uniform(rng, -1.0, 1.0);
  steps_ = 0;
  done_ = false;
  return pendulum_observation(state_);
}

StepResult Pendulum::step(std::size_t /*action_index*/, double command) {
  if (done_) throw ContractViolation("pendulum episode already finished; call reset()");
  const auto t = pendulum_step(state_, command);
  state_ = t.next;
  ++steps_;
  StepResult r{pendulum_observation(state_), t.reward, false, false, steps_};
  r.done = r.truncated = steps_ >= spec_.max_steps;
  done_ = r.done;
  return r;
}

// ---- Acrobot ----

Acrobot::Acrobot() : spec_{"acrobot-v1", 6, DiscreteActions{3}, 500} {}

std::vector<double> Acrobot::reset(std::mt19937_64& rng) {
  state_.theta1 = uniform(rng, -0.1, 0.1);
  state_.theta2 = uniform(rng, -0.1, 0.1);
  state_.dtheta1 = uniform(rng, -0.1, 0.1);
  state_.dtheta2 = uniform(rng, -0.1, 0.1);
  steps_ = 0;
  done_ = false;
  return acrobot_observation(state_);
}

StepResult Acrobot::step(std::size_t action_index, double /*command*/) {
  if (done_) throw ContractViolation("acrobot episode already finished; call reset()");
  const auto t = acrobot_step(state_, action_index);
  state_ = t.next;
  ++steps_;
  StepResult r{acrobot_observation(state_), t.reward, false, false, steps_};
  r.truncated = !t.terminal && steps_ >= spec_.max_steps;
  r.done = t.terminal || r.truncated;
  done_ = r.done;
  return r;
}

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              std::size_t pendulum_grid) {
  if (name == "cartpole-v0") return std::make_unique<CartPole>();
  if (name == "pendulum-v0") return std::make_unique<Pendulum>(pendulum_grid);
  if (name == "acrobot-v1") return std::make_unique<Acrobot>();
  throw ConfigError("unknown environment '" + name +
                    "' (expected cartpole-v0 | pendulum-v0 | acrobot-v1)");
}

std::vector<std::string> environment_names() {
  return {"cartpole-v0", "pendulum-v0", "acrobot-v1"};
}

}  // namespace ao2
