#pragma once

// Dynamics check against a table of reference transitions.
//
// CSV columns: env,s0,s1,s2,s3,action,n0,n1,n2,n3,reward,done. States are the
// internal simulator state (CartPole x, x_dot, theta, theta_dot; Pendulum
// theta, theta_dot with s2/s3 empty; Acrobot theta1, theta2, dtheta1,
// dtheta2). `action` is the action index, or the torque for Pendulum.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace ao2 {

struct OracleRow {
  std::string env;
  std::vector<double> state;
  double action = 0.0;
  std::vector<double> expected_next;
  double expected_reward = 0.0;
  bool expected_done = false;
};

struct OracleCheck {
  std::vector<double> next;
  double reward = 0.0;
  bool done = false;
  double max_error = 0.0;  // over next-state components and reward
  bool done_matches = false;
  bool passed(double tol) const { return done_matches && max_error <= tol; }
};

inline constexpr double kOracleTolerance = 1e-10;

std::vector<OracleRow> read_oracle_table(const std::filesystem::path& path);
OracleCheck check_oracle_row(const OracleRow& row);

}  // namespace ao2
