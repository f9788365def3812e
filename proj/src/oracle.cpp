#include "ao2/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ao2/environments.hpp"
#include "ao2/errors.hpp"
#include "ao2/pool_io.hpp"

namespace ao2 {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<double> reals(const std::vector<std::string>& f, std::size_t from, std::size_t n) {
  std::vector<double> v;
  for (std::size_t i = from; i < from + n; ++i) {
    if (!f[i].empty()) v.push_back(parse_real(f[i]));
  }
  return v;
}

}  // namespace

std::vector<OracleRow> read_oracle_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open oracle table " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("env,", 0) != 0) {
    throw ContractViolation(path.string() + ": missing oracle table header");
  }
  std::vector<OracleRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) {
      throw ContractViolation(path.string() + ":" + std::to_string(lineno) + ": expected 12 fields");
    }
    OracleRow r;
    r.env = f[0];
    r.state = reals(f, 1, 4);
    r.action = parse_real(f[5]);
    r.expected_next = reals(f, 6, 4);
    r.expected_reward = parse_real(f[10]);
    r.expected_done = f[11] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

OracleCheck check_oracle_row(const OracleRow& row) {
  OracleCheck c;
  auto need = [&](std::size_t n) {
    if (row.state.size() != n || row.expected_next.size() != n) {
      throw ContractViolation(row.env + " oracle row needs " + std::to_string(n) + " state values");
    }
  };
  if (row.env == "cartpole-v0") {
    need(4);
    const auto t = cartpole_step({row.state[0], row.state[1], row.state[2], row.state[3]},
                                 static_cast<std::size_t>(row.action));
    c.next = {t.next.x, t.next.x_dot, t.next.theta, t.next.theta_dot};
    c.reward = t.reward;
    c.done = t.failed;
  } else if (row.env == "pendulum-v0") {
    need(2);
    const auto t = pendulum_step({row.state[0], row.state[1]}, row.action);
    c.next = {t.next.theta, t.next.theta_dot};
    c.reward = t.reward;
    c.done = false;
  } else if (row.env == "acrobot-v1") {
    need(4);
    const auto t = acrobot_step({row.state[0], row.state[1], row.state[2], row.state[3]},
                                static_cast<std::size_t>(row.action));
    c.next = {t.next.theta1, t.next.theta2, t.next.dtheta1, t.next.dtheta2};
    c.reward = t.reward;
    c.done = t.terminal;
  } else {
    throw ConfigError("unknown environment '" + row.env + "' in oracle table");
  }
  for (std::size_t i = 0; i < c.next.size(); ++i) {
    const double err = std::abs(c.next[i] - row.expected_next[i]);
    c.max_error = std::isnan(err) ? INFINITY : std::max(c.max_error, err);
  }
  const double rerr = std::abs(c.reward - row.expected_reward);
  c.max_error = std::isnan(rerr) ? INFINITY : std::max(c.max_error, rerr);
  c.done_matches = c.done == row.expected_done;
  return c;
}

}  // namespace ao2
