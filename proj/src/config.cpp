#include "ao2/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "ao2/errors.hpp"
#include "ao2/pool_io.hpp"

namespace ao2 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": '" + v + "' is not a number");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v[0] == '-' || v[0] == '+') {
    throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  }
  try {
    std::size_t pos = 0;
    const auto x = std::stoull(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_real(key, trim(item)));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += format_real(xs[i]);
  }
  return s;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"trace_length",
       [](auto& c, auto& k, auto& v) { c.learner.learning.trace_length = to_uint(k, v); }},
      {"gamma", [](auto& c, auto& k, auto& v) { c.learner.learning.gamma = to_real(k, v); }},
      {"accommodation_threshold",
       [](auto& c, auto& k, auto& v) {
         c.learner.learning.accommodation_threshold = to_real(k, v);
       }},
      {"beta", [](auto& c, auto& k, auto& v) { c.learner.learning.beta = to_real(k, v); }},
      {"reward_ma_window",
       [](auto& c, auto& k, auto& v) { c.learner.learning.reward_ma_window = to_uint(k, v); }},
      {"epsilon", [](auto& c, auto& k, auto& v) { c.learner.inference.epsilon = to_real(k, v); }},
      {"alpha", [](auto& c, auto& k, auto& v) { c.learner.inference.alpha = to_real(k, v); }},
      {"max_depth",
       [](auto& c, auto& k, auto& v) { c.learner.inference.max_depth = to_uint(k, v); }},
      {"action_value",
       [](auto& c, auto&, auto& v) {
         c.learner.inference.action_value = action_value_rule_from_string(v);
       }},
      {"prune_every", [](auto& c, auto& k, auto& v) { c.learner.prune_every = to_uint(k, v); }},
      {"max_children",
       [](auto& c, auto& k, auto& v) { c.learner.max_children = to_uint(k, v); }},
      {"keep_top_actions",
       [](auto& c, auto& k, auto& v) { c.learner.keep_top_actions = to_uint(k, v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.learner.seed = to_uint(k, v); }},
      {"adapt_attention",
       [](auto& c, auto& k, auto& v) { c.learner.adapt_attention = to_bool(k, v); }},
      {"attention", [](auto& c, auto& k, auto& v) { c.learner.attention = to_list(k, v); }},
      {"obs_scale", [](auto& c, auto& k, auto& v) { c.learner.obs_scale = to_list(k, v); }},
      {"reward_centering",
       [](auto& c, auto& k, auto& v) { c.learner.reward_centering = to_bool(k, v); }},
      {"baseline_rate",
       [](auto& c, auto& k, auto& v) { c.learner.baseline_rate = to_real(k, v); }},
      {"bootstrap_truncation",
       [](auto& c, auto& k, auto& v) { c.learner.bootstrap_truncation = to_bool(k, v); }},
      {"env", [](auto& c, auto&, auto& v) { c.env = v; }},
      {"episodes", [](auto& c, auto& k, auto& v) { c.episodes = to_uint(k, v); }},
      {"replicas", [](auto& c, auto& k, auto& v) { c.replicas = to_uint(k, v); }},
      {"eval_window", [](auto& c, auto& k, auto& v) { c.eval_window = to_uint(k, v); }},
      {"curve_window_steps",
       [](auto& c, auto& k, auto& v) { c.curve_window_steps = to_uint(k, v); }},
      {"stop_at_return",
       [](auto& c, auto& k, auto& v) {
         if (v == "none") {
           c.stop_at_return.reset();
         } else {
           c.stop_at_return = to_real(k, v);
         }
       }},
      {"action_grid", [](auto& c, auto& k, auto& v) { c.action_grid = to_uint(k, v); }},
      {"write_trace", [](auto& c, auto& k, auto& v) { c.write_trace = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig apply_config(const KeyValues& kv, ExperimentConfig base) {
  const auto& table = setters();
  for (const auto& [k, v] : kv) {
    const auto it = table.find(k);
    if (it == table.end()) throw ConfigError("unknown config key '" + k + "'");
    it->second(base, k, v);
  }
  if (kv.count("env") && !kv.count("episodes")) base.episodes = default_episodes(base.env);
  return base;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return apply_config(parse_key_values(ss.str()), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_key_values(const ExperimentConfig& cfg) {
  const auto& l = cfg.learner;
  KeyValues kv = {
      {"trace_length", std::to_string(l.learning.trace_length)},
      {"gamma", format_real(l.learning.gamma)},
      {"accommodation_threshold", format_real(l.learning.accommodation_threshold)},
      {"beta", format_real(l.learning.beta)},
      {"reward_ma_window", std::to_string(l.learning.reward_ma_window)},
      {"epsilon", format_real(l.inference.epsilon)},
      {"alpha", format_real(l.inference.alpha)},
      {"max_depth", std::to_string(l.inference.max_depth)},
      {"action_value", to_string(l.inference.action_value)},
      {"prune_every", std::to_string(l.prune_every)},
      {"max_children", std::to_string(l.max_children)},
      {"keep_top_actions", std::to_string(l.keep_top_actions)},
      {"seed", std::to_string(l.seed)},
      {"adapt_attention", l.adapt_attention ? "true" : "false"},
      {"attention", join(l.attention)},
      {"obs_scale", join(l.obs_scale)},
      {"reward_centering", l.reward_centering ? "true" : "false"},
      {"baseline_rate", format_real(l.baseline_rate)},
      {"bootstrap_truncation", l.bootstrap_truncation ? "true" : "false"},
      {"env", cfg.env},
      {"episodes", std::to_string(cfg.episodes)},
      {"replicas", std::to_string(cfg.replicas)},
      {"eval_window", std::to_string(cfg.eval_window)},
      {"curve_window_steps", std::to_string(cfg.curve_window_steps)},
      {"stop_at_return", cfg.stop_at_return ? format_real(*cfg.stop_at_return) : "none"},
      {"action_grid", std::to_string(cfg.action_grid)},
      {"write_trace", cfg.write_trace ? "true" : "false"},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace ao2
