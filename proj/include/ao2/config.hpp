#pragma once

// Flat key-value configuration files.
//
//   # comment
//   trace_length = 5
//   attention = 0.001, 0.001, 1, 0.5
//
// Learner keys: trace_length, gamma, accommodation_threshold, epsilon, alpha,
// beta, max_depth, prune_every, max_children, keep_top_actions, seed,
// reward_ma_window, action_value (total|mean), adapt_attention (true|false),
// attention (list), obs_scale (list), reward_centering (true|false),
// baseline_rate, bootstrap_truncation (true|false).
//
// Experiment keys: env, episodes, replicas, eval_window, curve_window_steps,
// stop_at_return, action_grid, write_trace (true|false).
//
// Unknown keys are rejected.

#include <filesystem>
#include <map>
#include <string>

#include "ao2/harness.hpp"

namespace ao2 {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);

// Applies every key in `kv` on top of `base`.
ExperimentConfig apply_config(const KeyValues& kv, ExperimentConfig base = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        ExperimentConfig base = {});

// Canonical key-value rendering (sorted keys, full-precision reals).
std::string to_key_values(const ExperimentConfig& cfg);

}  // namespace ao2
