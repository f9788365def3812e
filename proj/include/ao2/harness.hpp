#pragma once

// Experiment runner: binds a Learner to an environment, runs seeded replicas,
// computes the evaluation statistics and writes the result files.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ao2/learning.hpp"
#include "ao2/option_graph.hpp"

namespace ao2 {

struct ExperimentConfig {
  std::string env = "cartpole-v0";
  LearnerConfig learner;
  std::size_t episodes = 2000;
  std::size_t replicas = 1;
  std::size_t eval_window = 100;
  std::size_t curve_window_steps = 200;
  // stop a replica once a full eval window reaches this mean return
  std::optional<double> stop_at_return;
  std::size_t action_grid = 9;  // command grid size for continuous environments
  bool write_trace = true;
  std::filesystem::path out_dir;  // empty = keep results in memory only

  std::uint64_t seed() const { return learner.seed; }
  void validate() const;
};

// Episode budget used when a config does not set one.
std::size_t default_episodes(const std::string& env);

struct MovingStats {
  double best_window_mean = 0.0;
  double last_window_mean = 0.0;
  std::size_t best_window_start = 0;
};

MovingStats moving_stats(const std::vector<double>& returns, std::size_t window);

struct PhaseDetectOptions {
  std::size_t smoothing_width = 5;
  double jump_fraction = 0.15;
};

// Indices (into `window_means`) where the trailing moving average has risen by
// more than jump_fraction * (max - min of the raw series) over the last
// smoothing_width points. A run of consecutive rising points counts as one
// jump, reported at the run's first index. Fewer than 10 points: no jumps.
std::vector<std::size_t> phase_detect(const std::vector<double>& window_means,
                                      const PhaseDetectOptions& opts = {});

struct CurvePoint {
  std::int64_t window_start_step = 0;
  double mean_reward = 0.0;
};

struct RunRecord {
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  std::vector<double> returns;
  std::vector<CurvePoint> curve;
  std::optional<MovingStats> stats;  // set when returns.size() >= eval_window
  std::vector<std::size_t> phase_jumps;
  bool stopped_early = false;
  std::int64_t steps = 0;
  std::shared_ptr<const OptionPool> pool;
  std::vector<double> attention;  // effective attention at the end of the run
  std::filesystem::path out_dir;
  std::string config_echo;
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunRecord> replicas;
  double wall_seconds = 0.0;
};

// Seed used by replica `r`; depends only on (seed, r).
std::uint64_t replica_seed(std::uint64_t seed, std::size_t replica);

RunRecord run_replica(const ExperimentConfig& cfg, std::size_t replica);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Greedy rollouts of a frozen pool: no accommodation, no weight updates,
// no exploration.
struct EvalConfig {
  std::string env;
  std::size_t episodes = 100;
  std::uint64_t seed = 1;
  std::size_t action_grid = 9;
  ActionValueRule action_value = ActionValueRule::Total;
  std::size_t max_depth = kDefaultMaxDepth;
};

std::vector<double> evaluate_pool(const OptionPool& pool, const AttentionWeights& w,
                                  const EvalConfig& cfg);

// Version string of this build and its git-style blob hash.
const char* version_string();
std::string version_hash();

}  // namespace ao2
