#pragma once

// Accommodation (growing the pool), assimilation (trace-discounted weight
// updates), attention adaptation, and the Learner that runs one
// sense / reform / assimilate / act cycle per environment step.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ao2/environments.hpp"
#include "ao2/inference.hpp"
#include "ao2/option_graph.hpp"

namespace ao2 {

struct TraceEntry {
  DecisionPath path;
  double reward = 0.0;
};

// Last L decision paths, newest first.
class TraceBuffer {
 public:
  explicit TraceBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  void clear() { entries_.clear(); }

  void push(DecisionPath path, double reward = 0.0);
  TraceEntry& newest() { return entries_.front(); }
  const TraceEntry& newest() const { return entries_.front(); }
  // age 0 = newest
  const TraceEntry& at(std::size_t age) const { return entries_.at(age); }

 private:
  std::size_t capacity_;
  std::deque<TraceEntry> entries_;
};

// Every edge on the path recorded at age a gains gamma^a * r, with r the
// newest entry's reward. Edges that no longer exist are skipped.
void apply_rewards(const TraceBuffer& buffer, OptionPool& pool, double gamma);

struct LearningConfig {
  std::size_t trace_length = 5;
  double gamma = 0.9;
  double accommodation_threshold = 0.9;
  double beta = 0.04;
  std::size_t reward_ma_window = 20;

  void validate() const;
};

// Grows the pool when neither the selected node nor any of its interior
// children scores above `threshold` for U. Returns the new node id.
std::optional<NodeId> accommodate(OptionPool& pool, NodeId selected_id,
                                  std::span<const double> observation, const AttentionWeights& w,
                                  double threshold, std::int64_t step = 0);

inline constexpr double kAttentionFloor = 1e-6;

// W +/- beta (U - V), clamped below at kAttentionFloor.
AttentionWeights update_attention(const AttentionWeights& w, std::span<const double> observation,
                                  std::span<const double> node_value, double beta,
                                  bool reward_trend_up);

// Full learner configuration; the flat key-value file maps onto these fields
// one to one (see config.hpp).
struct LearnerConfig {
  LearningConfig learning;
  InferenceConfig inference;
  std::size_t prune_every = 500;   // 0 disables memory cleansing
  std::size_t max_children = 32;
  std::size_t keep_top_actions = 0;  // 0 = keep all K
  std::uint64_t seed = 1;
  bool adapt_attention = false;
  std::vector<double> attention;   // initial W, empty = all ones
  std::vector<double> obs_scale;   // fixed normalisation, empty = all ones
  bool reward_centering = false;
  double baseline_rate = 0.001;
  // credit the steps cut off by a time limit at the average reward
  bool bootstrap_truncation = false;

  void validate() const;
};

enum class StepStatus { Running, Terminated, Truncated };

struct Decision {
  Selection selection;
  std::size_t greedy_action = 0;
  std::size_t action = 0;        // after exploration
  bool exploratory = false;
  double command = 0.0;          // executable value after smoothing
  std::optional<NodeId> created; // node added by accommodation this step
  std::int64_t step = 0;
};

class Learner {
 public:
  Learner(std::size_t obs_dim, std::size_t action_count, LearnerConfig cfg,
          std::optional<ContinuousActions> grid = std::nullopt);

  // One perception-action cycle. `reward` is credited to the previous
  // decision (ignored on the first step of an episode). When `status` is not
  // Running the observation is terminal: the reward is credited, the trace is
  // cleared and no decision is returned.
  std::optional<Decision> step(std::span<const double> observation, double reward,
                               StepStatus status = StepStatus::Running);

  const OptionPool& pool() const { return pool_; }
  OptionPool& pool() { return pool_; }
  const TraceBuffer& trace() const { return trace_; }
  const LearnerConfig& config() const { return cfg_; }
  const AttentionWeights& attention() const { return attention_; }
  // attention ⊙ obs_scale, the weights every distance is computed with
  AttentionWeights effective_attention() const;
  std::int64_t steps() const { return step_count_; }
  double baseline() const { return baseline_; }

 private:
  void credit(double reward);
  void flush(double reward);
  void cleanse();
  bool reward_trend_up(double reward);

  LearnerConfig cfg_;
  OptionPool pool_;
  TraceBuffer trace_;
  AttentionWeights attention_;
  std::vector<double> obs_scale_;
  std::optional<ContinuousActions> grid_;
  std::mt19937_64 rng_;
  bool pending_ = false;  // newest trace entry still awaits its reward
  double last_command_ = 0.0;
  std::int64_t step_count_ = 0;
  double baseline_ = 0.0;
  bool baseline_set_ = false;
  std::deque<double> recent_rewards_;
  double last_ma_ = 0.0;
  bool have_ma_ = false;
};

}  // namespace ao2
