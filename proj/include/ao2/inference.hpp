#pragma once

// Matching an observation to the most similar option and picking the action
// it recommends, plus the post-processing variants (epsilon-greedy
// exploration and action smoothing).

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ao2/option_graph.hpp"

namespace ao2 {

// How an action edge is scored at the selected node.
//   Total: its accumulated weight.
//   Mean:  accumulated weight / visits; unvisited edges rank first.
enum class ActionValueRule { Total, Mean };

const char* to_string(ActionValueRule rule);
ActionValueRule action_value_rule_from_string(const std::string& name);

struct PathStep {
  NodeId node = 0;
  std::size_t edge = 0;  // ordinal in node.children when recorded
  NodeId child = 0;      // identifies the edge even after pruning shifts ordinals
};

struct DecisionPath {
  std::vector<PathStep> steps;
  std::size_t action_index = 0;

  bool empty() const { return steps.empty(); }
  NodeId entry() const { return steps.front().node; }
  // Nodes visited from entry to the one owning the action edge.
  std::vector<NodeId> node_ids() const;
};

struct InferenceConfig {
  double epsilon = 0.0;
  double alpha = 1.0;
  std::size_t max_depth = kDefaultMaxDepth;
  ActionValueRule action_value = ActionValueRule::Total;

  void validate() const;
};

struct Selection {
  DecisionPath path;
  NodeId matched = 0;                 // level-1 node f
  NodeId selected = 0;                // level-2 node s
  std::vector<double> hop_distances;  // distance to U of every node on the path
};

NodeId find_most_similar(const OptionPool& pool, std::span<const double> observation,
                         const AttentionWeights& w);

// Score of one action edge under `rule`; +inf for unvisited edges under Mean.
double action_value(const Edge& edge, ActionValueRule rule);

// Levels 2 and 3 starting from a given entry node.
Selection select_action_from(const OptionPool& pool, NodeId entry,
                             std::span<const double> observation, const AttentionWeights& w,
                             const InferenceConfig& cfg);

// Full bi-level selection: entry = find_most_similar.
Selection select_action(const OptionPool& pool, std::span<const double> observation,
                        const AttentionWeights& w, const InferenceConfig& cfg);

// Keeps `action_index` with probability 1 - epsilon, otherwise draws uniformly
// from the other entries of `available`. `available` must contain the input.
std::size_t epsilon_greedy(std::size_t action_index, std::span<const std::size_t> available,
                           double epsilon, std::mt19937_64& rng);
std::size_t epsilon_greedy(std::size_t action_index, std::size_t action_count, double epsilon,
                           std::mt19937_64& rng);

// alpha * chosen + (1 - alpha) * last.
double smooth_action(double chosen, double last, double alpha);

// Uniform draw in [0, 1) from the top 53 bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng);

}  // namespace ao2
