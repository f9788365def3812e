#pragma once

// Option nodes, the global option pool and the weighted L1 similarity used to
// match observations against node values.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ao2 {

using NodeId = std::uint32_t;

enum class NodeKind { Interior, ActionLeaf };

struct Edge {
  NodeId child = 0;
  double weight = 0.0;        // accumulated discounted reward
  std::uint64_t visits = 0;   // times this edge was on a taken decision path
};

struct OptionNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Interior;
  std::vector<double> value;
  std::vector<Edge> children;
  std::size_t action_index = 0;   // meaningful for ActionLeaf only
  std::int64_t created_step = 0;  // learner step at creation, -1 for leaves

  bool is_leaf() const { return kind == NodeKind::ActionLeaf; }
  const Edge* find_edge(NodeId child) const;
  Edge* find_edge(NodeId child);
};

// Per-dimension positive attention weights (W).
class AttentionWeights {
 public:
  AttentionWeights() = default;
  explicit AttentionWeights(std::vector<double> w);
  static AttentionWeights ones(std::size_t dim);

  std::size_t size() const { return w_.size(); }
  std::span<const double> values() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

 private:
  std::vector<double> w_;
};

// The learner's entire memory. Ids are dense: leaves occupy
// [0, action_count), interior nodes follow in creation order. Nodes are never
// deleted; cleansing only removes edges.
class OptionPool {
 public:
  OptionPool(std::size_t obs_dim, std::size_t action_count);

  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t action_count() const { return action_count_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t interior_count() const { return nodes_.size() - action_count_; }

  bool contains(NodeId id) const { return id < nodes_.size(); }
  const OptionNode& node(NodeId id) const;
  OptionNode& node(NodeId id);
  NodeId leaf_id(std::size_t action_index) const;

  const std::vector<OptionNode>& nodes() const { return nodes_; }

  // New interior node with `value` and one zero-weight edge per action leaf.
  NodeId add_interior(std::span<const double> value, std::int64_t created_step = 0);
  // Appends parent -> child; throws ContractViolation on duplicates or when
  // the parent is a leaf.
  Edge& add_edge(NodeId parent, NodeId child, double weight = 0.0);

  // Structural checks of every invariant; returns an empty string when the
  // pool is well formed, otherwise a description of the first violation.
  std::string validate() const;

  // Restore path used by deserialization; ids must be dense and ordered.
  static OptionPool from_nodes(std::size_t obs_dim, std::size_t action_count,
                               std::vector<OptionNode> nodes);

 private:
  OptionPool() = default;

  std::size_t obs_dim_ = 0;
  std::size_t action_count_ = 0;
  std::vector<OptionNode> nodes_;
};

// s = W^T |U - V|.
double distance(std::span<const double> observation, const OptionNode& node,
                const AttentionWeights& w);

// Raw weighted L1 between two vectors, same operation order as distance().
double weighted_l1(std::span<const double> a, std::span<const double> b,
                   const AttentionWeights& w);

// Maps a distance onto (0, 1]: 1 / (1 + d).
double similarity_from_distance(double d);
double similarity_score(std::span<const double> observation, const OptionNode& node,
                        const AttentionWeights& w);

inline constexpr std::size_t kDefaultMaxDepth = 8;

// Interior nodes reachable from root within max_depth hops, root included,
// ascending by id.
std::vector<NodeId> descendants(const OptionPool& pool, NodeId root,
                                std::size_t max_depth = kDefaultMaxDepth);

// Drops the interior-child edges whose values lie farthest from the node's
// own value until at most max_children remain. Leaf edges are kept.
std::size_t prune_children(OptionPool& pool, NodeId node_id, std::size_t max_children,
                           const AttentionWeights& w);

// Keeps the keep_top highest-weight action edges (ties: lower action index).
std::size_t prune_actions(OptionPool& pool, NodeId node_id, std::size_t keep_top);

}  // namespace ao2
