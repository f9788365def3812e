#include "ao2/option_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "ao2/errors.hpp"

namespace ao2 {

namespace {

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << " has dimension " << got << ", expected " << want;
    throw ContractViolation(os.str());
  }
}

}  // namespace

const Edge* OptionNode::find_edge(NodeId child) const {
  for (const auto& e : children) {
    if (e.child == child) return &e;
  }
  return nullptr;
}

Edge* OptionNode::find_edge(NodeId child) {
  for (auto& e : children) {
    if (e.child == child) return &e;
  }
  return nullptr;
}

AttentionWeights::AttentionWeights(std::vector<double> w) : w_(std::move(w)) {
  for (double x : w_) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ContractViolation("attention weights must be finite and > 0");
    }
  }
}

AttentionWeights AttentionWeights::ones(std::size_t dim) {
  return AttentionWeights(std::vector<double>(dim, 1.0));
}

OptionPool::OptionPool(std::size_t obs_dim, std::size_t action_count)
    : obs_dim_(obs_dim), action_count_(action_count) {
  if (obs_dim == 0 || action_count == 0) {
    throw ContractViolation("pool needs obs_dim > 0 and action_count > 0");
  }
  nodes_.reserve(action_count);
  for (std::size_t a = 0; a < action_count; ++a) {
    OptionNode leaf;
    leaf.id = static_cast<NodeId>(a);
    leaf.kind = NodeKind::ActionLeaf;
    leaf.value.assign(obs_dim, 0.0);
    leaf.action_index = a;
    leaf.created_step = -1;
    nodes_.push_back(std::move(leaf));
  }
}

const OptionNode& OptionPool::node(NodeId id) const {
  if (!contains(id)) throw LookupError("unknown node id " + std::to_string(id));
  return nodes_[id];
}

OptionNode& OptionPool::node(NodeId id) {
  if (!contains(id)) throw LookupError("unknown node id " + std::to_string(id));
  return nodes_[id];
}

NodeId OptionPool::leaf_id(std::size_t action_index) const {
  if (action_index >= action_count_) {
    throw ContractViolation("action index " + std::to_string(action_index) + " out of range");
  }
  return static_cast<NodeId>(action_index);
}

NodeId OptionPool::add_interior(std::span<const double> value, std::int64_t created_step) {
  require_dim(value.size(), obs_dim_, "node value");
  OptionNode n;
  n.id = static_cast<NodeId>(nodes_.size());
  n.kind = NodeKind::Interior;
  n.value.assign(value.begin(), value.end());
  n.created_step = created_step;
  n.children.reserve(action_count_);
  for (std::size_t a = 0; a < action_count_; ++a) {
    n.children.push_back(Edge{static_cast<NodeId>(a), 0.0, 0});
  }
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

Edge& OptionPool::add_edge(NodeId parent, NodeId child, double weight) {
  if (!contains(child)) throw LookupError("unknown child id " + std::to_string(child));
  auto& p = node(parent);
  if (p.is_leaf()) throw ContractViolation("action leaves cannot own children");
  if (p.find_edge(child) != nullptr) {
    throw ContractViolation("duplicate edge " + std::to_string(parent) + " -> " +
                            std::to_string(child));
  }
  p.children.push_back(Edge{child, weight, 0});
  return p.children.back();
}

std::string OptionPool::validate() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id != i) {
      os << "node at index " << i << " carries id " << n.id;
      return os.str();
    }
    if (n.value.size() != obs_dim_) {
      os << "node " << i << " value dimension " << n.value.size();
      return os.str();
    }
    const bool should_be_leaf = i < action_count_;
    if (should_be_leaf != n.is_leaf()) {
      os << "node " << i << " has the wrong kind";
      return os.str();
    }
    if (n.is_leaf() && (!n.children.empty() || n.action_index != i)) {
      os << "leaf " << i << " is malformed";
      return os.str();
    }
    for (std::size_t e = 0; e < n.children.size(); ++e) {
      const auto& edge = n.children[e];
      if (!contains(edge.child)) {
        os << "edge " << i << " -> " << edge.child << " dangles";
        return os.str();
      }
      if (!std::isfinite(edge.weight)) {
        os << "edge " << i << " -> " << edge.child << " has non-finite weight";
        return os.str();
      }
      for (std::size_t f = 0; f < e; ++f) {
        if (n.children[f].child == edge.child) {
          os << "node " << i << " has duplicate edge to " << edge.child;
          return os.str();
        }
      }
    }
  }
  return {};
}

OptionPool OptionPool::from_nodes(std::size_t obs_dim, std::size_t action_count,
                                  std::vector<OptionNode> nodes) {
  OptionPool pool;
  pool.obs_dim_ = obs_dim;
  pool.action_count_ = action_count;
  pool.nodes_ = std::move(nodes);
  if (pool.nodes_.size() < action_count) {
    throw ContractViolation("pool is missing action leaves");
  }
  if (auto err = pool.validate(); !err.empty()) throw ContractViolation(err);
  return pool;
}

double weighted_l1(std::span<const double> a, std::span<const double> b,
                   const AttentionWeights& w) {
  require_dim(a.size(), w.size(), "observation");
  require_dim(b.size(), w.size(), "node value");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += w[i] * std::fabs(a[i] - b[i]);
  }
  return s;
}

double distance(std::span<const double> observation, const OptionNode& node,
                const AttentionWeights& w) {
  if (node.is_leaf()) {
    throw ContractViolation("distance is undefined for action leaf " + std::to_string(node.id));
  }
  return weighted_l1(observation, node.value, w);
}

double similarity_from_distance(double d) { return 1.0 / (1.0 + d); }

double similarity_score(std::span<const double> observation, const OptionNode& node,
                        const AttentionWeights& w) {
  return similarity_from_distance(distance(observation, node, w));
}

std::vector<NodeId> descendants(const OptionPool& pool, NodeId root, std::size_t max_depth) {
  const auto& start = pool.node(root);
  std::vector<NodeId> out;
  if (start.is_leaf()) return out;

  std::vector<bool> seen(pool.size(), false);
  std::deque<std::pair<NodeId, std::size_t>> frontier;
  seen[root] = true;
  frontier.emplace_back(root, 0);
  while (!frontier.empty()) {
    auto [id, depth] = frontier.front();
    frontier.pop_front();
    out.push_back(id);
    if (depth == max_depth) continue;
    for (const auto& e : pool.node(id).children) {
      if (seen[e.child] || pool.node(e.child).is_leaf()) continue;
      seen[e.child] = true;
      frontier.emplace_back(e.child, depth + 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t prune_children(OptionPool& pool, NodeId node_id, std::size_t max_children,
                           const AttentionWeights& w) {
  auto& n = pool.node(node_id);
  if (n.is_leaf()) throw ContractViolation("prune_children on action leaf");

  std::size_t interior = 0;
  for (const auto& e : n.children) {
    if (!pool.node(e.child).is_leaf()) ++interior;
  }
  std::size_t removed = 0;
  while (interior > max_children) {
    // Farthest child goes first; on equal distance the later edge is dropped.
    std::size_t worst = n.children.size();
    double worst_d = -1.0;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      const auto& c = pool.node(n.children[i].child);
      if (c.is_leaf()) continue;
      double d = weighted_l1(n.value, c.value, w);
      if (d >= worst_d) {
        worst_d = d;
        worst = i;
      }
    }
    n.children.erase(n.children.begin() + static_cast<std::ptrdiff_t>(worst));
    --interior;
    ++removed;
  }
  return removed;
}

std::size_t prune_actions(OptionPool& pool, NodeId node_id, std::size_t keep_top) {
  if (keep_top == 0) throw ContractViolation("keep_top must be >= 1");
  auto& n = pool.node(node_id);
  if (n.is_leaf()) throw ContractViolation("prune_actions on action leaf");

  std::vector<const Edge*> actions;
  for (const auto& e : n.children) {
    if (pool.node(e.child).is_leaf()) actions.push_back(&e);
  }
  if (actions.size() <= keep_top) return 0;

  std::sort(actions.begin(), actions.end(), [&](const Edge* a, const Edge* b) {
    if (a->weight != b->weight) return a->weight > b->weight;
    return pool.node(a->child).action_index < pool.node(b->child).action_index;
  });
  std::vector<NodeId> drop;
  for (std::size_t i = keep_top; i < actions.size(); ++i) drop.push_back(actions[i]->child);

  const auto before = n.children.size();
  std::erase_if(n.children, [&](const Edge& e) {
    return std::find(drop.begin(), drop.end(), e.child) != drop.end();
  });
  return before - n.children.size();
}

}  // namespace ao2
