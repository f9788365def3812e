#include "ao2/inference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>

#include "ao2/errors.hpp"

namespace ao2 {

const char* to_string(ActionValueRule rule) {
  return rule == ActionValueRule::Mean ? "mean" : "total";
}

ActionValueRule action_value_rule_from_string(const std::string& name) {
  if (name == "total") return ActionValueRule::Total;
  if (name == "mean") return ActionValueRule::Mean;
  throw ConfigError("unknown action_value rule '" + name + "' (expected total|mean)");
}

std::vector<NodeId> DecisionPath::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(steps.size());
  for (const auto& s : steps) ids.push_back(s.node);
  return ids;
}

void InferenceConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must be in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
}

NodeId find_most_similar(const OptionPool& pool, std::span<const double> observation,
                         const AttentionWeights& w) {
  const auto& nodes = pool.nodes();
  if (nodes.size() <= pool.action_count()) throw NoSchema();
  NodeId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = pool.action_count(); i < nodes.size(); ++i) {
    const double d = distance(observation, nodes[i], w);
    if (!found || d < best_d) {
      best_d = d;
      best = static_cast<NodeId>(i);
      found = true;
    }
  }
  return best;
}

double action_value(const Edge& edge, ActionValueRule rule) {
  if (rule == ActionValueRule::Total) return edge.weight;
  if (edge.visits == 0) return std::numeric_limits<double>::infinity();
  return edge.weight / static_cast<double>(edge.visits);
}

namespace {

// BFS tree over interior nodes, identical traversal order to descendants().
std::unordered_map<NodeId, NodeId> bfs_parents(const OptionPool& pool, NodeId root,
                                               std::size_t max_depth) {
  std::unordered_map<NodeId, NodeId> parent;
  std::deque<std::pair<NodeId, std::size_t>> frontier;
  parent.emplace(root, root);
  frontier.emplace_back(root, 0);
  while (!frontier.empty()) {
    auto [id, depth] = frontier.front();
    frontier.pop_front();
    if (depth == max_depth) continue;
    for (const auto& e : pool.node(id).children) {
      if (parent.contains(e.child) || pool.node(e.child).is_leaf()) continue;
      parent.emplace(e.child, id);
      frontier.emplace_back(e.child, depth + 1);
    }
  }
  return parent;
}

std::size_t edge_ordinal(const OptionNode& n, NodeId child) {
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (n.children[i].child == child) return i;
  }
  throw LookupError("no edge " + std::to_string(n.id) + " -> " + std::to_string(child));
}

}  // namespace

Selection select_action_from(const OptionPool& pool, NodeId entry,
                             std::span<const double> observation, const AttentionWeights& w,
                             const InferenceConfig& cfg) {
  if (pool.node(entry).is_leaf()) throw ContractViolation("entry node must be interior");

  Selection sel;
  sel.matched = entry;

  // Level 2: closest node among the entry's descendants.
  const auto candidates = descendants(pool, entry, cfg.max_depth);
  NodeId s = entry;
  double best_d = std::numeric_limits<double>::infinity();
  bool found = false;
  for (NodeId id : candidates) {
    const double d = distance(observation, pool.node(id), w);
    if (!found || d < best_d) {
      best_d = d;
      s = id;
      found = true;
    }
  }
  sel.selected = s;

  std::vector<NodeId> hops;
  if (s != entry) {
    const auto parent = bfs_parents(pool, entry, cfg.max_depth);
    for (NodeId cur = s; cur != entry; cur = parent.at(cur)) hops.push_back(cur);
  }
  hops.push_back(entry);
  for (auto it = hops.rbegin(); it + 1 != hops.rend(); ++it) {
    const auto& from = pool.node(*it);
    const NodeId to = *(it + 1);
    sel.path.steps.push_back(PathStep{from.id, edge_ordinal(from, to), to});
  }

  // Level 3: best action edge, falling back through interior children when a
  // node has lost all of its action edges.
  std::vector<bool> visited(pool.size(), false);
  NodeId cur = s;
  for (;;) {
    visited[cur] = true;
    const auto& n = pool.node(cur);
    std::ptrdiff_t best_action = -1;
    std::ptrdiff_t best_interior = -1;
    double best_action_v = 0.0;
    double best_interior_v = 0.0;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      const auto& e = n.children[i];
      const auto& c = pool.node(e.child);
      const double v = action_value(e, cfg.action_value);
      if (c.is_leaf()) {
        const bool better =
            best_action < 0 || v > best_action_v ||
            (v == best_action_v &&
             c.action_index < pool.node(n.children[best_action].child).action_index);
        if (better) {
          best_action = static_cast<std::ptrdiff_t>(i);
          best_action_v = v;
        }
      } else if (!visited[e.child]) {
        if (best_interior < 0 || v > best_interior_v) {
          best_interior = static_cast<std::ptrdiff_t>(i);
          best_interior_v = v;
        }
      }
    }
    if (best_action >= 0) {
      const auto& e = n.children[static_cast<std::size_t>(best_action)];
      sel.path.steps.push_back(PathStep{cur, static_cast<std::size_t>(best_action), e.child});
      sel.path.action_index = pool.node(e.child).action_index;
      break;
    }
    if (best_interior < 0 || sel.path.steps.size() > cfg.max_depth + pool.size()) {
      throw NoAction("no action leaf reachable from node " + std::to_string(s));
    }
    const auto& e = n.children[static_cast<std::size_t>(best_interior)];
    sel.path.steps.push_back(PathStep{cur, static_cast<std::size_t>(best_interior), e.child});
    cur = e.child;
  }

  for (const auto& step : sel.path.steps) {
    sel.hop_distances.push_back(distance(observation, pool.node(step.node), w));
  }
  return sel;
}

Selection select_action(const OptionPool& pool, std::span<const double> observation,
                        const AttentionWeights& w, const InferenceConfig& cfg) {
  return select_action_from(pool, find_most_similar(pool, observation, w), observation, w, cfg);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t epsilon_greedy(std::size_t action_index, std::span<const std::size_t> available,
                           double epsilon, std::mt19937_64& rng) {
  if (std::find(available.begin(), available.end(), action_index) == available.end()) {
    throw ContractViolation("action " + std::to_string(action_index) + " is not available");
  }
  if (available.size() <= 1 || epsilon <= 0.0) return action_index;
  if (uniform01(rng) >= epsilon) return action_index;
  std::vector<std::size_t> others;
  others.reserve(available.size() - 1);
  for (auto a : available) {
    if (a != action_index) others.push_back(a);
  }
  if (others.empty()) return action_index;
  auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(others.size()));
  return others[std::min(k, others.size() - 1)];
}

std::size_t epsilon_greedy(std::size_t action_index, std::size_t action_count, double epsilon,
                           std::mt19937_64& rng) {
  std::vector<std::size_t> all(action_count);
  for (std::size_t a = 0; a < action_count; ++a) all[a] = a;
  return epsilon_greedy(action_index, all, epsilon, rng);
}

double smooth_action(double chosen, double last, double alpha) {
  return alpha * chosen + (1.0 - alpha) * last;
}

}  // namespace ao2
