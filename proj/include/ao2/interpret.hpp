#pragma once

// Human-readable views of a pool and of single decisions: DOT export and
// per-step explanations built from a trace row and a pool snapshot.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ao2/inference.hpp"
#include "ao2/option_graph.hpp"
#include "ao2/trace_log.hpp"

namespace ao2 {

// printf %.{digits}g
std::string format_significant(double x, int digits);

inline constexpr int kDisplayDigits = 4;
inline constexpr int kWeightDigits = 3;

// Nodes in id order, then their edges in stored order. `annotations` adds an
// extra label line to the given nodes.
std::string export_dot(const OptionPool& pool,
                       const std::map<NodeId, std::string>& annotations = {});

struct DimensionTerm {
  double observation = 0.0;
  double node_value = 0.0;
  double attention = 0.0;
  double term = 0.0;  // attention * |observation - node_value|
};

struct CandidateAction {
  std::size_t action_index = 0;
  double weight = 0.0;
  std::uint64_t visits = 0;
  double value = 0.0;  // score under the action-value rule
};

struct HopView {
  NodeId node = 0;
  bool pruned = false;
  std::optional<double> distance;
};

inline constexpr const char* kPrunedMarker = "pruned node";

struct Explanation {
  std::int64_t step = 0;
  std::size_t episode = 0;
  std::vector<double> observation;
  std::vector<double> attention;

  NodeId matched = 0;
  bool matched_pruned = false;
  std::vector<double> matched_value;
  std::vector<DimensionTerm> terms;
  std::optional<double> distance;
  std::optional<double> similarity;

  std::vector<HopView> path;
  NodeId selected = 0;  // node whose action edge was followed
  bool selected_pruned = false;
  std::string rule;
  std::vector<CandidateAction> candidates;

  std::size_t chosen_action = 0;
  std::size_t greedy_action = 0;
  bool exploratory = false;
  double command = 0.0;
  // value of the chosen action minus the best other candidate
  std::optional<double> margin;

  std::vector<std::string> notes;

  // Every part is present, or its absence is explained by a pruned-node note.
  bool complete() const;
};

Explanation explain_step(const TraceRow& row, const OptionPool& pool,
                         ActionValueRule rule = ActionValueRule::Total);

std::string render_text(const Explanation& e);
nlohmann::ordered_json to_json(const Explanation& e);

}  // namespace ao2
