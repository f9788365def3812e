#include "ao2/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ao2 {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string vector_label(const std::vector<double>& v, int digits) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_significant(v[i], digits);
  }
  return s + "]";
}

std::uint64_t outgoing_visits(const OptionNode& n) {
  std::uint64_t v = 0;
  for (const auto& e : n.children) v += e.visits;
  return v;
}

nlohmann::ordered_json real_or_null(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x)) return nullptr;
  return *x;
}

nlohmann::ordered_json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_significant(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string export_dot(const OptionPool& pool, const std::map<NodeId, std::string>& annotations) {
  std::ostringstream os;
  os << "digraph ao2 {\n";
  os << "  rankdir=LR;\n";
  for (const auto& n : pool.nodes()) {
    std::string label = "id " + std::to_string(n.id) + "\n";
    if (n.is_leaf()) {
      label += "action " + std::to_string(n.action_index);
    } else {
      label += "interior\n" + vector_label(n.value, kDisplayDigits) + "\nvisits " +
               std::to_string(outgoing_visits(n)) + ", created " +
               std::to_string(n.created_step);
    }
    if (const auto it = annotations.find(n.id); it != annotations.end()) {
      label += "\n" + it->second;
    }
    os << "  n" << n.id << " [shape=" << (n.is_leaf() ? "box" : "ellipse") << ", label=\""
       << escape(label) << "\"];\n";
  }
  for (const auto& n : pool.nodes()) {
    for (const auto& e : n.children) {
      os << "  n" << n.id << " -> n" << e.child << " [label=\""
         << format_significant(e.weight, kWeightDigits) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

bool Explanation::complete() const {
  if (observation.empty()) return false;
  if (!matched_pruned && (terms.size() != observation.size() || !distance)) return false;
  if (path.empty()) return false;
  if (!selected_pruned) {
    const bool has_chosen =
        std::any_of(candidates.begin(), candidates.end(),
                    [&](const CandidateAction& c) { return c.action_index == chosen_action; });
    if (!has_chosen && notes.empty()) return false;
  }
  if ((matched_pruned || selected_pruned) && notes.empty()) return false;
  return true;
}

Explanation explain_step(const TraceRow& row, const OptionPool& pool, ActionValueRule rule) {
  Explanation e;
  e.step = row.step;
  e.episode = row.episode;
  e.observation = row.observation;
  e.attention = row.attention;
  if (e.attention.size() != e.observation.size()) {
    e.attention.assign(e.observation.size(), 1.0);
    e.notes.push_back("attention missing from trace row; unit weights assumed");
  }
  e.matched = row.entry;
  e.chosen_action = row.action;
  e.greedy_action = row.greedy_action;
  e.exploratory = row.exploratory;
  e.command = row.command;
  e.rule = to_string(rule);

  auto live_interior = [&](NodeId id) { return pool.contains(id) && !pool.node(id).is_leaf(); };

  if (live_interior(e.matched)) {
    const auto& m = pool.node(e.matched);
    e.matched_value = m.value;
    if (m.value.size() == e.observation.size()) {
      double d = 0.0;
      for (std::size_t i = 0; i < m.value.size(); ++i) {
        DimensionTerm t{e.observation[i], m.value[i], e.attention[i], 0.0};
        t.term = t.attention * std::abs(t.observation - t.node_value);
        d += t.term;
        e.terms.push_back(t);
      }
      e.distance = d;
      e.similarity = similarity_from_distance(d);
    } else {
      e.notes.push_back("matched node dimension differs from the observation");
    }
  } else {
    e.matched_pruned = true;
    e.notes.push_back(std::string(kPrunedMarker) + " " + std::to_string(e.matched) +
                      " (matched node absent from snapshot)");
  }

  for (std::size_t i = 0; i < row.path.size(); ++i) {
    HopView h;
    h.node = row.path[i];
    h.pruned = !live_interior(h.node);
    if (i < row.hop_distances.size()) h.distance = row.hop_distances[i];
    if (h.pruned && !(i == 0 && e.matched_pruned && h.node == e.matched)) {
      e.notes.push_back(std::string(kPrunedMarker) + " " + std::to_string(h.node) +
                        " (path node absent from snapshot)");
    }
    e.path.push_back(h);
  }

  if (!row.path.empty()) {
    e.selected = row.path.back();
    if (live_interior(e.selected)) {
      for (const auto& edge : pool.node(e.selected).children) {
        if (!pool.contains(edge.child)) continue;
        const auto& c = pool.node(edge.child);
        if (!c.is_leaf()) continue;
        e.candidates.push_back(
            CandidateAction{c.action_index, edge.weight, edge.visits, action_value(edge, rule)});
      }
      std::sort(e.candidates.begin(), e.candidates.end(),
                [](const CandidateAction& a, const CandidateAction& b) {
                  return a.action_index < b.action_index;
                });
      const auto chosen =
          std::find_if(e.candidates.begin(), e.candidates.end(),
                       [&](const CandidateAction& c) { return c.action_index == e.chosen_action; });
      if (chosen == e.candidates.end()) {
        e.notes.push_back(std::string(kPrunedMarker) + ": action edge " +
                          std::to_string(e.chosen_action) + " no longer at node " +
                          std::to_string(e.selected));
      } else {
        double best_other = -std::numeric_limits<double>::infinity();
        for (const auto& c : e.candidates) {
          if (c.action_index != e.chosen_action) best_other = std::max(best_other, c.value);
        }
        if (e.candidates.size() > 1) e.margin = chosen->value - best_other;
      }
    } else {
      e.selected_pruned = true;
      if (!e.path.back().pruned) {
        e.notes.push_back(std::string(kPrunedMarker) + " " + std::to_string(e.selected));
      }
    }
  }
  if (e.exploratory) e.notes.push_back("exploratory action (greedy choice was action " +
                                       std::to_string(e.greedy_action) + ")");
  return e;
}

std::string render_text(const Explanation& e) {
  std::ostringstream os;
  auto row = [&](const std::string& k) -> std::ostream& {
    return os << std::left << std::setw(14) << k;
  };
  row("step") << e.step << "  (episode " << e.episode << ")\n";
  row("observation") << vector_label(e.observation, kDisplayDigits) << '\n';
  row("matched") << e.matched;
  if (e.matched_pruned) {
    os << "  <" << kPrunedMarker << ">\n";
  } else {
    os << "  value " << vector_label(e.matched_value, kDisplayDigits) << '\n';
  }
  if (!e.terms.empty()) {
    os << "  " << std::left << std::setw(5) << "dim" << std::right << std::setw(12) << "obs"
       << std::setw(12) << "node" << std::setw(12) << "attention" << std::setw(12) << "term"
       << '\n';
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
      const auto& t = e.terms[i];
      os << "  " << std::left << std::setw(5) << i << std::right << std::setw(12)
         << format_significant(t.observation, kDisplayDigits) << std::setw(12)
         << format_significant(t.node_value, kDisplayDigits) << std::setw(12)
         << format_significant(t.attention, kDisplayDigits) << std::setw(12)
         << format_significant(t.term, kDisplayDigits) << '\n';
    }
  }
  if (e.distance) {
    row("distance") << format_significant(*e.distance, kDisplayDigits) << "  similarity "
                    << format_significant(*e.similarity, kDisplayDigits) << '\n';
  }
  row("path");
  for (std::size_t i = 0; i < e.path.size(); ++i) {
    if (i) os << " -> ";
    os << e.path[i].node;
    if (e.path[i].pruned) os << "<" << kPrunedMarker << ">";
    if (e.path[i].distance) os << " (d=" << format_significant(*e.path[i].distance, kDisplayDigits) << ")";
  }
  os << '\n';
  row("selected") << e.selected << (e.selected_pruned ? std::string("  <") + kPrunedMarker + ">" : "")
                  << "  rule " << e.rule << '\n';
  for (const auto& c : e.candidates) {
    os << "  action " << std::left << std::setw(4) << c.action_index << std::right << " weight "
       << std::setw(12) << format_significant(c.weight, kDisplayDigits) << " visits "
       << std::setw(8) << c.visits << " value " << std::setw(12)
       << format_significant(c.value, kDisplayDigits)
       << (c.action_index == e.chosen_action ? "  <- chosen" : "") << '\n';
  }
  row("chosen") << e.chosen_action << "  command " << format_significant(e.command, kDisplayDigits);
  if (e.margin) os << "  margin " << format_significant(*e.margin, kDisplayDigits);
  if (e.exploratory) os << "  [exploratory action]";
  os << '\n';
  for (const auto& n : e.notes) row("note") << n << '\n';
  return os.str();
}

nlohmann::ordered_json to_json(const Explanation& e) {
  nlohmann::ordered_json j;
  j["step"] = e.step;
  j["episode"] = e.episode;
  j["observation"] = e.observation;
  j["attention"] = e.attention;
  j["matched"] = e.matched;
  j["matched_pruned"] = e.matched_pruned;
  j["matched_value"] = e.matched_value;
  auto terms = nlohmann::ordered_json::array();
  for (const auto& t : e.terms) {
    terms.push_back({{"observation", t.observation},
                     {"node_value", t.node_value},
                     {"attention", t.attention},
                     {"term", t.term}});
  }
  j["terms"] = terms;
  j["distance"] = real_or_null(e.distance);
  j["similarity"] = real_or_null(e.similarity);
  auto path = nlohmann::ordered_json::array();
  for (const auto& h : e.path) {
    path.push_back({{"node", h.node}, {"pruned", h.pruned}, {"distance", real_or_null(h.distance)}});
  }
  j["path"] = path;
  j["selected"] = e.selected;
  j["selected_pruned"] = e.selected_pruned;
  j["rule"] = e.rule;
  auto cands = nlohmann::ordered_json::array();
  for (const auto& c : e.candidates) {
    cands.push_back({{"action", c.action_index},
                     {"weight", c.weight},
                     {"visits", c.visits},
                     {"value", finite_or_string(c.value)}});
  }
  j["candidates"] = cands;
  j["chosen_action"] = e.chosen_action;
  j["greedy_action"] = e.greedy_action;
  j["exploratory"] = e.exploratory;
  j["command"] = e.command;
  j["margin"] = real_or_null(e.margin);
  j["notes"] = e.notes;
  j["complete"] = e.complete();
  return j;
}

}  // namespace ao2
