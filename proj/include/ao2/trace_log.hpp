#pragma once

// Decision-trace log, one CSV row per environment step.
//
// Columns, in order:
//   step          global learner step (0-based)
//   episode       episode index (0-based)
//   entry         id of the node matched to the observation
//   path          node ids visited, entry first, separated by ';'
//   action        primitive action index that was executed
//   greedy_action action the greedy rule picked before exploration
//   exploratory   1 when epsilon-greedy overrode the greedy action
//   command       executable command value (after smoothing)
//   hop_distances distance from the observation to each node in `path`
//   reward        reward returned by the environment for this step
//   observation   the observation the decision was made on
//   attention     effective attention weights used for the distances
// List-valued fields use ';' as separator; reals carry 17 significant digits.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ao2/option_graph.hpp"

namespace ao2 {

struct TraceRow {
  std::int64_t step = 0;
  std::size_t episode = 0;
  NodeId entry = 0;
  std::vector<NodeId> path;
  std::size_t action = 0;
  std::size_t greedy_action = 0;
  bool exploratory = false;
  double command = 0.0;
  std::vector<double> hop_distances;
  double reward = 0.0;
  std::vector<double> observation;
  std::vector<double> attention;
};

inline constexpr const char* kTraceHeader =
    "step,episode,entry,path,action,greedy_action,exploratory,command,hop_distances,reward,"
    "observation,attention";

std::string format_trace_row(const TraceRow& row);
TraceRow parse_trace_row(const std::string& line);

class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path);
  void write(const TraceRow& row);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<TraceRow> read_trace(const std::filesystem::path& path);

}  // namespace ao2
