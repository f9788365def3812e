#include "ao2/trace_log.hpp"

#include <sstream>
#include <stdexcept>

#include "ao2/errors.hpp"
#include "ao2/pool_io.hpp"

namespace ao2 {

namespace {

template <typename T, typename Fmt>
std::string join(const std::vector<T>& xs, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += fmt(xs[i]);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& p : split(s, ';')) out.push_back(parse_real(p));
  return out;
}

std::uint64_t parse_uint(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size()) throw ContractViolation("malformed integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_trace_row(const TraceRow& row) {
  std::ostringstream os;
  os << row.step << ',' << row.episode << ',' << row.entry << ','
     << join(row.path, [](NodeId id) { return std::to_string(id); }) << ',' << row.action << ','
     << row.greedy_action << ',' << (row.exploratory ? 1 : 0) << ',' << format_real(row.command)
     << ',' << join(row.hop_distances, format_real) << ',' << format_real(row.reward) << ','
     << join(row.observation, format_real) << ',' << join(row.attention, format_real);
  return os.str();
}

TraceRow parse_trace_row(const std::string& line) {
  const auto f = split(line, ',');
  if (f.size() != 12) {
    throw ContractViolation("trace row has " + std::to_string(f.size()) + " fields, expected 12");
  }
  try {
    TraceRow row;
    row.step = std::stoll(f[0]);
    row.episode = parse_uint(f[1]);
    row.entry = static_cast<NodeId>(parse_uint(f[2]));
    if (!f[3].empty()) {
      for (const auto& p : split(f[3], ';')) row.path.push_back(static_cast<NodeId>(parse_uint(p)));
    }
    row.action = parse_uint(f[4]);
    row.greedy_action = parse_uint(f[5]);
    row.exploratory = f[6] == "1";
    row.command = parse_real(f[7]);
    row.hop_distances = parse_reals(f[8]);
    row.reward = parse_real(f[9]);
    row.observation = parse_reals(f[10]);
    row.attention = parse_reals(f[11]);
    return row;
  } catch (const std::invalid_argument&) {
    throw ContractViolation("malformed trace row: " + line);
  } catch (const std::out_of_range&) {
    throw ContractViolation("out-of-range value in trace row: " + line);
  }
}

TraceWriter::TraceWriter(const std::filesystem::path& path) : path_(path), out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out_ << kTraceHeader << '\n';
}

void TraceWriter::write(const TraceRow& row) { out_ << format_trace_row(row) << '\n'; }

void TraceWriter::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("failed writing " + path_.string());
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ContractViolation(path.string() + " does not start with the trace header");
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_trace_row(line));
  }
  return rows;
}

}  // namespace ao2
