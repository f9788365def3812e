#include "ao2/pool_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ao2/errors.hpp"

namespace ao2 {

using nlohmann::json;

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_real(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  // ERANGE on underflow still yields the nearest subnormal, which is what was written
  const bool overflow = errno == ERANGE && std::isinf(v);
  if (end == text.c_str() || *end != '\0' || overflow) {
    throw ContractViolation("malformed real '" + text + "'");
  }
  return v;
}

namespace {

json reals(const std::vector<double>& xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(format_real(x));
  return arr;
}

double read_real(const json& j) {
  if (j.is_string()) return parse_real(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw ContractViolation("expected a real, got " + j.dump());
}

std::vector<double> read_reals(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(read_real(x));
  return out;
}

}  // namespace

std::string pool_to_json(const OptionPool& pool, const PoolMetadata& meta) {
  json doc;
  doc["obs_dim"] = pool.obs_dim();
  doc["action_count"] = pool.action_count();
  if (!meta.attention.empty()) doc["attention"] = reals(meta.attention);
  if (!meta.action_value.empty()) doc["action_value"] = meta.action_value;
  json nodes = json::array();
  for (const auto& n : pool.nodes()) {
    json jn;
    jn["id"] = n.id;
    jn["kind"] = n.is_leaf() ? "action" : "interior";
    if (n.is_leaf()) jn["action_index"] = n.action_index;
    jn["created_step"] = n.created_step;
    jn["value"] = reals(n.value);
    json children = json::array();
    for (const auto& e : n.children) {
      children.push_back({{"child", e.child}, {"weight", format_real(e.weight)}, {"visits", e.visits}});
    }
    jn["children"] = std::move(children);
    nodes.push_back(std::move(jn));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(1) + "\n";
}

LoadedPool pool_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ContractViolation(std::string("pool document is not valid JSON: ") + e.what());
  }
  try {
    const auto obs_dim = doc.at("obs_dim").get<std::size_t>();
    const auto action_count = doc.at("action_count").get<std::size_t>();
    std::vector<OptionNode> nodes;
    for (const auto& jn : doc.at("nodes")) {
      OptionNode n;
      n.id = jn.at("id").get<NodeId>();
      const auto kind = jn.at("kind").get<std::string>();
      if (kind == "action") {
        n.kind = NodeKind::ActionLeaf;
        n.action_index = jn.at("action_index").get<std::size_t>();
      } else if (kind == "interior") {
        n.kind = NodeKind::Interior;
      } else {
        throw ContractViolation("unknown node kind '" + kind + "'");
      }
      n.created_step = jn.value("created_step", std::int64_t{0});
      n.value = read_reals(jn.at("value"));
      for (const auto& je : jn.at("children")) {
        Edge e;
        e.child = je.at("child").get<NodeId>();
        e.weight = read_real(je.at("weight"));
        e.visits = je.value("visits", std::uint64_t{0});
        n.children.push_back(e);
      }
      nodes.push_back(std::move(n));
    }
    PoolMetadata meta;
    if (doc.contains("attention")) meta.attention = read_reals(doc["attention"]);
    if (doc.contains("action_value")) meta.action_value = doc["action_value"].get<std::string>();
    return LoadedPool{OptionPool::from_nodes(obs_dim, action_count, std::move(nodes)), meta};
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("malformed pool document: ") + e.what());
  }
}

void save_pool(const std::filesystem::path& path, const OptionPool& pool,
               const PoolMetadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << pool_to_json(pool, meta);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

LoadedPool load_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return pool_from_json(ss.str());
}

}  // namespace ao2
