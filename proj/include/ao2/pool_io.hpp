#pragma once

// pool.json: {obs_dim, action_count, nodes:[{id, kind, value[], children:[{child,
// weight}]}]}. Reals are written as decimal strings with 17 significant digits
// so a save/load cycle reproduces every bit.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ao2/option_graph.hpp"

namespace ao2 {

// Optional learner context stored next to the nodes so a frozen pool can be
// evaluated and explained without the original config.
struct PoolMetadata {
  std::vector<double> attention;  // effective attention weights at save time
  std::string action_value;       // "total" or "mean"; empty when unknown
};

struct LoadedPool {
  OptionPool pool;
  PoolMetadata meta;
};

std::string format_real(double x);
double parse_real(const std::string& text);

std::string pool_to_json(const OptionPool& pool, const PoolMetadata& meta = {});
LoadedPool pool_from_json(const std::string& text);

void save_pool(const std::filesystem::path& path, const OptionPool& pool,
               const PoolMetadata& meta = {});
LoadedPool load_pool(const std::filesystem::path& path);

}  // namespace ao2
