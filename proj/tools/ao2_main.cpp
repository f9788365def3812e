// ao2 command-line front end: run, eval, export, oracle, explain.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "ao2/config.hpp"
#include "ao2/errors.hpp"
#include "ao2/harness.hpp"
#include "ao2/interpret.hpp"
#include "ao2/oracle.hpp"
#include "ao2/pool_io.hpp"
#include "ao2/trace_log.hpp"

namespace {

struct RunArgs {
  std::string env;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<std::size_t> episodes;
  std::string out = "results";
};

int cmd_run(const RunArgs& a) {
  ao2::KeyValues kv;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw ao2::ConfigError("cannot open config " + a.config);
    std::stringstream ss;
    ss << in.rdbuf();
    kv = ao2::parse_key_values(ss.str());
  }
  if (!a.env.empty()) kv["env"] = a.env;
  if (a.seed) kv["seed"] = std::to_string(*a.seed);
  if (a.replicas) kv["replicas"] = std::to_string(*a.replicas);
  if (a.episodes) kv["episodes"] = std::to_string(*a.episodes);
  auto cfg = ao2::apply_config(kv);
  cfg.out_dir = a.out;
  const auto result = ao2::run_experiment(cfg);
  for (const auto& r : result.replicas) {
    std::printf("replica %zu seed %llu episodes %zu", r.replica,
                static_cast<unsigned long long>(r.seed), r.returns.size());
    if (r.stats) {
      std::printf(" best %.4g last %.4g", r.stats->best_window_mean, r.stats->last_window_mean);
    }
    std::printf(" nodes %zu jumps %zu %.1fs\n", r.pool->size(), r.phase_jumps.size(),
                r.wall_seconds);
  }
  std::printf("results in %s\n", cfg.out_dir.string().c_str());
  return 0;
}

int cmd_eval(const std::string& pool_path, const std::string& env, std::size_t episodes,
             std::uint64_t seed, std::size_t grid) {
  const auto loaded = ao2::load_pool(pool_path);
  auto w = loaded.meta.attention.empty()
               ? ao2::AttentionWeights::ones(loaded.pool.obs_dim())
               : ao2::AttentionWeights(loaded.meta.attention);
  ao2::EvalConfig cfg;
  cfg.env = env;
  cfg.episodes = episodes;
  cfg.seed = seed;
  cfg.action_grid = grid;
  if (!loaded.meta.action_value.empty()) {
    cfg.action_value = ao2::action_value_rule_from_string(loaded.meta.action_value);
  }
  const auto returns = ao2::evaluate_pool(loaded.pool, w, cfg);
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) /
                      static_cast<double>(returns.size());
  const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
  std::printf("episodes %zu mean %.6g min %.6g max %.6g\n", returns.size(), mean, *lo, *hi);
  return 0;
}

int cmd_export(const std::string& pool_path, const std::string& dot_path) {
  const auto loaded = ao2::load_pool(pool_path);
  const auto text = ao2::export_dot(loaded.pool);
  if (dot_path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(dot_path);
  if (!out) throw std::runtime_error("cannot open " + dot_path + " for writing");
  out << text;
  out.close();
  if (out.fail()) throw std::runtime_error("failed writing " + dot_path);
  return 0;
}

int cmd_oracle(const std::string& env, const std::string& table) {
  std::size_t checked = 0, failed = 0;
  for (const auto& row : ao2::read_oracle_table(table)) {
    if (env != "all" && row.env != env) continue;
    const auto c = ao2::check_oracle_row(row);
    ++checked;
    const bool ok = c.passed(ao2::kOracleTolerance);
    if (!ok) ++failed;
    std::printf("%s %s max_error %.3g done %d\n", ok ? "ok  " : "FAIL", row.env.c_str(),
                c.max_error, c.done ? 1 : 0);
  }
  if (checked == 0) throw ao2::ConfigError("no oracle rows for environment '" + env + "'");
  std::printf("%zu/%zu transitions match to %.0e\n", checked - failed, checked,
              ao2::kOracleTolerance);
  return failed == 0 ? 0 : 1;
}

int cmd_explain(const std::string& pool_path, const std::string& trace_path, std::int64_t step,
                bool json) {
  const auto loaded = ao2::load_pool(pool_path);
  const auto rows = ao2::read_trace(trace_path);
  const auto it = std::find_if(rows.begin(), rows.end(),
                               [&](const ao2::TraceRow& r) { return r.step == step; });
  if (it == rows.end()) {
    throw ao2::LookupError("step " + std::to_string(step) + " not in " + trace_path);
  }
  const auto rule = loaded.meta.action_value.empty()
                        ? ao2::ActionValueRule::Total
                        : ao2::action_value_rule_from_string(loaded.meta.action_value);
  const auto e = ao2::explain_step(*it, loaded.pool, rule);
  if (json) {
    std::cout << ao2::to_json(e).dump(2) << '\n';
  } else {
    std::cout << ao2::render_text(e);
  }
  return 0;
}

int fail(const char* kind, const std::string& message, int code) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ao2: schema-based option learner on classic-control tasks"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "train on an environment and write results");
  run_cmd->add_option("--env", run.env, "cartpole-v0 | pendulum-v0 | acrobot-v1");
  run_cmd->add_option("--config", run.config, "key = value config file");
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--replicas", run.replicas);
  run_cmd->add_option("--episodes", run.episodes);
  run_cmd->add_option("--out", run.out, "output directory")->capture_default_str();

  std::string pool_path, env, dot_path, table, trace_path;
  std::size_t episodes = 100, grid = 9;
  std::uint64_t seed = 1;
  std::int64_t step = 0;
  bool json = false;

  auto* eval_cmd = app.add_subcommand("eval", "greedy rollouts of a frozen pool");
  eval_cmd->add_option("--pool", pool_path)->required();
  eval_cmd->add_option("--env", env)->required();
  eval_cmd->add_option("--episodes", episodes)->capture_default_str();
  eval_cmd->add_option("--seed", seed)->capture_default_str();
  eval_cmd->add_option("--action-grid", grid)->capture_default_str();

  auto* export_cmd = app.add_subcommand("export", "write a pool as a DOT graph");
  export_cmd->add_option("--pool", pool_path)->required();
  export_cmd->add_option("--dot", dot_path, "output file, - for stdout")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "check dynamics against a reference table");
  oracle_cmd->add_option("--env", env, "environment name or all")->required();
  oracle_cmd->add_option("--table", table)->required();

  auto* explain_cmd = app.add_subcommand("explain", "justify one logged decision");
  explain_cmd->add_option("--pool", pool_path)->required();
  explain_cmd->add_option("--trace", trace_path)->required();
  explain_cmd->add_option("--step", step)->required();
  explain_cmd->add_flag("--json", json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*eval_cmd) return cmd_eval(pool_path, env, episodes, seed, grid);
    if (*export_cmd) return cmd_export(pool_path, dot_path);
    if (*oracle_cmd) return cmd_oracle(env, table);
    if (*explain_cmd) return cmd_explain(pool_path, trace_path, step, json);
  } catch (const ao2::ConfigError& e) {
    return fail("config", e.what(), 3);
  } catch (const ao2::ContractViolation& e) {
    return fail("contract", e.what(), 4);
  } catch (const ao2::LookupError& e) {
    return fail("lookup", e.what(), 5);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
