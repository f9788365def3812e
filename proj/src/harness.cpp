#include "ao2/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ao2/config.hpp"
#include "ao2/environments.hpp"
#include "ao2/errors.hpp"
#include "ao2/pool_io.hpp"
#include "ao2/trace_log.hpp"

namespace ao2 {

namespace {

constexpr const char* kVersion = "ao2 0.1.0";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (out.fail()) throw std::runtime_error("failed writing " + path.string());
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

nlohmann::ordered_json stats_json(const RunRecord& rec) {
  nlohmann::ordered_json j;
  j["episodes"] = rec.returns.size();
  j["steps"] = rec.steps;
  j["stopped_early"] = rec.stopped_early;
  j["pool_nodes"] = rec.pool ? rec.pool->size() : 0;
  if (rec.stats) {
    j["best_window_mean"] = rec.stats->best_window_mean;
    j["best_window_start_episode"] = rec.stats->best_window_start;
    j["last_window_mean"] = rec.stats->last_window_mean;
  } else {
    j["best_window_mean"] = nullptr;
    j["last_window_mean"] = nullptr;
  }
  j["phase_jumps"] = rec.phase_jumps;
  return j;
}

nlohmann::ordered_json manifest_header(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["version_hash"] = version_hash();
  j["env"] = cfg.env;
  j["seed"] = cfg.seed();
  j["config"] = to_key_values(cfg);
  j["best_interpretation"] =
      "best = maximum mean return over any " + std::to_string(cfg.eval_window) +
      " consecutive episodes; last = mean of the final " + std::to_string(cfg.eval_window);
  return j;
}

void write_replica_files(const ExperimentConfig& cfg, const RunRecord& rec) {
  const auto& dir = rec.out_dir;
  {
    const auto p = dir / "returns.csv";
    auto out = open_out(p);
    out << "episode,return\n";
    for (std::size_t i = 0; i < rec.returns.size(); ++i) {
      out << i << ',' << format_real(rec.returns[i]) << '\n';
    }
    finish(out, p);
  }
  {
    const auto p = dir / "curve.csv";
    auto out = open_out(p);
    out << "window_start_step,mean_reward\n";
    for (const auto& c : rec.curve) {
      out << c.window_start_step << ',' << format_real(c.mean_reward) << '\n';
    }
    finish(out, p);
  }
  PoolMetadata meta{rec.attention, to_string(cfg.learner.inference.action_value)};
  save_pool(dir / "pool.json", *rec.pool, meta);

  auto j = manifest_header(cfg);
  j["replica"] = rec.replica;
  j["replica_seed"] = rec.seed;
  j["stats"] = stats_json(rec);
  j["finished_at"] = utc_now();
  j["wall_seconds"] = rec.wall_seconds;
  const auto p = dir / "manifest.json";
  auto out = open_out(p);
  out << j.dump(2) << '\n';
  finish(out, p);
}

std::filesystem::path replica_dir(const ExperimentConfig& cfg, std::size_t replica) {
  if (cfg.out_dir.empty()) return {};
  if (cfg.replicas == 1) return cfg.out_dir;
  return cfg.out_dir / ("replica_" + std::to_string(replica));
}

}  // namespace

void ExperimentConfig::validate() const {
  make_environment(env, action_grid);
  learner.validate();
  if (replicas < 1) throw ConfigError("replicas must be at least 1");
  if (eval_window < 1) throw ConfigError("eval_window must be at least 1");
  if (episodes < eval_window) throw ConfigError("episodes must be at least eval_window");
  if (curve_window_steps < 1) throw ConfigError("curve_window_steps must be at least 1");
  if (action_grid < 2) throw ConfigError("action_grid must be at least 2");
}

std::size_t default_episodes(const std::string& env) {
  if (env == "cartpole-v0") return 2000;
  if (env == "pendulum-v0" || env == "acrobot-v1") return 3000;
  throw ConfigError("unknown environment '" + env + "'");
}

MovingStats moving_stats(const std::vector<double>& returns, std::size_t window) {
  if (window == 0) throw ContractViolation("window must be positive");
  if (returns.size() < window) {
    throw ContractViolation("need at least " + std::to_string(window) + " returns, got " +
                            std::to_string(returns.size()));
  }
  const double n = static_cast<double>(window);
  double sum = std::accumulate(returns.begin(), returns.begin() + window, 0.0);
  MovingStats s;
  s.best_window_mean = sum / n;
  for (std::size_t i = window; i < returns.size(); ++i) {
    sum += returns[i] - returns[i - window];
    if (sum / n > s.best_window_mean) {
      s.best_window_mean = sum / n;
      s.best_window_start = i + 1 - window;
    }
  }
  // recompute the final window directly so drift in the running sum does not leak in
  s.last_window_mean = std::accumulate(returns.end() - window, returns.end(), 0.0) / n;
  return s;
}

std::vector<std::size_t> phase_detect(const std::vector<double>& window_means,
                                      const PhaseDetectOptions& opts) {
  std::vector<std::size_t> jumps;
  if (window_means.size() < 10 || opts.smoothing_width == 0) return jumps;
  const auto [lo, hi] = std::minmax_element(window_means.begin(), window_means.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return jumps;
  std::vector<double> smooth(window_means.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < window_means.size(); ++i) {
    sum += window_means[i];
    if (i >= opts.smoothing_width) sum -= window_means[i - opts.smoothing_width];
    smooth[i] = sum / static_cast<double>(std::min(i + 1, opts.smoothing_width));
  }
  const double threshold = opts.jump_fraction * range;
  bool in_run = false;
  // compare across one smoothing width so a step of height h shows up as h,
  // not as h / width spread over several points
  for (std::size_t i = 1; i < smooth.size(); ++i) {
    const std::size_t back = std::min(i, opts.smoothing_width);
    const bool rising = smooth[i] - smooth[i - back] > threshold;
    if (rising && !in_run) jumps.push_back(i);
    in_run = rising;
  }
  return jumps;
}

std::uint64_t replica_seed(std::uint64_t seed, std::size_t replica) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(replica)));
}

RunRecord run_replica(const ExperimentConfig& cfg, std::size_t replica) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.replica = replica;
  rec.seed = replica_seed(cfg.seed(), replica);
  rec.out_dir = replica_dir(cfg, replica);
  rec.config_echo = to_key_values(cfg);

  auto env = make_environment(cfg.env, cfg.action_grid);
  const auto& spec = env->spec();
  std::mt19937_64 env_rng(splitmix64(rec.seed + 1));
  LearnerConfig lcfg = cfg.learner;
  lcfg.seed = splitmix64(rec.seed + 2);
  std::optional<ContinuousActions> grid;
  if (const auto* c = std::get_if<ContinuousActions>(&spec.actions)) grid = *c;
  Learner learner(spec.obs_dim, spec.action_count(), lcfg, grid);

  std::unique_ptr<TraceWriter> trace;
  if (!rec.out_dir.empty()) {
    std::filesystem::create_directories(rec.out_dir);
    if (cfg.write_trace) trace = std::make_unique<TraceWriter>(rec.out_dir / "trace.csv");
  }

  double curve_sum = 0.0;
  std::size_t curve_count = 0;
  std::int64_t step = 0;
  double window_sum = 0.0;

  for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
    std::vector<double> obs = env->reset(env_rng);
    double reward = 0.0;
    double ret = 0.0;
    while (true) {
      const auto d = learner.step(obs, reward, StepStatus::Running);
      const auto res = env->step(d->action, d->command);
      if (trace) {
        TraceRow row;
        row.step = step;
        row.episode = ep;
        row.entry = d->selection.matched;
        row.path = d->selection.path.node_ids();
        row.action = d->action;
        row.greedy_action = d->greedy_action;
        row.exploratory = d->exploratory;
        row.command = d->command;
        row.hop_distances = d->selection.hop_distances;
        row.reward = res.reward;
        row.observation = obs;
        const auto w = learner.effective_attention();
        row.attention.assign(w.values().begin(), w.values().end());
        trace->write(row);
      }
      ret += res.reward;
      curve_sum += res.reward;
      if (++curve_count == cfg.curve_window_steps) {
        rec.curve.push_back(CurvePoint{
            step + 1 - static_cast<std::int64_t>(cfg.curve_window_steps),
            curve_sum / static_cast<double>(cfg.curve_window_steps)});
        curve_sum = 0.0;
        curve_count = 0;
      }
      ++step;
      obs = res.observation;
      reward = res.reward;
      if (res.done) {
        learner.step(obs, reward, res.truncated ? StepStatus::Truncated : StepStatus::Terminated);
        break;
      }
    }
    rec.returns.push_back(ret);
    window_sum += ret;
    if (rec.returns.size() > cfg.eval_window) {
      window_sum -= rec.returns[rec.returns.size() - 1 - cfg.eval_window];
    }
    if (cfg.stop_at_return && rec.returns.size() >= cfg.eval_window &&
        window_sum / static_cast<double>(cfg.eval_window) >= *cfg.stop_at_return) {
      rec.stopped_early = rec.returns.size() < cfg.episodes;
      break;
    }
  }
  if (trace) trace->close();

  rec.steps = step;
  if (rec.returns.size() >= cfg.eval_window) rec.stats = moving_stats(rec.returns, cfg.eval_window);
  std::vector<double> means;
  for (const auto& c : rec.curve) means.push_back(c.mean_reward);
  rec.phase_jumps = phase_detect(means);
  rec.pool = std::make_shared<const OptionPool>(learner.pool());
  const auto w = learner.effective_attention();
  rec.attention.assign(w.values().begin(), w.values().end());
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!rec.out_dir.empty()) write_replica_files(cfg, rec);
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.config = cfg;
  result.replicas.resize(cfg.replicas);

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(cfg.replicas, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto work = [&] {
    for (std::size_t r = next++; r < cfg.replicas; r = next++) {
      try {
        result.replicas[r] = run_replica(cfg, r);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!cfg.out_dir.empty() && cfg.replicas > 1) {
    auto j = manifest_header(cfg);
    j["replicas"] = nlohmann::ordered_json::array();
    for (const auto& rec : result.replicas) {
      auto r = stats_json(rec);
      r["replica"] = rec.replica;
      r["replica_seed"] = rec.seed;
      r["dir"] = rec.out_dir.filename().string();
      j["replicas"].push_back(r);
    }
    j["finished_at"] = utc_now();
    j["wall_seconds"] = result.wall_seconds;
    const auto p = cfg.out_dir / "manifest.json";
    auto out = open_out(p);
    out << j.dump(2) << '\n';
    finish(out, p);
  }
  return result;
}

std::vector<double> evaluate_pool(const OptionPool& pool, const AttentionWeights& w,
                                  const EvalConfig& cfg) {
  auto env = make_environment(cfg.env, cfg.action_grid);
  const auto& spec = env->spec();
  if (spec.obs_dim != pool.obs_dim() || spec.action_count() != pool.action_count()) {
    throw ConfigError("pool shape (" + std::to_string(pool.obs_dim()) + " dims, " +
                      std::to_string(pool.action_count()) + " actions) does not fit " + cfg.env);
  }
  InferenceConfig icfg;
  icfg.action_value = cfg.action_value;
  icfg.max_depth = cfg.max_depth;
  std::mt19937_64 rng(splitmix64(cfg.seed + 1));
  const auto* grid = std::get_if<ContinuousActions>(&spec.actions);
  std::vector<double> returns;
  for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
    auto obs = env->reset(rng);
    double ret = 0.0;
    while (true) {
      const auto sel = select_action(pool, obs, w, icfg);
      const std::size_t a = sel.path.action_index;
      const double command = grid ? discretize_action(a, *grid) : static_cast<double>(a);
      const auto res = env->step(a, command);
      ret += res.reward;
      obs = res.observation;
      if (res.done) break;
    }
    returns.push_back(ret);
  }
  return returns;
}

const char* version_string() { return kVersion; }

std::string version_hash() {
  const std::string body = kVersion;
  const std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return os.str();
}

}  // namespace ao2
