#include "ao2/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ao2/environments.hpp"
#include "ao2/errors.hpp"

namespace ao2 {

TraceBuffer::TraceBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractViolation("trace length must be positive");
}

void TraceBuffer::push(DecisionPath path, double reward) {
  entries_.push_front(TraceEntry{std::move(path), reward});
  while (entries_.size() > capacity_) entries_.pop_back();
}

void apply_rewards(const TraceBuffer& buffer, OptionPool& pool, double gamma) {
  if (buffer.empty()) return;
  const double r = buffer.newest().reward;
  double c = 1.0;
  for (std::size_t age = 0; age < buffer.size(); ++age) {
    for (const auto& step : buffer.at(age).path.steps) {
      if (!pool.contains(step.node)) continue;
      if (Edge* e = pool.node(step.node).find_edge(step.child)) e->weight += c * r;
    }
    c *= gamma;
  }
}

void LearningConfig::validate() const {
  if (trace_length == 0) throw ConfigError("trace_length must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (!(accommodation_threshold > 0.0 && accommodation_threshold < 1.0)) {
    throw ConfigError("accommodation_threshold must be in (0, 1)");
  }
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (reward_ma_window == 0) throw ConfigError("reward_ma_window must be positive");
}

std::optional<NodeId> accommodate(OptionPool& pool, NodeId selected_id,
                                  std::span<const double> observation, const AttentionWeights& w,
                                  double threshold, std::int64_t step) {
  const auto& selected = pool.node(selected_id);
  if (selected.is_leaf()) throw ContractViolation("cannot accommodate under an action leaf");
  if (similarity_score(observation, selected, w) > threshold) return std::nullopt;
  for (const auto& e : selected.children) {
    const auto& c = pool.node(e.child);
    if (c.is_leaf()) continue;
    if (similarity_score(observation, c, w) > threshold) return std::nullopt;
  }
  const NodeId id = pool.add_interior(observation, step);
  pool.add_edge(selected_id, id, 0.0);
  return id;
}

AttentionWeights update_attention(const AttentionWeights& w, std::span<const double> observation,
                                  std::span<const double> node_value, double beta,
                                  bool reward_trend_up) {
  if (observation.size() != w.size() || node_value.size() != w.size()) {
    throw ContractViolation("attention update dimension mismatch");
  }
  const double sign = reward_trend_up ? 1.0 : -1.0;
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = std::max(kAttentionFloor, w[i] + sign * beta * (observation[i] - node_value[i]));
  }
  return AttentionWeights(std::move(out));
}

void LearnerConfig::validate() const {
  learning.validate();
  inference.validate();
  if (baseline_rate <= 0.0 || baseline_rate > 1.0) {
    throw ConfigError("baseline_rate must be in (0, 1]");
  }
}

namespace {

std::vector<double> ones_if_empty(const std::vector<double>& v, std::size_t dim,
                                  const char* what) {
  if (v.empty()) return std::vector<double>(dim, 1.0);
  if (v.size() != dim) {
    throw ConfigError(std::string(what) + " has " + std::to_string(v.size()) +
                      " entries, environment observation has " + std::to_string(dim));
  }
  return v;
}

LearnerConfig validated(LearnerConfig cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Learner::Learner(std::size_t obs_dim, std::size_t action_count, LearnerConfig cfg,
                 std::optional<ContinuousActions> grid)
    : cfg_(validated(std::move(cfg))),
      pool_(obs_dim, action_count),
      trace_(cfg_.learning.trace_length),
      attention_(ones_if_empty(cfg_.attention, obs_dim, "attention")),
      obs_scale_(ones_if_empty(cfg_.obs_scale, obs_dim, "obs_scale")),
      grid_(grid),
      rng_(cfg_.seed) {
  for (double s : obs_scale_) {
    if (!(s > 0.0)) throw ConfigError("obs_scale entries must be positive");
  }
  if (grid_ && grid_->count != action_count) {
    throw ConfigError("command grid size does not match the action count");
  }
}

AttentionWeights Learner::effective_attention() const {
  std::vector<double> w(attention_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = attention_[i] * obs_scale_[i];
  return AttentionWeights(std::move(w));
}

bool Learner::reward_trend_up(double reward) {
  recent_rewards_.push_back(reward);
  while (recent_rewards_.size() > cfg_.learning.reward_ma_window) recent_rewards_.pop_front();
  const double ma = std::accumulate(recent_rewards_.begin(), recent_rewards_.end(), 0.0) /
                    static_cast<double>(recent_rewards_.size());
  const bool up = !have_ma_ || ma >= last_ma_;
  last_ma_ = ma;
  have_ma_ = true;
  return up;
}

void Learner::credit(double reward) {
  if (!baseline_set_) {
    baseline_ = reward;
    baseline_set_ = true;
  } else {
    baseline_ += cfg_.baseline_rate * (reward - baseline_);
  }
  const double r = cfg_.reward_centering ? reward - baseline_ : reward;
  trace_.newest().reward = r;
  apply_rewards(trace_, pool_, cfg_.learning.gamma);
}

// Paths still in the window when an episode ends miss their remaining
// credits. After a terminal state each missing step is worth 0, i.e.
// -baseline once rewards are centred. After a time-limit cut the episode would
// have gone on, so each missing step is credited the average reward.
void Learner::flush(double reward) {
  for (std::size_t k = 1; k < trace_.capacity(); ++k) {
    trace_.push(DecisionPath{}, reward);
    apply_rewards(trace_, pool_, cfg_.learning.gamma);
  }
}

void Learner::cleanse() {
  const auto w = effective_attention();
  const std::size_t k = pool_.action_count();
  for (std::size_t id = k; id < pool_.size(); ++id) {
    prune_children(pool_, static_cast<NodeId>(id), cfg_.max_children, w);
    if (cfg_.keep_top_actions > 0 && cfg_.keep_top_actions < k) {
      prune_actions(pool_, static_cast<NodeId>(id), cfg_.keep_top_actions);
    }
  }
}

std::optional<Decision> Learner::step(std::span<const double> observation, double reward,
                                      StepStatus status) {
  if (observation.size() != pool_.obs_dim()) {
    throw ContractViolation("observation dimension " + std::to_string(observation.size()) +
                            " does not match pool dimension " +
                            std::to_string(pool_.obs_dim()));
  }
  bool trend_up = true;
  if (pending_) {
    credit(reward);
    if (cfg_.adapt_attention) trend_up = reward_trend_up(reward);
    pending_ = false;
  }
  if (status != StepStatus::Running) {
    if (status == StepStatus::Terminated && cfg_.reward_centering && baseline_set_) {
      flush(-baseline_);
    } else if (status == StepStatus::Truncated && cfg_.bootstrap_truncation &&
               !cfg_.reward_centering && baseline_set_) {
      flush(baseline_);
    }
    trace_.clear();
    last_command_ = 0.0;
    return std::nullopt;
  }

  const auto w = effective_attention();
  Decision d;
  d.step = step_count_;
  if (pool_.interior_count() == 0) {
    d.created = pool_.add_interior(observation, step_count_);
  } else {
    const NodeId f = find_most_similar(pool_, observation, w);
    d.created = accommodate(pool_, f, observation, w, cfg_.learning.accommodation_threshold,
                            step_count_);
  }

  d.selection = select_action(pool_, observation, w, cfg_.inference);
  d.greedy_action = d.selection.path.action_index;
  d.action = d.greedy_action;

  if (cfg_.inference.epsilon > 0.0) {
    auto& last = d.selection.path.steps.back();
    const auto& owner = pool_.node(last.node);
    std::vector<std::size_t> available;
    for (const auto& e : owner.children) {
      const auto& c = pool_.node(e.child);
      if (c.is_leaf()) available.push_back(c.action_index);
    }
    d.action = epsilon_greedy(d.greedy_action, available, cfg_.inference.epsilon, rng_);
    if (d.action != d.greedy_action) {
      d.exploratory = true;
      const NodeId leaf = pool_.leaf_id(d.action);
      for (std::size_t i = 0; i < owner.children.size(); ++i) {
        if (owner.children[i].child == leaf) {
          last.edge = i;
          last.child = leaf;
        }
      }
      d.selection.path.action_index = d.action;
    }
  }

  if (grid_) {
    const double chosen = discretize_action(d.action, *grid_);
    d.command = smooth_action(chosen, last_command_, cfg_.inference.alpha);
  } else {
    d.command = static_cast<double>(d.action);
  }
  last_command_ = d.command;

  for (const auto& s : d.selection.path.steps) {
    if (Edge* e = pool_.node(s.node).find_edge(s.child)) ++e->visits;
  }
  trace_.push(d.selection.path, 0.0);
  pending_ = true;

  if (cfg_.adapt_attention) {
    attention_ = update_attention(attention_, observation,
                                  pool_.node(d.selection.selected).value,
                                  cfg_.learning.beta, trend_up);
  }

  ++step_count_;
  if (cfg_.prune_every > 0 && step_count_ % static_cast<std::int64_t>(cfg_.prune_every) == 0) {
    cleanse();
  }
  return d;
}

}  // namespace ao2
