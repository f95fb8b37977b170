#pragma once

// Monte Carlo engine. A trial draws the environment (features, truth) from
// counter-derived substreams, runs one agent for T periods and records the
// instantaneous regret against the best available action under the truth.
// Trial results are reduced in trial-index order, so thread count never
// changes a number.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "banditlab/agents.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/model.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

// ---------------------------------------------------------------------------
// Work distribution

/// Worker count: explicit request, else BANDITLAB_THREADS, else the hardware count.
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BANDITLAB_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw ConfigError("BANDITLAB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n). Work items must write only to their own
/// slot; the first failing index (lowest) is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (n == 0) return;
  threads = std::min(std::max<std::size_t>(threads, 1), n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Statistics

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and standard error (n - 1 denominator; 0 for a single value).
inline MeanSe mean_se(std::span<const double> xs) {
  MeanSe out;
  if (xs.empty()) return out;
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Environment specification

/// Random linear features, uniform per coordinate on [low, high].
struct FeatureSpec {
  std::size_t num_actions = 100;
  Eigen::Index dim = 10;
  double low = -1.0;
  double high = 1.0;
  bool redrawn = true;  // false: one feature matrix shared by every trial

  void validate() const {
    if (num_actions < 1 || dim < 1) throw ConfigError("feature generator needs num_actions >= 1 and dim >= 1");
    if (!(low < high) || !std::isfinite(low) || !std::isfinite(high))
      throw ConfigError("feature generator needs finite low < high");
  }
};

struct ModelSpec {
  Model base;
  std::optional<FeatureSpec> features;  // replaces base's features (linear base only)
  NoiseSpec noise = NoiseSpec::gaussian(1.0);
  ActionSetProcess action_sets;

  void validate() const {
    if (features) {
      features->validate();
      const auto* lin = std::get_if<LinearGaussianModel>(&base);
      if (lin == nullptr) throw ConfigError("a feature generator needs a linear-Gaussian model");
      if (lin->prior_mean.size() != features->dim)
        throw ConfigError("feature dimension does not match the prior dimension");
    }
    instantiate(0, 0).validate();
  }

  /// The environment of one trial.
  Environment instantiate(std::uint64_t master_seed, std::size_t trial) const {
    Environment env{base, noise, action_sets};
    if (features) {
      auto& lin = std::get<LinearGaussianModel>(env.model);
      const std::uint64_t seed = features->redrawn ? derive_seed(master_seed, {stream::kFeatures, trial})
                                                   : derive_seed(master_seed, {stream::kFixedFeatures});
      Rng rng(seed);
      lin.features.resize(static_cast<Eigen::Index>(features->num_actions), features->dim);
      for (Eigen::Index a = 0; a < lin.features.rows(); ++a)
        for (Eigen::Index j = 0; j < lin.features.cols(); ++j)
          lin.features(a, j) = rng.uniform(features->low, features->high);
    }
    return env;
  }
};

// ---------------------------------------------------------------------------
// Trials

struct TrialTrace {
  std::vector<ActionId> actions;
  std::vector<double> rewards;
  std::vector<double> inst_regret;

  double cumulative_regret() const {
    double total = 0.0;
    for (double r : inst_regret) total += r;
    return total;
  }
};

/// Per-trial random streams. Agents share truth, action-set and noise streams
/// (common random numbers); noise is indexed by period, not by action.
struct TrialStreams {
  Rng truth;
  Rng action_sets;
  Rng noise;
  Rng agent;

  TrialStreams(std::uint64_t master_seed, std::size_t trial)
      : truth(derive_seed(master_seed, {stream::kTruth, trial})),
        action_sets(derive_seed(master_seed, {stream::kActionSets, trial})),
        noise(derive_seed(master_seed, {stream::kNoise, trial})),
        agent(derive_seed(master_seed, {stream::kAgent, trial})) {}
};

struct StepInfo {
  std::size_t t;  // 1-based period
  const ActionSet& available;
  ActionId action;
  ActionId optimal;  // best available action under the truth (lowest id on ties)
  double reward;
  double inst_regret;
};

inline ActionId best_available(const Truth& truth, const ActionSet& available) {
  return detail::argmax_lowest(available, [&](ActionId a) { return truth.mean(a); });
}

/// Runs one episode. `hook(const StepInfo&)` sees each period after the
/// reward is drawn and before the agent observes it.
template <class Hook>
TrialTrace run_episode(const Environment& env, const Truth& truth, Agent& agent, std::size_t horizon,
                       TrialStreams& streams, Hook&& hook) {
  TrialTrace trace;
  trace.actions.reserve(horizon);
  trace.rewards.reserve(horizon);
  trace.inst_regret.reserve(horizon);
  const std::size_t n = env.num_actions();
  for (std::size_t t = 1; t <= horizon; ++t) {
    const ActionSet available = env.action_sets.draw(n, streams.action_sets);
    const ActionId action = agent.select(available, streams.agent);
    if (std::find(available.begin(), available.end(), action) == available.end())
      throw ContractViolation("agent selected an unavailable action");
    const ActionId optimal = best_available(truth, available);
    const double reward = step(env, truth, action, streams.noise);
    const double regret = truth.mean(optimal) - truth.mean(action);
    trace.actions.push_back(action);
    trace.rewards.push_back(reward);
    trace.inst_regret.push_back(regret);
    hook(StepInfo{t, available, action, optimal, reward, regret});
    agent.observe(action, reward);
  }
  return trace;
}

inline TrialTrace run_episode(const Environment& env, const Truth& truth, Agent& agent, std::size_t horizon,
                              TrialStreams& streams) {
  return run_episode(env, truth, agent, horizon, streams, [](const StepInfo&) {});
}

inline AgentContext make_context(const Environment& env, const Truth& truth, const AgentConfig& config) {
  AgentContext ctx;
  ctx.model = &env.model;
  ctx.noise = env.noise;
  if (!config.norm_bound && truth.theta.size() > 0) ctx.realized_norm = truth.theta.norm();
  if (config.kind == AgentKind::kOracle) ctx.oracle_truth = &truth;
  return ctx;
}

/// One full trial: instantiate the environment, draw the truth, run the agent.
inline TrialTrace run_trial(const ModelSpec& spec, const AgentConfig& config, std::size_t horizon,
                            std::uint64_t master_seed, std::size_t trial) {
  const Environment env = spec.instantiate(master_seed, trial);
  TrialStreams streams(master_seed, trial);
  const Truth truth = sample_truth(env.model, streams.truth);
  auto agent = make_agent(config, make_context(env, truth, config));
  return run_episode(env, truth, *agent, horizon, streams);
}

// ---------------------------------------------------------------------------
// Bayesian regret

struct RegretSummary {
  std::string agent;
  AgentKind kind = AgentKind::kFinitePs;
  double mean_cum_regret = 0.0;
  double std_err = 0.0;
  std::size_t trials = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::vector<double> period_mean;  // mean instantaneous regret per period
  std::vector<double> period_se;
  std::vector<TrialTrace> traces;   // empty unless requested
  std::optional<double> tuned_beta;
  std::vector<std::pair<double, double>> tuning_table;  // (beta, mean regret on the tuning stream)
};

struct McOptions {
  std::size_t threads = 1;
  bool keep_traces = false;
};

inline RegretSummary bayes_regret_mc(const ModelSpec& spec, const AgentConfig& config, std::size_t horizon,
                                     std::size_t trials, std::uint64_t seed, const McOptions& opts = {}) {
  if (horizon < 1) throw ConfigError("horizon T must be >= 1");
  if (trials < 1) throw ConfigError("num_trials must be >= 1");
  config.validate();
  std::vector<TrialTrace> traces(trials);
  parallel_for(trials, opts.threads, [&](std::size_t i) { traces[i] = run_trial(spec, config, horizon, seed, i); });

  RegretSummary out;
  out.agent = config.label();
  out.kind = config.kind;
  out.trials = trials;
  out.horizon = horizon;
  out.seed = seed;
  std::vector<double> cum(trials);
  for (std::size_t i = 0; i < trials; ++i) cum[i] = traces[i].cumulative_regret();
  const MeanSe total = mean_se(cum);
  out.mean_cum_regret = total.mean;
  out.std_err = total.se;
  out.period_mean.assign(horizon, 0.0);
  out.period_se.assign(horizon, 0.0);
  std::vector<double> column(trials);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < trials; ++i) column[i] = traces[i].inst_regret[t];
    const MeanSe ms = mean_se(column);
    out.period_mean[t] = ms.mean;
    out.period_se[t] = ms.se;
  }
  if (opts.keep_traces) out.traces = std::move(traces);
  return out;
}

inline const std::vector<double>& default_beta_grid() {
  static const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  return grid;
}

struct TuningResult {
  double beta = 1.0;
  std::vector<std::pair<double, double>> table;
};

/// Picks the grid value with the lowest mean regret on the tuning stream
/// (first grid entry on ties). The stream is disjoint from evaluation trials.
inline TuningResult tune_beta(const ModelSpec& spec, AgentConfig config, const std::vector<double>& grid,
                              std::size_t horizon, std::size_t trials, std::uint64_t seed, std::size_t threads) {
  if (grid.empty()) throw ConfigError("beta grid is empty");
  const std::uint64_t tuning_seed = derive_seed(seed, {stream::kTuning});
  TuningResult out;
  double best = std::numeric_limits<double>::infinity();
  for (double beta : grid) {
    config.beta = beta;
    const RegretSummary s = bayes_regret_mc(spec, config, horizon, trials, tuning_seed, {threads, false});
    out.table.emplace_back(beta, s.mean_cum_regret);
    if (s.mean_cum_regret < best) {
      best = s.mean_cum_regret;
      out.beta = beta;
    }
  }
  return out;
}

struct ExperimentConfig {
  ModelSpec model;
  std::vector<AgentConfig> agents;
  std::size_t horizon = 100;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 0;          // 0: resolve_threads default
  std::size_t tuning_trials = 200;  // per grid value, for TUNED_GAUSS_UCB with a grid
  bool keep_traces = true;

  void validate() const {
    if (horizon < 1) throw ConfigError("run.T must be >= 1");
    if (trials < 1) throw ConfigError("run.trials must be >= 1");
    if (agents.empty()) throw ConfigError("agents list is empty");
    model.validate();
    for (const auto& a : agents) a.validate();
  }
};

inline std::vector<RegretSummary> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t threads = resolve_threads(cfg.threads);
  std::vector<RegretSummary> out;
  for (AgentConfig agent : cfg.agents) {
    std::optional<TuningResult> tuning;
    if (agent.kind == AgentKind::kTunedGaussUcb && !agent.beta_grid.empty()) {
      const std::size_t n = agent.tuning_trials > 0 ? agent.tuning_trials : cfg.tuning_trials;
      tuning = tune_beta(cfg.model, agent, agent.beta_grid, cfg.horizon, n, cfg.seed, threads);
      agent.beta = tuning->beta;
    }
    RegretSummary s = bayes_regret_mc(cfg.model, agent, cfg.horizon, cfg.trials, cfg.seed, {threads, cfg.keep_traces});
    if (tuning) {
      s.tuned_beta = tuning->beta;
      s.tuning_table = tuning->table;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace banditlab
