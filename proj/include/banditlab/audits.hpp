#pragma once

// Monte Carlo and per-trial audits of the regret decomposition, confidence
// coverage, width counts, the Gaussian tail term and the regret bounds.
// Every audit returns a record of named checks with the statistic, the
// threshold it was compared against, and the outcome.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "banditlab/agents.hpp"
#include "banditlab/arm_statistics.hpp"
#include "banditlab/bounds.hpp"
#include "banditlab/complexity.hpp"
#include "banditlab/confidence.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/model.hpp"
#include "banditlab/posterior.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

struct AuditCheck {
  std::string name;
  double statistic = 0.0;
  std::string relation;  // "<=" or ">="
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct AuditRecord {
  std::string audit;
  bool passed = true;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<AuditCheck> checks;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();

  void check_le(const std::string& name, double statistic, double threshold, std::string detail = {}) {
    add(name, statistic, "<=", threshold, statistic <= threshold, std::move(detail));
  }
  void check_ge(const std::string& name, double statistic, double threshold, std::string detail = {}) {
    add(name, statistic, ">=", threshold, statistic >= threshold, std::move(detail));
  }

 private:
  void add(const std::string& name, double statistic, const char* relation, double threshold, bool ok,
           std::string detail) {
    checks.push_back({name, statistic, relation, threshold, ok, std::move(detail)});
    passed = passed && ok;
  }
};

inline nlohmann::ordered_json to_json(const AuditRecord& rec) {
  nlohmann::ordered_json j;
  j["audit"] = rec.audit;
  j["passed"] = rec.passed;
  j["parameters"] = rec.parameters;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : rec.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["statistic"] = c.statistic;
    cj["relation"] = c.relation;
    cj["threshold"] = c.threshold;
    cj["passed"] = c.passed;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(std::move(cj));
  }
  j["data"] = rec.data;
  return j;
}

namespace detail {

/// Stable per-audit master seeds, so audits never share streams.
enum class AuditStream : std::uint64_t {
  kDecomposition = 1,
  kCoverageArm,
  kCoverageLs,
  kWidthCount,
  kGpTail,
  kBounds,
  kClassDraw = 100,
};

inline std::uint64_t audit_seed(std::uint64_t seed, AuditStream which) {
  return derive_seed(seed, {stream::kAudit, static_cast<std::uint64_t>(which)});
}

inline FiniteFunctionClass audit_class(const std::optional<FiniteFunctionClass>& given, std::size_t params,
                                       std::size_t actions, std::uint64_t seed, std::uint64_t index) {
  if (given) return *given;
  Rng rng(derive_seed(audit_seed(seed, AuditStream::kClassDraw), {index}));
  return make_random_class(params, actions, 0.0, 1.0, rng);
}

inline AgentConfig finite_ps_config(std::size_t horizon) {
  AgentConfig c;
  c.kind = AgentKind::kFinitePs;
  c.horizon = horizon;
  return c;
}

inline double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

inline nlohmann::ordered_json noise_json(const NoiseSpec& noise) {
  nlohmann::ordered_json j;
  switch (noise.kind) {
    case NoiseSpec::Kind::kNone: j["kind"] = "none"; break;
    case NoiseSpec::Kind::kGaussian: j["kind"] = "gaussian"; j["std"] = noise.scale; break;
    case NoiseSpec::Kind::kUniform: j["kind"] = "uniform"; j["half_width"] = noise.scale; break;
    case NoiseSpec::Kind::kBernoulli: j["kind"] = "bernoulli"; break;
  }
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Regret decomposition: BayesRegret = E sum[U(A) - f(A)] + E sum[f(A*) - U(A*)]
// for posterior sampling and any history-measurable U.

struct DecompositionParams {
  std::size_t num_arms = 5;
  std::size_t num_params = 16;
  std::size_t horizon = 50;
  std::size_t trials = 10000;
  double constant = 0.5;
  double tolerance_se = 3.0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<FiniteFunctionClass> function_class;
  NoiseSpec noise = NoiseSpec::bernoulli();
};

inline constexpr const char* kDecompositionGenerators[] = {"zero", "constant", "arm_band", "random_history"};

inline AuditRecord decomposition_audit(const DecompositionParams& p) {
  const FiniteFunctionClass fc = detail::audit_class(p.function_class, p.num_params, p.num_arms, p.seed, 0);
  const Environment env{fc, p.noise, {}};
  env.validate();
  const std::uint64_t master = detail::audit_seed(p.seed, detail::AuditStream::kDecomposition);
  const std::uint64_t u_seed = derive_seed(master, {0xD0});
  constexpr std::size_t kGen = 4;
  struct TrialResult {
    double lhs = 0.0;
    std::array<double, kGen> rhs{};
  };
  std::vector<TrialResult> results(p.trials);
  const AgentConfig agent_cfg = detail::finite_ps_config(p.horizon);

  parallel_for(p.trials, p.threads, [&](std::size_t i) {
    TrialStreams streams(master, i);
    const Truth truth = sample_truth(env.model, streams.truth);
    auto agent = make_agent(agent_cfg, make_context(env, truth, agent_cfg));
    ArmStatistics stats(fc.num_actions());
    std::uint64_t history_hash = u_seed;
    TrialResult r;
    run_episode(env, truth, *agent, p.horizon, streams, [&](const StepInfo& s) {
      const double fa = truth.mean(s.action);
      const double fstar = truth.mean(s.optimal);
      r.lhs += fstar - fa;
      const ArmConfidenceBand band = arm_band(stats, p.horizon);
      auto random_u = [&](ActionId a) {
        return static_cast<double>(splitmix64(history_hash ^ (a + 1)) >> 11) * 0x1.0p-53;
      };
      const std::array<double, kGen> u_a{0.0, p.constant, band.upper[s.action], random_u(s.action)};
      const std::array<double, kGen> u_star{0.0, p.constant, band.upper[s.optimal], random_u(s.optimal)};
      for (std::size_t g = 0; g < kGen; ++g) r.rhs[g] += (u_a[g] - fa) + (fstar - u_star[g]);
      stats.record(s.action, s.reward);
      std::uint64_t reward_bits = 0;
      std::memcpy(&reward_bits, &s.reward, sizeof reward_bits);
      history_hash = splitmix64(history_hash ^ splitmix64(s.action * 0x9E3779B97F4A7C15ULL ^ reward_bits));
    });
    results[i] = r;
  });

  AuditRecord rec;
  rec.audit = "decomposition";
  rec.parameters = {{"num_arms", fc.num_actions()}, {"num_params", fc.num_params()}, {"T", p.horizon},
                    {"trials", p.trials}, {"constant", p.constant}, {"tolerance_se", p.tolerance_se},
                    {"seed", p.seed}, {"noise", detail::noise_json(p.noise)}};
  std::vector<double> lhs(p.trials), rhs(p.trials), diff(p.trials);
  for (std::size_t i = 0; i < p.trials; ++i) lhs[i] = results[i].lhs;
  const MeanSe lhs_ms = mean_se(lhs);
  rec.data["lhs_mean"] = lhs_ms.mean;
  rec.data["lhs_se"] = lhs_ms.se;
  for (std::size_t g = 0; g < kGen; ++g) {
    double max_abs = 0.0;
    for (std::size_t i = 0; i < p.trials; ++i) {
      rhs[i] = results[i].rhs[g];
      diff[i] = lhs[i] - rhs[i];
      max_abs = std::max(max_abs, std::abs(diff[i]));
    }
    const MeanSe rhs_ms = mean_se(rhs);
    const MeanSe d = mean_se(diff);
    const std::string name = kDecompositionGenerators[g];
    rec.data[name] = {{"rhs_mean", rhs_ms.mean},
                      {"rhs_se", rhs_ms.se},
                      {"mean_difference", d.mean},
                      {"difference_se", d.se},
                      {"pooled_se", std::sqrt(lhs_ms.se * lhs_ms.se + rhs_ms.se * rhs_ms.se)},
                      {"max_abs_trial_difference", max_abs}};
    if (g < 2) {
      // U does not depend on the action: the two sides cancel term by term.
      rec.check_le(name + ": max per-trial |LHS - RHS|", max_abs, 1e-12);
    } else {
      const double tol = std::max(p.tolerance_se * d.se, 1e-12);
      rec.check_le(name + ": |mean(LHS - RHS)|", std::abs(d.mean), tol,
                   "tolerance = " + std::to_string(p.tolerance_se) + " standard errors of the paired difference");
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Per-arm band coverage: P(f(a) leaves [L_t(a), U_t(a)] for some t, a) <= 1/T.

struct CoverageArmParams {
  std::size_t num_arms = 5;
  std::size_t num_params = 16;
  std::size_t horizon = 10;
  std::size_t trials = 100000;
  double tolerance_se = 3.0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<FiniteFunctionClass> function_class;
  NoiseSpec noise = NoiseSpec::bernoulli();
};

inline AuditRecord coverage_arm_audit(const CoverageArmParams& p) {
  const FiniteFunctionClass fc = detail::audit_class(p.function_class, p.num_params, p.num_arms, p.seed, 1);
  const Environment env{fc, p.noise, {}};
  env.validate();
  const std::uint64_t master = detail::audit_seed(p.seed, detail::AuditStream::kCoverageArm);
  const AgentConfig agent_cfg = detail::finite_ps_config(p.horizon);
  std::vector<std::uint8_t> violated(p.trials, 0);
  parallel_for(p.trials, p.threads, [&](std::size_t i) {
    TrialStreams streams(master, i);
    const Truth truth = sample_truth(env.model, streams.truth);
    auto agent = make_agent(agent_cfg, make_context(env, truth, agent_cfg));
    ArmStatistics stats(fc.num_actions());
    bool bad = false;
    run_episode(env, truth, *agent, p.horizon, streams, [&](const StepInfo& s) {
      const ArmConfidenceBand band = arm_band(stats, p.horizon);
      for (ActionId a = 0; a < fc.num_actions(); ++a)
        if (!band.contains(a, truth.mean(a))) bad = true;
      stats.record(s.action, s.reward);
    });
    violated[i] = bad ? 1 : 0;
  });
  std::size_t count = 0;
  for (auto v : violated) count += v;
  const double freq = static_cast<double>(count) / static_cast<double>(p.trials);
  const double p0 = 1.0 / static_cast<double>(p.horizon);
  AuditRecord rec;
  rec.audit = "coverage_arm";
  rec.parameters = {{"num_arms", fc.num_actions()}, {"num_params", fc.num_params()}, {"T", p.horizon},
                    {"trials", p.trials}, {"tolerance_se", p.tolerance_se}, {"seed", p.seed},
                    {"noise", detail::noise_json(p.noise)}};
  rec.data = {{"violations", count}, {"frequency", freq}};
  rec.check_le("band violation frequency", freq, p0 + p.tolerance_se * detail::binomial_se(p0, p.trials),
               "threshold = 1/T + tolerance_se binomial standard errors at p = 1/T");
  return rec;
}

// ---------------------------------------------------------------------------
// Least-squares set coverage: P(f_theta in every F_t) >= 1 - 2 delta.

struct CoverageLsParams {
  std::size_t num_arms = 5;
  std::size_t num_params = 16;
  std::size_t horizon = 50;
  std::size_t trials = 10000;
  double delta = 0.05;
  double tolerance_se = 3.0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<FiniteFunctionClass> function_class;
  NoiseSpec noise = NoiseSpec::gaussian(0.5);
};

inline AuditRecord coverage_ls_audit(const CoverageLsParams& p) {
  if (!(p.delta > 0.0) || p.delta >= 0.5) throw ConfigError("coverage_ls delta must lie in (0, 0.5)");
  const FiniteFunctionClass fc = detail::audit_class(p.function_class, p.num_params, p.num_arms, p.seed, 2);
  const Environment env{fc, p.noise, {}};
  env.validate();
  const double beta = beta_star_finite(fc.num_params(), p.delta, p.noise.sub_gaussian());
  const std::uint64_t master = detail::audit_seed(p.seed, detail::AuditStream::kCoverageLs);
  const AgentConfig agent_cfg = detail::finite_ps_config(p.horizon);
  std::vector<std::uint8_t> covered(p.trials, 0);
  std::vector<std::uint32_t> mean_size(p.trials, 0);
  parallel_for(p.trials, p.threads, [&](std::size_t i) {
    TrialStreams streams(master, i);
    const Truth truth = sample_truth(env.model, streams.truth);
    auto agent = make_agent(agent_cfg, make_context(env, truth, agent_cfg));
    LeastSquaresTracker tracker(fc);
    bool inside = true;
    const ParamId theta = *truth.param;
    run_episode(env, truth, *agent, p.horizon, streams, [&](const StepInfo& s) {
      if (!tracker.is_member(theta, beta)) inside = false;
      tracker.observe(s.action, s.reward);
    });
    std::uint32_t size = 0;
    for (ParamId rho = 0; rho < fc.num_params(); ++rho) size += tracker.is_member(rho, beta) ? 1U : 0U;
    mean_size[i] = size;
    covered[i] = inside ? 1 : 0;
  });
  std::size_t count = 0;
  double size_sum = 0.0;
  for (std::size_t i = 0; i < p.trials; ++i) {
    count += covered[i];
    size_sum += mean_size[i];
  }
  const double freq = static_cast<double>(count) / static_cast<double>(p.trials);
  const double p0 = 1.0 - 2.0 * p.delta;
  AuditRecord rec;
  rec.audit = "coverage_ls";
  rec.parameters = {{"num_arms", fc.num_actions()}, {"num_params", fc.num_params()}, {"T", p.horizon},
                    {"trials", p.trials}, {"delta", p.delta}, {"tolerance_se", p.tolerance_se},
                    {"seed", p.seed}, {"noise", detail::noise_json(p.noise)}};
  rec.data = {{"beta", beta}, {"covered", count}, {"frequency", freq},
              {"mean_final_set_size", size_sum / static_cast<double>(p.trials)}};
  rec.check_ge("coverage frequency", freq, p0 - p.tolerance_se * detail::binomial_se(p0, p.trials),
               "threshold = 1 - 2 delta - tolerance_se binomial standard errors");
  return rec;
}

// ---------------------------------------------------------------------------
// Width counts: sum_t 1(w_{F_t}(A_t) > eps) <= (4 beta_T / eps^2 + 1) dim_E(F, eps)
// in every trial.

struct WidthCountParams {
  std::vector<std::pair<std::string, FiniteFunctionClass>> classes;  // empty: built-in set
  std::vector<double> eps_grid{0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};
  std::size_t horizon = 100;
  std::size_t trials = 1000;
  double delta = 0.05;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  NoiseSpec noise = NoiseSpec::gaussian(0.1);
};

inline std::vector<std::pair<std::string, FiniteFunctionClass>> default_width_classes(std::uint64_t seed) {
  std::vector<std::pair<std::string, FiniteFunctionClass>> out;
  out.emplace_back("indicator_5", make_indicator_class(5));
  out.emplace_back("random_6x6_a", detail::audit_class(std::nullopt, 6, 6, seed, 3));
  out.emplace_back("random_6x6_b", detail::audit_class(std::nullopt, 6, 6, seed, 4));
  return out;
}

inline AuditRecord width_count_audit(const WidthCountParams& p) {
  const auto classes = p.classes.empty() ? default_width_classes(p.seed) : p.classes;
  AuditRecord rec;
  rec.audit = "width_count";
  rec.parameters = {{"T", p.horizon}, {"trials", p.trials}, {"delta", p.delta}, {"eps_grid", p.eps_grid},
                    {"seed", p.seed}, {"noise", detail::noise_json(p.noise)}};
  const std::uint64_t master = detail::audit_seed(p.seed, detail::AuditStream::kWidthCount);
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& [label, fc] = classes[ci];
    const Environment env{fc, p.noise, {}};
    env.validate();
    const double beta = beta_star_finite(fc.num_params(), p.delta, p.noise.sub_gaussian());
    std::vector<double> bound(p.eps_grid.size());
    std::vector<std::size_t> dims(p.eps_grid.size());
    for (std::size_t k = 0; k < p.eps_grid.size(); ++k) {
      dims[k] = eluder_dimension(fc, p.eps_grid[k], EluderMode::kExact);
      bound[k] = (4.0 * beta / (p.eps_grid[k] * p.eps_grid[k]) + 1.0) * static_cast<double>(dims[k]);
    }
    const AgentConfig agent_cfg = detail::finite_ps_config(p.horizon);
    const std::uint64_t class_seed = derive_seed(master, {ci});
    std::vector<std::vector<std::size_t>> counts(p.trials);
    parallel_for(p.trials, p.threads, [&](std::size_t i) {
      TrialStreams streams(class_seed, i);
      const Truth truth = sample_truth(env.model, streams.truth);
      auto agent = make_agent(agent_cfg, make_context(env, truth, agent_cfg));
      LeastSquaresTracker tracker(fc);
      std::vector<std::size_t> c(p.eps_grid.size(), 0);
      run_episode(env, truth, *agent, p.horizon, streams, [&](const StepInfo& s) {
        const double w = tracker.width(s.action, beta);
        for (std::size_t k = 0; k < p.eps_grid.size(); ++k)
          if (w > p.eps_grid[k]) ++c[k];
        tracker.observe(s.action, s.reward);
      });
      counts[i] = std::move(c);
    });
    std::size_t violations = 0;
    std::string first_violation;
    std::vector<double> max_ratio(p.eps_grid.size(), 0.0);
    std::vector<std::size_t> max_count(p.eps_grid.size(), 0);
    for (std::size_t i = 0; i < p.trials; ++i)
      for (std::size_t k = 0; k < p.eps_grid.size(); ++k) {
        max_count[k] = std::max(max_count[k], counts[i][k]);
        if (static_cast<double>(counts[i][k]) > bound[k]) {
          if (violations++ == 0)
            first_violation = "trial " + std::to_string(i) + ", eps " + std::to_string(p.eps_grid[k]) + ": count " +
                              std::to_string(counts[i][k]) + " > bound " + std::to_string(bound[k]);
        }
      }
    nlohmann::ordered_json cj;
    cj["beta"] = beta;
    cj["eps"] = p.eps_grid;
    cj["eluder_dim"] = dims;
    cj["bound"] = bound;
    cj["max_count"] = max_count;
    rec.data[label] = cj;
    rec.check_le(label + ": trials violating the count bound", static_cast<double>(violations), 0.0,
                 first_violation);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Gaussian tail: E sum_t [f(A*_t) - U_t(A*_t)] <= 1 with U = mu + sqrt(beta_t) sigma.

struct GpTailParams {
  std::size_t num_actions = 10;
  std::size_t horizon = 50;
  std::size_t trials = 10000;
  double noise_var = 1.0;
  double lengthscale = 0.3;
  double tolerance_se = 3.0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<GpModel> gp;
};

/// Squared-exponential kernel on points drawn uniformly in the unit square (unit diagonal).
inline GpModel make_rbf_gp(std::size_t num_actions, double lengthscale, double noise_var, Rng& rng) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(num_actions), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
  }
  GpModel gp;
  gp.kernel.resize(pts.rows(), pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
      gp.kernel(i, j) = std::exp(-(pts.row(i) - pts.row(j)).squaredNorm() / (2.0 * lengthscale * lengthscale));
  gp.noise_var = noise_var;
  return gp;
}

inline AuditRecord gp_tail_audit(const GpTailParams& p) {
  GpModel gp;
  if (p.gp) {
    gp = *p.gp;
  } else {
    Rng rng(derive_seed(detail::audit_seed(p.seed, detail::AuditStream::kClassDraw), {5}));
    gp = make_rbf_gp(p.num_actions, p.lengthscale, p.noise_var, rng);
  }
  const Environment env{gp, NoiseSpec::gaussian(std::sqrt(gp.noise_var)), {}};
  env.validate();
  const std::size_t n = gp.num_actions();
  const LinearGaussianModel lin = gp.as_linear();
  const std::uint64_t master = detail::audit_seed(p.seed, detail::AuditStream::kGpTail);
  AgentConfig agent_cfg;
  agent_cfg.kind = AgentKind::kLinPs;
  agent_cfg.horizon = p.horizon;
  std::vector<double> tail(p.trials), positive(p.trials);
  parallel_for(p.trials, p.threads, [&](std::size_t i) {
    TrialStreams streams(master, i);
    const Truth truth = sample_truth(env.model, streams.truth);
    auto agent = make_agent(agent_cfg, make_context(env, truth, agent_cfg));
    GaussianPosterior post = GaussianPosterior::from_prior(lin);
    double sum = 0.0, pos = 0.0;
    run_episode(env, truth, *agent, p.horizon, streams, [&](const StepInfo& s) {
      const double root_beta = std::sqrt(std::max(gp_beta(s.t, n), 0.0));
      const auto star = static_cast<Eigen::Index>(s.optimal);
      const double u = post.mean[star] + root_beta * std::sqrt(std::max(post.cov(star, star), 0.0));
      const double gap = truth.mean(s.optimal) - u;
      sum += gap;
      pos += std::max(gap, 0.0);
      gaussian_update_inplace(post, lin.feature(s.action), s.reward, gp.noise_var);
    });
    tail[i] = sum;
    positive[i] = pos;
  });
  const MeanSe ms = mean_se(tail);
  const MeanSe pos_ms = mean_se(positive);
  AuditRecord rec;
  rec.audit = "gp_tail";
  rec.parameters = {{"num_actions", n}, {"T", p.horizon}, {"trials", p.trials}, {"noise_var", gp.noise_var},
                    {"tolerance_se", p.tolerance_se}, {"seed", p.seed}};
  rec.data = {{"mean_tail_sum", ms.mean}, {"tail_se", ms.se}, {"mean_positive_part", pos_ms.mean},
              {"positive_part_se", pos_ms.se}};
  rec.check_le("E sum [f(A*) - U(A*)]", ms.mean, 1.0 + p.tolerance_se * ms.se,
               "threshold = 1 + tolerance_se standard errors");
  return rec;
}

// ---------------------------------------------------------------------------
// Regret bounds for posterior sampling on a finite class with rewards in
// [0, C]: finite-arm bound, the bound in terms of beta*, the finite-class
// bound, and the per-trial width-sum bound.

struct BoundsParams {
  std::size_t num_arms = 10;
  std::size_t num_params = 16;
  std::size_t horizon = 100;
  std::size_t trials = 2000;
  std::vector<std::size_t> t_grid{10, 20, 50, 100};
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<FiniteFunctionClass> function_class;
  NoiseSpec noise = NoiseSpec::bernoulli();
};

inline AuditRecord bounds_audit(const BoundsParams& p) {
  const FiniteFunctionClass fc = detail::audit_class(p.function_class, p.num_params, p.num_arms, p.seed, 6);
  const Environment env{fc, p.noise, {}};
  env.validate();
  for (std::size_t t : p.t_grid)
    if (t < 1 || t > p.horizon) throw ConfigError("bounds t_grid entries must lie in [1, T]");
  const double c = fc.reward_bound.value_or(std::max(fc.table.maxCoeff(), 0.0));
  if (fc.table.minCoeff() < 0.0) throw ConfigError("bounds audit needs rewards in [0, C]");
  const double sigma = p.noise.sub_gaussian();
  const double class_size = static_cast<double>(fc.num_params());
  // One constant (hence nondecreasing) confidence level for the width sums.
  const double beta_sets = beta_star_finite(fc.num_params(), 1.0 / (2.0 * static_cast<double>(p.horizon)), sigma);

  const std::uint64_t master = detail::audit_seed(p.seed, detail::AuditStream::kBounds);
  const AgentConfig agent_cfg = detail::finite_ps_config(p.horizon);
  std::vector<std::vector<double>> cum_regret(p.trials), cum_width(p.trials);
  parallel_for(p.trials, p.threads, [&](std::size_t i) {
    TrialStreams streams(master, i);
    const Truth truth = sample_truth(env.model, streams.truth);
    auto agent = make_agent(agent_cfg, make_context(env, truth, agent_cfg));
    LeastSquaresTracker tracker(fc);
    std::vector<double> reg, wid;
    double r_acc = 0.0, w_acc = 0.0;
    run_episode(env, truth, *agent, p.horizon, streams, [&](const StepInfo& s) {
      r_acc += s.inst_regret;
      w_acc += tracker.width(s.action, beta_sets);
      reg.push_back(r_acc);
      wid.push_back(w_acc);
      tracker.observe(s.action, s.reward);
    });
    cum_regret[i] = std::move(reg);
    cum_width[i] = std::move(wid);
  });

  std::map<std::size_t, double> dim_cache;
  auto dim_e = [&](std::size_t t) {
    auto it = dim_cache.find(t);
    if (it == dim_cache.end())
      it = dim_cache.emplace(t, static_cast<double>(eluder_dimension(fc, 1.0 / static_cast<double>(t),
                                                                     EluderMode::kExact))).first;
    return it->second;
  };
  BoundParams bp;
  bp.num_arms = static_cast<double>(fc.num_actions());
  bp.reward_bound = c;
  bp.sigma = sigma;
  bp.class_size = class_size;
  bp.eluder_dim = dim_e;
  bp.beta = [&](std::size_t t) { return beta_star_finite(fc.num_params(), 1.0 / (2.0 * static_cast<double>(t)), sigma); };

  AuditRecord rec;
  rec.audit = "bounds";
  rec.parameters = {{"num_arms", fc.num_actions()}, {"num_params", fc.num_params()}, {"T", p.horizon},
                    {"trials", p.trials}, {"t_grid", p.t_grid}, {"seed", p.seed}, {"C", c}, {"sigma", sigma},
                    {"noise", detail::noise_json(p.noise)}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::vector<double> column(p.trials);
  for (std::size_t t : p.t_grid) {
    for (std::size_t i = 0; i < p.trials; ++i) column[i] = cum_regret[i][t - 1];
    const MeanSe regret = mean_se(column);
    const double finite_arms = bound_value(BoundKind::kFiniteArms, bp, t);
    const double beta_regret = bound_value(BoundKind::kBetaRegret, bp, t);
    const double finite_class = bound_value(BoundKind::kFiniteClass, bp, t);
    const double d = dim_e(t);
    const double width_bound = width_sum_bound(d, c, beta_sets, static_cast<double>(t));
    std::size_t width_violations = 0;
    double max_width = 0.0;
    for (std::size_t i = 0; i < p.trials; ++i) {
      max_width = std::max(max_width, cum_width[i][t - 1]);
      if (cum_width[i][t - 1] > width_bound) ++width_violations;
    }
    const std::string at = " at T=" + std::to_string(t);
    rec.check_le("regret vs finite-arm bound" + at, regret.mean, finite_arms);
    rec.check_le("regret vs beta* bound" + at, regret.mean, beta_regret);
    rec.check_le("regret vs finite-class bound" + at, regret.mean, finite_class);
    rec.check_le("trials with width sum above bound" + at, static_cast<double>(width_violations), 0.0);
    rows.push_back({{"T", t}, {"mean_cum_regret", regret.mean}, {"std_err", regret.se}, {"eluder_dim", d},
                    {"finite_arms", finite_arms}, {"beta_regret", beta_regret}, {"finite_class", finite_class},
                    {"width_sum_bound", width_bound}, {"max_width_sum", max_width},
                    {"linear_shape_nonquantitative", bound_value(BoundKind::kLinearShape, bp, t)}});
  }
  rec.data["curves"] = rows;
  return rec;
}

inline const std::vector<std::string>& audit_names() {
  static const std::vector<std::string> names{"decomposition", "coverage_arm", "coverage_ls",
                                              "width_count",   "gp_tail",      "bounds"};
  return names;
}

}  // namespace banditlab
