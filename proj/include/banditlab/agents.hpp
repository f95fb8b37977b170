#pragma once

// Action-selection policies. Every agent sees only (available set, action,
// reward); the two reference policies at the bottom exist for harness tests.

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "banditlab/arm_statistics.hpp"
#include "banditlab/confidence.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/model.hpp"
#include "banditlab/posterior.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

enum class AgentKind {
  kIndepUcb,
  kLinUcbGauss,
  kIndepPs,
  kLinPs,
  kGpUcb,
  kTunedGaussUcb,
  kFinitePs,
  kGlmIps,
  kLinUcbEllipsoid,
  kOracle,
  kUniformRandom,
};

inline const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kIndepUcb: return "INDEP_UCB";
    case AgentKind::kLinUcbGauss: return "LIN_UCB_GAUSS";
    case AgentKind::kIndepPs: return "INDEP_PS";
    case AgentKind::kLinPs: return "LIN_PS";
    case AgentKind::kGpUcb: return "GP_UCB";
    case AgentKind::kTunedGaussUcb: return "TUNED_GAUSS_UCB";
    case AgentKind::kFinitePs: return "FINITE_PS";
    case AgentKind::kGlmIps: return "GLM_IPS";
    case AgentKind::kLinUcbEllipsoid: return "LIN_UCB_ELLIPSOID";
    case AgentKind::kOracle: return "ORACLE";
    case AgentKind::kUniformRandom: return "UNIFORM_RANDOM";
  }
  return "?";
}

inline std::optional<AgentKind> parse_agent_kind(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(AgentKind::kUniformRandom); ++k) {
    const auto kind = static_cast<AgentKind>(k);
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

inline bool is_ucb_kind(AgentKind kind) {
  switch (kind) {
    case AgentKind::kIndepUcb:
    case AgentKind::kLinUcbGauss:
    case AgentKind::kGpUcb:
    case AgentKind::kTunedGaussUcb:
    case AgentKind::kLinUcbEllipsoid: return true;
    default: return false;
  }
}

enum class EllipsoidRadius { kDeterminant, kClosedForm };

struct AgentConfig {
  std::string name;
  AgentKind kind = AgentKind::kFinitePs;
  double beta = 1.0;               // bonus scale (INDEP_UCB, LIN_UCB_GAUSS, TUNED_GAUSS_UCB)
  std::size_t horizon = 1;         // T
  double delta = 1.0;              // ellipsoid confidence level
  double lambda_reg = 1.0;         // ellipsoid ridge regularizer
  std::vector<ActionId> forced_actions;  // GLM_IPS prefix
  bool paper_literal_log = false;  // LIN_UCB_GAUSS: log(t) instead of log(t + 1)
  EllipsoidRadius radius = EllipsoidRadius::kDeterminant;
  std::optional<double> norm_bound;  // S for the ellipsoid; unset means the realized ||theta||
  std::vector<double> beta_grid;     // TUNED_GAUSS_UCB: tune over these when nonempty
  std::size_t tuning_trials = 0;     // 0: harness default

  std::string label() const { return name.empty() ? to_string(kind) : name; }

  void validate() const {
    if (horizon < 1) throw ConfigError("agent horizon_T must be >= 1");
    if (!(lambda_reg > 0.0)) throw ConfigError("agent lambda_reg must be > 0");
    if (!(delta > 0.0) || delta > 1.0) throw ConfigError("agent delta must lie in (0, 1]");
    if (beta < 0.0) throw ConfigError("agent beta must be >= 0");
    for (double b : beta_grid)
      if (b < 0.0) throw ConfigError("beta_grid entries must be >= 0");
    if (norm_bound && *norm_bound < 0.0) throw ConfigError("norm_bound must be >= 0");
  }
};

/// 2 ln((t^2 + 1) |A| / sqrt(2 pi)).
inline double gp_beta(std::size_t t, std::size_t num_actions) {
  if (t < 1 || num_actions < 1) throw ConfigError("gp_beta needs t >= 1 and |A| >= 1");
  const double td = static_cast<double>(t);
  return 2.0 * std::log((td * td + 1.0) * static_cast<double>(num_actions) / std::sqrt(2.0 * std::numbers::pi));
}

/// What an agent may know before the first period.
struct AgentContext {
  const Model* model = nullptr;
  NoiseSpec noise;
  std::optional<double> realized_norm;  // declared S when norm_bound is "realized"
  const Truth* oracle_truth = nullptr;  // ORACLE only
};

class Agent {
 public:
  virtual ~Agent() = default;

  /// Picks an action from a nonempty available set.
  virtual ActionId select(const ActionSet& available, Rng& rng) = 0;
  virtual void observe(ActionId action, double reward) = 0;
  virtual std::unique_ptr<Agent> clone() const = 0;

  /// 1-based index of the period about to be played.
  std::size_t period() const { return observed_ + 1; }
  std::size_t observed() const { return observed_; }

 protected:
  static void require_nonempty(const ActionSet& available) {
    if (available.empty()) throw ContractViolation("select called with an empty action set");
  }
  std::size_t observed_ = 0;
};

namespace detail {

/// argmax over the available set; ties go to the lowest action id.
template <class Score>
ActionId argmax_lowest(const ActionSet& available, Score&& score) {
  ActionId best = available.front();
  double best_value = score(best);
  for (std::size_t i = 1; i < available.size(); ++i) {
    const ActionId a = available[i];
    const double v = score(a);
    if (v > best_value || (v == best_value && a < best)) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

inline std::shared_ptr<const LinearGaussianModel> linear_view(const Model& model, AgentKind kind) {
  if (const auto* lin = std::get_if<LinearGaussianModel>(&model)) return std::make_shared<LinearGaussianModel>(*lin);
  if (const auto* gp = std::get_if<GpModel>(&model)) return std::make_shared<LinearGaussianModel>(gp->as_linear());
  throw ConfigError(std::string(to_string(kind)) + " needs a linear-Gaussian or GP model");
}

inline std::shared_ptr<const FiniteFunctionClass> finite_view(const Model& model, AgentKind kind) {
  if (const auto* fc = std::get_if<FiniteFunctionClass>(&model)) return std::make_shared<FiniteFunctionClass>(*fc);
  if (const auto* glm = std::get_if<GlmSpec>(&model)) return std::make_shared<FiniteFunctionClass>(glm->induced_class());
  throw ConfigError(std::string(to_string(kind)) + " needs a finite or GLM-grid model");
}

}  // namespace detail

/// Select each arm once, then argmax mean + beta sqrt(log t / N).
class IndependentUcbAgent final : public Agent {
 public:
  IndependentUcbAgent(std::size_t num_arms, double beta) : stats_(num_arms), beta_(beta) {}

  ActionId select(const ActionSet& available, Rng&) override {
    require_nonempty(available);
    for (ActionId a : available)
      if (stats_.count(a) == 0) return a;
    const double log_t = std::log(static_cast<double>(period()));
    return detail::argmax_lowest(available, [&](ActionId a) {
      return stats_.mean(a) + beta_ * std::sqrt(log_t / static_cast<double>(stats_.count(a)));
    });
  }

  void observe(ActionId action, double reward) override {
    stats_.record(action, reward);
    ++observed_;
  }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<IndependentUcbAgent>(*this); }
  const ArmStatistics& statistics() const { return stats_; }

 private:
  ArmStatistics stats_;
  double beta_;
};

/// Posterior-mean-plus-bonus policies over the Gaussian posterior:
/// LIN_UCB_GAUSS, GP_UCB and TUNED_GAUSS_UCB.
class GaussianUcbAgent final : public Agent {
 public:
  GaussianUcbAgent(std::shared_ptr<const LinearGaussianModel> model, AgentKind kind, double beta,
                   bool paper_literal_log)
      : model_(std::move(model)),
        post_(GaussianPosterior::from_prior(*model_)),
        kind_(kind),
        beta_(beta),
        paper_literal_log_(paper_literal_log) {}

  /// Multiplier on sigma_{t-1}(a) at the current period.
  double bonus_scale() const {
    const auto t = static_cast<double>(period());
    switch (kind_) {
      case AgentKind::kLinUcbGauss: return beta_ * (paper_literal_log_ ? std::log(t) : std::log(t + 1.0));
      case AgentKind::kGpUcb: return std::sqrt(std::max(gp_beta(period(), model_->num_actions()), 0.0));
      default: return std::sqrt(beta_);
    }
  }

  ActionId select(const ActionSet& available, Rng&) override {
    require_nonempty(available);
    const double scale = bonus_scale();
    return detail::argmax_lowest(available, [&](ActionId a) {
      const auto phi = model_->features.row(static_cast<Eigen::Index>(a)).transpose();
      const double var = phi.dot(post_.cov * phi);
      return phi.dot(post_.mean) + scale * std::sqrt(std::max(var, 0.0));
    });
  }

  void observe(ActionId action, double reward) override {
    gaussian_update_inplace(post_, model_->feature(action), reward, model_->noise_var);
    ++observed_;
  }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<GaussianUcbAgent>(*this); }
  const GaussianPosterior& posterior() const { return post_; }

 private:
  std::shared_ptr<const LinearGaussianModel> model_;
  GaussianPosterior post_;
  AgentKind kind_;
  double beta_;
  bool paper_literal_log_;
};

/// Draw theta from the Gaussian posterior and act greedily (INDEP_PS, LIN_PS).
class GaussianPosteriorSamplingAgent final : public Agent {
 public:
  explicit GaussianPosteriorSamplingAgent(std::shared_ptr<const LinearGaussianModel> model)
      : model_(std::move(model)), post_(GaussianPosterior::from_prior(*model_)) {}

  ActionId select(const ActionSet& available, Rng& rng) override {
    require_nonempty(available);
    const Eigen::VectorXd theta = gaussian_sample(post_, rng);
    return detail::argmax_lowest(available, [&](ActionId a) {
      return model_->features.row(static_cast<Eigen::Index>(a)).dot(theta);
    });
  }

  void observe(ActionId action, double reward) override {
    gaussian_update_inplace(post_, model_->feature(action), reward, model_->noise_var);
    ++observed_;
  }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<GaussianPosteriorSamplingAgent>(*this); }
  const GaussianPosterior& posterior() const { return post_; }

 private:
  std::shared_ptr<const LinearGaussianModel> model_;
  GaussianPosterior post_;
};

/// Exact posterior sampling over a finite class; with a forced prefix this is
/// the GLM_IPS variant (prefix first, posterior sampling afterwards).
class FinitePosteriorSamplingAgent final : public Agent {
 public:
  FinitePosteriorSamplingAgent(std::shared_ptr<const FiniteFunctionClass> fc, NoiseSpec noise,
                               std::vector<ActionId> forced = {})
      : fc_(std::move(fc)),
        noise_(noise),
        post_(DiscretePosterior::from_prior(fc_->prior)),
        forced_(std::move(forced)) {
    for (ActionId a : forced_)
      if (a >= fc_->num_actions()) throw ConfigError("forced action " + std::to_string(a) + " is out of range");
  }

  ActionId select(const ActionSet& available, Rng& rng) override {
    require_nonempty(available);
    if (observed_ < forced_.size()) {
      const ActionId a = forced_[observed_];
      if (std::find(available.begin(), available.end(), a) == available.end())
        throw ContractViolation("forced action " + std::to_string(a) + " is not available");
      return a;
    }
    const auto rho = static_cast<Eigen::Index>(discrete_sample(post_, rng));
    return detail::argmax_lowest(available,
                                 [&](ActionId a) { return fc_->table(rho, static_cast<Eigen::Index>(a)); });
  }

  void observe(ActionId action, double reward) override {
    discrete_update_inplace(post_, *fc_, action, reward, noise_);
    ++observed_;
  }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<FinitePosteriorSamplingAgent>(*this); }
  const DiscretePosterior& posterior() const { return post_; }

 private:
  std::shared_ptr<const FiniteFunctionClass> fc_;
  NoiseSpec noise_;
  DiscretePosterior post_;
  std::vector<ActionId> forced_;
};

/// Optimism over the ridge ellipsoid: <phi, theta_hat> + sqrt(beta_t) ||phi||_{V^{-1}}.
class EllipsoidUcbAgent final : public Agent {
 public:
  struct Params {
    double lambda = 1.0;
    double delta = 1.0;
    double sigma = 1.0;
    double param_bound = 1.0;    // S
    double feature_bound = 1.0;  // gamma
    EllipsoidRadius radius = EllipsoidRadius::kDeterminant;
  };

  EllipsoidUcbAgent(std::shared_ptr<const LinearGaussianModel> model, Params params)
      : model_(std::move(model)), params_(params), ridge_(model_->dim(), params.lambda) {}

  double radius() const {
    if (params_.radius == EllipsoidRadius::kClosedForm)
      return ellipsoid_radius_closed_form(ridge_.count(), ridge_.dim(), params_.lambda, params_.sigma, params_.delta,
                                          params_.feature_bound, params_.param_bound);
    return ellipsoid_radius_determinant(ridge_.log_det(), ridge_.dim(), params_.lambda, params_.sigma, params_.delta,
                                        params_.param_bound);
  }

  ActionId select(const ActionSet& available, Rng&) override {
    require_nonempty(available);
    const double r = radius();
    const Eigen::VectorXd center = ridge_.center();
    return detail::argmax_lowest(available, [&](ActionId a) {
      const Eigen::VectorXd phi = model_->features.row(static_cast<Eigen::Index>(a)).transpose();
      return phi.dot(center) + r * std::sqrt(ridge_.weighted_norm_sq(phi));
    });
  }

  void observe(ActionId action, double reward) override {
    ridge_.observe(model_->feature(action), reward);
    ++observed_;
  }

  std::unique_ptr<Agent> clone() const override { return std::make_unique<EllipsoidUcbAgent>(*this); }
  const RidgeTracker& ridge() const { return ridge_; }
  EllipsoidSet confidence_set() const {
    const double r = radius();
    return ridge_.as_set(r * r);
  }

 private:
  std::shared_ptr<const LinearGaussianModel> model_;
  Params params_;
  RidgeTracker ridge_;
};

/// Reference policy that plays the true optimum.
class OracleAgent final : public Agent {
 public:
  explicit OracleAgent(Eigen::VectorXd means) : means_(std::move(means)) {}
  ActionId select(const ActionSet& available, Rng&) override {
    require_nonempty(available);
    return detail::argmax_lowest(available, [&](ActionId a) { return means_[static_cast<Eigen::Index>(a)]; });
  }
  void observe(ActionId, double) override { ++observed_; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<OracleAgent>(*this); }

 private:
  Eigen::VectorXd means_;
};

/// Reference policy that plays uniformly at random.
class UniformAgent final : public Agent {
 public:
  ActionId select(const ActionSet& available, Rng& rng) override {
    require_nonempty(available);
    return available[rng.index(available.size())];
  }
  void observe(ActionId, double) override { ++observed_; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<UniformAgent>(*this); }
};

inline std::unique_ptr<Agent> make_agent(const AgentConfig& config, const AgentContext& ctx) {
  config.validate();
  if (ctx.model == nullptr) throw ConfigError("agent context has no model");
  const Model& model = *ctx.model;
  switch (config.kind) {
    case AgentKind::kIndepUcb: return std::make_unique<IndependentUcbAgent>(num_actions(model), config.beta);
    case AgentKind::kLinUcbGauss:
    case AgentKind::kGpUcb:
    case AgentKind::kTunedGaussUcb:
      return std::make_unique<GaussianUcbAgent>(detail::linear_view(model, config.kind), config.kind, config.beta,
                                                config.paper_literal_log);
    case AgentKind::kIndepPs: {
      auto lin = detail::linear_view(model, config.kind);
      const Eigen::MatrixXd& cov = lin->prior_cov;
      const bool diagonal = (cov - Eigen::MatrixXd(cov.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
      if (!lin->has_identity_features() || !diagonal)
        throw ConfigError("INDEP_PS needs independent arms (identity features, diagonal prior covariance)");
      return std::make_unique<GaussianPosteriorSamplingAgent>(std::move(lin));
    }
    case AgentKind::kLinPs:
      return std::make_unique<GaussianPosteriorSamplingAgent>(detail::linear_view(model, config.kind));
    case AgentKind::kFinitePs:
      return std::make_unique<FinitePosteriorSamplingAgent>(detail::finite_view(model, config.kind), ctx.noise);
    case AgentKind::kGlmIps:
      if (!std::holds_alternative<GlmSpec>(model) && !std::holds_alternative<FiniteFunctionClass>(model))
        throw ConfigError("GLM_IPS needs a GLM-grid model");
      return std::make_unique<FinitePosteriorSamplingAgent>(detail::finite_view(model, config.kind), ctx.noise,
                                                            config.forced_actions);
    case AgentKind::kLinUcbEllipsoid: {
      auto lin = detail::linear_view(model, config.kind);
      EllipsoidUcbAgent::Params p;
      p.lambda = config.lambda_reg;
      p.delta = config.delta;
      p.sigma = ctx.noise.sub_gaussian();
      p.feature_bound = lin->feature_bound.value_or(lin->max_feature_norm());
      if (config.norm_bound) {
        p.param_bound = *config.norm_bound;
      } else if (ctx.realized_norm) {
        p.param_bound = *ctx.realized_norm;
      } else if (lin->param_bound) {
        p.param_bound = *lin->param_bound;
      } else {
        throw ConfigError("LIN_UCB_ELLIPSOID needs a norm bound S (number or realized)");
      }
      p.radius = config.radius;
      return std::make_unique<EllipsoidUcbAgent>(std::move(lin), p);
    }
    case AgentKind::kOracle:
      if (ctx.oracle_truth == nullptr) throw ConfigError("ORACLE needs the realized truth");
      return std::make_unique<OracleAgent>(ctx.oracle_truth->means);
    case AgentKind::kUniformRandom: return std::make_unique<UniformAgent>();
  }
  throw ConfigError("unknown agent kind");
}

}  // namespace banditlab
