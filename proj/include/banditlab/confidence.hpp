#pragma once

// Confidence machinery: finite-arm bands, least-squares sets over finite
// classes, and ellipsoids for linear models.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "banditlab/arm_statistics.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/model.hpp"

namespace banditlab {

// ---------------------------------------------------------------------------
// Finite-arm bands for rewards in [0, 1]

struct ArmConfidenceBand {
  std::size_t horizon = 1;
  std::vector<double> lower;
  std::vector<double> upper;

  bool contains(ActionId a, double value) const { return lower.at(a) <= value && value <= upper.at(a); }
};

/// U = min{mean + sqrt((2 + 6 log T) / N), 1}, L = max{mean - sqrt(...), 0};
/// an unsampled arm gets (0, 1).
inline ArmConfidenceBand arm_band(const ArmStatistics& stats, std::size_t horizon) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  ArmConfidenceBand band;
  band.horizon = horizon;
  band.lower.resize(stats.num_arms());
  band.upper.resize(stats.num_arms());
  const double numerator = 2.0 + 6.0 * std::log(static_cast<double>(horizon));
  for (ActionId a = 0; a < stats.num_arms(); ++a) {
    if (stats.count(a) == 0) {
      band.lower[a] = 0.0;
      band.upper[a] = 1.0;
      continue;
    }
    const double radius = std::sqrt(numerator / static_cast<double>(stats.count(a)));
    band.upper[a] = std::min(stats.mean(a) + radius, 1.0);
    band.lower[a] = std::max(stats.mean(a) - radius, 0.0);
  }
  return band;
}

// ---------------------------------------------------------------------------
// Least-squares sets over finite classes

/// sqrt(sum_k (f_rho1(a_k) - f_rho2(a_k))^2).
inline double empirical_norm(const FiniteFunctionClass& fc, ParamId rho1, ParamId rho2,
                             std::span<const ActionId> actions) {
  double sq = 0.0;
  for (ActionId a : actions) {
    const double diff = fc.value(rho1, a) - fc.value(rho2, a);
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

/// Cumulative squared prediction error of f_rho on the history.
inline double squared_loss(const FiniteFunctionClass& fc, ParamId rho, const History& history) {
  double loss = 0.0;
  for (const auto& rec : history) {
    const double err = fc.value(rho, rec.action) - rec.reward;
    loss += err * err;
  }
  return loss;
}

/// 8 sigma^2 log(N / delta) + 2 alpha t (8C + sqrt(8 sigma^2 ln(4 t^2 / delta))),
/// with log N supplied by the caller.
inline double beta_star(double log_cover, double delta, double alpha, double t, double reward_bound, double sigma) {
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("delta must lie in (0, 1]");
  if (alpha < 0.0 || log_cover < 0.0) throw ConfigError("alpha and log covering number must be >= 0");
  double value = 8.0 * sigma * sigma * (log_cover - std::log(delta));
  if (alpha > 0.0) {
    if (!(t > 0.0)) throw ConfigError("t must be positive when alpha > 0");
    value += 2.0 * alpha * t *
             (8.0 * reward_bound + std::sqrt(8.0 * sigma * sigma * std::log(4.0 * t * t / delta)));
  }
  return value;
}

/// Finite-class value of beta_star: alpha = 0 and N = |F|.
inline double beta_star_finite(std::size_t class_size, double delta, double sigma) {
  return beta_star(std::log(static_cast<double>(class_size)), delta, 0.0, 0.0, 0.0, sigma);
}

struct LeastSquaresSet {
  const FiniteFunctionClass* fc = nullptr;
  ParamId center = 0;
  double radius = 0.0;  // sqrt(beta)
  std::vector<ActionId> sampled_actions;
  std::vector<bool> members;

  std::size_t size() const { return static_cast<std::size_t>(std::count(members.begin(), members.end(), true)); }
  bool contains(ParamId rho) const { return members.at(rho); }
};

namespace detail {
inline ParamId argmin_lowest(const std::vector<double>& values) {
  ParamId best = 0;
  for (ParamId i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  return best;
}
}  // namespace detail

/// Center at the least-squares fit (lowest id on ties); members are the
/// functions within sqrt(beta_sq) of it in empirical 2-norm.
inline LeastSquaresSet build_ls_set(const FiniteFunctionClass& fc, const History& history, double beta_sq) {
  if (beta_sq < 0.0) throw ConfigError("confidence radius must be >= 0");
  LeastSquaresSet set;
  set.fc = &fc;
  set.radius = std::sqrt(beta_sq);
  set.sampled_actions = history.actions();
  std::vector<double> losses(fc.num_params());
  for (ParamId rho = 0; rho < fc.num_params(); ++rho) losses[rho] = squared_loss(fc, rho, history);
  set.center = detail::argmin_lowest(losses);
  set.members.resize(fc.num_params());
  for (ParamId rho = 0; rho < fc.num_params(); ++rho) {
    double sq = 0.0;
    for (ActionId a : set.sampled_actions) {
      const double diff = fc.value(rho, a) - fc.value(set.center, a);
      sq += diff * diff;
    }
    set.members[rho] = sq <= beta_sq;
  }
  return set;
}

/// sup f(a) - inf f(a) over the members.
inline double width(const LeastSquaresSet& set, ActionId a) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (ParamId rho = 0; rho < set.members.size(); ++rho) {
    if (!set.members[rho]) continue;
    const double v = set.fc->value(rho, a);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

/// Incremental form of build_ls_set: keeps running losses and the pairwise
/// squared empirical distances, O(|F|^2) per observation.
class LeastSquaresTracker {
 public:
  explicit LeastSquaresTracker(const FiniteFunctionClass& fc)
      : fc_(&fc),
        losses_(static_cast<Eigen::Index>(fc.num_params())),
        pair_sq_(static_cast<Eigen::Index>(fc.num_params()), static_cast<Eigen::Index>(fc.num_params())) {
    losses_.setZero();
    pair_sq_.setZero();
  }

  void observe(ActionId a, double reward) {
    const Eigen::VectorXd column = fc_->table.col(static_cast<Eigen::Index>(a));
    losses_.array() += (column.array() - reward).square();
    for (Eigen::Index i = 0; i < column.size(); ++i)
      for (Eigen::Index j = 0; j < column.size(); ++j) {
        const double diff = column[i] - column[j];
        pair_sq_(i, j) += diff * diff;
      }
    ++count_;
  }

  ParamId center() const {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < losses_.size(); ++i)
      if (losses_[i] < losses_[best]) best = i;
    return static_cast<ParamId>(best);
  }

  bool is_member(ParamId rho, double beta_sq) const {
    return pair_sq_(static_cast<Eigen::Index>(rho), static_cast<Eigen::Index>(center())) <= beta_sq;
  }

  double width(ActionId a, double beta_sq) const {
    const Eigen::Index c = static_cast<Eigen::Index>(center());
    const Eigen::Index col = static_cast<Eigen::Index>(a);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index rho = 0; rho < losses_.size(); ++rho) {
      if (pair_sq_(rho, c) > beta_sq) continue;
      lo = std::min(lo, fc_->table(rho, col));
      hi = std::max(hi, fc_->table(rho, col));
    }
    return hi - lo;
  }

  const Eigen::VectorXd& losses() const { return losses_; }
  std::size_t count() const { return count_; }

 private:
  const FiniteFunctionClass* fc_;
  Eigen::VectorXd losses_;
  Eigen::MatrixXd pair_sq_;
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Ellipsoids for linear models

struct EllipsoidSet {
  Eigen::VectorXd center;  // regularized least squares
  Eigen::MatrixXd gram;    // lambda I + sum phi phi^T
  double radius_sq = 0.0;
};

/// Builds the ridge ellipsoid from observed (feature, reward) pairs.
inline EllipsoidSet build_ellipsoid(const std::vector<Eigen::VectorXd>& features, const std::vector<double>& rewards,
                                    Eigen::Index dim, double lambda, double radius_sq) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (features.size() != rewards.size()) throw ConfigError("features and rewards differ in length");
  EllipsoidSet set;
  set.gram = lambda * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  for (std::size_t k = 0; k < features.size(); ++k) {
    set.gram += features[k] * features[k].transpose();
    b += rewards[k] * features[k];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(set.gram);
  if (llt.info() != Eigen::Success) throw NumericError("gram matrix is singular");
  set.center = llt.solve(b);
  set.radius_sq = radius_sq;
  return set;
}

/// <phi, center> + sqrt(beta) ||phi||_{V^{-1}}, clipped to C when declared.
inline double ellipsoid_ucb(const EllipsoidSet& set, const Eigen::VectorXd& phi,
                            std::optional<double> reward_bound = std::nullopt) {
  if (set.radius_sq < 0.0) throw ConfigError("radius must be >= 0");
  Eigen::LLT<Eigen::MatrixXd> llt(set.gram);
  if (llt.info() != Eigen::Success) throw NumericError("gram matrix is singular");
  const double norm_sq = phi.dot(llt.solve(phi));
  double ucb = phi.dot(set.center) + std::sqrt(set.radius_sq * std::max(norm_sq, 0.0));
  if (reward_bound) ucb = std::min(ucb, *reward_bound);
  return ucb;
}

/// Self-normalized radius sigma sqrt(2 ln(det(V)^{1/2} det(lambda I)^{-1/2} / delta)) + sqrt(lambda) S.
inline double ellipsoid_radius_determinant(double log_det_gram, Eigen::Index dim, double lambda, double sigma,
                                           double delta, double param_bound) {
  const double inner = log_det_gram - static_cast<double>(dim) * std::log(lambda) - 2.0 * std::log(delta);
  return sigma * std::sqrt(std::max(inner, 0.0)) + std::sqrt(lambda) * param_bound;
}

/// Closed form sigma sqrt(d ln((1 + n gamma^2 / lambda) / delta)) + sqrt(lambda) S.
inline double ellipsoid_radius_closed_form(std::size_t n_obs, Eigen::Index dim, double lambda, double sigma,
                                           double delta, double feature_bound, double param_bound) {
  const double inner =
      static_cast<double>(dim) *
      std::log((1.0 + static_cast<double>(n_obs) * feature_bound * feature_bound / lambda) / delta);
  return sigma * std::sqrt(std::max(inner, 0.0)) + std::sqrt(lambda) * param_bound;
}

/// Incremental ridge statistics: V, V^{-1} (Sherman-Morrison), log det V, b.
class RidgeTracker {
 public:
  RidgeTracker(Eigen::Index dim, double lambda)
      : lambda_(lambda),
        gram_(lambda * Eigen::MatrixXd::Identity(dim, dim)),
        gram_inv_(Eigen::MatrixXd::Identity(dim, dim) / lambda),
        b_(Eigen::VectorXd::Zero(dim)),
        log_det_(static_cast<double>(dim) * std::log(lambda)) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  }

  void observe(const Eigen::VectorXd& phi, double reward) {
    const Eigen::VectorXd v = gram_inv_ * phi;
    const double denom = 1.0 + phi.dot(v);
    gram_ += phi * phi.transpose();
    gram_inv_ -= v * v.transpose() / denom;
    gram_inv_ = 0.5 * (gram_inv_ + gram_inv_.transpose()).eval();
    log_det_ += std::log(denom);
    b_ += reward * phi;
    ++count_;
  }

  Eigen::VectorXd center() const { return gram_inv_ * b_; }
  double weighted_norm_sq(const Eigen::VectorXd& phi) const { return std::max(phi.dot(gram_inv_ * phi), 0.0); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inverse() const { return gram_inv_; }
  double log_det() const { return log_det_; }
  double lambda() const { return lambda_; }
  std::size_t count() const { return count_; }
  Eigen::Index dim() const { return b_.size(); }

  EllipsoidSet as_set(double radius_sq) const { return {center(), gram_, radius_sq}; }

 private:
  double lambda_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd gram_inv_;
  Eigen::VectorXd b_;
  double log_det_;
  std::size_t count_ = 0;
};

}  // namespace banditlab
