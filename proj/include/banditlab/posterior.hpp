#pragma once

// Exact conjugate Gaussian inference and exact discrete Bayes over finite grids.

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "banditlab/errors.hpp"
#include "banditlab/model.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t obs_count = 0;

  static GaussianPosterior from_prior(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
    return {mean, cov, 0};
  }
  static GaussianPosterior from_prior(const LinearGaussianModel& m) { return from_prior(m.prior_mean, m.prior_cov); }
};

/// Rank-one Kalman update for reward = <phi, theta> + N(0, noise_var), in
/// Joseph form and re-symmetrized so the covariance stays PSD over long runs.
inline void gaussian_update_inplace(GaussianPosterior& post, const Eigen::VectorXd& phi, double reward,
                                    double noise_var) {
  if (!(noise_var > 0.0)) throw ConfigError("noise variance must be positive");
  if (phi.size() != post.mean.size()) throw ConfigError("feature dimension mismatch");
  if (!phi.allFinite() || !std::isfinite(reward)) throw NumericError("non-finite observation");
  const Eigen::VectorXd cov_phi = post.cov * phi;
  const double innovation_var = phi.dot(cov_phi) + noise_var;
  const Eigen::VectorXd gain = cov_phi / innovation_var;
  post.mean += gain * (reward - phi.dot(post.mean));
  const Eigen::Index d = phi.size();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) - gain * phi.transpose();
  Eigen::MatrixXd next = a * post.cov * a.transpose() + noise_var * gain * gain.transpose();
  post.cov = 0.5 * (next + next.transpose());
  ++post.obs_count;
  if (!post.mean.allFinite() || !post.cov.allFinite()) throw NumericError("posterior update produced non-finite values");
}

inline GaussianPosterior gaussian_update(GaussianPosterior post, const Eigen::VectorXd& phi, double reward,
                                         double noise_var) {
  gaussian_update_inplace(post, phi, reward, noise_var);
  return post;
}

/// theta_hat ~ N(mean, cov).
inline Eigen::VectorXd gaussian_sample(const GaussianPosterior& post, Rng& rng) {
  return sample_gaussian(post.mean, post.cov, rng);
}

struct Predictive {
  double mean;
  double std_dev;
};

inline Predictive predictive_mean_std(const GaussianPosterior& post, const Eigen::VectorXd& phi) {
  const double var = phi.dot(post.cov * phi);
  return {phi.dot(post.mean), std::sqrt(std::max(var, 0.0))};
}

/// Exact posterior over a finite parameter set, accumulated in log space.
struct DiscretePosterior {
  Eigen::VectorXd weights;
  Eigen::VectorXd log_weights;  // log prior + running log-likelihood, shifted so max is 0

  static DiscretePosterior from_prior(const Eigen::VectorXd& prior) {
    detail::check_probability_vector(prior, "prior");
    DiscretePosterior post;
    post.weights = prior;
    post.log_weights = prior.unaryExpr([](double p) {
      return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    });
    post.normalize();
    return post;
  }

  void normalize() {
    const double top = log_weights.maxCoeff();
    if (!std::isfinite(top)) throw NumericError("discrete posterior is degenerate: every parameter has zero likelihood");
    log_weights.array() -= top;
    // scalar exp: Eigen's vectorized exp clamps -inf to a denormal instead of 0
    weights = log_weights.unaryExpr([](double v) { return std::exp(v); });
    weights /= weights.sum();
  }
};

inline void discrete_update_inplace(DiscretePosterior& post, const FiniteFunctionClass& fc, ActionId a,
                                    double reward, const NoiseSpec& noise) {
  if (a >= fc.num_actions()) throw LookupError("unknown action id " + std::to_string(a));
  if (!std::isfinite(reward)) throw NumericError("non-finite reward");
  const auto col = static_cast<Eigen::Index>(a);
  for (Eigen::Index rho = 0; rho < post.log_weights.size(); ++rho) {
    if (post.log_weights[rho] == -std::numeric_limits<double>::infinity()) continue;
    post.log_weights[rho] += noise.log_likelihood(reward - fc.table(rho, col));
  }
  post.normalize();
}

inline DiscretePosterior discrete_update(DiscretePosterior post, const FiniteFunctionClass& fc, ActionId a,
                                         double reward, const NoiseSpec& noise) {
  discrete_update_inplace(post, fc, a, reward, noise);
  return post;
}

inline ParamId discrete_sample(const DiscretePosterior& post, Rng& rng) { return rng.categorical(post.weights); }

}  // namespace banditlab
