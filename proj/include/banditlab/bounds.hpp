#pragma once

// Regret-bound formulas evaluated on a horizon grid, for overlay against
// empirical regret curves. Order-of-magnitude statements have no explicit
// constants; they are emitted with unit constant and marked non-quantitative.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "banditlab/errors.hpp"

namespace banditlab {

enum class BoundKind {
  kFiniteArms,      // 2 min{K,T} + 4 sqrt(K T (2 + 6 log T))
  kLinearShape,     // d log T sqrt(T)
  kGlmShape,        // r d log^{3/2} T sqrt(T)
  kGaussianProcess, // 1 + 2 sqrt(T gamma_T / ln(1 + sigma^-2) * ln((T^2+1)|A|/sqrt(2 pi)))
  kWidthSum,        // 1 + dim_E C + 4 sqrt(dim_E beta_T T)
  kBetaRegret,      // 1 + (dim_E + 1) C + 4 sqrt(dim_E beta_T T)
  kFiniteClass,     // 1 + (dim_E + 1) C + 8 sigma sqrt(2 dim_E log(2|F| T) T)
};

inline const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kFiniteArms: return "finite_arms";
    case BoundKind::kLinearShape: return "linear_shape";
    case BoundKind::kGlmShape: return "glm_shape";
    case BoundKind::kGaussianProcess: return "gaussian_process";
    case BoundKind::kWidthSum: return "width_sum";
    case BoundKind::kBetaRegret: return "beta_regret";
    case BoundKind::kFiniteClass: return "finite_class";
  }
  return "?";
}

inline bool is_quantitative(BoundKind kind) {
  return kind != BoundKind::kLinearShape && kind != BoundKind::kGlmShape;
}

/// Inputs per formula; functions of T cover quantities such as dim_E(F, 1/T).
struct BoundParams {
  double num_arms = 1.0;      // K
  double dim = 1.0;           // d
  double slope_ratio = 1.0;   // r
  double reward_bound = 1.0;  // C
  double sigma = 1.0;         // sub-Gaussian noise parameter
  double noise_var = 1.0;     // GP noise variance
  double class_size = 1.0;    // |F|
  double num_actions = 1.0;   // |A|
  std::function<double(std::size_t)> eluder_dim;  // dim_E(F, 1/T)
  std::function<double(std::size_t)> beta;        // beta_T
  std::function<double(std::size_t)> info_gain;   // gamma_T
};

inline double finite_arms_bound(double k, double t) {
  return 2.0 * std::min(k, t) + 4.0 * std::sqrt(k * t * (2.0 + 6.0 * std::log(t)));
}

inline double finite_class_bound(double dim_e, double c, double sigma, double class_size, double t) {
  return 1.0 + (dim_e + 1.0) * c + 8.0 * sigma * std::sqrt(2.0 * dim_e * std::log(2.0 * class_size * t) * t);
}

inline double width_sum_bound(double dim_e, double c, double beta, double t) {
  return 1.0 + dim_e * c + 4.0 * std::sqrt(dim_e * beta * t);
}

inline double beta_regret_bound(double dim_e, double c, double beta, double t) {
  return 1.0 + (dim_e + 1.0) * c + 4.0 * std::sqrt(dim_e * beta * t);
}

inline double gaussian_process_bound(double gamma, double noise_var, double num_actions, double t) {
  const double beta = std::log((t * t + 1.0) * num_actions / std::sqrt(2.0 * std::numbers::pi));
  return 1.0 + 2.0 * std::sqrt(t * gamma / std::log1p(1.0 / noise_var) * beta);
}

inline double bound_value(BoundKind kind, const BoundParams& p, std::size_t horizon) {
  if (horizon < 1) throw ConfigError("bound horizon must be >= 1");
  const auto t = static_cast<double>(horizon);
  auto need = [&](const std::function<double(std::size_t)>& f, const char* name) {
    if (!f) throw ConfigError(std::string("bound ") + to_string(kind) + " needs " + name);
    return f(horizon);
  };
  switch (kind) {
    case BoundKind::kFiniteArms: return finite_arms_bound(p.num_arms, t);
    case BoundKind::kLinearShape: return p.dim * std::log(t) * std::sqrt(t);
    case BoundKind::kGlmShape: return p.slope_ratio * p.dim * std::pow(std::log(t), 1.5) * std::sqrt(t);
    case BoundKind::kGaussianProcess:
      return gaussian_process_bound(need(p.info_gain, "gamma_T"), p.noise_var, p.num_actions, t);
    case BoundKind::kWidthSum:
      return width_sum_bound(need(p.eluder_dim, "dim_E"), p.reward_bound, need(p.beta, "beta_T"), t);
    case BoundKind::kBetaRegret:
      return beta_regret_bound(need(p.eluder_dim, "dim_E"), p.reward_bound, need(p.beta, "beta_T"), t);
    case BoundKind::kFiniteClass:
      return finite_class_bound(need(p.eluder_dim, "dim_E"), p.reward_bound, p.sigma, p.class_size, t);
  }
  throw ConfigError("unknown bound kind");
}

struct BoundCurve {
  BoundKind kind;
  bool quantitative = true;
  std::vector<std::size_t> horizons;
  std::vector<double> values;
};

inline BoundCurve bound_curves(BoundKind kind, const BoundParams& params, const std::vector<std::size_t>& t_grid) {
  BoundCurve curve{kind, is_quantitative(kind), t_grid, {}};
  curve.values.reserve(t_grid.size());
  for (std::size_t t : t_grid) curve.values.push_back(bound_value(kind, params, t));
  return curve;
}

}  // namespace banditlab
