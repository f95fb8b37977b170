#pragma once

// Complexity measures of finite function classes: eluder dimension (exact and
// greedy), closed-form eluder bounds for linear and generalized linear
// classes, sup-norm covering numbers, a Kolmogorov-dimension slope estimate,
// VC dimension, strong dependence and Gaussian information gain.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "banditlab/errors.hpp"
#include "banditlab/model.hpp"
#include "banditlab/posterior.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

enum class EluderMode { kExact, kGreedy };

inline const char* to_string(EluderMode mode) { return mode == EluderMode::kExact ? "EXACT" : "GREEDY"; }

inline constexpr std::size_t kExactEluderMaxActions = 10;
inline constexpr std::size_t kGreedyRestarts = 32;

namespace detail {

inline void require_nonempty_class(const FiniteFunctionClass& fc) {
  if (fc.num_params() == 0 || fc.num_actions() == 0) throw ConfigError("function class is empty");
}

/// sqrt of the sum of squared differences, summed in ascending action order so
/// the value depends only on the set (exact and oracle searches agree bitwise).
inline double set_norm(const FiniteFunctionClass& fc, Eigen::Index r1, Eigen::Index r2,
                       std::span<const ActionId> actions) {
  std::vector<ActionId> sorted(actions.begin(), actions.end());
  std::sort(sorted.begin(), sorted.end());
  double sq = 0.0;
  for (ActionId a : sorted) {
    const double d = fc.table(r1, static_cast<Eigen::Index>(a)) - fc.table(r2, static_cast<Eigen::Index>(a));
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace detail

/// True iff every ordered pair within eps on `subseq` differs by at most eps at `a`.
inline bool is_eps_dependent(const FiniteFunctionClass& fc, ActionId a, std::span<const ActionId> subseq, double eps) {
  detail::require_nonempty_class(fc);
  if (a >= fc.num_actions()) throw LookupError("unknown action id " + std::to_string(a));
  for (ActionId b : subseq)
    if (b >= fc.num_actions()) throw LookupError("unknown action id " + std::to_string(b));
  const auto n = static_cast<Eigen::Index>(fc.num_params());
  const auto col = static_cast<Eigen::Index>(a);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (detail::set_norm(fc, i, j, subseq) <= eps && fc.table(i, col) - fc.table(j, col) > eps) return false;
    }
  return true;
}

struct EluderResult {
  std::size_t dimension = 0;
  double eps_prime = 0.0;          // a scale >= eps achieving the dimension
  std::vector<ActionId> witness;   // each element eps_prime-independent of its predecessors
  EluderMode mode = EluderMode::kExact;
};

namespace detail {

// Action a is eps'-independent of S iff some ordered pair p has
// norm_S(p) <= eps' < gap_a(p), so the scales at which it is independent form
// a union of half-open intervals [norm, gap). Independence at a fixed scale
// depends only on the set of predecessors, so a subset S can be ordered into
// a valid sequence at scale c iff c is in
//   G(S) = union over a in S of G(S \ a) intersected with I(a, S \ a),
// with G(empty) = [eps, inf). The eluder dimension is the largest |S| with G(S)
// nonempty. Carrying G as interval lists makes this exact with no scale grid.
using IntervalList = std::vector<std::pair<double, double>>;  // disjoint, sorted, half-open

inline IntervalList normalize_intervals(IntervalList list) {
  std::sort(list.begin(), list.end());
  IntervalList out;
  for (const auto& iv : list) {
    if (!(iv.first < iv.second)) continue;
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

inline IntervalList intersect_intervals(const IntervalList& x, const IntervalList& y) {
  IntervalList out;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].first, y[j].first);
    const double hi = std::min(x[i].second, y[j].second);
    if (lo < hi) out.emplace_back(lo, hi);
    if (x[i].second < y[j].second) ++i; else ++j;
  }
  return out;
}

inline bool intervals_contain(const IntervalList& list, double c) {
  for (const auto& iv : list)
    if (iv.first <= c && c < iv.second) return true;
  return false;
}

class EluderSearch {
 public:
  EluderSearch(const FiniteFunctionClass& fc, double eps) : fc_(&fc), n_(fc.num_actions()), eps_(eps) {
    const auto m = static_cast<Eigen::Index>(fc.num_params());
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (i != j) pairs_.emplace_back(i, j);
    const std::size_t subsets = std::size_t{1} << n_;
    const std::size_t np = pairs_.size();
    // Squared norms accumulated in ascending action order (matching set_norm).
    std::vector<double> norm_sq(subsets * np, 0.0);
    norms_.assign(subsets * np, 0.0);
    for (std::size_t s = 1; s < subsets; ++s) {
      const auto top = static_cast<std::size_t>(std::bit_width(s) - 1);
      const std::size_t rest = s & ~(std::size_t{1} << top);
      for (std::size_t p = 0; p < np; ++p) {
        const double d = gap(p, top);
        norm_sq[s * np + p] = norm_sq[rest * np + p] + d * d;
        norms_[s * np + p] = std::sqrt(norm_sq[s * np + p]);
      }
    }
  }

  IntervalList independence(std::size_t a, std::size_t s) const {
    IntervalList list;
    const std::size_t np = pairs_.size();
    for (std::size_t p = 0; p < np; ++p) {
      const double g = gap(p, a);
      const double lo = std::max(norms_[s * np + p], eps_);
      if (lo < g) list.emplace_back(lo, g);
    }
    return normalize_intervals(std::move(list));
  }

  EluderResult run() {
    const std::size_t subsets = std::size_t{1} << n_;
    good_.assign(subsets, {});
    good_[0] = {{eps_, std::numeric_limits<double>::infinity()}};
    std::size_t best = 0;
    for (std::size_t s = 1; s < subsets; ++s) {
      IntervalList acc;
      for (std::size_t a = 0; a < n_; ++a) {
        if (!((s >> a) & 1U)) continue;
        const std::size_t rest = s & ~(std::size_t{1} << a);
        if (good_[rest].empty()) continue;
        const IntervalList part = intersect_intervals(good_[rest], independence(a, rest));
        acc.insert(acc.end(), part.begin(), part.end());
      }
      good_[s] = normalize_intervals(std::move(acc));
      if (!good_[s].empty() && std::popcount(s) > std::popcount(best)) best = s;
    }
    EluderResult result;
    result.mode = EluderMode::kExact;
    result.eps_prime = best == 0 ? eps_ : good_[best].front().first;
    result.dimension = static_cast<std::size_t>(std::popcount(best));
    // Peel off a last element that is valid at the chosen scale.
    const double c = result.eps_prime;
    for (std::size_t s = best; s != 0;) {
      for (std::size_t a = 0; a < n_; ++a) {
        if (!((s >> a) & 1U)) continue;
        const std::size_t rest = s & ~(std::size_t{1} << a);
        if (intervals_contain(good_[rest], c) && intervals_contain(independence(a, rest), c)) {
          result.witness.push_back(a);
          s = rest;
          break;
        }
      }
    }
    std::reverse(result.witness.begin(), result.witness.end());
    return result;
  }

 private:
  double gap(std::size_t p, std::size_t a) const {
    const auto col = static_cast<Eigen::Index>(a);
    return fc_->table(pairs_[p].first, col) - fc_->table(pairs_[p].second, col);
  }

  const FiniteFunctionClass* fc_;
  std::size_t n_;
  double eps_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs_;
  std::vector<double> norms_;
  std::vector<IntervalList> good_;
};

inline EluderResult eluder_exact(const FiniteFunctionClass& fc, double eps) {
  if (fc.num_actions() > kExactEluderMaxActions)
    throw SizeError("EXACT eluder dimension supports at most " + std::to_string(kExactEluderMaxActions) +
                    " actions, got " + std::to_string(fc.num_actions()));
  return EluderSearch(fc, eps).run();
}

inline EluderResult eluder_greedy(const FiniteFunctionClass& fc, double eps, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(fc.num_params());
  const std::size_t n = fc.num_actions();
  // Scales tried: eps and every pairwise gap above it (any scale >= eps gives
  // a valid lower bound).
  std::vector<double> scales{eps};
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (std::size_t a = 0; a < n; ++a) {
        const double g = fc.table(i, static_cast<Eigen::Index>(a)) - fc.table(j, static_cast<Eigen::Index>(a));
        if (g >= eps) scales.push_back(g);
      }
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

  EluderResult result;
  result.mode = EluderMode::kGreedy;
  result.eps_prime = eps;
  Rng rng(seed);
  std::vector<ActionId> order(n);
  for (std::size_t r = 0; r < kGreedyRestarts; ++r) {
    std::iota(order.begin(), order.end(), ActionId{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (double c : scales) {
      std::vector<ActionId> seq;
      std::vector<bool> used(n, false);
      bool grew = true;
      while (grew) {
        grew = false;
        for (ActionId a : order) {
          if (used[a] || is_eps_dependent(fc, a, seq, c)) continue;
          seq.push_back(a);
          used[a] = true;
          grew = true;
          break;
        }
      }
      if (seq.size() > result.dimension) {
        result.dimension = seq.size();
        result.eps_prime = c;
        result.witness = seq;
      }
    }
  }
  return result;
}

}  // namespace detail

inline EluderResult eluder_dimension_detail(const FiniteFunctionClass& fc, double eps, EluderMode mode,
                                            std::uint64_t seed = 0) {
  detail::require_nonempty_class(fc);
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eluder scale eps must be finite and >= 0");
  return mode == EluderMode::kExact ? detail::eluder_exact(fc, eps) : detail::eluder_greedy(fc, eps, seed);
}

inline std::size_t eluder_dimension(const FiniteFunctionClass& fc, double eps, EluderMode mode,
                                    std::uint64_t seed = 0) {
  return eluder_dimension_detail(fc, eps, mode, seed).dimension;
}

/// d * B(1/2, alpha0) + 1 with B(x, a) = ((1+x)/x) (e/(e-1)) (ln(1+a) + ln((1+x)/x)), alpha0 = (2 S gamma / eps)^2.
inline double eluder_bound_linear(double d, double param_bound, double gamma, double eps) {
  if (!(d >= 1.0) || !(param_bound > 0.0) || !(gamma > 0.0) || !(eps > 0.0))
    throw ConfigError("eluder_bound_linear needs d >= 1 and positive S, gamma, eps");
  const double e = std::numbers::e;
  const double ratio = 3.0;  // (1 + x) / x at x = 1/2
  const double alpha0 = std::pow(2.0 * param_bound * gamma / eps, 2);
  return d * ratio * (e / (e - 1.0)) * (std::log1p(alpha0) + std::log(ratio)) + 1.0;
}

/// 3 d r^2 e/(e-1) ln{3 r^2 + 3 r^2 (2 S h_hi / eps)^2} + 1.
inline double eluder_bound_glm(double d, double r, double param_bound, double h_hi, double eps) {
  if (!(d >= 1.0) || !(r >= 1.0) || !(param_bound > 0.0) || !(h_hi > 0.0) || !(eps > 0.0))
    throw ConfigError("eluder_bound_glm needs d >= 1, r >= 1 and positive S, h_hi, eps");
  const double e = std::numbers::e;
  const double r2 = r * r;
  return 3.0 * d * r2 * e / (e - 1.0) * std::log(3.0 * r2 + 3.0 * r2 * std::pow(2.0 * param_bound * h_hi / eps, 2)) +
         1.0;
}

// ---------------------------------------------------------------------------
// Covering numbers

inline constexpr std::size_t kExactCoverMaxParams = 20;

struct CoverResult {
  std::size_t size = 0;
  bool exact = true;
  std::vector<ParamId> centers;
};

inline Eigen::MatrixXd sup_distances(const FiniteFunctionClass& fc) {
  const auto m = static_cast<Eigen::Index>(fc.num_params());
  Eigen::MatrixXd dist(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) dist(i, j) = (fc.table.row(i) - fc.table.row(j)).cwiseAbs().maxCoeff();
  return dist;
}

namespace detail {

inline CoverResult greedy_cover(const Eigen::MatrixXd& dist, double alpha) {
  const auto m = static_cast<std::size_t>(dist.rows());
  std::vector<bool> covered(m, false);
  std::size_t remaining = m;
  CoverResult out;
  out.exact = false;
  while (remaining > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t gain = 0;
      for (std::size_t j = 0; j < m; ++j)
        if (!covered[j] && dist(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) <= alpha) ++gain;
      if (gain > best_gain) {
        best = c;
        best_gain = gain;
      }
    }
    out.centers.push_back(best);
    for (std::size_t j = 0; j < m; ++j)
      if (!covered[j] && dist(static_cast<Eigen::Index>(best), static_cast<Eigen::Index>(j)) <= alpha) {
        covered[j] = true;
        --remaining;
      }
  }
  out.size = out.centers.size();
  return out;
}

class ExactCover {
 public:
  ExactCover(const Eigen::MatrixXd& dist, double alpha) : m_(static_cast<std::size_t>(dist.rows())) {
    balls_.assign(m_, 0);
    for (std::size_t c = 0; c < m_; ++c)
      for (std::size_t j = 0; j < m_; ++j)
        if (dist(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) <= alpha) balls_[c] |= 1U << j;
  }

  std::vector<ParamId> solve(std::vector<ParamId> incumbent) {
    best_ = std::move(incumbent);
    std::vector<ParamId> chosen;
    search(0, chosen);
    return best_;
  }

 private:
  void search(std::uint32_t covered, std::vector<ParamId>& chosen) {
    const std::uint32_t all = m_ == 32 ? ~0U : ((1U << m_) - 1U);
    if (covered == all) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    if (chosen.size() + 1 >= best_.size()) return;
    // Branch on the balls that cover the lowest uncovered point.
    const auto target = static_cast<std::size_t>(std::countr_zero(~covered & all));
    for (std::size_t c = 0; c < m_; ++c) {
      if (!((balls_[c] >> target) & 1U)) continue;
      chosen.push_back(c);
      search(covered | balls_[c], chosen);
      chosen.pop_back();
    }
  }

  std::size_t m_;
  std::vector<std::uint32_t> balls_;
  std::vector<ParamId> best_;
};

}  // namespace detail

/// Smallest set of class members whose closed sup-norm alpha-balls cover the
/// class. Exact for at most 20 parameters; greedy (flagged inexact) above.
inline CoverResult covering_number_detail(const FiniteFunctionClass& fc, double alpha) {
  detail::require_nonempty_class(fc);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("covering scale alpha must be finite and >= 0");
  const Eigen::MatrixXd dist = sup_distances(fc);
  CoverResult greedy = detail::greedy_cover(dist, alpha);
  if (fc.num_params() > kExactCoverMaxParams) return greedy;
  detail::ExactCover solver(dist, alpha);
  CoverResult out;
  out.centers = solver.solve(greedy.centers);
  std::sort(out.centers.begin(), out.centers.end());
  out.size = out.centers.size();
  out.exact = true;
  return out;
}

inline std::size_t covering_number(const FiniteFunctionClass& fc, double alpha) {
  return covering_number_detail(fc, alpha).size;
}

inline std::size_t covering_number_greedy(const FiniteFunctionClass& fc, double alpha) {
  detail::require_nonempty_class(fc);
  return detail::greedy_cover(sup_distances(fc), alpha).size;
}

struct KolmogorovEstimate {
  double slope = 0.0;
  std::vector<std::pair<double, std::size_t>> points;  // (alpha, N)
  // For a finite class log N stays bounded, so the lim sup is 0 and the
  // slope only describes the scales on the grid.
  bool finite_class_caveat = true;
};

/// Least-squares slope of log N against log(1/alpha).
inline double fit_log_log_slope(const std::vector<std::pair<double, std::size_t>>& points) {
  if (points.size() < 2) throw ConfigError("Kolmogorov estimate needs at least two scales");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [alpha, count] : points) {
    if (!(alpha > 0.0)) throw ConfigError("Kolmogorov scales must be positive");
    const double x = std::log(1.0 / alpha);
    const double y = std::log(static_cast<double>(count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(points.size());
  const double denom = k * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw ConfigError("Kolmogorov scales must not all be equal");
  return (k * sxy - sx * sy) / denom;
}

inline KolmogorovEstimate kolmogorov_estimate(const FiniteFunctionClass& fc, const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw ConfigError("Kolmogorov estimate needs a nonempty alpha grid");
  KolmogorovEstimate est;
  for (double alpha : alpha_grid) est.points.emplace_back(alpha, covering_number(fc, alpha));
  est.slope = fit_log_log_slope(est.points);
  return est;
}

// ---------------------------------------------------------------------------
// VC independence, VC dimension, strong dependence

inline constexpr std::size_t kVcMaxActions = 16;

namespace detail {

inline std::vector<double> restrict_row(const FiniteFunctionClass& fc, Eigen::Index rho,
                                        std::span<const ActionId> subset) {
  std::vector<double> out;
  out.reserve(subset.size());
  for (ActionId a : subset) out.push_back(fc.table(rho, static_cast<Eigen::Index>(a)));
  return out;
}

inline void check_ids(const FiniteFunctionClass& fc, ActionId a, std::span<const ActionId> subset) {
  detail::require_nonempty_class(fc);
  if (a >= fc.num_actions()) throw LookupError("unknown action id " + std::to_string(a));
  for (ActionId b : subset)
    if (b >= fc.num_actions()) throw LookupError("unknown action id " + std::to_string(b));
}

}  // namespace detail

/// For all f, f~ there is f- with f-(a) = f(a) and f- = f~ on the subset.
inline bool vc_independent(const FiniteFunctionClass& fc, ActionId a, std::span<const ActionId> subset) {
  detail::check_ids(fc, a, subset);
  const auto m = static_cast<Eigen::Index>(fc.num_params());
  const auto col = static_cast<Eigen::Index>(a);
  std::set<double> values;
  std::set<std::vector<double>> patterns;
  std::set<std::pair<double, std::vector<double>>> joint;
  for (Eigen::Index r = 0; r < m; ++r) {
    auto pat = detail::restrict_row(fc, r, subset);
    values.insert(fc.table(r, col));
    joint.emplace(fc.table(r, col), pat);
    patterns.insert(std::move(pat));
  }
  return joint.size() == values.size() * patterns.size();
}

/// Any two functions agreeing on the subset agree at a.
inline bool strongly_dependent(const FiniteFunctionClass& fc, ActionId a, std::span<const ActionId> subset) {
  detail::check_ids(fc, a, subset);
  const auto m = static_cast<Eigen::Index>(fc.num_params());
  const auto col = static_cast<Eigen::Index>(a);
  std::map<std::vector<double>, double> seen;
  for (Eigen::Index r = 0; r < m; ++r) {
    auto [it, inserted] = seen.emplace(detail::restrict_row(fc, r, subset), fc.table(r, col));
    if (!inserted && it->second != fc.table(r, col)) return false;
  }
  return true;
}

/// Largest subset in which every action is VC-independent of the others.
inline std::size_t vc_dimension(const FiniteFunctionClass& fc) {
  detail::require_nonempty_class(fc);
  if (!fc.is_binary()) throw TypeError("vc_dimension needs a binary-valued class");
  const std::size_t n = fc.num_actions();
  if (n > kVcMaxActions)
    throw SizeError("vc_dimension supports at most " + std::to_string(kVcMaxActions) + " actions");
  std::size_t best = 0;
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<ActionId> members, others;
  for (std::size_t s = 1; s < subsets; ++s) {
    const auto size = static_cast<std::size_t>(std::popcount(s));
    if (size <= best) continue;
    members.clear();
    for (std::size_t a = 0; a < n; ++a)
      if ((s >> a) & 1U) members.push_back(a);
    bool ok = true;
    for (std::size_t k = 0; k < members.size() && ok; ++k) {
      others.assign(members.begin(), members.end());
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(k));
      ok = vc_independent(fc, members[k], others);
    }
    if (ok) best = size;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Information gain

/// 1/2 sum log(1 + sigma^-2 s_t^2) over posterior variances s_t^2.
inline double information_gain(std::span<const double> posterior_variances, double noise_var) {
  if (!(noise_var > 0.0)) throw ConfigError("noise variance must be positive");
  double total = 0.0;
  for (double v : posterior_variances) {
    if (v < 0.0) throw ConfigError("posterior variances must be >= 0");
    total += std::log1p(v / noise_var);
  }
  return 0.5 * total;
}

/// sigma^2_{t-1}(a_t) along a fixed action sequence (observations do not
/// affect Gaussian posterior variances, so no rewards are needed).
inline std::vector<double> posterior_variance_sequence(const GpModel& gp, std::span<const ActionId> actions) {
  gp.validate();
  const LinearGaussianModel lin = gp.as_linear();
  GaussianPosterior post = GaussianPosterior::from_prior(lin);
  std::vector<double> out;
  out.reserve(actions.size());
  for (ActionId a : actions) {
    const Eigen::VectorXd phi = lin.feature(a);
    out.push_back(std::max(phi.dot(post.cov * phi), 0.0));
    gaussian_update_inplace(post, phi, 0.0, gp.noise_var);
  }
  return out;
}

/// 1/2 log det(I + sigma^-2 K_T) for the kernel submatrix of the selected points.
inline double information_gain_logdet(const GpModel& gp, std::span<const ActionId> actions) {
  const auto t = static_cast<Eigen::Index>(actions.size());
  Eigen::MatrixXd k(t, t);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < t; ++j)
      k(i, j) = gp.kernel(static_cast<Eigen::Index>(actions[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(actions[static_cast<std::size_t>(j)]));
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(t, t) + k / gp.noise_var;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericError("I + K/sigma^2 is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  return l.diagonal().array().log().sum();
}

/// Greedy max-variance selection of T points; a lower estimate of gamma_T.
inline double greedy_information_gain(const GpModel& gp, std::size_t horizon) {
  gp.validate();
  const LinearGaussianModel lin = gp.as_linear();
  GaussianPosterior post = GaussianPosterior::from_prior(lin);
  std::vector<double> vars;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Eigen::VectorXd diag = post.cov.diagonal();
    Eigen::Index best = 0;
    diag.maxCoeff(&best);
    vars.push_back(std::max(diag[best], 0.0));
    gaussian_update_inplace(post, lin.feature(static_cast<ActionId>(best)), 0.0, gp.noise_var);
  }
  return information_gain(vars, gp.noise_var);
}

/// Right side of s^2 <= alpha^-1 log(1 + sigma^-2 s^2) with alpha = 1 + sigma^-2, as printed.
inline double variance_bound_as_printed(double posterior_var, double noise_var) {
  const double inv = 1.0 / noise_var;
  return std::log1p(inv * posterior_var) / (1.0 + inv);
}

/// Right side of the concavity bound s^2 <= log(1 + sigma^-2 s^2) / log(1 + sigma^-2), valid for s^2 <= 1.
inline double variance_bound_concave(double posterior_var, double noise_var) {
  const double inv = 1.0 / noise_var;
  return std::log1p(inv * posterior_var) / std::log1p(inv);
}

struct VarianceBoundCheck {
  std::size_t terms = 0;
  std::size_t printed_failures = 0;   // terms where the printed inequality fails
  std::size_t concave_failures = 0;   // should stay 0 whenever s^2 <= 1
  double worst_printed_ratio = 0.0;   // max s^2 / printed right side
};

inline VarianceBoundCheck check_variance_bounds(std::span<const double> posterior_variances, double noise_var) {
  VarianceBoundCheck out;
  constexpr double kSlack = 1e-12;
  for (double v : posterior_variances) {
    ++out.terms;
    const double printed = variance_bound_as_printed(v, noise_var);
    const double concave = variance_bound_concave(v, noise_var);
    if (v > printed + kSlack) ++out.printed_failures;
    if (v > concave + kSlack) ++out.concave_failures;
    if (printed > 0.0) out.worst_printed_ratio = std::max(out.worst_printed_ratio, v / printed);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report

struct EluderEntry {
  double eps = 0.0;
  std::size_t value = 0;
  EluderMode mode = EluderMode::kExact;
};

struct CoveringEntry {
  double alpha = 0.0;
  std::size_t value = 0;
  bool exact = true;
};

struct LinearBoundParams {
  double d = 1.0;
  double param_bound = 1.0;
  double gamma = 1.0;
};

struct GlmBoundParams {
  double d = 1.0;
  double r = 1.0;
  double param_bound = 1.0;
  double h_hi = 1.0;
};

struct ComplexityRequest {
  std::vector<double> eps_list{0.5};
  std::vector<double> alpha_list{0.0, 0.25, 0.5, 1.0};
  EluderMode mode = EluderMode::kExact;
  std::uint64_t seed = 0;
  std::optional<LinearBoundParams> linear;
  std::optional<GlmBoundParams> glm;
};

struct ComplexityReport {
  std::size_t num_params = 0;
  std::size_t num_actions = 0;
  std::vector<EluderEntry> eluder;
  std::optional<std::size_t> vc_dim;  // binary classes only
  std::vector<CoveringEntry> covering;
  std::optional<KolmogorovEstimate> kolmogorov;
  // (formula, eps, value)
  std::vector<std::tuple<std::string, double, double>> analytic_bounds;
};

inline ComplexityReport complexity_report(const FiniteFunctionClass& fc, const ComplexityRequest& req) {
  fc.validate();
  ComplexityReport rep;
  rep.num_params = fc.num_params();
  rep.num_actions = fc.num_actions();
  std::vector<double> eps_sorted = req.eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end());
  for (double eps : eps_sorted) {
    rep.eluder.push_back({eps, eluder_dimension(fc, eps, req.mode, req.seed), req.mode});
    rep.analytic_bounds.emplace_back("finite_action_count", eps, static_cast<double>(fc.num_actions()));
    if (eps > 0.0 && req.linear)
      rep.analytic_bounds.emplace_back("linear", eps,
                                       eluder_bound_linear(req.linear->d, req.linear->param_bound, req.linear->gamma, eps));
    if (eps > 0.0 && req.glm)
      rep.analytic_bounds.emplace_back(
          "glm", eps, eluder_bound_glm(req.glm->d, req.glm->r, req.glm->param_bound, req.glm->h_hi, eps));
  }
  if (fc.is_binary() && fc.num_actions() <= kVcMaxActions) rep.vc_dim = vc_dimension(fc);
  std::vector<double> alpha_sorted = req.alpha_list;
  std::sort(alpha_sorted.begin(), alpha_sorted.end());
  std::vector<double> positive;
  for (double alpha : alpha_sorted) {
    const CoverResult c = covering_number_detail(fc, alpha);
    rep.covering.push_back({alpha, c.size, c.exact});
    if (alpha > 0.0) positive.push_back(alpha);
  }
  positive.erase(std::unique(positive.begin(), positive.end()), positive.end());
  if (positive.size() >= 2) rep.kolmogorov = kolmogorov_estimate(fc, positive);
  return rep;
}

}  // namespace banditlab
