#pragma once

// Reference implementations used only by tests. They are written directly
// from the definitions, share no code with the library beyond its plain data
// types, and trade speed for obviousness.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include "banditlab/model.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Bayes by quadrature on a regular grid (d = 1 or 2)

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct Observation {
  Eigen::VectorXd phi;
  double reward;
};

inline Moments grid_posterior(const Eigen::VectorXd& mu0, const Eigen::MatrixXd& sigma0,
                              const std::vector<Observation>& obs, double noise_var, int points_per_axis,
                              double half_width_sd = 8.0) {
  const Eigen::Index d = mu0.size();
  const Eigen::MatrixXd prec0 = sigma0.inverse();
  std::vector<double> lo(d), step(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double sd = std::sqrt(sigma0(i, i));
    lo[i] = mu0[i] - half_width_sd * sd;
    step[i] = 2.0 * half_width_sd * sd / (points_per_axis - 1);
  }
  const long total = d == 1 ? points_per_axis : long(points_per_axis) * points_per_axis;
  std::vector<double> logw(total);
  std::vector<Eigen::VectorXd> nodes(total);
  double top = -std::numeric_limits<double>::infinity();
  for (long k = 0; k < total; ++k) {
    Eigen::VectorXd th(d);
    th[0] = lo[0] + step[0] * double(k % points_per_axis);
    if (d == 2) th[1] = lo[1] + step[1] * double(k / points_per_axis);
    const Eigen::VectorXd dev = th - mu0;
    double lw = -0.5 * dev.dot(prec0 * dev);
    for (const auto& o : obs) {
      const double r = o.reward - o.phi.dot(th);
      lw -= r * r / (2.0 * noise_var);
    }
    logw[k] = lw;
    nodes[k] = th;
    top = std::max(top, lw);
  }
  double z = 0.0;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
  for (long k = 0; k < total; ++k) {
    logw[k] = std::exp(logw[k] - top);
    z += logw[k];
    m += logw[k] * nodes[k];
  }
  m /= z;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
  for (long k = 0; k < total; ++k) {
    const Eigen::VectorXd dev = nodes[k] - m;
    c += logw[k] * dev * dev.transpose();
  }
  c /= z;
  return {m, c};
}

// ---------------------------------------------------------------------------
// Eluder dimension by exhaustive search over action sequences

/// Half-open intervals [lo, hi).
using Intervals = std::vector<std::pair<double, double>>;

inline Intervals intersect(const Intervals& a, const Intervals& b) {
  Intervals out;
  for (const auto& [alo, ahi] : a)
    for (const auto& [blo, bhi] : b) {
      const double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
      if (lo < hi) out.emplace_back(lo, hi);
    }
  return out;
}

/// All eps' >= 0 at which `a` is eps'-independent of `prefix`:
/// some ordered pair has prefix distance <= eps' < gap at a.
inline Intervals independence_scales(const banditlab::FiniteFunctionClass& fc, const std::vector<std::size_t>& prefix,
                                     std::size_t a) {
  Intervals out;
  const auto n = fc.table.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t b : prefix) {
        const double diff = fc.table(i, Eigen::Index(b)) - fc.table(j, Eigen::Index(b));
        sq += diff * diff;
      }
      const double norm = std::sqrt(sq);
      const double gap = fc.table(i, Eigen::Index(a)) - fc.table(j, Eigen::Index(a));
      if (norm < gap) out.emplace_back(norm, gap);
    }
  return out;
}

inline void eluder_dfs(const banditlab::FiniteFunctionClass& fc, std::vector<std::size_t>& seq, const Intervals& feasible,
                       std::size_t& best) {
  best = std::max(best, seq.size());
  const std::size_t na = fc.num_actions();
  for (std::size_t a = 0; a < na; ++a) {
    const Intervals next = intersect(feasible, independence_scales(fc, seq, a));
    if (next.empty()) continue;
    seq.push_back(a);
    eluder_dfs(fc, seq, next, best);
    seq.pop_back();
  }
}

inline std::size_t eluder_dimension(const banditlab::FiniteFunctionClass& fc, double eps) {
  std::vector<std::size_t> seq;
  std::size_t best = 0;
  eluder_dfs(fc, seq, {{eps, std::numeric_limits<double>::infinity()}}, best);
  return best;
}

/// Literal dependence predicate: every ordered pair close on the subsequence is close at a.
inline bool is_dependent(const banditlab::FiniteFunctionClass& fc, std::size_t a, const std::vector<std::size_t>& subseq,
                         double eps) {
  const auto n = fc.table.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t b : subseq) sq += std::pow(fc.table(i, Eigen::Index(b)) - fc.table(j, Eigen::Index(b)), 2);
      if (std::sqrt(sq) <= eps && fc.table(i, Eigen::Index(a)) - fc.table(j, Eigen::Index(a)) > eps) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Information gain through the determinant

inline double half_log_det_gain(const Eigen::MatrixXd& kernel, const std::vector<std::size_t>& picks,
                                double noise_var) {
  const auto n = Eigen::Index(picks.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = kernel(Eigen::Index(picks[i]), Eigen::Index(picks[j]));
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + k / noise_var;
  return 0.5 * std::log(m.determinant());
}

// ---------------------------------------------------------------------------
// Probability each arm is optimal under a discrete posterior

inline Eigen::VectorXd optimal_arm_distribution(const banditlab::FiniteFunctionClass& fc, const Eigen::VectorXd& weights) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(fc.table.cols());
  for (Eigen::Index r = 0; r < fc.table.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < fc.table.cols(); ++a)
      if (fc.table(r, a) > fc.table(r, best)) best = a;
    p[best] += weights[r];
  }
  return p;
}

}  // namespace oracle
