#pragma once

// Function classes, environments and histories shared by agents and audits.
// Action and parameter ids are dense indices 0..n-1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "banditlab/errors.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

using ActionId = std::size_t;
using ParamId = std::size_t;
using ActionSet = std::vector<ActionId>;

namespace detail {

inline void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string(what) + " contains non-finite entries");
}

inline void check_probability_vector(const Eigen::VectorXd& p, const char* what) {
  if (p.size() == 0) throw ConfigError(std::string(what) + " is empty");
  if (!p.allFinite() || (p.array() < 0.0).any())
    throw ConfigError(std::string(what) + " has negative or non-finite weights");
  const double total = p.sum();
  if (total <= 0.0) throw ConfigError(std::string(what) + " is degenerate (all-zero weights)");
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError(std::string(what) + " does not sum to 1 (sum = " + std::to_string(total) + ")");
}

inline void check_symmetric_psd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw ConfigError(std::string(what) + " is not square");
  require_finite(m, what);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError(std::string(what) + " is not symmetric");
  if (m.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw ConfigError(std::string(what) + " has a negative eigenvalue " +
                      std::to_string(eig.eigenvalues().minCoeff()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Function classes

/// Explicit reward table f_rho(a) over a finite parameter set with a prior.
struct FiniteFunctionClass {
  Eigen::MatrixXd table;  // rows: parameters, cols: actions
  Eigen::VectorXd prior;
  std::optional<double> reward_bound;  // C, when declared

  std::size_t num_params() const { return static_cast<std::size_t>(table.rows()); }
  std::size_t num_actions() const { return static_cast<std::size_t>(table.cols()); }

  double value(ParamId rho, ActionId a) const {
    if (rho >= num_params()) throw LookupError("unknown parameter id " + std::to_string(rho));
    if (a >= num_actions()) throw LookupError("unknown action id " + std::to_string(a));
    return table(static_cast<Eigen::Index>(rho), static_cast<Eigen::Index>(a));
  }

  void validate() const {
    if (table.rows() == 0 || table.cols() == 0) throw ConfigError("function class table is empty");
    detail::require_finite(table, "function class table");
    if (prior.size() != table.rows())
      throw ConfigError("function class prior length does not match the number of parameters");
    detail::check_probability_vector(prior, "function class prior");
    if (reward_bound) {
      const double c = *reward_bound;
      if (!(c > 0.0)) throw ConfigError("reward bound C must be positive");
      if (table.minCoeff() < 0.0 || table.maxCoeff() > c)
        throw ConfigError("function class table leaves [0, C]");
    }
  }

  bool is_binary() const {
    return (table.array() == 0.0 || table.array() == 1.0).all();
  }
};

/// Linear reward model f_theta(a) = <phi(a), theta> with a Gaussian prior.
struct LinearGaussianModel {
  Eigen::MatrixXd features;  // rows phi(a)
  Eigen::VectorXd prior_mean;
  Eigen::MatrixXd prior_cov;
  double noise_var = 1.0;
  std::optional<double> feature_bound;  // gamma
  std::optional<double> param_bound;    // S

  std::size_t num_actions() const { return static_cast<std::size_t>(features.rows()); }
  Eigen::Index dim() const { return features.cols(); }

  Eigen::VectorXd feature(ActionId a) const {
    if (a >= num_actions()) throw LookupError("unknown action id " + std::to_string(a));
    return features.row(static_cast<Eigen::Index>(a)).transpose();
  }

  /// sup_a ||phi(a)||_2 over the realized feature rows.
  double max_feature_norm() const { return features.rowwise().norm().maxCoeff(); }

  void validate() const {
    if (features.rows() == 0 || features.cols() == 0) throw ConfigError("linear model has no features");
    detail::require_finite(features, "feature matrix");
    if (prior_mean.size() != features.cols()) throw ConfigError("prior mean dimension mismatch");
    detail::require_finite(prior_mean, "prior mean");
    if (prior_cov.rows() != features.cols()) throw ConfigError("prior covariance dimension mismatch");
    detail::check_symmetric_psd(prior_cov, "prior covariance");
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw ConfigError("noise variance must be positive");
  }

  /// True when every feature row is a distinct standard basis vector (independent arms).
  bool has_identity_features() const {
    if (features.rows() != features.cols()) return false;
    return (features - Eigen::MatrixXd::Identity(features.rows(), features.cols())).cwiseAbs().maxCoeff() == 0.0;
  }
};

/// Monotone link g for generalized linear models.
struct Link {
  enum class Kind { kIdentity, kLogistic, kTable };
  Kind kind = Kind::kIdentity;
  std::vector<double> xs;  // kTable: knots, strictly increasing
  std::vector<double> ys;  // kTable: values, strictly increasing

  double operator()(double x) const {
    switch (kind) {
      case Kind::kIdentity: return x;
      case Kind::kLogistic: return 1.0 / (1.0 + std::exp(-x));
      case Kind::kTable: return interpolate(x);
    }
    return x;
  }

  double derivative(double x) const {
    switch (kind) {
      case Kind::kIdentity: return 1.0;
      case Kind::kLogistic: {
        const double g = 1.0 / (1.0 + std::exp(-x));
        return g * (1.0 - g);
      }
      case Kind::kTable: {
        const std::size_t i = segment(x);
        return (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
      }
    }
    return 1.0;
  }

  void validate() const {
    if (kind != Kind::kTable) return;
    if (xs.size() < 2 || xs.size() != ys.size()) throw ConfigError("link table needs >= 2 matching knots");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1]) || !(ys[i] > ys[i - 1]))
        throw ConfigError("link table must be strictly increasing");
  }

 private:
  std::size_t segment(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    return std::min(i, xs.size() - 2);
  }
  // Linear extrapolation beyond the end knots keeps g strictly increasing.
  double interpolate(double x) const {
    const std::size_t i = segment(x);
    const double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + slope * (x - xs[i]);
  }
};

/// f_theta(a) = g(<phi(a), theta>) with theta restricted to a finite grid.
struct GlmSpec {
  Eigen::MatrixXd features;  // rows phi(a)
  Eigen::MatrixXd grid;      // rows: candidate parameters
  Eigen::VectorXd prior;     // over grid rows
  Link link;
  double h_lo = 1.0;
  double h_hi = 1.0;

  std::size_t num_actions() const { return static_cast<std::size_t>(features.rows()); }
  double slope_ratio() const { return h_hi / h_lo; }

  /// The reward table induced on the grid.
  FiniteFunctionClass induced_class() const {
    FiniteFunctionClass fc;
    fc.table = (grid * features.transpose()).unaryExpr([this](double z) { return link(z); });
    fc.prior = prior;
    return fc;
  }

  /// Derives slope bounds from the realized range of <phi(a), rho>.
  void fit_slope_bounds() {
    const Eigen::MatrixXd z = grid * features.transpose();
    h_lo = std::numeric_limits<double>::infinity();
    h_hi = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double s = link.derivative(z(i));
      h_lo = std::min(h_lo, s);
      h_hi = std::max(h_hi, s);
    }
  }

  void validate() const {
    link.validate();
    if (features.rows() == 0 || features.cols() == 0) throw ConfigError("GLM has no features");
    if (grid.cols() != features.cols()) throw ConfigError("GLM grid dimension mismatch");
    if (prior.size() != grid.rows()) throw ConfigError("GLM prior length mismatch");
    detail::check_probability_vector(prior, "GLM prior");
    if (!(h_lo > 0.0) || h_hi < h_lo) throw ConfigError("GLM slope bounds need 0 < h_lo <= h_hi");
    // Strictly increasing on the realized range: sorted inner products map to sorted values.
    const Eigen::MatrixXd z = grid * features.transpose();
    std::vector<double> zs(z.data(), z.data() + z.size());
    std::sort(zs.begin(), zs.end());
    for (std::size_t i = 1; i < zs.size(); ++i)
      if (zs[i] > zs[i - 1] && !(link(zs[i]) > link(zs[i - 1])))
        throw ConfigError("GLM link is not strictly increasing on the realized range");
  }
};

/// Finite-action Gaussian process: f ~ N(mean, kernel).
struct GpModel {
  Eigen::MatrixXd kernel;
  Eigen::VectorXd mean;  // empty means zero
  double noise_var = 1.0;

  std::size_t num_actions() const { return static_cast<std::size_t>(kernel.rows()); }

  Eigen::VectorXd prior_mean() const {
    return mean.size() == 0 ? Eigen::VectorXd::Zero(kernel.rows()) : mean;
  }

  void validate() const {
    if (kernel.rows() == 0) throw ConfigError("GP kernel is empty");
    detail::check_symmetric_psd(kernel, "GP kernel");
    if (kernel.diagonal().maxCoeff() > 1.0 + 1e-12) throw ConfigError("GP kernel diagonal exceeds 1");
    if (mean.size() != 0 && mean.size() != kernel.rows()) throw ConfigError("GP mean length mismatch");
    if (!(noise_var > 0.0)) throw ConfigError("noise variance must be positive");
  }

  /// The same prior as a linear model with indicator features.
  LinearGaussianModel as_linear() const {
    LinearGaussianModel m;
    m.features = Eigen::MatrixXd::Identity(kernel.rows(), kernel.rows());
    m.prior_mean = prior_mean();
    m.prior_cov = kernel;
    m.noise_var = noise_var;
    return m;
  }
};

using Model = std::variant<FiniteFunctionClass, LinearGaussianModel, GlmSpec, GpModel>;

inline std::size_t num_actions(const Model& model) {
  return std::visit([](const auto& m) { return m.num_actions(); }, model);
}

inline void validate(const Model& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

// ---------------------------------------------------------------------------
// Noise and action-set processes

struct NoiseSpec {
  // kBernoulli is not additive: the reward is 1 with probability f_theta(a).
  enum class Kind { kNone, kGaussian, kUniform, kBernoulli };
  Kind kind = Kind::kGaussian;
  double scale = 1.0;  // Gaussian: std; uniform: half-width b; unused for Bernoulli

  static NoiseSpec none() { return {Kind::kNone, 0.0}; }
  static NoiseSpec gaussian(double std_dev) { return {Kind::kGaussian, std_dev}; }
  static NoiseSpec uniform(double half_width) { return {Kind::kUniform, half_width}; }
  static NoiseSpec bernoulli() { return {Kind::kBernoulli, 0.5}; }

  /// Declared sub-Gaussian parameter: std for Gaussian, b for uniform on [-b, b], 1/2 for Bernoulli.
  double sub_gaussian() const {
    switch (kind) {
      case Kind::kNone: return 0.0;
      case Kind::kBernoulli: return 0.5;
      default: return scale;
    }
  }

  double variance() const {
    switch (kind) {
      case Kind::kNone: return 0.0;
      case Kind::kGaussian: return scale * scale;
      case Kind::kUniform: return scale * scale / 3.0;
      case Kind::kBernoulli: return 0.25;  // worst case over means
    }
    return 0.0;
  }

  /// One reward with mean `mean`; consumes exactly one variate so noise
  /// streams stay aligned across agents.
  double reward(double mean, Rng& rng) const {
    switch (kind) {
      case Kind::kNone: return mean;
      case Kind::kGaussian: return mean + scale * rng.normal();
      case Kind::kUniform: return mean + rng.uniform(-scale, scale);
      case Kind::kBernoulli: return rng.uniform() < mean ? 1.0 : 0.0;
    }
    return mean;
  }

  /// Log density of a residual up to a constant shared by all parameters.
  /// Returns -inf for impossible residuals.
  double log_likelihood(double residual) const {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    switch (kind) {
      case Kind::kNone: return std::abs(residual) <= 1e-12 ? 0.0 : kNegInf;
      case Kind::kGaussian: return -residual * residual / (2.0 * scale * scale);
      case Kind::kUniform: return std::abs(residual) <= scale ? 0.0 : kNegInf;
      // reward 1 leaves residual 1 - f, reward 0 leaves -f; both give log(1 - |residual|)
      case Kind::kBernoulli: return std::abs(residual) < 1.0 ? std::log1p(-std::abs(residual)) : kNegInf;
    }
    return kNegInf;
  }

  void validate() const {
    if (kind != Kind::kNone && !(scale > 0.0)) throw ConfigError("noise scale must be positive");
  }
};

struct ActionSetProcess {
  enum class Kind { kFixed, kSubsetIid };
  Kind kind = Kind::kFixed;
  std::size_t k = 0;

  static ActionSetProcess fixed() { return {}; }
  static ActionSetProcess subset_iid(std::size_t k) { return {Kind::kSubsetIid, k}; }

  /// Sorted, nonempty subset of 0..n-1.
  ActionSet draw(std::size_t n, Rng& rng) const {
    ActionSet all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    if (kind == Kind::kFixed || k >= n) return all;
    for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.index(n - i)]);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
  }

  void validate(std::size_t n) const {
    if (kind == Kind::kSubsetIid && (k == 0 || k > n))
      throw ConfigError("subset_iid size must satisfy 1 <= k <= |A|");
  }
};

struct Environment {
  Model model;
  NoiseSpec noise;
  ActionSetProcess action_sets;

  std::size_t num_actions() const { return banditlab::num_actions(model); }

  void validate() const {
    banditlab::validate(model);
    noise.validate();
    action_sets.validate(num_actions());
    if (noise.kind == NoiseSpec::Kind::kBernoulli) {
      const auto* fc = std::get_if<FiniteFunctionClass>(&model);
      if (fc == nullptr) throw ConfigError("Bernoulli rewards need a finite function class");
      if (fc->table.minCoeff() < 0.0 || fc->table.maxCoeff() > 1.0)
        throw ConfigError("Bernoulli rewards need table entries in [0, 1]");
    }
  }
};

// ---------------------------------------------------------------------------
// Truth

/// Realized parameter of one trial together with its mean-reward vector.
struct Truth {
  std::optional<ParamId> param;  // finite / GLM grid index
  Eigen::VectorXd theta;         // linear parameter, or GP function values
  Eigen::VectorXd means;         // f_theta(a) for every action

  double mean(ActionId a) const {
    if (a >= static_cast<std::size_t>(means.size())) throw LookupError("unknown action id " + std::to_string(a));
    return means[static_cast<Eigen::Index>(a)];
  }
};

inline double mean_reward(const FiniteFunctionClass& fc, ParamId rho, ActionId a) { return fc.value(rho, a); }

inline double mean_reward(const LinearGaussianModel& m, const Eigen::VectorXd& theta, ActionId a) {
  return m.feature(a).dot(theta);
}

inline double mean_reward(const GlmSpec& m, const Eigen::VectorXd& theta, ActionId a) {
  if (a >= m.num_actions()) throw LookupError("unknown action id " + std::to_string(a));
  return m.link(m.features.row(static_cast<Eigen::Index>(a)).dot(theta));
}

inline double mean_reward(const Model&, const Truth& truth, ActionId a) { return truth.mean(a); }

/// Draw from N(mean, cov) using a clipped symmetric square root.
inline Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);

inline Truth sample_truth(const Model& model, Rng& rng) {
  struct Visitor {
    Rng& rng;
    Truth operator()(const FiniteFunctionClass& fc) const {
      fc.validate();
      Truth t;
      t.param = rng.categorical(fc.prior);
      t.means = fc.table.row(static_cast<Eigen::Index>(*t.param)).transpose();
      return t;
    }
    Truth operator()(const LinearGaussianModel& m) const {
      Truth t;
      t.theta = sample_gaussian(m.prior_mean, m.prior_cov, rng);
      t.means = m.features * t.theta;
      return t;
    }
    Truth operator()(const GlmSpec& m) const {
      detail::check_probability_vector(m.prior, "GLM prior");
      Truth t;
      t.param = rng.categorical(m.prior);
      t.theta = m.grid.row(static_cast<Eigen::Index>(*t.param)).transpose();
      t.means = (m.features * t.theta).unaryExpr([&m](double z) { return m.link(z); });
      return t;
    }
    Truth operator()(const GpModel& m) const {
      Truth t;
      t.theta = sample_gaussian(m.prior_mean(), m.kernel, rng);
      t.means = t.theta;
      return t;
    }
  };
  return std::visit(Visitor{rng}, model);
}

/// Reward for playing a: f_theta(a) plus noise. The caller records history.
inline double step(const Environment& env, const Truth& truth, ActionId a, Rng& rng) {
  return env.noise.reward(truth.mean(a), rng);
}

// ---------------------------------------------------------------------------
// History

struct HistoryRecord {
  ActionSet available;
  ActionId action;
  double reward;
};

class History {
 public:
  void append(HistoryRecord record) {
    if (!std::binary_search(record.available.begin(), record.available.end(), record.action) &&
        std::find(record.available.begin(), record.available.end(), record.action) == record.available.end())
      throw ContractViolation("recorded action is not in its available set");
    records_.push_back(std::move(record));
  }
  void append(ActionSet available, ActionId action, double reward) {
    append(HistoryRecord{std::move(available), action, reward});
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const HistoryRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  std::vector<ActionId> actions() const {
    std::vector<ActionId> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.action);
    return out;
  }

 private:
  std::vector<HistoryRecord> records_;
};

// ---------------------------------------------------------------------------
// Built-in classes and the class file format

/// f_rho(a) = 1(rho == a) on n actions with a uniform prior.
inline FiniteFunctionClass make_indicator_class(std::size_t n) {
  FiniteFunctionClass fc;
  fc.table = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  fc.prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  fc.reward_bound = 1.0;
  return fc;
}

/// All 2^k binary labelings of k actions.
inline FiniteFunctionClass make_binary_cube(std::size_t k) {
  const std::size_t n = std::size_t{1} << k;
  FiniteFunctionClass fc;
  fc.table.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t a = 0; a < k; ++a)
      fc.table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) = static_cast<double>((r >> a) & 1U);
  fc.prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  fc.reward_bound = 1.0;
  return fc;
}

/// Table entries iid uniform on [lo, hi], uniform prior.
inline FiniteFunctionClass make_random_class(std::size_t params, std::size_t actions, double lo, double hi,
                                             Rng& rng) {
  FiniteFunctionClass fc;
  fc.table.resize(static_cast<Eigen::Index>(params), static_cast<Eigen::Index>(actions));
  for (Eigen::Index r = 0; r < fc.table.rows(); ++r)
    for (Eigen::Index a = 0; a < fc.table.cols(); ++a) fc.table(r, a) = rng.uniform(lo, hi);
  fc.prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(params), 1.0 / static_cast<double>(params));
  if (lo >= 0.0) fc.reward_bound = std::max(hi, 1e-12);
  return fc;
}

/// Reads the whitespace-separated class format:
///   n_params n_actions C        (C may be "-" when undeclared)
///   prior[0] ... prior[n_params-1]
///   table row-major, n_params rows of n_actions values
/// Lines starting with '#' are comments. The prior is renormalized when it
/// sums to a positive value within 1e-9 of 1, to absorb decimal rounding.
inline FiniteFunctionClass read_function_class(std::istream& in) {
  std::string content, line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    content += line;
    content += '\n';
  }
  std::istringstream tokens(content);
  auto next = [&tokens](const char* what) {
    std::string tok;
    if (!(tokens >> tok)) throw ConfigError(std::string("class file truncated while reading ") + what);
    return tok;
  };
  auto to_number = [](const std::string& tok, const char* what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("class file: bad number '") + tok + "' in " + what);
    }
  };
  const double np = to_number(next("header"), "header");
  const double na = to_number(next("header"), "header");
  if (np < 1 || na < 1 || np != std::floor(np) || na != std::floor(na))
    throw ConfigError("class file header needs positive integer sizes");
  const std::string c_tok = next("header");
  FiniteFunctionClass fc;
  if (c_tok != "-") fc.reward_bound = to_number(c_tok, "header");
  const auto rows = static_cast<Eigen::Index>(np);
  const auto cols = static_cast<Eigen::Index>(na);
  fc.prior.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) fc.prior[i] = to_number(next("prior"), "prior");
  fc.table.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index a = 0; a < cols; ++a) fc.table(r, a) = to_number(next("table"), "table");
  std::string extra;
  if (tokens >> extra) throw ConfigError("class file has trailing data: '" + extra + "'");
  const double total = fc.prior.sum();
  if (total > 0.0 && std::abs(total - 1.0) <= 1e-9) fc.prior /= total;
  fc.validate();
  return fc;
}

inline FiniteFunctionClass load_function_class(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open class file '" + path + "'");
  return read_function_class(in);
}

inline void write_function_class(std::ostream& out, const FiniteFunctionClass& fc) {
  out.precision(17);
  out << fc.num_params() << ' ' << fc.num_actions() << ' ';
  if (fc.reward_bound) out << *fc.reward_bound; else out << '-';
  out << '\n';
  for (Eigen::Index i = 0; i < fc.prior.size(); ++i) out << (i ? " " : "") << fc.prior[i];
  out << '\n';
  for (Eigen::Index r = 0; r < fc.table.rows(); ++r) {
    for (Eigen::Index a = 0; a < fc.table.cols(); ++a) out << (a ? " " : "") << fc.table(r, a);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

inline Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng) {
  const Eigen::Index d = mean.size();
  if (cov.rows() != d || cov.cols() != d) throw NumericError("covariance dimension mismatch");
  if (!cov.allFinite() || !mean.allFinite()) throw NumericError("non-finite Gaussian parameters");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  Eigen::VectorXd values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (values[i] < -1e-10) {
      std::ostringstream msg;
      msg << "covariance is indefinite: eigenvalue " << values[i] << " at index " << i
          << ", diagonal min " << cov.diagonal().minCoeff() << ", asymmetry "
          << (cov - cov.transpose()).cwiseAbs().maxCoeff();
      throw NumericError(msg.str());
    }
    values[i] = std::sqrt(std::max(values[i], 0.0));
  }
  const Eigen::VectorXd z = rng.normal_vector(d);
  return mean + eig.eigenvectors() * values.cwiseProduct(eig.eigenvectors().transpose() * z);
}

}  // namespace banditlab
