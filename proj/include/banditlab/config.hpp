#pragma once

// Experiment configuration files (JSON). The schema is strict: every object
// rejects keys it does not know, numbers are range-checked while parsing, and
// syntax errors are reported with line and column. See README.md for the
// full schema.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "banditlab/agents.hpp"
#include "banditlab/audits.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/io.hpp"
#include "banditlab/model.hpp"

namespace banditlab {

using Json = nlohmann::json;

namespace config_detail {

/// Converts a byte offset into "line L, column C" (both 1-based).
inline std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

/// Reads one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_ + " must be an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError("missing key '" + key + "' in " + path_);
    return j_.at(key);
  }

  Section object(const std::string& key) { return Section(raw(key), sub(key)); }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) return need(key, fallback);
    const Json& v = raw(key);
    if (!v.is_string()) throw ConfigError(sub(key) + " must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) {
    if (!has(key)) return need(key, fallback);
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(sub(key) + " must be true or false");
    return v.get<bool>();
  }

  double number(const std::string& key, std::optional<double> fallback, double lo, double hi,
                bool lo_open = false) {
    if (!has(key)) return need(key, fallback);
    return to_number(raw(key), sub(key), lo, hi, lo_open);
  }

  std::uint64_t integer(const std::string& key, std::optional<std::uint64_t> fallback, std::uint64_t lo,
                        std::uint64_t hi = std::numeric_limits<std::uint64_t>::max()) {
    if (!has(key)) return need(key, fallback);
    return to_integer(raw(key), sub(key), lo, hi);
  }

  std::vector<double> numbers(const std::string& key, double lo, double hi, bool lo_open = false) {
    const Json& v = raw(key);
    if (!v.is_array()) throw ConfigError(sub(key) + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(to_number(v[i], sub(key) + "[" + std::to_string(i) + "]", lo, hi, lo_open));
    return out;
  }

  std::vector<std::uint64_t> integers(const std::string& key, std::uint64_t lo, std::uint64_t hi) {
    const Json& v = raw(key);
    if (!v.is_array()) throw ConfigError(sub(key) + " must be an array of integers");
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(to_integer(v[i], sub(key) + "[" + std::to_string(i) + "]", lo, hi));
    return out;
  }

  Eigen::VectorXd vector(const std::string& key) {
    const auto xs = numbers(key, -std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
    return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  }

  Eigen::MatrixXd matrix(const std::string& key) {
    const Json& v = raw(key);
    const std::string p = sub(key);
    if (!v.is_array() || v.empty()) throw ConfigError(p + " must be a nonempty array of rows");
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    if (cols == 0) throw ConfigError(p + " rows must be nonempty arrays");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (!v[r].is_array() || v[r].size() != cols) throw ConfigError(p + " rows must all have length " + std::to_string(cols));
      for (std::size_t c = 0; c < cols; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            to_number(v[r][c], p + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                      -std::numeric_limits<double>::max(), std::numeric_limits<double>::max(), false);
    }
    return m;
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + path_);
  }

 private:
  std::string sub(const std::string& key) const { return path_ + "." + key; }

  template <class T>
  T need(const std::string& key, const std::optional<T>& fallback) {
    used_.insert(key);
    if (!fallback) throw ConfigError("missing key '" + key + "' in " + path_);
    return *fallback;
  }

  static double to_number(const Json& v, const std::string& p, double lo, double hi, bool lo_open) {
    if (!v.is_number()) throw ConfigError(p + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo))
      throw ConfigError(p + " = " + fmt_double(x) + " is outside " + (lo_open ? "(" : "[") + fmt_double(lo) + ", " +
                        fmt_double(hi) + "]");
    return x;
  }

  static std::uint64_t to_integer(const Json& v, const std::string& p, std::uint64_t lo, std::uint64_t hi) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      throw ConfigError(p + " must be a nonnegative integer");
    const auto x = v.get<std::uint64_t>();
    if (x < lo || x > hi)
      throw ConfigError(p + " = " + std::to_string(x) + " is outside [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    return x;
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline constexpr double kBig = std::numeric_limits<double>::max();

}  // namespace config_detail

inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(source + ": " + config_detail::position(text, byte) + ": " + what);
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct OutputOptions {
  std::string dir = "out";
  bool trace = true;
  bool curves = true;
};

struct AuditSettings {
  std::optional<DecompositionParams> decomposition;
  std::optional<CoverageArmParams> coverage_arm;
  std::optional<CoverageLsParams> coverage_ls;
  std::optional<WidthCountParams> width_count;
  std::optional<GpTailParams> gp_tail;
  std::optional<BoundsParams> bounds;
  std::set<std::string> enabled_names;  // run after `simulate`
};

struct CliConfig {
  std::optional<ExperimentConfig> experiment;  // present when model, agents and run all are
  AuditSettings audits;
  OutputOptions output;
  Json document;             // as parsed, after command-line overrides
  std::string extra_inputs;  // contents of referenced files, folded into the hash
  bool features_redrawn = true;

  std::string config_hash() const { return hex64(fnv1a64(extra_inputs, fnv1a64(document.dump()))); }
};

namespace config_detail {

inline NoiseSpec parse_noise(Section s) {
  const std::string kind = s.string("kind");
  NoiseSpec out;
  if (kind == "gaussian") {
    out = NoiseSpec::gaussian(s.number("std", 1.0, 0.0, kBig, true));
  } else if (kind == "uniform") {
    out = NoiseSpec::uniform(s.number("half_width", std::nullopt, 0.0, kBig, true));
  } else if (kind == "bernoulli") {
    out = NoiseSpec::bernoulli();
  } else if (kind == "none") {
    out = NoiseSpec::none();
  } else {
    throw ConfigError(s.path() + ".kind must be gaussian, uniform, bernoulli or none (got '" + kind + "')");
  }
  s.finish();
  return out;
}

inline ActionSetProcess parse_action_sets(Section s) {
  const std::string kind = s.string("kind");
  ActionSetProcess out;
  if (kind == "fixed") {
    out = ActionSetProcess::fixed();
  } else if (kind == "subset_iid") {
    out = ActionSetProcess::subset_iid(s.integer("k", std::nullopt, 1));
  } else {
    throw ConfigError(s.path() + ".kind must be fixed or subset_iid (got '" + kind + "')");
  }
  s.finish();
  return out;
}

/// Reads a finite class from one of: class_file, table (+ prior, reward_bound), builtin.
inline FiniteFunctionClass parse_finite_class(Section& s, const std::filesystem::path& base_dir,
                                              std::string& extra_inputs) {
  const int sources = int(s.has("class_file")) + int(s.has("table")) + int(s.has("builtin"));
  if (sources != 1) throw ConfigError(s.path() + " needs exactly one of class_file, table, builtin");
  FiniteFunctionClass fc;
  if (s.has("class_file")) {
    std::filesystem::path p = s.string("class_file");
    if (p.is_relative()) p = base_dir / p;
    const std::string text = read_text_file(p);
    extra_inputs += text;
    std::istringstream in(text);
    fc = read_function_class(in);
  } else if (s.has("table")) {
    fc.table = s.matrix("table");
    fc.prior = s.has("prior") ? s.vector("prior")
                              : Eigen::VectorXd::Constant(fc.table.rows(), 1.0 / static_cast<double>(fc.table.rows()));
    if (s.has("reward_bound")) fc.reward_bound = s.number("reward_bound", std::nullopt, 0.0, kBig, true);
  } else {
    Section b = s.object("builtin");
    const std::string name = b.string("name");
    if (name == "indicator") {
      fc = make_indicator_class(b.integer("n", std::nullopt, 1, 4096));
    } else if (name == "binary_cube") {
      fc = make_binary_cube(b.integer("k", std::nullopt, 1, 16));
    } else if (name == "random") {
      const auto params = b.integer("params", std::nullopt, 1, 100000);
      const auto actions = b.integer("actions", std::nullopt, 1, 100000);
      const double lo = b.number("low", 0.0, -kBig, kBig);
      const double hi = b.number("high", 1.0, -kBig, kBig);
      if (!(lo < hi)) throw ConfigError(b.path() + " needs low < high");
      Rng rng(b.integer("seed", 0, 0));
      fc = make_random_class(params, actions, lo, hi, rng);
    } else {
      throw ConfigError(b.path() + ".name must be indicator, binary_cube or random (got '" + name + "')");
    }
    b.finish();
  }
  fc.validate();
  return fc;
}

inline Eigen::VectorXd vector_or_scalar(Section& s, const std::string& key, Eigen::Index dim, double fallback) {
  if (!s.has(key)) return Eigen::VectorXd::Constant(dim, fallback);
  const Json& v = s.raw(key);
  if (v.is_number()) return Eigen::VectorXd::Constant(dim, v.get<double>());
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim)
    throw ConfigError(s.path() + "." + key + " must be a number or an array of length " + std::to_string(dim));
  Eigen::VectorXd out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) throw ConfigError(s.path() + "." + key + " entries must be numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

inline Eigen::MatrixXd matrix_or_scale(Section& s, const std::string& key, Eigen::Index dim, double fallback) {
  if (!s.has(key)) return fallback * Eigen::MatrixXd::Identity(dim, dim);
  if (s.raw(key).is_number()) {
    const double v = s.number(key, std::nullopt, 0.0, kBig);
    return v * Eigen::MatrixXd::Identity(dim, dim);
  }
  Eigen::MatrixXd m = s.matrix(key);
  if (m.rows() != dim || m.cols() != dim)
    throw ConfigError(s.path() + "." + key + " must be " + std::to_string(dim) + "x" + std::to_string(dim));
  return m;
}

inline ModelSpec parse_model(Section s, const std::filesystem::path& base_dir, std::string& extra_inputs,
                             bool& features_redrawn) {
  const std::string kind = s.string("kind");
  ModelSpec spec;
  double default_noise_std = 1.0;
  if (kind == "finite") {
    spec.base = parse_finite_class(s, base_dir, extra_inputs);
  } else if (kind == "linear") {
    LinearGaussianModel lin;
    Eigen::Index dim = 0;
    if (s.has("features") == s.has("feature_generator"))
      throw ConfigError(s.path() + " needs exactly one of features, feature_generator");
    if (s.has("features")) {
      lin.features = s.matrix("features");
      dim = lin.features.cols();
    } else {
      Section g = s.object("feature_generator");
      FeatureSpec fs;
      fs.num_actions = g.integer("num_actions", std::nullopt, 1, 1000000);
      fs.dim = static_cast<Eigen::Index>(g.integer("dim", std::nullopt, 1, 10000));
      fs.low = g.number("low", std::nullopt, -kBig, kBig);
      fs.high = g.number("high", std::nullopt, -kBig, kBig);
      const std::string mode = g.string("mode", "redrawn");
      if (mode != "redrawn" && mode != "fixed") throw ConfigError(g.path() + ".mode must be redrawn or fixed");
      fs.redrawn = mode == "redrawn";
      features_redrawn = fs.redrawn;
      g.finish();
      fs.validate();
      dim = fs.dim;
      lin.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fs.num_actions), dim);
      spec.features = fs;
    }
    lin.prior_mean = vector_or_scalar(s, "prior_mean", dim, 0.0);
    lin.prior_cov = matrix_or_scale(s, "prior_cov", dim, 1.0);
    lin.noise_var = s.number("noise_var", 1.0, 0.0, kBig, true);
    if (s.has("param_bound")) lin.param_bound = s.number("param_bound", std::nullopt, 0.0, kBig, true);
    if (s.has("feature_bound")) lin.feature_bound = s.number("feature_bound", std::nullopt, 0.0, kBig, true);
    default_noise_std = std::sqrt(lin.noise_var);
    spec.base = lin;
  } else if (kind == "glm") {
    GlmSpec glm;
    glm.features = s.matrix("features");
    glm.grid = s.matrix("grid");
    glm.prior = s.has("prior") ? s.vector("prior")
                               : Eigen::VectorXd::Constant(glm.grid.rows(), 1.0 / static_cast<double>(glm.grid.rows()));
    if (s.has("link") && s.raw("link").is_object()) {
      Section l = s.object("link");
      glm.link.kind = Link::Kind::kTable;
      glm.link.xs = l.numbers("knots", -kBig, kBig);
      glm.link.ys = l.numbers("values", -kBig, kBig);
      l.finish();
    } else {
      const std::string link = s.string("link", "identity");
      if (link == "identity") {
        glm.link.kind = Link::Kind::kIdentity;
      } else if (link == "logistic") {
        glm.link.kind = Link::Kind::kLogistic;
      } else {
        throw ConfigError(s.path() + ".link must be identity, logistic or a {knots, values} table");
      }
    }
    glm.link.validate();
    if (s.has("slope_bounds")) {
      const auto b = s.numbers("slope_bounds", 0.0, kBig, true);
      if (b.size() != 2 || b[1] < b[0]) throw ConfigError(s.path() + ".slope_bounds must be [h_lo, h_hi] with h_lo <= h_hi");
      glm.h_lo = b[0];
      glm.h_hi = b[1];
    } else {
      glm.fit_slope_bounds();
    }
    spec.base = glm;
  } else if (kind == "gp") {
    GpModel gp;
    if (s.has("kernel") == s.has("rbf")) throw ConfigError(s.path() + " needs exactly one of kernel, rbf");
    gp.noise_var = s.number("noise_var", 1.0, 0.0, kBig, true);
    if (s.has("kernel")) {
      gp.kernel = s.matrix("kernel");
    } else {
      Section r = s.object("rbf");
      Rng rng(r.integer("seed", 0, 0));
      const auto n = r.integer("num_actions", std::nullopt, 1, 10000);
      const double ls = r.number("lengthscale", std::nullopt, 0.0, kBig, true);
      r.finish();
      gp.kernel = make_rbf_gp(n, ls, gp.noise_var, rng).kernel;
    }
    if (s.has("mean")) gp.mean = s.vector("mean");
    default_noise_std = std::sqrt(gp.noise_var);
    spec.base = gp;
  } else {
    throw ConfigError(s.path() + ".kind must be finite, linear, glm or gp (got '" + kind + "')");
  }
  spec.noise = s.has("noise") ? parse_noise(s.object("noise")) : NoiseSpec::gaussian(default_noise_std);
  if (s.has("action_sets")) spec.action_sets = parse_action_sets(s.object("action_sets"));
  s.finish();
  spec.validate();
  return spec;
}

inline AgentConfig parse_agent(Section s, std::size_t horizon) {
  AgentConfig a;
  const std::string kind = s.string("kind");
  const auto parsed = parse_agent_kind(kind);
  if (!parsed) throw ConfigError(s.path() + ".kind: unknown agent kind '" + kind + "'");
  a.kind = *parsed;
  a.name = s.string("name", std::string(to_string(a.kind)));
  a.horizon = horizon;
  const double default_beta = a.kind == AgentKind::kTunedGaussUcb ? 4.0 : 1.0;
  a.beta = s.number("beta", default_beta, 0.0, kBig);
  a.delta = s.number("delta", 1.0, 0.0, 1.0, true);
  a.lambda_reg = s.number("lambda_reg", 1.0, 0.0, kBig, true);
  if (s.has("forced_actions")) {
    for (auto v : s.integers("forced_actions", 0, std::numeric_limits<std::uint32_t>::max())) a.forced_actions.push_back(v);
  }
  a.paper_literal_log = s.boolean("paper_literal_log", false);
  const std::string radius = s.string("radius", "determinant");
  if (radius == "determinant") {
    a.radius = EllipsoidRadius::kDeterminant;
  } else if (radius == "closed_form") {
    a.radius = EllipsoidRadius::kClosedForm;
  } else {
    throw ConfigError(s.path() + ".radius must be determinant or closed_form");
  }
  if (s.has("norm_bound")) {
    const Json& v = s.raw("norm_bound");
    if (v.is_string()) {
      if (v.get<std::string>() != "realized") throw ConfigError(s.path() + ".norm_bound must be a number or \"realized\"");
    } else {
      a.norm_bound = s.number("norm_bound", std::nullopt, 0.0, kBig);
    }
  }
  if (s.has("beta_grid")) {
    a.beta_grid = s.numbers("beta_grid", 0.0, kBig);
    if (a.beta_grid.empty()) throw ConfigError(s.path() + ".beta_grid must be nonempty");
  }
  a.tuning_trials = s.integer("tuning_trials", 0, 0);
  s.finish();
  a.validate();
  return a;
}

inline std::optional<FiniteFunctionClass> optional_class(Section& s, const std::filesystem::path& base_dir,
                                                         std::string& extra_inputs) {
  if (!s.has("class_file") && !s.has("table") && !s.has("builtin")) return std::nullopt;
  return parse_finite_class(s, base_dir, extra_inputs);
}

inline void parse_audits(Section s, AuditSettings& out, const std::filesystem::path& base_dir,
                         std::string& extra_inputs) {
  const auto& names = audit_names();
  for (const auto& name : names) {
    if (!s.has(name)) continue;
    Section a = s.object(name);
    if (a.boolean("enabled", false)) out.enabled_names.insert(name);
    const auto seed = a.integer("seed", 1, 0);
    if (name == "decomposition") {
      DecompositionParams p;
      p.seed = seed;
      p.num_arms = a.integer("num_arms", p.num_arms, 1, 64);
      p.num_params = a.integer("num_params", p.num_params, 1, 100000);
      p.horizon = a.integer("T", p.horizon, 1);
      p.trials = a.integer("trials", p.trials, 2);
      p.constant = a.number("constant", p.constant, -kBig, kBig);
      p.tolerance_se = a.number("tolerance_se", p.tolerance_se, 0.0, kBig, true);
      if (a.has("noise")) p.noise = parse_noise(a.object("noise"));
      p.function_class = optional_class(a, base_dir, extra_inputs);
      out.decomposition = p;
    } else if (name == "coverage_arm") {
      CoverageArmParams p;
      p.seed = seed;
      p.num_arms = a.integer("num_arms", p.num_arms, 1, 64);
      p.num_params = a.integer("num_params", p.num_params, 1, 100000);
      p.horizon = a.integer("T", p.horizon, 1);
      p.trials = a.integer("trials", p.trials, 1);
      p.tolerance_se = a.number("tolerance_se", p.tolerance_se, 0.0, kBig, true);
      if (a.has("noise")) p.noise = parse_noise(a.object("noise"));
      p.function_class = optional_class(a, base_dir, extra_inputs);
      out.coverage_arm = p;
    } else if (name == "coverage_ls") {
      CoverageLsParams p;
      p.seed = seed;
      p.num_arms = a.integer("num_arms", p.num_arms, 1, 64);
      p.num_params = a.integer("num_params", p.num_params, 1, 100000);
      p.horizon = a.integer("T", p.horizon, 1);
      p.trials = a.integer("trials", p.trials, 1);
      p.delta = a.number("delta", p.delta, 0.0, 0.5, true);
      p.tolerance_se = a.number("tolerance_se", p.tolerance_se, 0.0, kBig, true);
      if (a.has("noise")) p.noise = parse_noise(a.object("noise"));
      p.function_class = optional_class(a, base_dir, extra_inputs);
      out.coverage_ls = p;
    } else if (name == "width_count") {
      WidthCountParams p;
      p.seed = seed;
      p.horizon = a.integer("T", p.horizon, 1);
      p.trials = a.integer("trials", p.trials, 1);
      p.delta = a.number("delta", p.delta, 0.0, 1.0, true);
      if (a.has("eps_grid")) p.eps_grid = a.numbers("eps_grid", 0.0, kBig, true);
      if (a.has("noise")) p.noise = parse_noise(a.object("noise"));
      if (auto fc = optional_class(a, base_dir, extra_inputs)) p.classes.emplace_back("configured", *fc);
      out.width_count = p;
    } else if (name == "gp_tail") {
      GpTailParams p;
      p.seed = seed;
      p.num_actions = a.integer("num_actions", p.num_actions, 1, 10000);
      p.horizon = a.integer("T", p.horizon, 1);
      p.trials = a.integer("trials", p.trials, 2);
      p.noise_var = a.number("noise_var", p.noise_var, 0.0, kBig, true);
      p.lengthscale = a.number("lengthscale", p.lengthscale, 0.0, kBig, true);
      p.tolerance_se = a.number("tolerance_se", p.tolerance_se, 0.0, kBig, true);
      out.gp_tail = p;
    } else if (name == "bounds") {
      BoundsParams p;
      p.seed = seed;
      p.num_arms = a.integer("num_arms", p.num_arms, 1, 10);
      p.num_params = a.integer("num_params", p.num_params, 1, 100000);
      p.horizon = a.integer("T", p.horizon, 1);
      p.trials = a.integer("trials", p.trials, 2);
      if (a.has("t_grid")) {
        p.t_grid.clear();
        for (auto t : a.integers("t_grid", 1, p.horizon)) p.t_grid.push_back(t);
      } else {
        std::erase_if(p.t_grid, [&](std::size_t t) { return t > p.horizon; });
        if (p.t_grid.empty() || p.t_grid.back() != p.horizon) p.t_grid.push_back(p.horizon);
      }
      if (a.has("noise")) p.noise = parse_noise(a.object("noise"));
      p.function_class = optional_class(a, base_dir, extra_inputs);
      out.bounds = p;
    }
    a.finish();
  }
  s.finish();
}

}  // namespace config_detail

/// Parses a config document. `require_experiment` demands the model, agents
/// and run sections (simulate); audits alone may omit them.
inline CliConfig parse_config(Json doc, const std::filesystem::path& base_dir, bool require_experiment) {
  using config_detail::Section;
  CliConfig cfg;
  Section root(doc, "config");
  for (const char* section : {"model", "agents", "run"}) {
    if (require_experiment && !root.has(section))
      throw ConfigError(std::string("missing section '") + section + "' in config");
  }
  const bool has_experiment = root.has("model") || root.has("agents") || root.has("run");
  if (has_experiment) {
    for (const char* section : {"model", "agents", "run"})
      if (!root.has(section)) throw ConfigError(std::string("missing section '") + section + "' in config");
    ExperimentConfig exp;
    {
      Section run = root.object("run");
      exp.horizon = run.integer("T", std::nullopt, 1, 100000000);
      exp.trials = run.integer("trials", std::nullopt, 1, 100000000);
      exp.seed = run.integer("seed", 1, 0);
      exp.tuning_trials = run.integer("tuning_trials", exp.tuning_trials, 1);
      run.finish();
    }
    exp.model = config_detail::parse_model(root.object("model"), base_dir, cfg.extra_inputs, cfg.features_redrawn);
    const Json& agents = root.raw("agents");
    if (!agents.is_array() || agents.empty()) throw ConfigError("config.agents must be a nonempty array");
    for (std::size_t i = 0; i < agents.size(); ++i)
      exp.agents.push_back(
          config_detail::parse_agent(Section(agents[i], "config.agents[" + std::to_string(i) + "]"), exp.horizon));
    std::set<std::string> labels;
    for (const auto& a : exp.agents)
      if (!labels.insert(a.label()).second) throw ConfigError("duplicate agent name '" + a.label() + "'");
    exp.validate();
    cfg.experiment = std::move(exp);
  }
  if (root.has("audits")) config_detail::parse_audits(root.object("audits"), cfg.audits, base_dir, cfg.extra_inputs);
  if (root.has("output")) {
    Section out = root.object("output");
    cfg.output.dir = out.string("dir", cfg.output.dir);
    cfg.output.trace = out.boolean("trace", cfg.output.trace);
    cfg.output.curves = out.boolean("curves", cfg.output.curves);
    out.finish();
  }
  root.finish();
  if (cfg.experiment) cfg.experiment->keep_traces = cfg.output.trace;
  cfg.document = std::move(doc);
  return cfg;
}

inline CliConfig load_config(const std::filesystem::path& path, bool require_experiment) {
  const std::string text = read_text_file(path);
  return parse_config(parse_json_text(text, path.string()), path.parent_path(), require_experiment);
}

}  // namespace banditlab
