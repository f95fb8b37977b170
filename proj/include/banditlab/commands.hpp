#pragma once

// The four CLI subcommands as library functions, so tests can drive them
// without spawning processes. Each returns the process exit code; config and
// usage problems are thrown as ConfigError / SizeError / TypeError and mapped
// to exit code 2 by the executable.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "banditlab/audits.hpp"
#include "banditlab/complexity.hpp"
#include "banditlab/config.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/io.hpp"

namespace banditlab {

namespace fs = std::filesystem;
using OrderedJson = nlohmann::ordered_json;

struct CommonOptions {
  std::optional<fs::path> config;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;
  std::optional<std::size_t> threads;
  std::ostream* log = &std::cout;
};

namespace command_detail {

inline fs::path output_dir(const CommonOptions& opts, const std::string& fallback) {
  return opts.out ? *opts.out : fs::path(fallback);
}

inline Json read_document(const fs::path& path) { return parse_json_text(read_text_file(path), path.string()); }

inline fs::path base_dir(const CommonOptions& opts) {
  return opts.config ? opts.config->parent_path() : fs::current_path();
}

inline void write_summary(const fs::path& dir, const Manifest& m, const std::vector<RegretSummary>& runs) {
  CsvWriter csv(dir / "summary.csv", m, "agent,mean_cum_regret,std_err,trials,T,seed");
  for (const auto& s : runs) csv.row(s.agent, s.mean_cum_regret, s.std_err, s.trials, s.horizon, s.seed);
  csv.close();
}

inline void write_curves(const fs::path& dir, const Manifest& m, const std::vector<RegretSummary>& runs) {
  CsvWriter csv(dir / "curves.csv", m, "agent,t,mean_inst_regret,std_err");
  for (const auto& s : runs)
    for (std::size_t t = 0; t < s.period_mean.size(); ++t) csv.row(s.agent, t + 1, s.period_mean[t], s.period_se[t]);
  csv.close();
}

inline void write_trace(const fs::path& dir, const Manifest& m, const std::vector<RegretSummary>& runs) {
  CsvWriter csv(dir / "trace.csv", m, "agent,trial,t,action,reward,inst_regret");
  for (const auto& s : runs)
    for (std::size_t trial = 0; trial < s.traces.size(); ++trial) {
      const TrialTrace& tr = s.traces[trial];
      for (std::size_t t = 0; t < tr.actions.size(); ++t)
        csv.row(s.agent, trial, t + 1, tr.actions[t], tr.rewards[t], tr.inst_regret[t]);
    }
  csv.close();
}

inline OrderedJson agent_json(const RegretSummary& s) {
  OrderedJson j{{"agent", s.agent}, {"kind", to_string(s.kind)}, {"mean_cum_regret", s.mean_cum_regret},
                {"std_err", s.std_err}, {"trials", s.trials}, {"T", s.horizon}};
  if (s.tuned_beta) {
    j["tuned_beta"] = *s.tuned_beta;
    OrderedJson table = OrderedJson::array();
    for (const auto& [beta, regret] : s.tuning_table) table.push_back({{"beta", beta}, {"mean_cum_regret", regret}});
    j["tuning"] = table;
  }
  return j;
}

inline AuditRecord run_audit(const std::string& name, const AuditSettings& settings, std::size_t threads) {
  auto with_threads = [&](auto params) {
    params.threads = threads;
    return params;
  };
  if (name == "decomposition")
    return decomposition_audit(with_threads(settings.decomposition.value_or(DecompositionParams{})));
  if (name == "coverage_arm") return coverage_arm_audit(with_threads(settings.coverage_arm.value_or(CoverageArmParams{})));
  if (name == "coverage_ls") return coverage_ls_audit(with_threads(settings.coverage_ls.value_or(CoverageLsParams{})));
  if (name == "width_count") return width_count_audit(with_threads(settings.width_count.value_or(WidthCountParams{})));
  if (name == "gp_tail") return gp_tail_audit(with_threads(settings.gp_tail.value_or(GpTailParams{})));
  if (name == "bounds") return bounds_audit(with_threads(settings.bounds.value_or(BoundsParams{})));
  throw ConfigError("unknown audit '" + name + "'");
}

inline bool known_audit(const std::string& name) {
  const auto& names = audit_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

inline std::string audit_list() {
  std::string out;
  for (const auto& n : audit_names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

inline void report_audit(std::ostream& log, const std::string& name, const AuditRecord& rec) {
  log << "audit " << name << ": " << (rec.passed ? "PASS" : "FAIL") << '\n';
  for (const auto& c : rec.checks)
    log << "  " << (c.passed ? "ok  " : "FAIL") << ' ' << c.name << ": " << fmt_double(c.statistic) << " vs "
        << fmt_double(c.threshold) << '\n';
}

inline Manifest manifest_for(const CliConfig& cfg, std::uint64_t seed, std::string command) {
  return Manifest{cfg.config_hash(), seed, std::move(command)};
}

}  // namespace command_detail

/// Runs every configured agent, then any audits flagged `enabled`.
inline int cmd_simulate(const CommonOptions& opts) {
  using namespace command_detail;
  if (!opts.config) throw ConfigError("simulate needs --config PATH");
  Json doc = read_document(*opts.config);
  if (doc.is_object() && doc.contains("run") && doc["run"].is_object()) {
    if (opts.trials) doc["run"]["trials"] = *opts.trials;
    if (opts.seed) doc["run"]["seed"] = *opts.seed;
  }
  CliConfig cfg = parse_config(std::move(doc), base_dir(opts), true);
  ExperimentConfig& exp = *cfg.experiment;
  exp.threads = resolve_threads(opts.threads.value_or(0));
  const std::vector<RegretSummary> runs = run_experiment(exp);

  const fs::path dir = opts.out ? *opts.out : fs::path(cfg.output.dir);
  ensure_directory(dir);
  const Manifest m = manifest_for(cfg, exp.seed, "simulate");
  write_summary(dir, m, runs);
  if (cfg.output.curves) write_curves(dir, m, runs);
  if (cfg.output.trace) write_trace(dir, m, runs);

  OrderedJson agents = OrderedJson::array();
  for (const auto& s : runs) agents.push_back(agent_json(s));
  OrderedJson assumptions = OrderedJson::array();
  if (exp.model.features)
    assumptions.push_back(std::string("features ") + (cfg.features_redrawn ? "redrawn per trial" : "fixed across trials"));
  write_json_with_manifest(dir / "manifest.json", m,
                           {{"config", OrderedJson(cfg.document)}, {"agents", agents}, {"assumptions", assumptions}});

  for (const auto& s : runs)
    *opts.log << s.agent << ": mean cumulative regret " << fmt_double(s.mean_cum_regret) << " (se "
              << fmt_double(s.std_err) << ")\n";

  bool all_pass = true;
  for (const auto& name : audit_names()) {
    if (!cfg.audits.enabled_names.count(name)) continue;
    const AuditRecord rec = run_audit(name, cfg.audits, exp.threads);
    write_json_with_manifest(dir / ("audit_" + name + ".json"), manifest_for(cfg, exp.seed, "simulate/" + name),
                             to_json(rec));
    report_audit(*opts.log, name, rec);
    all_pass = all_pass && rec.passed;
  }
  return all_pass ? 0 : 1;
}

/// Runs one named audit with parameters from the config's audits section (or defaults).
inline int cmd_audit(const CommonOptions& opts, const std::string& name) {
  using namespace command_detail;
  if (!known_audit(name)) {
    std::cerr << "unknown audit '" << name << "'; valid audits: " << audit_list() << '\n';
    return 2;
  }
  Json doc = opts.config ? read_document(*opts.config) : Json::object();
  if (!doc.is_object()) throw ConfigError("config must be an object");
  if (opts.trials || opts.seed) {
    Json& a = doc["audits"][name];
    if (opts.trials) a["trials"] = *opts.trials;
    if (opts.seed) a["seed"] = *opts.seed;
  }
  CliConfig cfg = parse_config(std::move(doc), base_dir(opts), false);
  const std::size_t threads = resolve_threads(opts.threads.value_or(0));
  const AuditRecord rec = run_audit(name, cfg.audits, threads);
  const std::uint64_t seed = rec.parameters.contains("seed") ? rec.parameters["seed"].get<std::uint64_t>() : 1;

  const fs::path dir = opts.out ? *opts.out : fs::path(cfg.output.dir);
  ensure_directory(dir);
  write_json_with_manifest(dir / ("audit_" + name + ".json"), manifest_for(cfg, seed, "audit/" + name), to_json(rec));
  report_audit(*opts.log, name, rec);
  return rec.passed ? 0 : 1;
}

struct ReproOptions {
  bool features_redrawn = true;
  bool trace = false;
};

inline constexpr double kReferenceLinUcb = 339.7;
inline constexpr double kReferenceGpUcb = 198.7;
inline constexpr double kReferenceLinPs = 97.5;
inline constexpr double kReferenceTuned = 68.9;

/// The d = 10, 100-action linear-Gaussian experiment, as a config document.
inline Json repro_fig2_document(std::size_t trials, std::uint64_t seed, bool features_redrawn, bool trace) {
  const double h = 1.0 / std::sqrt(10.0);
  Json grid = Json::array();
  for (double b : default_beta_grid()) grid.push_back(b);
  return Json{
      {"model",
       {{"kind", "linear"},
        {"feature_generator",
         {{"num_actions", 100}, {"dim", 10}, {"low", -h}, {"high", h}, {"mode", features_redrawn ? "redrawn" : "fixed"}}},
        {"prior_mean", 0.0},
        {"prior_cov", 10.0},
        {"noise_var", 1.0},
        {"noise", {{"kind", "gaussian"}, {"std", 1.0}}}}},
      {"agents", Json::array({Json{{"kind", "LIN_UCB_ELLIPSOID"}, {"delta", 1.0}, {"lambda_reg", 0.025},
                                   {"norm_bound", "realized"}},
                              Json{{"kind", "GP_UCB"}}, Json{{"kind", "LIN_PS"}},
                              Json{{"kind", "TUNED_GAUSS_UCB"}, {"beta_grid", grid}}})},
      {"run", {{"T", 1000}, {"trials", trials}, {"seed", seed}, {"tuning_trials", 200}}},
      {"output", {{"trace", trace}, {"curves", true}}}};
}

struct ReproRow {
  std::string agent;
  double mean = 0.0;
  double se = 0.0;
  double target = 0.0;
  double tolerance = 0.0;  // relative
  bool within = false;
};

struct ReproResult {
  std::vector<RegretSummary> runs;
  std::vector<ReproRow> rows;
  bool ordering = false;
  bool all_within = false;
};

inline ReproResult evaluate_repro(std::vector<RegretSummary> runs) {
  ReproResult r;
  const double targets[] = {kReferenceLinUcb, kReferenceGpUcb, kReferenceLinPs, kReferenceTuned};
  const double tolerances[] = {0.25, 0.20, 0.20, 0.25};
  r.all_within = true;
  for (std::size_t i = 0; i < runs.size() && i < 4; ++i) {
    ReproRow row{runs[i].agent, runs[i].mean_cum_regret, runs[i].std_err, targets[i], tolerances[i], false};
    row.within = std::abs(row.mean - row.target) <= row.tolerance * row.target;
    r.all_within = r.all_within && row.within;
    r.rows.push_back(row);
  }
  r.ordering = runs.size() == 4 && runs[3].mean_cum_regret < runs[2].mean_cum_regret &&
               runs[2].mean_cum_regret < runs[1].mean_cum_regret && runs[1].mean_cum_regret < runs[0].mean_cum_regret;
  r.runs = std::move(runs);
  return r;
}

inline int cmd_repro_fig2(const CommonOptions& opts, const ReproOptions& ro, ReproResult* result = nullptr) {
  using namespace command_detail;
  const std::size_t trials = opts.trials.value_or(5000);
  const std::uint64_t seed = opts.seed.value_or(1);
  CliConfig cfg = parse_config(repro_fig2_document(trials, seed, ro.features_redrawn, ro.trace), fs::current_path(), true);
  ExperimentConfig& exp = *cfg.experiment;
  exp.threads = resolve_threads(opts.threads.value_or(0));
  ReproResult r = evaluate_repro(run_experiment(exp));

  const fs::path dir = output_dir(opts, "out/repro-fig2");
  ensure_directory(dir);
  const Manifest m = manifest_for(cfg, seed, "repro-fig2");
  write_summary(dir, m, r.runs);
  write_curves(dir, m, r.runs);
  if (ro.trace) write_trace(dir, m, r.runs);

  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const ReproRow& row = r.rows[i];
    OrderedJson j = agent_json(r.runs[i]);
    j["reference_value"] = row.target;
    j["ratio_to_reference"] = row.mean / row.target;
    j["relative_tolerance"] = row.tolerance;
    j["within_tolerance"] = row.within;
    rows.push_back(j);
  }
  OrderedJson assumptions = OrderedJson::array(
      {std::string("features ") + (ro.features_redrawn ? "redrawn per trial from the seeded feature stream"
                                                        : "drawn once and shared by all trials"),
       "GP_UCB uses beta_t = 2 ln((t^2 + 1)|A| / sqrt(2 pi)) with the bonus sqrt(max(beta_t, 0)) sigma_t(a)",
       "TUNED_GAUSS_UCB picks beta from the grid on a separate tuning stream (200 trials per value)",
       "LIN_UCB_ELLIPSOID uses the determinant radius with S set to the realized ||theta||",
       "all agents see common random numbers (same truth, features and noise per trial)"});
  write_json_with_manifest(dir / "repro_fig2.json", m,
                           {{"agents", rows},
                            {"ordering", "TUNED_GAUSS_UCB < LIN_PS < GP_UCB < LIN_UCB_ELLIPSOID"},
                            {"ordering_holds", r.ordering},
                            {"all_within_tolerance", r.all_within},
                            {"assumptions", assumptions}});
  write_json_with_manifest(dir / "manifest.json", m, {{"config", OrderedJson(cfg.document)}});

  for (const auto& row : r.rows)
    *opts.log << row.agent << ": " << fmt_double(row.mean) << " (se " << fmt_double(row.se) << ", reference "
              << fmt_double(row.target) << ", " << (row.within ? "within" : "outside") << " tolerance)\n";
  *opts.log << "ordering " << (r.ordering ? "holds" : "violated") << '\n';
  if (result) *result = r;
  return 0;
}

struct ComplexityOptions {
  fs::path class_path;
  std::vector<double> eps_list{0.5};
  std::vector<double> alpha_list{0.0, 0.25, 0.5, 1.0};
  EluderMode mode = EluderMode::kExact;
};

inline std::optional<EluderMode> parse_eluder_mode(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "EXACT") return EluderMode::kExact;
  if (s == "GREEDY") return EluderMode::kGreedy;
  return std::nullopt;
}

inline int cmd_complexity(const CommonOptions& opts, const ComplexityOptions& co) {
  const std::string text = read_text_file(co.class_path);
  std::istringstream in(text);
  const FiniteFunctionClass fc = read_function_class(in);
  for (double e : co.eps_list)
    if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("--eps values must be finite and >= 0");
  for (double a : co.alpha_list)
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("--alpha values must be finite and >= 0");
  ComplexityRequest req;
  req.eps_list = co.eps_list;
  req.alpha_list = co.alpha_list;
  req.mode = co.mode;
  req.seed = opts.seed.value_or(0);
  const ComplexityReport rep = complexity_report(fc, req);

  Json inputs{{"eps", co.eps_list}, {"alpha", co.alpha_list}, {"mode", to_string(co.mode)}, {"seed", req.seed}};
  const std::string hash = hex64(fnv1a64(text, fnv1a64(inputs.dump())));
  const Manifest m{hash, req.seed, "complexity"};
  const fs::path dir = command_detail::output_dir(opts, "out/complexity");
  ensure_directory(dir);

  OrderedJson eluder = OrderedJson::array();
  for (const auto& e : rep.eluder) eluder.push_back({{"eps", e.eps}, {"value", e.value}, {"mode", to_string(e.mode)}});
  OrderedJson covering = OrderedJson::array();
  for (const auto& c : rep.covering) covering.push_back({{"alpha", c.alpha}, {"value", c.value}, {"exact", c.exact}});
  OrderedJson bounds = OrderedJson::array();
  for (const auto& [name, eps, value] : rep.analytic_bounds) bounds.push_back({{"name", name}, {"eps", eps}, {"value", value}});
  OrderedJson body{{"class", {{"num_params", rep.num_params}, {"num_actions", rep.num_actions}}},
                   {"eluder", eluder},
                   {"vc_dimension", rep.vc_dim ? OrderedJson(*rep.vc_dim) : OrderedJson(nullptr)},
                   {"covering", covering}};
  if (rep.kolmogorov) {
    OrderedJson pts = OrderedJson::array();
    for (const auto& [alpha, n] : rep.kolmogorov->points) pts.push_back({{"alpha", alpha}, {"covering", n}});
    body["kolmogorov"] = {{"slope", rep.kolmogorov->slope},
                          {"points", pts},
                          {"note", "finite class: log N stays bounded, so the true limit is 0; the slope describes the grid only"}};
  } else {
    body["kolmogorov"] = nullptr;
  }
  body["analytic_bounds"] = bounds;
  write_json_with_manifest(dir / "complexity.json", m, body);

  CsvWriter csv(dir / "complexity.csv", m, "measure,scale,value,mode");
  for (const auto& e : rep.eluder) csv.row("eluder_dimension", e.eps, e.value, to_string(e.mode));
  if (rep.vc_dim) csv.row("vc_dimension", "", *rep.vc_dim, "EXACT");
  for (const auto& c : rep.covering) csv.row("covering_number", c.alpha, c.value, c.exact ? "EXACT" : "GREEDY");
  if (rep.kolmogorov) csv.row("kolmogorov_slope", "", rep.kolmogorov->slope, "FIT");
  for (const auto& [name, eps, value] : rep.analytic_bounds) csv.row("bound_" + name, eps, value, "ANALYTIC");
  csv.close();

  for (const auto& e : rep.eluder)
    *opts.log << "eluder dimension at eps=" << fmt_double(e.eps) << ": " << e.value << " (" << to_string(e.mode) << ")\n";
  if (rep.vc_dim) *opts.log << "VC dimension: " << *rep.vc_dim << '\n';
  return 0;
}

}  // namespace banditlab
