#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "banditlab.hpp"

namespace {

void add_common(CLI::App* cmd, banditlab::CommonOptions& opts, bool with_config) {
  if (with_config)
    cmd->add_option_function<std::string>("--config", [&](const std::string& p) { opts.config = p; },
                                          "experiment config (JSON)");
  cmd->add_option_function<std::size_t>("--trials", [&](std::size_t n) { opts.trials = n; }, "override trial count")
      ->check(CLI::PositiveNumber);
  cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { opts.seed = s; }, "override master seed");
  cmd->add_option_function<std::string>("--out", [&](const std::string& p) { opts.out = p; }, "output directory");
  cmd->add_option_function<std::size_t>("--threads", [&](std::size_t n) { opts.threads = n; },
                                        "worker threads (default: BANDITLAB_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior sampling and UCB bandit simulator"};
  app.set_version_flag("--version", std::string(banditlab::kToolName) + " " + banditlab::kToolVersion);
  app.require_subcommand(1);

  banditlab::CommonOptions opts;

  auto* simulate = app.add_subcommand("simulate", "run the agents of a config and write regret traces");
  add_common(simulate, opts, true);

  banditlab::ReproOptions repro;
  std::string features = "redrawn";
  auto* fig2 = app.add_subcommand("repro-fig2", "the 10-dimensional, 100-action linear-Gaussian comparison");
  add_common(fig2, opts, false);
  fig2->add_option("--features", features, "feature vectors per trial: redrawn or fixed")
      ->check(CLI::IsMember({"redrawn", "fixed"}));
  fig2->add_flag("--trace", repro.trace, "also write the per-period trace");

  std::string audit_name;
  auto* audit = app.add_subcommand("audit", "run one statistical audit");
  add_common(audit, opts, true);
  audit->add_option("name", audit_name, "audit name")->required();

  banditlab::ComplexityOptions cx;
  std::string class_path, mode = "EXACT";
  auto* complexity = app.add_subcommand("complexity", "eluder dimension, covering numbers and VC dimension of a class");
  add_common(complexity, opts, false);
  complexity->add_option("--class", class_path, "function-class file")->required();
  complexity->add_option("--eps", cx.eps_list, "eluder scales")->delimiter(',');
  complexity->add_option("--alpha", cx.alpha_list, "covering scales")->delimiter(',');
  complexity->add_option("--mode", mode, "EXACT or GREEDY");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return banditlab::cmd_simulate(opts);
    if (*fig2) {
      repro.features_redrawn = features == "redrawn";
      return banditlab::cmd_repro_fig2(opts, repro);
    }
    if (*audit) return banditlab::cmd_audit(opts, audit_name);
    if (*complexity) {
      const auto m = banditlab::parse_eluder_mode(mode);
      if (!m) throw banditlab::ConfigError("--mode must be EXACT or GREEDY");
      cx.mode = *m;
      cx.class_path = class_path;
      return banditlab::cmd_complexity(opts, cx);
    }
  } catch (const banditlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const banditlab::SizeError& e) {
    std::cerr << "size error: " << e.what() << '\n';
    return 2;
  } catch (const banditlab::TypeError& e) {
    std::cerr << "type error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
