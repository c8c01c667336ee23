#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drbandit/checks.hpp"
#include "drbandit/harness.hpp"

namespace {

using namespace drbandit;

struct CommonFlags {
  std::string riskmetric;
  std::string arms;
  std::vector<std::string> policies;
  std::vector<std::uint64_t> horizons;
  std::size_t trials = 0;
  std::string eps;
  std::string eps_rule;
  double rho = -1.0;
  std::int64_t seed = -1;
  std::uint64_t explore = 0;
  double delta_min = 0.0;
  std::uint64_t stride = 0;
  std::string config_path;
  std::string out;
  std::string format = "csv";
  bool paper_scale = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--riskmetric", f.riskmetric,
                  "distortion riskmetric token (gini, cvar:0.75, pht:0.5, ...)");
  cmd->add_option("--arms", f.arms, "arm list, e.g. bern:0.4,bern:0.9 or atoms:0@0.6;1@0.4");
  cmd->add_option("--policy", f.policies, "policy tokens: etc | ucb | ce-ucb | uniform");
  cmd->add_option("--horizon", f.horizons, "horizon(s) T");
  cmd->add_option("--trials", f.trials, "Monte-Carlo trials per configuration");
  cmd->add_option("--eps", f.eps, "fixed discretization level");
  cmd->add_option("--eps-rule", f.eps_rule, "formula token: sqrt(K logT / T)");
  cmd->add_option("--rho", f.rho, "exploration coefficient (per-arm exploration = rho*T)");
  cmd->add_option("--seed", f.seed, "base RNG seed");
  cmd->add_option("--explore", f.explore, "per-arm exploration override (pulls)");
  cmd->add_option("--delta-min", f.delta_min, "ETC minimum-gap override");
  cmd->add_option("--stride", f.stride, "recompute the UCB estimate every N steps");
  cmd->add_option("--config", f.config_path, "flat key=value config file (flags override)");
  cmd->add_option("--out", f.out, "output path (stdout when omitted)");
  cmd->add_option("--format", f.format, "csv | json | svg")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  cmd->add_flag("--paper-scale", f.paper_scale, "paper-scale trials/horizons (10^3 trials)");
}

ExperimentConfig build_config(const CommonFlags& f, const CLI::App* cmd) {
  ExperimentConfig cfg;
  if (!f.config_path.empty())
    for (const auto& [key, value] : parse_config_file(f.config_path))
      apply_config_entry(cfg, key, value);
  if (!f.riskmetric.empty()) cfg.riskmetric = f.riskmetric;
  if (!f.arms.empty()) cfg.arms = f.arms;
  if (!f.policies.empty()) {
    cfg.policies.clear();
    for (const std::string& p : f.policies) cfg.policies.push_back(parse_policy(p));
  }
  if (!f.horizons.empty()) cfg.horizons = f.horizons;
  if (f.trials > 0) cfg.trials = f.trials;
  if (!f.eps.empty()) cfg.eps_rule = EpsRule::parse(f.eps);
  if (!f.eps_rule.empty()) cfg.eps_rule = EpsRule::parse(f.eps_rule);
  if (f.rho >= 0.0) cfg.rho = f.rho;
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (f.explore > 0) cfg.explore_per_arm = f.explore;
  if (f.delta_min > 0.0) cfg.delta_min = f.delta_min;
  if (f.stride > 0) cfg.recompute_stride = f.stride;
  if (f.paper_scale) cfg.trials = 1000;
  if (!f.out.empty()) cfg.out = f.out;
  if (cmd->count("--format") > 0) cfg.format = f.format;
  return cfg;
}

void emit(const AggregateResult& result, const ExperimentConfig& cfg) {
  const ExportFormat format = parse_format(cfg.format);
  if (cfg.out.empty()) {
    std::cout << render(result, format);
  } else {
    export_result(result, format, cfg.out);
    std::fprintf(stderr, "wrote %s\n", cfg.out.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drbandit: risk-sensitive bandit simulation toolkit"};
  app.require_subcommand(1);
  app.footer("environment: DRBANDIT_THREADS caps the trial worker pool");

  // oracle
  CommonFlags of;
  double resolution = 1e-4;
  auto* oracle_cmd = app.add_subcommand("oracle", "optimal mixture for an instance");
  oracle_cmd->add_option("--riskmetric", of.riskmetric)->required();
  oracle_cmd->add_option("--arms", of.arms)->required();
  oracle_cmd->add_option("--resolution", resolution, "scan resolution (default 1e-4)");
  oracle_cmd->add_option("--eps", of.eps, "also report the discrete oracle at this eps");

  // gap
  CommonFlags gf;
  std::string gap_scheme = "etc";
  auto* gap_cmd = app.add_subcommand("gap", "minimum sub-optimality gap of a grid");
  gap_cmd->add_option("--riskmetric", gf.riskmetric)->required();
  gap_cmd->add_option("--arms", gf.arms)->required();
  gap_cmd->add_option("--eps", gf.eps)->required();
  gap_cmd->add_option("--scheme", gap_scheme, "etc | midpoint")
      ->check(CLI::IsMember({"etc", "midpoint"}));

  // run
  CommonFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Monte-Carlo regret experiment");
  add_common_flags(run_cmd, rf);

  // sweep
  CommonFlags sf;
  std::string sweep_kind = "T";
  std::vector<double> sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "paper-style parameter sweeps");
  sweep_cmd->add_option("--kind", sweep_kind, "T | K | gap | rho")->required();
  sweep_cmd->add_option("--values", sweep_values, "swept values")->required();
  add_common_flags(sweep_cmd, sf);

  // fit
  std::string fit_path, fit_policy = "ucb";
  auto* fit_cmd = app.add_subcommand("fit", "fit the regret scaling exponent from a CSV");
  fit_cmd->add_option("--in", fit_path, "CSV produced by run/sweep")->required();
  fit_cmd->add_option("--policy", fit_policy, "policy column to fit");

  // verify
  std::vector<int> criteria;
  bool quick = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
  verify_cmd->add_option("--criterion", criteria, "criterion ids (default: all)");
  verify_cmd->add_flag("--quick", quick, "only the fast criteria");

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle_cmd->parsed()) {
      const DistortionSpec spec = parse_riskmetric(of.riskmetric);
      const auto arms = parse_arms(of.arms);
      const OracleResult res = oracle_continuous(spec, arms, resolution);
      std::printf("method: %s\nvalue: %.12g\nweights:",
                  res.method == OracleMethod::ClosedFormBernoulli ? "closed-form-bernoulli"
                                                                  : "grid-search",
                  res.value);
      for (double w : res.weights) std::printf(" %.12g", w);
      std::printf("\n");
      if (!of.eps.empty()) {
        const double eps = std::stod(of.eps);
        const OracleResult disc =
            oracle_discrete(spec, arms, GridSpec{arms.size(), eps, GridScheme::EtcLattice});
        std::printf("discrete value (eps=%g): %.12g\ndiscrete weights:", eps, disc.value);
        for (double w : disc.weights) std::printf(" %.12g", w);
        std::printf("\n");
      }
    } else if (gap_cmd->parsed()) {
      const DistortionSpec spec = parse_riskmetric(gf.riskmetric);
      const auto arms = parse_arms(gf.arms);
      const GridScheme scheme =
          gap_scheme == "midpoint" ? GridScheme::UcbMidpoint : GridScheme::EtcLattice;
      const double gap =
          min_gap(spec, arms, GridSpec{arms.size(), std::stod(gf.eps), scheme});
      std::printf("delta_min: %.12g\n", gap);
    } else if (run_cmd->parsed()) {
      const ExperimentConfig cfg = build_config(rf, run_cmd);
      emit(run_experiment(cfg), cfg);
    } else if (sweep_cmd->parsed()) {
      const ExperimentConfig base = build_config(sf, sweep_cmd);
      emit(sweep(parse_sweep(sweep_kind), base, sweep_values), base);
    } else if (fit_cmd->parsed()) {
      std::ifstream in(fit_path);
      if (!in) throw std::runtime_error("cannot open " + fit_path);
      std::stringstream buf;
      buf << in.rdbuf();
      const AggregateResult result = parse_csv(buf.str());
      std::vector<std::string> notes;
      const double nu = fit_scaling(result, parse_policy(fit_policy), &notes);
      std::printf("nu_hat: %.6g\n", nu);
      for (const std::string& note : notes) std::printf("note: %s\n", note.c_str());
    } else if (verify_cmd->parsed()) {
      std::vector<int> ids = criteria;
      if (quick && ids.empty()) ids = quick_check_ids();
      return run_checks(ids) ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
