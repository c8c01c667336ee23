#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drbandit/policy.hpp"

namespace drbandit {

enum class PolicyKind { Etc, Ucb, CeUcb, Uniform };

PolicyKind parse_policy(const std::string& token);
std::string policy_token(PolicyKind kind);

/// Discretization rule: a fixed value or the per-(K, T) formula token
/// "sqrt(K logT / T)".
struct EpsRule {
  bool formula = false;
  double fixed = 0.1;

  static EpsRule parse(const std::string& token);
  double value(std::size_t K, std::uint64_t T) const;
  std::string token() const;
};

/// Declarative experiment description, mirroring the CLI flags.
struct ExperimentConfig {
  std::string riskmetric = "gini";
  std::string arms = "bern:0.4,bern:0.9";
  std::vector<PolicyKind> policies = {PolicyKind::Ucb};
  std::vector<std::uint64_t> horizons = {100000};
  std::size_t trials = 100;
  EpsRule eps_rule;
  double rho = 0.1;
  std::uint64_t seed = 1;
  std::uint64_t recompute_stride = 1;
  /// Explicit per-arm exploration override; 0 derives ceil(rho * T) per arm
  /// (capped at floor(T/K)) for every policy that explores.
  std::uint64_t explore_per_arm = 0;
  /// ETC minimum-gap override; 0 computes min_gap on the true arms.
  double delta_min = 0.0;
  /// Label and values when this config is one slice of a sweep.
  std::string sweep_param = "T";
  /// Output destination and format (empty path = stdout).
  std::string out;
  std::string format = "csv";

  std::size_t K() const;
  std::uint64_t explore_for(std::uint64_t T) const;
};

/// Bernoulli instance with uniform mean gaps spanning [0.4, 0.9], as an arm
/// list token.
std::string uniform_gap_arms(std::size_t K);

/// Per-(sweep value, policy, checkpoint) Monte-Carlo regret statistics.
struct AggregateRow {
  double sweep_value = 0.0;
  PolicyKind policy = PolicyKind::Uniform;
  std::uint64_t checkpoint = 0;  // horizon T of the runs behind this row
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
};

struct AggregateResult {
  std::string sweep_param;
  std::uint64_t seed = 0;
  std::vector<AggregateRow> rows;
  /// Notes accumulated during runs/fits (excluded checkpoints, caps, ...).
  std::vector<std::string> notes;

  const AggregateRow* find(PolicyKind policy, std::uint64_t checkpoint) const;
};

/// Oracle value V* bound to a hash of the instance it was computed on, so a
/// regret evaluated against the wrong instance fails loudly.
struct OracleValue {
  double value = 0.0;
  std::uint64_t instance_hash = 0;
};

std::uint64_t instance_hash(const DistortionSpec& spec,
                            const std::vector<ArmModel>& arms);

OracleValue oracle_value(const DistortionSpec& spec,
                         const std::vector<ArmModel>& arms);

/// Fixed-horizon regret of one trajectory: V* - V(tau_T / T, F). May be
/// negative on a single run; only the expectation is nonnegative.
double regret_of_trajectory(const PolicyTrajectory& traj, const DistortionSpec& spec,
                            const std::vector<ArmModel>& arms, const OracleValue& vstar);

/// Run `cfg.trials` independent seeded trials for every (policy, horizon)
/// pair and aggregate. Trials fan out to a worker pool capped by the
/// DRBANDIT_THREADS environment variable; aggregation is order-independent,
/// so results are byte-identical for any worker count.
AggregateResult run_experiment(const ExperimentConfig& cfg);

/// Least-squares slope of log(mean regret) against log(log T / T) over the
/// checkpoints of one policy; nonpositive-regret checkpoints are excluded
/// and noted. Requires >= 4 usable checkpoints.
double fit_scaling(const AggregateResult& result, PolicyKind policy,
                   std::vector<std::string>* notes = nullptr);

enum class SweepKind { OverT, OverK, OverGap, OverRho };

SweepKind parse_sweep(const std::string& token);

/// Paper-style sweeps. OverT varies the horizon on the base instance;
/// OverK builds uniform-gap instances on [0.4, 0.9]; OverGap varies the
/// second arm's mean against p1 = 0.55; OverRho varies the exploration
/// coefficient at K = 3, T = 7.5e4.
AggregateResult sweep(SweepKind kind, const ExperimentConfig& base,
                      const std::vector<double>& values);

enum class ExportFormat { Csv, Json, Svg };

ExportFormat parse_format(const std::string& token);

/// Serialize to "sweep_param,policy,checkpoint,mean,min,max,stderr,seed"
/// rows (JSON mirrors the schema; SVG draws the mean with a min/max band).
std::string render(const AggregateResult& result, ExportFormat format);

/// Render to a file. Throws on empty results before touching the path.
void export_result(const AggregateResult& result, ExportFormat format,
                   const std::string& path);

/// Re-parse a CSV produced by render(Csv).
AggregateResult parse_csv(const std::string& text);

/// Flat key = value config file; later CLI flags override file values.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

/// Worker cap: DRBANDIT_THREADS when set, else hardware concurrency.
std::size_t worker_count();

}  // namespace drbandit
