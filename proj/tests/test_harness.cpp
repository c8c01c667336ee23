#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "drbandit/harness.hpp"

using namespace drbandit;

TEST_SUITE_BEGIN("harness");

TEST_CASE("eps rule") {
  const EpsRule fixed = EpsRule::parse("0.25");
  CHECK_FALSE(fixed.formula);
  CHECK(fixed.value(2, 1000) == 0.25);

  const EpsRule formula = EpsRule::parse("sqrt(K logT / T)");
  CHECK(formula.formula);
  CHECK(formula.value(2, 100000) ==
        doctest::Approx(std::sqrt(2.0 * std::log(1e5) / 1e5)).epsilon(1e-12));
  CHECK(EpsRule::parse("sqrt(KlogT/T)").formula);
  CHECK_THROWS(EpsRule::parse("1.5"));
}

TEST_CASE("regret of a trajectory") {
  const DistortionSpec gini = parse_riskmetric("gini");
  const auto arms = parse_arms("bern:0.4,bern:0.9");
  const OracleValue vstar = oracle_value(gini, arms);
  CHECK(vstar.value == doctest::Approx(0.25).epsilon(1e-12));

  PolicyTrajectory traj;
  traj.horizon = 10;
  traj.final_counts = {8, 2};
  CHECK(regret_of_trajectory(traj, gini, arms, vstar) ==
        doctest::Approx(0.0).epsilon(1e-9));

  traj.final_counts = {5, 5};  // uniform: mean 0.65
  CHECK(regret_of_trajectory(traj, gini, arms, vstar) ==
        doctest::Approx(0.0225).epsilon(1e-12));

  traj.final_counts = {10, 0};  // solitary arm 1
  CHECK(regret_of_trajectory(traj, gini, arms, vstar) ==
        doctest::Approx(0.01).epsilon(1e-12));

  SUBCASE("instance hash guards against mismatched oracles") {
    const auto other = parse_arms("bern:0.3,bern:0.9");
    CHECK_THROWS_AS(regret_of_trajectory(traj, gini, other, vstar), std::invalid_argument);
  }
}

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.riskmetric = "gini";
  cfg.arms = "bern:0.4,bern:0.9";
  cfg.policies = {PolicyKind::Uniform, PolicyKind::Etc};
  cfg.horizons = {2000, 4000};
  cfg.trials = 8;
  cfg.eps_rule = EpsRule::parse("0.1");
  cfg.rho = 0.1;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("run_experiment aggregates per (policy, horizon)") {
  const ExperimentConfig cfg = small_config();
  const AggregateResult result = run_experiment(cfg);
  CHECK(result.rows.size() == 4);
  for (const AggregateRow& row : result.rows) {
    CHECK(row.trials == 8);
    CHECK(row.min <= row.mean);
    CHECK(row.mean <= row.max);
  }
  const AggregateRow* uni = result.find(PolicyKind::Uniform, 2000);
  REQUIRE(uni != nullptr);
  CHECK(uni->mean == doctest::Approx(0.0225).epsilon(1e-12));
  CHECK(uni->stderr_ == 0.0);

  SUBCASE("single trial collapses the band") {
    ExperimentConfig one = cfg;
    one.trials = 1;
    one.policies = {PolicyKind::Etc};
    const AggregateResult r1 = run_experiment(one);
    CHECK(r1.rows[0].mean == r1.rows[0].min);
    CHECK(r1.rows[0].mean == r1.rows[0].max);
  }

  SUBCASE("same seed reproduces byte-identical CSV") {
    const std::string a = render(run_experiment(cfg), ExportFormat::Csv);
    const std::string b = render(run_experiment(cfg), ExportFormat::Csv);
    CHECK(a == b);
  }

  SUBCASE("worker count does not change the bytes") {
    setenv("DRBANDIT_THREADS", "1", 1);
    const std::string a = render(run_experiment(cfg), ExportFormat::Csv);
    setenv("DRBANDIT_THREADS", "5", 1);
    const std::string b = render(run_experiment(cfg), ExportFormat::Csv);
    unsetenv("DRBANDIT_THREADS");
    CHECK(a == b);
  }
}

TEST_CASE("csv export and round trip") {
  const AggregateResult result = run_experiment(small_config());
  const std::string csv = render(result, ExportFormat::Csv);

  // header + one row per (policy, horizon)
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  const AggregateResult parsed = parse_csv(csv);
  REQUIRE(parsed.rows.size() == result.rows.size());
  CHECK(parsed.seed == result.seed);
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    CHECK(parsed.rows[i].policy == result.rows[i].policy);
    CHECK(parsed.rows[i].checkpoint == result.rows[i].checkpoint);
    CHECK(std::abs(parsed.rows[i].mean - result.rows[i].mean) < 1e-9);
    CHECK(std::abs(parsed.rows[i].min - result.rows[i].min) < 1e-9);
    CHECK(std::abs(parsed.rows[i].max - result.rows[i].max) < 1e-9);
    CHECK(std::abs(parsed.rows[i].stderr_ - result.rows[i].stderr_) < 1e-9);
  }

  SUBCASE("empty result refuses to render or export") {
    AggregateResult empty;
    CHECK_THROWS_AS(render(empty, ExportFormat::Csv), std::invalid_argument);
    CHECK_THROWS_AS(export_result(empty, ExportFormat::Csv, "/tmp/should_not_exist.csv"),
                    std::invalid_argument);
    std::remove("/tmp/should_not_exist.csv");
    CHECK(std::fopen("/tmp/should_not_exist.csv", "r") == nullptr);
  }

  SUBCASE("json and svg render") {
    const std::string json = render(result, ExportFormat::Json);
    CHECK(json.find("\"rows\"") != std::string::npos);
    const std::string svg = render(result, ExportFormat::Svg);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
  }
}

TEST_CASE("fit_scaling recovers synthetic power laws") {
  for (double nu : {1.0, 0.5}) {
    AggregateResult synth;
    for (double t : {1e4, 3e4, 1e5, 3e5}) {
      AggregateRow row;
      row.policy = PolicyKind::Ucb;
      row.checkpoint = static_cast<std::uint64_t>(t);
      row.mean = 2.0 * std::pow(std::log(t) / t, nu);
      synth.rows.push_back(row);
    }
    CHECK(fit_scaling(synth, PolicyKind::Ucb) == doctest::Approx(nu).epsilon(1e-9));
  }

  SUBCASE("nonpositive checkpoints are excluded and noted") {
    AggregateResult synth;
    for (double t : {1e4, 3e4, 1e5, 3e5, 1e6}) {
      AggregateRow row;
      row.policy = PolicyKind::Ucb;
      row.checkpoint = static_cast<std::uint64_t>(t);
      row.mean = t == 1e6 ? -1.0 : std::log(t) / t;
      synth.rows.push_back(row);
    }
    std::vector<std::string> notes;
    CHECK(fit_scaling(synth, PolicyKind::Ucb, &notes) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(notes.size() == 1);
  }
  SUBCASE("too few checkpoints is an error") {
    AggregateResult synth;
    for (double t : {1e4, 3e4, 1e5}) {
      AggregateRow row;
      row.policy = PolicyKind::Ucb;
      row.checkpoint = static_cast<std::uint64_t>(t);
      row.mean = std::log(t) / t;
      synth.rows.push_back(row);
    }
    CHECK_THROWS_AS(fit_scaling(synth, PolicyKind::Ucb), std::invalid_argument);
  }
}

TEST_CASE("sweeps") {
  ExperimentConfig base;
  base.riskmetric = "gini";
  base.arms = "bern:0.4,bern:0.9";
  base.policies = {PolicyKind::Uniform};
  base.horizons = {3000};
  base.trials = 4;
  base.eps_rule = EpsRule::parse("0.2");
  base.seed = 3;

  SUBCASE("OverT with one value matches run_experiment") {
    const AggregateResult swept = sweep(SweepKind::OverT, base, {3000});
    ExperimentConfig direct = base;
    const AggregateResult ran = run_experiment(direct);
    REQUIRE(swept.rows.size() == ran.rows.size());
    CHECK(swept.rows[0].mean == ran.rows[0].mean);
  }
  SUBCASE("OverK builds uniform-gap instances") {
    const AggregateResult swept = sweep(SweepKind::OverK, base, {2, 3});
    REQUIRE(swept.rows.size() == 2);
    CHECK(swept.rows[0].sweep_value == 2.0);
    CHECK(swept.rows[1].sweep_value == 3.0);
    CHECK(swept.sweep_param == "K");
  }
  SUBCASE("OverGap varies the second arm") {
    const AggregateResult swept = sweep(SweepKind::OverGap, base, {0.65, 0.95});
    REQUIRE(swept.rows.size() == 2);
    CHECK(swept.rows[0].sweep_value == 0.65);
  }
}

TEST_CASE("aggregation is order independent") {
  // The aggregate is a pure fold over per-trial slots, so any trial ordering
  // (here: reversed) yields the same statistics.
  const ExperimentConfig cfg = small_config();
  const AggregateResult forward = run_experiment(cfg);

  const DistortionSpec spec = parse_riskmetric(cfg.riskmetric);
  const auto arms = parse_arms(cfg.arms);
  const OracleValue vstar = oracle_value(spec, arms);
  std::vector<double> regrets;
  for (int trial = static_cast<int>(cfg.trials) - 1; trial >= 0; --trial) {
    const auto traj =
        uniform_run(BanditEnv{arms, 2000, cfg.seed, static_cast<std::uint64_t>(trial)});
    regrets.push_back(regret_of_trajectory(traj, spec, arms, vstar));
  }
  double mean = 0.0;
  for (double r : regrets) mean += r;
  mean /= static_cast<double>(regrets.size());
  CHECK(mean == doctest::Approx(forward.find(PolicyKind::Uniform, 2000)->mean).epsilon(1e-15));
}

TEST_CASE("regret stays below the worst-vertex cap") {
  const DistortionSpec gini = parse_riskmetric("gini");
  const auto arms = parse_arms("bern:0.4,bern:0.9");
  const OracleValue vstar = oracle_value(gini, arms);
  double worst_vertex = 1e300;
  for (std::size_t i = 0; i < arms.size(); ++i)
    worst_vertex = std::min(worst_vertex, choquet(gini, arms[i].cdf()));
  const double cap = vstar.value - worst_vertex;

  ExperimentConfig cfg = small_config();
  cfg.policies = {PolicyKind::Uniform, PolicyKind::Etc, PolicyKind::Ucb, PolicyKind::CeUcb};
  const AggregateResult result = run_experiment(cfg);
  for (const AggregateRow& row : result.rows) CHECK(row.max <= cap + 1e-12);
}

TEST_CASE("config file parsing") {
  const std::string path = "/tmp/drbandit_test_config.txt";
  {
    FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs("riskmetric = cvar:0.75\narms = bern:0.2,bern:0.5\n# comment\n"
               "policy = ucb,uniform\nhorizon = 1000,2000\ntrials = 5\n"
               "eps-rule = sqrt(K logT / T)\nrho = 0.2\nseed = 99\n",
               f);
    std::fclose(f);
  }
  ExperimentConfig cfg;
  for (const auto& [k, v] : parse_config_file(path)) apply_config_entry(cfg, k, v);
  CHECK(cfg.riskmetric == "cvar:0.75");
  CHECK(cfg.policies == std::vector<PolicyKind>{PolicyKind::Ucb, PolicyKind::Uniform});
  CHECK(cfg.horizons == std::vector<std::uint64_t>{1000, 2000});
  CHECK(cfg.trials == 5);
  CHECK(cfg.eps_rule.formula);
  CHECK(cfg.rho == 0.2);
  CHECK(cfg.seed == 99);
  CHECK_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_SUITE_END();
