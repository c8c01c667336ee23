#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drbandit/harness.hpp"

namespace py = pybind11;
using namespace drbandit;

namespace {

FiniteCdf cdf_from_pairs(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& [value, prob] : atoms) out.push_back({value, prob});
  return FiniteCdf::from_atoms(std::move(out));
}

py::dict row_to_dict(const AggregateRow& row) {
  py::dict d;
  d["sweep_value"] = row.sweep_value;
  d["policy"] = policy_token(row.policy);
  d["checkpoint"] = row.checkpoint;
  d["mean"] = row.mean;
  d["min"] = row.min;
  d["max"] = row.max;
  d["stderr"] = row.stderr_;
  d["trials"] = row.trials;
  return d;
}

py::list result_to_rows(const AggregateResult& result) {
  py::list rows;
  for (const AggregateRow& row : result.rows) rows.append(row_to_dict(row));
  return rows;
}

ExperimentConfig config_from_kwargs(const std::string& riskmetric, const std::string& arms,
                                    const std::vector<std::string>& policies,
                                    const std::vector<std::uint64_t>& horizons,
                                    std::size_t trials, const std::string& eps,
                                    double rho, std::uint64_t seed,
                                    std::uint64_t explore_per_arm,
                                    std::uint64_t recompute_stride) {
  ExperimentConfig cfg;
  cfg.riskmetric = riskmetric;
  cfg.arms = arms;
  cfg.policies.clear();
  for (const std::string& p : policies) cfg.policies.push_back(parse_policy(p));
  cfg.horizons = horizons;
  cfg.trials = trials;
  cfg.eps_rule = EpsRule::parse(eps);
  cfg.rho = rho;
  cfg.seed = seed;
  cfg.explore_per_arm = explore_per_arm;
  cfg.recompute_stride = recompute_stride;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Risk-sensitive bandit simulation toolkit (distortion riskmetrics, "
            "mixture oracles, RS-ETC-M / RS-UCB-M / CE-UCB-M policies)";

  m.def("eval_h", [](const std::string& riskmetric, double u) {
    return eval_h(parse_riskmetric(riskmetric), u);
  }, py::arg("riskmetric"), py::arg("u"),
     "Distortion function h(u) for a riskmetric token such as 'gini' or 'cvar:0.75'.");

  m.def("riskmetric_info", [](const std::string& riskmetric) {
    const DistortionSpec spec = parse_riskmetric(riskmetric);
    py::dict d;
    d["token"] = spec.token();
    d["holder_q"] = spec.holder_q();
    d["holder_r"] = spec.holder_r();
    d["holder_L"] = spec.holder_L();
    d["monotone"] = spec.monotone();
    d["peak"] = spec.peak();
    if (spec.beta()) d["beta"] = *spec.beta();
    else d["beta"] = py::none();
    return d;
  }, py::arg("riskmetric"), "Holder metadata (q, r, L, beta) of a riskmetric.");

  m.def("choquet", [](const std::string& riskmetric,
                      const std::vector<std::pair<double, double>>& atoms) {
    return choquet(parse_riskmetric(riskmetric), cdf_from_pairs(atoms));
  }, py::arg("riskmetric"), py::arg("atoms"),
     "Exact riskmetric of a finite-support CDF given as [(value, prob), ...].");

  m.def("mixture_value", [](const std::string& riskmetric, const std::vector<double>& weights,
                            const std::string& arms) {
    std::vector<FiniteCdf> cdfs;
    for (const ArmModel& a : parse_arms(arms)) cdfs.push_back(a.cdf());
    return mixture_value(parse_riskmetric(riskmetric), weights, cdfs);
  }, py::arg("riskmetric"), py::arg("weights"), py::arg("arms"),
     "V(weights, arms) for an arm-list token such as 'bern:0.4,bern:0.9'.");

  m.def("wasserstein1", [](const std::vector<std::pair<double, double>>& f,
                           const std::vector<std::pair<double, double>>& g) {
    return wasserstein1(cdf_from_pairs(f), cdf_from_pairs(g));
  }, py::arg("f"), py::arg("g"), "1-Wasserstein distance between finite-support CDFs.");

  m.def("confidence_radius", &confidence_radius, py::arg("pulls"), py::arg("horizon"));

  m.def("enumerate_grid", [](std::size_t K, double eps, const std::string& scheme) {
    const GridScheme s = scheme == "midpoint" ? GridScheme::UcbMidpoint
                                              : GridScheme::EtcLattice;
    return enumerate_grid(GridSpec{K, eps, s});
  }, py::arg("K"), py::arg("eps"), py::arg("scheme") = "etc",
     "Simplex grid points ('etc' lattice or 'midpoint' scheme).");

  m.def("oracle", [](const std::string& riskmetric, const std::string& arms,
                     double resolution) {
    const auto res = oracle_continuous(parse_riskmetric(riskmetric), parse_arms(arms),
                                       resolution);
    py::dict d;
    d["weights"] = res.weights;
    d["value"] = res.value;
    d["method"] = res.method == OracleMethod::ClosedFormBernoulli
                      ? "closed-form-bernoulli" : "grid-search";
    return d;
  }, py::arg("riskmetric"), py::arg("arms"), py::arg("resolution") = 1e-4,
     "Optimal mixture weights and value on the continuous simplex.");

  m.def("oracle_discrete", [](const std::string& riskmetric, const std::string& arms,
                              double eps, const std::string& scheme) {
    const GridScheme s = scheme == "midpoint" ? GridScheme::UcbMidpoint
                                              : GridScheme::EtcLattice;
    const auto armv = parse_arms(arms);
    const auto res = oracle_discrete(parse_riskmetric(riskmetric), armv,
                                     GridSpec{armv.size(), eps, s});
    py::dict d;
    d["weights"] = res.weights;
    d["value"] = res.value;
    return d;
  }, py::arg("riskmetric"), py::arg("arms"), py::arg("eps"), py::arg("scheme") = "etc");

  m.def("min_gap", [](const std::string& riskmetric, const std::string& arms, double eps,
                      const std::string& scheme) {
    const GridScheme s = scheme == "midpoint" ? GridScheme::UcbMidpoint
                                              : GridScheme::EtcLattice;
    const auto armv = parse_arms(arms);
    return min_gap(parse_riskmetric(riskmetric), armv, GridSpec{armv.size(), eps, s});
  }, py::arg("riskmetric"), py::arg("arms"), py::arg("eps"), py::arg("scheme") = "etc");

  m.def("beta_estimate", [](const std::string& riskmetric, const std::string& arms,
                            const std::vector<double>& eps_sequence) {
    return beta_estimate(parse_riskmetric(riskmetric), parse_arms(arms), eps_sequence);
  }, py::arg("riskmetric"), py::arg("arms"), py::arg("eps_sequence"));

  m.def("n_epsilon", [](std::size_t K, double L, double q, double delta_min, double eps,
                        std::uint64_t T) { return n_epsilon(K, L, q, delta_min, eps, T); },
        py::arg("K"), py::arg("L"), py::arg("q"), py::arg("delta_min"), py::arg("eps"),
        py::arg("T"));

  m.def("run_policy", [](const std::string& policy, const std::string& riskmetric,
                         const std::string& arms, std::uint64_t horizon, double eps,
                         double rho, std::uint64_t explore_per_arm, std::uint64_t seed,
                         std::uint64_t trial) {
    const DistortionSpec spec = parse_riskmetric(riskmetric);
    const auto armv = parse_arms(arms);
    const BanditEnv env{armv, horizon, seed, trial};
    PolicyTrajectory traj;
    switch (parse_policy(policy)) {
      case PolicyKind::Etc: {
        EtcConfig cfg;
        cfg.eps = eps;
        cfg.explore_per_arm = explore_per_arm;
        if (explore_per_arm == 0)
          cfg.delta_min = min_gap(spec, armv, GridSpec{armv.size(), eps,
                                                       GridScheme::EtcLattice});
        traj = etc_run(env, cfg, spec);
        break;
      }
      case PolicyKind::Ucb:
      case PolicyKind::CeUcb: {
        UcbConfig cfg;
        cfg.eps = eps;
        cfg.rho = rho;
        cfg.explore_per_arm = explore_per_arm;
        cfg.variant = parse_policy(policy) == PolicyKind::Ucb
                          ? UcbVariant::Exact : UcbVariant::ComputationallyEfficient;
        traj = ucb_run(env, cfg, spec);
        break;
      }
      case PolicyKind::Uniform: traj = uniform_run(env); break;
    }
    py::dict d;
    d["counts"] = traj.final_counts;
    d["fractions"] = traj.final_fractions();
    if (!traj.estimate_history.empty()) d["estimate"] = traj.estimate_history.back().second;
    const OracleValue vstar = oracle_value(spec, armv);
    d["regret"] = regret_of_trajectory(traj, spec, armv, vstar);
    return d;
  }, py::arg("policy"), py::arg("riskmetric"), py::arg("arms"), py::arg("horizon"),
     py::arg("eps") = 0.1, py::arg("rho") = 0.1, py::arg("explore_per_arm") = 0,
     py::arg("seed") = 1, py::arg("trial") = 0,
     "One trajectory; returns counts, fractions, last estimate, and regret.");

  m.def("run_experiment", [](const std::string& riskmetric, const std::string& arms,
                             const std::vector<std::string>& policies,
                             const std::vector<std::uint64_t>& horizons, std::size_t trials,
                             const std::string& eps, double rho, std::uint64_t seed,
                             std::uint64_t explore_per_arm, std::uint64_t recompute_stride) {
    const AggregateResult result = run_experiment(
        config_from_kwargs(riskmetric, arms, policies, horizons, trials, eps, rho, seed,
                           explore_per_arm, recompute_stride));
    return result_to_rows(result);
  }, py::arg("riskmetric") = "gini", py::arg("arms") = "bern:0.4,bern:0.9",
     py::arg("policies") = std::vector<std::string>{"ucb"},
     py::arg("horizons") = std::vector<std::uint64_t>{100000},
     py::arg("trials") = 100, py::arg("eps") = "sqrt(K logT / T)", py::arg("rho") = 0.1,
     py::arg("seed") = 1, py::arg("explore_per_arm") = 0, py::arg("recompute_stride") = 1,
     "Monte-Carlo regret experiment; returns one dict per (policy, horizon).");

  m.def("render_csv", [](const std::string& riskmetric, const std::string& arms,
                         const std::vector<std::string>& policies,
                         const std::vector<std::uint64_t>& horizons, std::size_t trials,
                         const std::string& eps, double rho, std::uint64_t seed) {
    return render(run_experiment(config_from_kwargs(riskmetric, arms, policies, horizons,
                                                    trials, eps, rho, seed, 0, 1)),
                  ExportFormat::Csv);
  }, py::arg("riskmetric") = "gini", py::arg("arms") = "bern:0.4,bern:0.9",
     py::arg("policies") = std::vector<std::string>{"ucb"},
     py::arg("horizons") = std::vector<std::uint64_t>{100000},
     py::arg("trials") = 100, py::arg("eps") = "sqrt(K logT / T)", py::arg("rho") = 0.1,
     py::arg("seed") = 1);
}
