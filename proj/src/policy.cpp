#include "drbandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drbandit {

namespace {

constexpr double kTieTol = 1e-12;

std::vector<double> fractions(const std::vector<std::uint64_t>& counts,
                              std::uint64_t total) {
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return f;
}

}  // namespace

std::vector<double> PolicyTrajectory::final_fractions() const {
  return fractions(final_counts, horizon);
}

const MixtureWeights& PolicyTrajectory::final_estimate() const {
  if (estimate_history.empty())
    throw std::logic_error("trajectory has no mixture estimates");
  return estimate_history.back().second;
}

double n_epsilon_raw(std::size_t K, double L, double q, double delta_min,
                     double eps, std::uint64_t T) {
  if (K == 0 || L <= 0.0 || q <= 0.0 || delta_min <= 0.0 || eps <= 0.0 || T < 2)
    throw std::invalid_argument("n_epsilon: arguments must be positive, T >= 2");
  const double e = std::exp(1.0);
  const double k = static_cast<double>(K);
  const double t = static_cast<double>(T);
  const double gap_term = std::pow(2.0 * k * L / delta_min, 2.0 / q);
  const double log_arg = 2.0 * k * t * t *
                         (std::pow(eps, -(k - 1.0)) + 1.0);
  const double bracket = 32.0 / std::sqrt(e) + std::sqrt(std::log(log_arg));
  return 256.0 * k * e * gap_term * bracket * bracket;
}

std::uint64_t n_epsilon(std::size_t K, double L, double q, double delta_min,
                        double eps, std::uint64_t T) {
  const double raw = n_epsilon_raw(K, L, q, delta_min, eps, T);
  if (raw > static_cast<double>(T))
    throw std::domain_error("n_epsilon: exploration budget exceeds the horizon");
  return static_cast<std::uint64_t>(std::ceil(raw));
}

namespace {

/// Sampling plumbing shared by the policies: per-arm streams, counts,
/// empirical CDFs, and the action log.
struct RunState {
  const BanditEnv* env = nullptr;
  std::vector<RngStream> streams;
  std::vector<std::uint64_t> counts;
  std::vector<EmpiricalCdf> tallies;
  std::vector<std::uint16_t> actions;
  std::uint64_t t = 0;

  explicit RunState(const BanditEnv& e) : env(&e) {
    const std::size_t k = e.arms.size();
    if (k == 0) throw std::invalid_argument("bandit env has no arms");
    if (e.horizon < k) throw std::invalid_argument("horizon smaller than arm count");
    if (k > 65535) throw std::invalid_argument("too many arms");
    streams.reserve(k);
    for (std::size_t i = 0; i < k; ++i) streams.emplace_back(e.seed, e.trial, i);
    counts.assign(k, 0);
    tallies.resize(k);
    actions.reserve(e.horizon);
  }

  void pull(std::size_t arm) {
    const double x = sample(env->arms[arm], streams[arm]);
    tallies[arm].add(x);
    ++counts[arm];
    actions.push_back(static_cast<std::uint16_t>(arm));
    ++t;
  }

  std::vector<FiniteCdf> empirical() const {
    std::vector<FiniteCdf> out;
    out.reserve(tallies.size());
    for (const EmpiricalCdf& e : tallies) out.push_back(empirical_to_cdf(e));
    return out;
  }

  PolicyTrajectory finish(std::vector<std::pair<std::uint64_t, MixtureWeights>> history) {
    PolicyTrajectory traj;
    traj.horizon = env->horizon;
    traj.actions = std::move(actions);
    traj.final_counts = counts;
    traj.estimate_history = std::move(history);
    traj.final_empirical = empirical();
    return traj;
  }
};

}  // namespace

PolicyTrajectory etc_run(const BanditEnv& env, const EtcConfig& cfg,
                         const DistortionSpec& spec) {
  RunState state(env);
  const std::size_t K = env.arms.size();
  const std::uint64_t T = env.horizon;

  std::uint64_t per_arm = cfg.explore_per_arm;
  if (per_arm == 0) {
    const std::uint64_t n = n_epsilon(K, spec.holder_L(), spec.holder_q(),
                                      cfg.delta_min, cfg.eps, T);
    per_arm = (n + K - 1) / K;
  }
  if (per_arm == 0 || per_arm > T / K)
    throw std::domain_error("etc_run: exploration does not fit the horizon");

  for (std::uint64_t s = 0; s < per_arm * K; ++s) state.pull(s % K);

  const auto empirical = state.empirical();
  MixtureWeights a_hat;
  double best_v = -1e300;
  visit_grid(GridSpec{K, cfg.eps, GridScheme::EtcLattice},
             [&](const MixtureWeights& a) {
               const double v = mixture_value(spec, a, empirical);
               if (v > best_v + kTieTol) {  // lexicographic order; first max wins
                 best_v = v;
                 a_hat = a;
               }
             });
  std::vector<std::pair<std::uint64_t, MixtureWeights>> history{{state.t, a_hat}};

  // Commit: top up under-explored arms 1..K-1 to floor(T a(i)); everything
  // left goes to arm K.
  for (std::size_t i = 0; i + 1 < K && state.t < T; ++i) {
    const auto target =
        static_cast<std::uint64_t>(std::floor(static_cast<double>(T) * a_hat[i]));
    if (target <= per_arm) continue;  // sufficiently explored, skipped
    while (state.counts[i] < target && state.t < T) state.pull(i);
  }
  while (state.t < T) state.pull(K - 1);

  return state.finish(std::move(history));
}

double UcbState::radius(std::size_t arm) const {
  if (zero_radii) return 0.0;
  if (arm >= pulls.size() || pulls[arm] == 0)
    throw std::domain_error("ucb estimate requires every arm pulled at least once");
  return confidence_radius(pulls[arm], static_cast<double>(horizon));
}

namespace {

bool bernoulli_family(const UcbState& state) {
  for (const FiniteCdf& f : state.empirical)
    if (!f.is_bernoulli()) return false;
  return true;
}

/// Shift `budget` of Wasserstein mass toward the top (dir > 0) or bottom
/// (dir < 0) atom of the empirical support.
FiniteCdf shifted(const FiniteCdf& cdf, double budget, int dir) {
  if (budget <= 0.0 || cdf.size() < 2) return cdf;
  auto atoms = cdf.atoms();
  const double anchor = dir > 0 ? atoms.back().value : atoms.front().value;
  const std::size_t anchor_idx = dir > 0 ? atoms.size() - 1 : 0;
  double moved_mass = 0.0;
  if (dir > 0) {
    for (std::size_t j = 0; j + 1 < atoms.size() && budget > 0.0; ++j) {
      const double gap = anchor - atoms[j].value;
      if (gap <= 0.0) continue;
      const double mass = std::min(atoms[j].prob, budget / gap);
      atoms[j].prob -= mass;
      moved_mass += mass;
      budget -= mass * gap;
    }
  } else {
    for (std::size_t j = atoms.size(); j-- > 1 && budget > 0.0;) {
      const double gap = atoms[j].value - anchor;
      if (gap <= 0.0) continue;
      const double mass = std::min(atoms[j].prob, budget / gap);
      atoms[j].prob -= mass;
      moved_mass += mass;
      budget -= mass * gap;
    }
  }
  atoms[anchor_idx].prob += moved_mass;
  return FiniteCdf::from_atoms(std::move(atoms));
}

/// Optimistic value of one grid point: the inner max over the per-arm
/// confidence balls. Bernoulli-family states reduce to maximizing h over the
/// achievable mixture-mean interval, which is exact; general supports scan a
/// common shift parameter over monotone mass transports at resolution 1e-3.
double optimistic_value(const UcbState& state, const MixtureWeights& a,
                        const DistortionSpec& spec, bool bern_family,
                        const std::vector<double>& lo, const std::vector<double>& hi) {
  if (bern_family) {
    double mlo = 0.0, mhi = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      mlo += a[i] * lo[i];
      mhi += a[i] * hi[i];
    }
    return max_h_on_interval(spec, mlo, mhi);
  }
  constexpr double kShiftResolution = 1e-3;
  double best = -1e300;
  for (double lambda = -1.0; lambda <= 1.0 + kShiftResolution / 2; lambda += kShiftResolution) {
    std::vector<FiniteCdf> shifted_arms;
    shifted_arms.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      shifted_arms.push_back(shifted(state.empirical[i], std::abs(lambda) * state.radius(i),
                                     lambda >= 0 ? +1 : -1));
    best = std::max(best, mixture_value(spec, a, shifted_arms));
  }
  return best;
}

struct ConfidenceBoxes {
  bool bern = false;
  bool all_vacuous = false;
  std::vector<double> lo, hi, means;
};

ConfidenceBoxes confidence_boxes(const UcbState& state) {
  const std::size_t K = state.pulls.size();
  if (state.empirical.size() != K)
    throw std::invalid_argument("ucb estimate: state dimension mismatch");
  ConfidenceBoxes b;
  b.bern = bernoulli_family(state);
  b.lo.assign(K, 0.0);
  b.hi.assign(K, 0.0);
  b.means.assign(K, 0.0);
  b.all_vacuous = true;
  for (std::size_t i = 0; i < K; ++i) {
    const double r = state.radius(i);
    b.means[i] = state.empirical[i].mean();
    b.lo[i] = std::max(0.0, b.means[i] - r);
    b.hi[i] = std::min(1.0, b.means[i] + r);
    b.all_vacuous = b.all_vacuous && b.lo[i] <= 0.0 && b.hi[i] >= 1.0;
  }
  return b;
}

/// Single pass over grid points supplied by `scan`: outer optimistic argmax
/// with ties broken toward the empirically best, then lexicographically
/// first candidate. Sticky: a previous estimate that attains the max within
/// 1e-12 is returned unchanged.
template <typename Scan>
MixtureWeights select_optimistic(const UcbState& state, const DistortionSpec& spec,
                                 const MixtureWeights* previous, Scan&& scan) {
  const ConfidenceBoxes box = confidence_boxes(state);

  // Radii covering the whole unit range make every grid point optimistically
  // equal to the global peak of h, so the sticky estimate never moves and
  // the tie-break reduces to the empirical argmax.
  if (box.bern && box.all_vacuous) {
    if (previous) return *previous;
    MixtureWeights best;
    double best_emp = -1e300;
    scan([&](const MixtureWeights& a) {
      double m = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) m += a[i] * box.means[i];
      const double v = eval_h(spec, std::clamp(m, 0.0, 1.0));
      if (v > best_emp + kTieTol) {
        best_emp = v;
        best = a;
      }
    });
    if (best.empty()) throw std::domain_error("ucb estimate: empty grid");
    return best;
  }

  MixtureWeights best;
  double max_opt = -1e300, best_emp = -1e300;
  scan([&](const MixtureWeights& a) {
    const double opt = optimistic_value(state, a, spec, box.bern, box.lo, box.hi);
    if (opt > max_opt + kTieTol) {
      max_opt = opt;
      best = a;
      best_emp = mixture_value(spec, a, state.empirical);
    } else if (opt >= max_opt - kTieTol) {
      const double emp = mixture_value(spec, a, state.empirical);
      if (emp > best_emp + kTieTol) {
        best_emp = emp;
        best = a;
      }
    }
  });
  if (best.empty()) throw std::domain_error("ucb estimate: empty grid");

  if (previous &&
      optimistic_value(state, *previous, spec, box.bern, box.lo, box.hi) >=
          max_opt - kTieTol)
    return *previous;
  return best;
}

}  // namespace

MixtureWeights ucb_optimistic(const UcbState& state,
                              const std::vector<MixtureWeights>& grid,
                              const DistortionSpec& spec, const MixtureWeights* previous) {
  if (grid.empty()) throw std::invalid_argument("ucb_optimistic: empty grid");
  return select_optimistic(state, spec, previous, [&grid](auto&& fn) {
    for (const MixtureWeights& a : grid) fn(a);
  });
}

double ce_index(const UcbState& state, const MixtureWeights& a,
                const DistortionSpec& spec) {
  if (a.size() != state.pulls.size())
    throw std::invalid_argument("ce_index: dimension mismatch");
  double bonus = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    bonus += std::pow(a[i] * state.radius(i), spec.holder_q());
  return mixture_value(spec, a, state.empirical) + spec.holder_L() * bonus;
}

namespace {

MixtureWeights select_estimate(const UcbState& state, const GridSpec& grid,
                               const DistortionSpec& spec, UcbVariant variant,
                               const MixtureWeights* previous) {
  if (variant == UcbVariant::Exact)
    return select_optimistic(state, spec, previous,
                             [&grid](auto&& fn) { visit_grid(grid, fn); });

  double max_index = -1e300;
  MixtureWeights best;
  visit_grid(grid, [&](const MixtureWeights& a) {
    const double v = ce_index(state, a, spec);
    if (v > max_index + kTieTol) {
      max_index = v;
      best = a;
    }
  });
  if (best.empty()) throw std::domain_error("ucb estimate: empty grid");
  if (previous && ce_index(state, *previous, spec) >= max_index - kTieTol)
    return *previous;
  return best;
}

}  // namespace

PolicyTrajectory ucb_run(const BanditEnv& env, const UcbConfig& cfg,
                         const DistortionSpec& spec) {
  RunState run(env);
  const std::size_t K = env.arms.size();
  const std::uint64_t T = env.horizon;

  std::uint64_t per_arm = cfg.explore_per_arm;
  if (per_arm == 0)
    per_arm = static_cast<std::uint64_t>(
        std::ceil(cfg.rho * static_cast<double>(T) * cfg.eps / 4.0));
  per_arm = std::max<std::uint64_t>(per_arm, 1);
  if (per_arm > T / K)
    throw std::domain_error("ucb_run: forced-exploration budget exceeds the horizon");

  for (std::uint64_t s = 0; s < per_arm * K; ++s) run.pull(s % K);

  const GridSpec grid{K, cfg.eps, GridScheme::UcbMidpoint};

  UcbState state;
  state.horizon = T;
  state.pulls = run.counts;
  state.empirical = run.empirical();

  MixtureWeights a;
  std::vector<std::pair<std::uint64_t, MixtureWeights>> history;
  if (cfg.frozen_estimate) {
    a = *cfg.frozen_estimate;
    if (a.size() != K) throw std::invalid_argument("frozen estimate dimension mismatch");
  } else {
    a = select_estimate(state, grid, spec, cfg.variant, nullptr);
  }
  history.emplace_back(run.t, a);

  const std::uint64_t stride = std::max<std::uint64_t>(cfg.recompute_stride, 1);
  std::uint64_t steps_since = 0;
  while (run.t < T) {
    // Most under-sampled arm: argmax_i { t a(i) - tau_t(i) }, lowest index
    // on ties.
    std::size_t arm = 0;
    double best_deficit = -1e300;
    const double t_now = static_cast<double>(run.t);
    for (std::size_t i = 0; i < K; ++i) {
      const double deficit = t_now * a[i] - static_cast<double>(run.counts[i]);
      if (deficit > best_deficit) {
        best_deficit = deficit;
        arm = i;
      }
    }
    run.pull(arm);
    state.pulls[arm] = run.counts[arm];
    state.empirical[arm] = empirical_to_cdf(run.tallies[arm]);

    if (!cfg.frozen_estimate && ++steps_since >= stride && run.t < T) {
      steps_since = 0;
      MixtureWeights next = select_estimate(state, grid, spec, cfg.variant, &a);
      if (next != a) {
        a = std::move(next);
        history.emplace_back(run.t, a);
      }
    }
  }

  return run.finish(std::move(history));
}

PolicyTrajectory uniform_run(const BanditEnv& env) {
  RunState run(env);
  const std::size_t K = env.arms.size();
  for (std::uint64_t s = 0; s < env.horizon; ++s) run.pull(s % K);
  return run.finish({});
}

TrackingHorizon t_epsilon(std::size_t K, double L, double q, double delta_min,
                          double eps, double rho) {
  if (K == 0 || L <= 0 || q <= 0 || delta_min <= 0 || eps <= 0 || rho <= 0)
    throw std::invalid_argument("t_epsilon: arguments must be positive");
  const double e = std::exp(1.0);
  const double threshold =
      std::pow(delta_min / (2.0 * static_cast<double>(K) * L), 1.0 / q) / 16.0;
  const auto radius_at = [&](double s) {
    return (std::sqrt(2.0 * e * std::log(s)) + 32.0) /
           std::sqrt(rho / 4.0 * s * eps);
  };
  // radius_at is strictly decreasing for s >= 2, so the first satisfying
  // instant is found by bisection.
  double lo = 2.0, hi = 2.0;
  while (radius_at(hi) > threshold) {
    hi *= 2.0;
    if (hi > 1e306) throw std::domain_error("t_epsilon: T0 overflows");
  }
  while (hi - lo > 0.5) {
    const double mid = 0.5 * (lo + hi);
    (radius_at(mid) > threshold ? lo : hi) = mid;
  }
  TrackingHorizon out;
  out.t0 = std::ceil(hi);
  out.t_eps = 2.0 / eps * (out.t0 - 1.0);
  return out;
}

}  // namespace drbandit
