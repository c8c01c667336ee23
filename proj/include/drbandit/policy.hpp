#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "drbandit/dist.hpp"
#include "drbandit/riskmetric.hpp"
#include "drbandit/simplex.hpp"

namespace drbandit {

/// One simulated bandit instance: the true arms, the horizon, and the RNG
/// identity of this trial. Policies draw arm i's rewards from the
/// (seed, trial, i) stream.
struct BanditEnv {
  std::vector<ArmModel> arms;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

/// Full record of one run: the action sequence, final pull counts, the
/// mixture-estimate history at change points, and the final empirical CDFs.
struct PolicyTrajectory {
  std::uint64_t horizon = 0;
  std::vector<std::uint16_t> actions;            // arm index per step, 0-based
  std::vector<std::uint64_t> final_counts;       // tau_T(i)
  std::vector<std::pair<std::uint64_t, MixtureWeights>> estimate_history;
  std::vector<FiniteCdf> final_empirical;

  std::vector<double> final_fractions() const;
  /// Last mixture estimate the policy committed to or tracked.
  const MixtureWeights& final_estimate() const;
};

/// Exploration duration of RS-ETC-M (ceiling of the Eq.-style expression):
///   256 K e (2KL/Delta_min)^(2/q) [32/sqrt(e) + log^(1/2)(2KT^2(eps^-(K-1)+1))]^2
/// Throws std::domain_error when the result exceeds the horizon, which at
/// practical horizons it essentially always does; experiment configs supply
/// an explicit exploration length instead.
std::uint64_t n_epsilon(std::size_t K, double L, double q, double delta_min,
                        double eps, std::uint64_t T);

/// Helper shared by n_epsilon and its tests: the formula before the ceiling.
double n_epsilon_raw(std::size_t K, double L, double q, double delta_min,
                     double eps, std::uint64_t T);

struct EtcConfig {
  double eps = 0.1;
  /// Minimum gap, supplied or computed from the true arms via min_gap.
  double delta_min = 0.0;
  /// Per-arm exploration pulls. 0 selects ceil(n_epsilon / K), which
  /// requires n_epsilon(...) <= T.
  std::uint64_t explore_per_arm = 0;
};

/// RS-ETC-M: uniform exploration, one grid argmax on the empirical CDFs,
/// then commit (arms 1..K-1 topped up to floor(T a(i)) in order when
/// under-explored, remaining budget to arm K).
PolicyTrajectory etc_run(const BanditEnv& env, const EtcConfig& cfg,
                         const DistortionSpec& spec);

enum class UcbVariant { Exact, ComputationallyEfficient };

struct UcbConfig {
  double rho = 0.1;
  double eps = 0.1;
  UcbVariant variant = UcbVariant::Exact;
  /// Per-arm forced exploration pulls. 0 selects ceil(rho * T * eps / 4).
  std::uint64_t explore_per_arm = 0;
  /// Recompute the mixture estimate every `stride` steps (1 = every step).
  std::uint64_t recompute_stride = 1;
  /// Debug/diagnostic hook: freeze the tracked mixture to this value and
  /// skip estimation entirely (used by the tracking tests).
  std::optional<MixtureWeights> frozen_estimate;
};

/// Estimation state visible to the optimistic/CE estimators: per-arm pull
/// counts and empirical CDFs plus the horizon that sets the radii.
struct UcbState {
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> pulls;
  std::vector<FiniteCdf> empirical;
  /// When set, confidence radii are forced to zero (oracle-CDF injection).
  bool zero_radii = false;

  double radius(std::size_t arm) const;
};

/// Optimistic mixture estimate per the confidence-space argmax: outer argmax
/// over the grid, inner max over per-arm Wasserstein balls. Bernoulli-family
/// states solve the inner problem exactly on the achievable-mean interval;
/// general finite supports scan monotone mass shifts at resolution 1e-3.
/// If `previous` attains the max within 1e-12 it is returned unchanged;
/// otherwise ties break toward the empirically best candidate, then
/// lexicographically.
MixtureWeights ucb_optimistic(const UcbState& state,
                              const std::vector<MixtureWeights>& grid,
                              const DistortionSpec& spec,
                              const MixtureWeights* previous = nullptr);

/// CE-UCB-M index: empirical mixture riskmetric plus the exploration bonus
/// L * sum_i (a(i) * radius_i)^q.
double ce_index(const UcbState& state, const MixtureWeights& a,
                const DistortionSpec& spec);

/// RS-UCB-M / CE-UCB-M: round-robin forced exploration, then per step
/// re-estimate the mixture (sticky) and pull the most under-sampled arm,
/// argmax_i { t a_t(i) - tau_t(i) }, ties to the lowest index.
PolicyTrajectory ucb_run(const BanditEnv& env, const UcbConfig& cfg,
                         const DistortionSpec& spec);

/// Round-robin baseline: each arm T/K times, remainder to the lowest indices.
PolicyTrajectory uniform_run(const BanditEnv& env);

/// Diagnostic pair (T0(eps), T(eps) = (2/eps)(T0(eps) - 1)) from the
/// tracking analysis; no algorithm consumes it. Values routinely dwarf any
/// runnable horizon, hence doubles.
struct TrackingHorizon {
  double t0 = 0.0;
  double t_eps = 0.0;
};
TrackingHorizon t_epsilon(std::size_t K, double L, double q, double delta_min,
                          double eps, double rho);

}  // namespace drbandit
