#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "drbandit/dist.hpp"
#include "drbandit/riskmetric.hpp"

namespace drbandit {

using MixtureWeights = std::vector<double>;

/// Discretization of the simplex. EtcLattice places coordinates on
/// {0, eps, 2eps, ...}; UcbMidpoint on {eps/2, 3eps/2, ...}. In both cases
/// the last coordinate absorbs the residual when 1/eps is not an integer
/// (it may sit off-lattice but is never negative).
enum class GridScheme { EtcLattice, UcbMidpoint };

struct GridSpec {
  std::size_t K = 1;
  double eps = 1.0;
  GridScheme scheme = GridScheme::EtcLattice;
};

/// Walk the grid in lexicographic order without materializing it; the
/// buffer passed to the visitor is reused between calls. Points whose
/// residual coordinate would be negative are skipped. Large K at fine eps
/// produces millions of points, which is why the policies scan lazily.
void visit_grid(const GridSpec& grid,
                const std::function<void(const MixtureWeights&)>& visit);

/// Enumerate the grid in lexicographic order, without duplicates.
std::vector<MixtureWeights> enumerate_grid(const GridSpec& grid);

enum class OracleMethod { ClosedFormBernoulli, GridSearch };

struct OracleResult {
  MixtureWeights weights;
  double value = 0.0;
  OracleMethod method = OracleMethod::GridSearch;
};

/// Optimal mixture on the continuous simplex. All-Bernoulli instances reduce
/// to maximizing h over the achievable mean interval [min p, max p] (1-D
/// scan at `resolution` plus the closed-form peak of h); anything else falls
/// back to an EtcLattice grid search at eps = resolution. Ties break toward
/// the lexicographically smallest weights.
OracleResult oracle_continuous(const DistortionSpec& spec,
                               const std::vector<ArmModel>& arms,
                               double resolution = 1e-4);

/// Exhaustive argmax of V over the grid, same tie-break.
OracleResult oracle_discrete(const DistortionSpec& spec,
                             const std::vector<ArmModel>& arms,
                             const GridSpec& grid);

/// Minimum sub-optimality gap Delta_min(eps): best grid value minus the best
/// value among points that are not co-optimal (ties within 1e-12 count as
/// co-optimal). Throws std::domain_error when every point is co-optimal.
double min_gap(const DistortionSpec& spec, const std::vector<ArmModel>& arms,
               const GridSpec& grid);

/// Least-squares slope of log Delta_min(eps) against log eps over a
/// decreasing eps sequence (>= 3 values); estimates the gap constant beta.
double beta_estimate(const DistortionSpec& spec, const std::vector<ArmModel>& arms,
                     const std::vector<double>& eps_sequence,
                     GridScheme scheme = GridScheme::EtcLattice);

/// Upper bound on the discretization error: L (K W)^r (eps/2)^r.
double discretization_error_bound(double L, std::size_t K, double W, double r,
                                  double eps);

}  // namespace drbandit
