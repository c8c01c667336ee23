#include "drbandit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drbandit {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kTieTol = 1e-12;

void visit_rec(const GridSpec& grid, std::size_t coord, double remaining,
               MixtureWeights& point,
               const std::function<void(const MixtureWeights&)>& visit) {
  if (coord + 1 == grid.K) {
    // Last coordinate absorbs whatever is left of the unit mass.
    if (remaining < -kResidualTol) return;
    point[coord] = std::max(remaining, 0.0);
    visit(point);
    return;
  }
  const double offset = grid.scheme == GridScheme::UcbMidpoint ? 0.5 : 0.0;
  for (std::size_t n = 0;; ++n) {
    const double w = (static_cast<double>(n) + offset) * grid.eps;
    if (w > remaining + kResidualTol) break;
    point[coord] = std::min(w, 1.0);
    visit_rec(grid, coord + 1, remaining - point[coord], point, visit);
  }
}

}  // namespace

void visit_grid(const GridSpec& grid,
                const std::function<void(const MixtureWeights&)>& visit) {
  if (grid.K == 0) throw std::invalid_argument("grid: K must be >= 1");
  if (grid.eps <= 0.0 || grid.eps > 1.0)
    throw std::invalid_argument("grid: eps must be in (0,1]");
  MixtureWeights point(grid.K, 0.0);
  visit_rec(grid, 0, 1.0, point, visit);
}

std::vector<MixtureWeights> enumerate_grid(const GridSpec& grid) {
  std::vector<MixtureWeights> out;
  visit_grid(grid, [&out](const MixtureWeights& p) { out.push_back(p); });
  return out;
}

namespace {

std::vector<FiniteCdf> arm_cdfs(const std::vector<ArmModel>& arms) {
  std::vector<FiniteCdf> cdfs;
  cdfs.reserve(arms.size());
  for (const ArmModel& a : arms) cdfs.push_back(a.cdf());
  return cdfs;
}

bool all_bernoulli(const std::vector<ArmModel>& arms) {
  for (const ArmModel& a : arms)
    if (!a.cdf().is_bernoulli()) return false;
  return true;
}

/// Lexicographically smallest simplex point whose Bernoulli-mean lands in
/// [target_lo, target_hi]: each coordinate takes the smallest value that
/// leaves the remaining arms able to reach the target band.
MixtureWeights lex_smallest_for_mean(const std::vector<double>& means,
                                     double target_lo, double target_hi) {
  const std::size_t k = means.size();
  MixtureWeights w(k, 0.0);
  double mass_used = 0.0, mean_used = 0.0;
  // Suffix min/max of the means.
  std::vector<double> min_rest(k + 1, 1e300), max_rest(k + 1, -1e300);
  for (std::size_t i = k; i-- > 0;) {
    min_rest[i] = std::min(min_rest[i + 1], means[i]);
    max_rest[i] = std::max(max_rest[i + 1], means[i]);
  }

  for (std::size_t i = 0; i < k; ++i) {
    const double free_mass = 1.0 - mass_used;
    if (i + 1 == k) {
      w[i] = free_mass;
      break;
    }
    // Feasibility of w_i: the reachable final mean given the suffix is
    //   mean_used + w_i m_i + (free - w_i) [min_rest, max_rest].
    // Both band conditions are affine in w_i; collect the implied bounds.
    double lo_bound = 0.0, hi_bound = free_mass;
    const double mi = means[i];
    const double lo_r = min_rest[i + 1], hi_r = max_rest[i + 1];
    // Condition A: mean_used + w_i m_i + (free - w_i) lo_r <= target_hi
    {
      const double slope = mi - lo_r;
      const double rhs = target_hi - mean_used - free_mass * lo_r;
      if (std::abs(slope) < 1e-15) {
        if (rhs < -kResidualTol) lo_bound = free_mass + 1.0;  // infeasible
      } else if (slope > 0.0) {
        hi_bound = std::min(hi_bound, rhs / slope);
      } else {
        lo_bound = std::max(lo_bound, rhs / slope);
      }
    }
    // Condition B: mean_used + w_i m_i + (free - w_i) hi_r >= target_lo
    {
      const double slope = mi - hi_r;
      const double rhs = target_lo - mean_used - free_mass * hi_r;
      if (std::abs(slope) < 1e-15) {
        if (rhs > kResidualTol) lo_bound = free_mass + 1.0;
      } else if (slope > 0.0) {
        lo_bound = std::max(lo_bound, rhs / slope);
      } else {
        hi_bound = std::min(hi_bound, rhs / slope);
      }
    }
    if (lo_bound > hi_bound + kResidualTol)
      throw std::logic_error("lex_smallest_for_mean: infeasible target band");
    w[i] = std::clamp(lo_bound, 0.0, free_mass);
    mass_used += w[i];
    mean_used += w[i] * mi;
  }
  return w;
}

}  // namespace

OracleResult oracle_continuous(const DistortionSpec& spec,
                               const std::vector<ArmModel>& arms, double resolution) {
  if (arms.empty()) throw std::invalid_argument("oracle_continuous: no arms");
  const auto cdfs = arm_cdfs(arms);

  if (all_bernoulli(arms)) {
    std::vector<double> means;
    means.reserve(arms.size());
    for (const ArmModel& a : arms) means.push_back(a.mean());
    const auto [pmin, pmax] = std::minmax_element(means.begin(), means.end());

    // 1-D scan over the achievable mean interval plus the closed-form
    // candidates (interval ends, peak of h, CVaR knee); the maximizing set
    // is a point or an interval, recovered exactly from the candidates.
    std::vector<double> candidates = {*pmin, *pmax};
    if (spec.peak() > *pmin && spec.peak() < *pmax) candidates.push_back(spec.peak());
    if (spec.kind() == DistortionKind::CVaR) {
      const double knee = 1.0 - spec.param();
      if (knee > *pmin && knee < *pmax) candidates.push_back(knee);
    }
    for (double m = *pmin; m < *pmax; m += resolution) candidates.push_back(m);

    double best = -1.0;
    for (double m : candidates) best = std::max(best, eval_h(spec, m));

    // Canonical maximizing mean. Monotone kinds take the top of the
    // maximizing band (CVaR's plateau would otherwise pull the weights off
    // the solitary arm); non-monotone kinds have a unique maximizer, either
    // the interior peak or the better interval end.
    double m_star;
    if (spec.monotone()) {
      m_star = *pmax;
    } else if (spec.peak() > *pmin && spec.peak() < *pmax) {
      m_star = spec.peak();
    } else {
      m_star = eval_h(spec, *pmin) >= eval_h(spec, *pmax) ? *pmin : *pmax;
    }
    if (eval_h(spec, m_star) < best - kTieTol)
      throw std::logic_error("oracle_continuous: scan beat the closed form");

    OracleResult res;
    res.method = OracleMethod::ClosedFormBernoulli;
    res.weights = lex_smallest_for_mean(means, m_star, m_star);
    res.value = mixture_value(spec, res.weights, cdfs);
    return res;
  }

  GridSpec grid{arms.size(), resolution, GridScheme::EtcLattice};
  OracleResult res = oracle_discrete(spec, arms, grid);
  res.method = OracleMethod::GridSearch;
  return res;
}

OracleResult oracle_discrete(const DistortionSpec& spec,
                             const std::vector<ArmModel>& arms, const GridSpec& grid) {
  if (arms.size() != grid.K)
    throw std::invalid_argument("oracle_discrete: grid dimension mismatch");
  const auto points = enumerate_grid(grid);
  if (points.empty()) throw std::domain_error("oracle_discrete: empty grid");
  const auto cdfs = arm_cdfs(arms);

  OracleResult res;
  res.method = OracleMethod::GridSearch;
  double best = -1e300;
  for (const auto& a : points) {  // lexicographic order; first max wins ties
    const double v = mixture_value(spec, a, cdfs);
    if (v > best + kTieTol) {
      best = v;
      res.weights = a;
    }
  }
  res.value = best;
  return res;
}

double min_gap(const DistortionSpec& spec, const std::vector<ArmModel>& arms,
               const GridSpec& grid) {
  const auto points = enumerate_grid(grid);
  if (points.size() < 2) throw std::invalid_argument("min_gap: grid has < 2 points");
  const auto cdfs = arm_cdfs(arms);

  std::vector<double> values;
  values.reserve(points.size());
  for (const auto& a : points) values.push_back(mixture_value(spec, a, cdfs));
  const double vstar = *std::max_element(values.begin(), values.end());

  double second = -1e300;
  for (double v : values)
    if (v < vstar - kTieTol) second = std::max(second, v);
  if (second == -1e300)
    throw std::domain_error("min_gap: all grid points co-optimal; refine eps");
  return vstar - second;
}

double beta_estimate(const DistortionSpec& spec, const std::vector<ArmModel>& arms,
                     const std::vector<double>& eps_sequence, GridScheme scheme) {
  if (eps_sequence.size() < 3)
    throw std::invalid_argument("beta_estimate: need >= 3 eps values");
  for (std::size_t i = 1; i < eps_sequence.size(); ++i)
    if (eps_sequence[i] >= eps_sequence[i - 1])
      throw std::invalid_argument("beta_estimate: eps sequence must decrease");

  std::vector<double> xs, ys;
  for (double eps : eps_sequence) {
    const double gap = min_gap(spec, arms, GridSpec{arms.size(), eps, scheme});
    xs.push_back(std::log(eps));
    ys.push_back(std::log(gap));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

double discretization_error_bound(double L, std::size_t K, double W, double r,
                                  double eps) {
  return L * std::pow(static_cast<double>(K) * W, r) * std::pow(eps / 2.0, r);
}

}  // namespace drbandit
