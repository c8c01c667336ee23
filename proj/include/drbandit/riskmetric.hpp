#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drbandit/dist.hpp"

namespace drbandit {

/// Distortion function families. Each maps [0,1] -> [0,1] with h(0) = 0.
/// Monotone kinds are classical risk measures; the non-monotone ones are
/// deviation measures whose optimum may be an arm mixture.
enum class DistortionKind {
  RiskNeutral,
  DualPower,       // 1 - (1-u)^s, s >= 2
  Quadratic,       // (1+s)u - su^2, s in [0,1]
  CVaR,            // min{u/(1-alpha), 1}, alpha in (0,1)
  PHT,             // u^s, s in (0,1)
  MeanMedianDeviation,  // min{u, 1-u}
  InterESRange,    // 2*min{u, 1-u} (alpha fixed at 1/2)
  WangRightTail,   // sqrt(u) - u
  GiniDeviation,   // u(1-u)
};

/// A distortion function together with the Holder metadata used by the
/// policies and the regret bounds: exponent q, mixture exponent r (the
/// worst-case tabulated value; see effective_r for the instance-specific
/// one), unified constant L = max{L_H, L_MH}, and the gap constant beta
/// where it is characterized.
class DistortionSpec {
 public:
  /// Throws std::invalid_argument when the parameter is outside the
  /// admissible range for the kind. Parameters are validated here so that
  /// eval_h never has to.
  DistortionSpec(DistortionKind kind, double param = 0.0);

  DistortionKind kind() const { return kind_; }
  double param() const { return param_; }

  double holder_q() const { return q_; }
  double holder_r() const { return r_; }
  double holder_L() const { return L_; }
  std::optional<double> beta() const { return beta_; }
  bool monotone() const { return monotone_; }

  /// Location of the maximizer of h on [0,1] (1.0 for monotone kinds).
  double peak() const { return peak_; }
  /// h evaluated at the peak, i.e. max_u h(u).
  double peak_value() const { return peak_value_; }

  std::string token() const;

 private:
  DistortionKind kind_;
  double param_;
  double q_, r_, L_;
  std::optional<double> beta_;
  bool monotone_;
  double peak_, peak_value_;
};

/// Parse a riskmetric token such as "gini", "cvar:0.75", "pht:0.5",
/// "dualpower:2", "quadratic:0.5", "mean", "mmd", "ier", "wang".
DistortionSpec parse_riskmetric(const std::string& token);

/// h(u) per the closed forms of the distortion table. Requires u in [0,1].
double eval_h(const DistortionSpec& spec, double u);

/// Maximum of h over the interval [lo, hi] (clamped to [0,1]). Exact: every
/// supported h is monotone on either side of its single peak.
double max_h_on_interval(const DistortionSpec& spec, double lo, double hi);

/// The distortion riskmetric U_h of a finite-support CDF on the nonnegative
/// reals, evaluated exactly as a piecewise sum over CDF segments:
///   U_h(F) = x_1 h(1) + sum_j (x_{j+1} - x_j) h(1 - F(x_j)).
/// Throws std::domain_error if any atom is negative.
double choquet(const DistortionSpec& spec, const FiniteCdf& cdf);

/// V(alpha, F): the riskmetric of the weighted mixture of the arm CDFs.
/// All-Bernoulli inputs take the closed-form shortcut h(<alpha, p>).
double mixture_value(const DistortionSpec& spec,
                     const std::vector<double>& weights,
                     const std::vector<FiniteCdf>& arms);

/// Instance-specific mixture Holder exponent for Bernoulli arms: the
/// tabulated r applies when the means straddle the peak of h, and collapses
/// to the solitary-arm case (r = q for the non-monotone kinds) otherwise.
double effective_r(const DistortionSpec& spec, const std::vector<double>& means);

/// Gap constant beta when it is defined for this instance. For CVaR the
/// table characterizes beta = 1 only when every arm mean is below 1 - alpha;
/// outside that condition the value is unknown and nullopt is returned.
std::optional<double> effective_beta(const DistortionSpec& spec,
                                     const std::vector<double>& means);

/// Per-instance riskmetric cap: max atom value times max_u h(u).
double dr_upper_bound(const DistortionSpec& spec, const std::vector<FiniteCdf>& arms);

}  // namespace drbandit
