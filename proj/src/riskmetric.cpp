#include "drbandit/riskmetric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drbandit {

DistortionSpec::DistortionSpec(DistortionKind kind, double param)
    : kind_(kind), param_(param) {
  q_ = 1.0;
  r_ = 1.0;
  L_ = 1.0;
  beta_ = 1.0;
  monotone_ = true;
  peak_ = 1.0;
  peak_value_ = 1.0;

  switch (kind_) {
    case DistortionKind::RiskNeutral:
      break;
    case DistortionKind::DualPower:
      if (param_ < 2.0) throw std::invalid_argument("dualpower: s must be >= 2");
      L_ = param_;
      break;
    case DistortionKind::Quadratic:
      if (param_ < 0.0 || param_ > 1.0)
        throw std::invalid_argument("quadratic: s must be in [0,1]");
      L_ = 1.0 + param_;
      break;
    case DistortionKind::CVaR:
      if (param_ <= 0.0 || param_ >= 1.0)
        throw std::invalid_argument("cvar: alpha must be in (0,1)");
      L_ = 1.0 / (1.0 - param_);
      // beta = 1 is characterized only when all arm means sit below
      // 1 - alpha; effective_beta applies that condition.
      break;
    case DistortionKind::PHT:
      if (param_ <= 0.0 || param_ >= 1.0)
        throw std::invalid_argument("pht: s must be in (0,1)");
      q_ = param_;
      r_ = param_;
      break;
    case DistortionKind::MeanMedianDeviation:
      monotone_ = false;
      beta_.reset();
      peak_ = 0.5;
      peak_value_ = 0.5;
      break;
    case DistortionKind::InterESRange:
      monotone_ = false;
      beta_.reset();
      L_ = 2.0;
      peak_ = 0.5;
      peak_value_ = 1.0;
      break;
    case DistortionKind::WangRightTail:
      monotone_ = false;
      beta_.reset();
      q_ = 0.5;
      r_ = 1.0;
      peak_ = 0.25;
      peak_value_ = 0.25;
      break;
    case DistortionKind::GiniDeviation:
      monotone_ = false;
      beta_.reset();
      r_ = 2.0;
      peak_ = 0.5;
      peak_value_ = 0.25;
      break;
  }
}

std::string DistortionSpec::token() const {
  std::ostringstream os;
  switch (kind_) {
    case DistortionKind::RiskNeutral: return "mean";
    case DistortionKind::DualPower: os << "dualpower:" << param_; break;
    case DistortionKind::Quadratic: os << "quadratic:" << param_; break;
    case DistortionKind::CVaR: os << "cvar:" << param_; break;
    case DistortionKind::PHT: os << "pht:" << param_; break;
    case DistortionKind::MeanMedianDeviation: return "mmd";
    case DistortionKind::InterESRange: return "ier";
    case DistortionKind::WangRightTail: return "wang";
    case DistortionKind::GiniDeviation: return "gini";
  }
  return os.str();
}

DistortionSpec parse_riskmetric(const std::string& token) {
  std::string name = token;
  double param = 0.0;
  bool has_param = false;
  if (auto colon = token.find(':'); colon != std::string::npos) {
    name = token.substr(0, colon);
    param = std::stod(token.substr(colon + 1));
    has_param = true;
  }
  if (name == "mean" || name == "riskneutral") return DistortionSpec(DistortionKind::RiskNeutral);
  if (name == "gini") return DistortionSpec(DistortionKind::GiniDeviation);
  if (name == "mmd") return DistortionSpec(DistortionKind::MeanMedianDeviation);
  if (name == "ier") return DistortionSpec(DistortionKind::InterESRange);
  if (name == "wang") return DistortionSpec(DistortionKind::WangRightTail);
  if (!has_param)
    throw std::invalid_argument("riskmetric '" + name + "' needs a parameter (name:value)");
  if (name == "cvar") return DistortionSpec(DistortionKind::CVaR, param);
  if (name == "pht") return DistortionSpec(DistortionKind::PHT, param);
  if (name == "dualpower") return DistortionSpec(DistortionKind::DualPower, param);
  if (name == "quadratic") return DistortionSpec(DistortionKind::Quadratic, param);
  throw std::invalid_argument("unknown riskmetric token: '" + token + "'");
}

double eval_h(const DistortionSpec& spec, double u) {
  if (u < 0.0 || u > 1.0) throw std::domain_error("eval_h: u outside [0,1]");
  const double s = spec.param();
  switch (spec.kind()) {
    case DistortionKind::RiskNeutral: return u;
    case DistortionKind::DualPower: return 1.0 - std::pow(1.0 - u, s);
    case DistortionKind::Quadratic: return (1.0 + s) * u - s * u * u;
    case DistortionKind::CVaR: return std::min(u / (1.0 - s), 1.0);
    case DistortionKind::PHT: return std::pow(u, s);
    case DistortionKind::MeanMedianDeviation: return std::min(u, 1.0 - u);
    case DistortionKind::InterESRange: return 2.0 * std::min(u, 1.0 - u);
    case DistortionKind::WangRightTail: return std::sqrt(u) - u;
    case DistortionKind::GiniDeviation: return u * (1.0 - u);
  }
  throw std::logic_error("eval_h: unreachable");
}

double max_h_on_interval(const DistortionSpec& spec, double lo, double hi) {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (lo > hi) std::swap(lo, hi);
  double best = std::max(eval_h(spec, lo), eval_h(spec, hi));
  if (spec.peak() > lo && spec.peak() < hi)
    best = std::max(best, spec.peak_value());
  return best;
}

double choquet(const DistortionSpec& spec, const FiniteCdf& cdf) {
  const auto& xs = cdf.values();
  const auto& cum = cdf.cum();
  if (xs.empty()) throw std::invalid_argument("choquet: empty cdf");
  if (xs.front() < 0.0)
    throw std::domain_error("choquet: negative support is unsupported");

  // Segment [0, x_1) has survival 1; past x_n the survival is 0 and h(0)=0.
  double value = xs.front() * eval_h(spec, 1.0);
  for (std::size_t j = 0; j + 1 < xs.size(); ++j)
    value += (xs[j + 1] - xs[j]) * eval_h(spec, 1.0 - cum[j]);
  return value;
}

double mixture_value(const DistortionSpec& spec, const std::vector<double>& weights,
                     const std::vector<FiniteCdf>& arms) {
  if (weights.size() != arms.size())
    throw std::invalid_argument("mixture_value: dimension mismatch");
  if (arms.empty()) throw std::invalid_argument("mixture_value: no arms");

  bool all_bern = true;
  for (const FiniteCdf& f : arms) all_bern = all_bern && f.is_bernoulli();
  if (all_bern) {
    double m = 0.0, total = 0.0;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      m += weights[i] * arms[i].mean();
      total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("mixture_value: weights off the simplex");
    return eval_h(spec, std::clamp(m, 0.0, 1.0));
  }
  return choquet(spec, mix(weights, arms));
}

double effective_r(const DistortionSpec& spec, const std::vector<double>& means) {
  if (means.empty()) throw std::invalid_argument("effective_r: no means");
  if (spec.monotone()) return spec.holder_r();
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const bool straddle = *lo <= spec.peak() && spec.peak() <= *hi;
  if (straddle) return spec.holder_r();
  // Solitary-arm regime: r falls back to q.
  return spec.holder_q();
}

std::optional<double> effective_beta(const DistortionSpec& spec,
                                     const std::vector<double>& means) {
  if (spec.kind() == DistortionKind::CVaR) {
    for (double m : means)
      if (m >= 1.0 - spec.param()) return std::nullopt;
    return 1.0;
  }
  return spec.beta();
}

double dr_upper_bound(const DistortionSpec& spec, const std::vector<FiniteCdf>& arms) {
  double top = 0.0;
  for (const FiniteCdf& f : arms) top = std::max(top, f.max_value());
  return top * spec.peak_value();
}

}  // namespace drbandit
