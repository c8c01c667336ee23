#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace drbandit {

inline constexpr double kAtomMergeTol = 1e-12;

/// One support point of a finite distribution.
struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

/// Finite-support CDF on the nonnegative reals: sorted atoms with strictly
/// increasing values and strictly increasing cumulative probabilities ending
/// at 1. Right-continuous step-function semantics. Immutable by convention.
class FiniteCdf {
 public:
  FiniteCdf() = default;

  /// Build from (value, probability) pairs. Atoms closer than kAtomMergeTol
  /// are merged; zero-probability atoms are dropped. Throws on negative
  /// values, nonpositive masses after merging, or total mass != 1 (1e-12).
  static FiniteCdf from_atoms(std::vector<Atom> atoms);
  static FiniteCdf bernoulli(double p);
  static FiniteCdf point_mass(double value);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& cum() const { return cum_; }
  std::size_t size() const { return values_.size(); }

  /// F(x), right-continuous.
  double at(double x) const;
  std::vector<Atom> atoms() const;
  double mean() const;
  double max_value() const;

  /// True when the support is contained in {0, 1}; such a CDF is Bernoulli
  /// with parameter mean().
  bool is_bernoulli() const;

 private:
  std::vector<double> values_;
  std::vector<double> cum_;
};

/// Arm reward model: Bernoulli(p) or an explicit finite support.
struct ArmModel {
  enum class Kind { Bernoulli, FiniteSupport };
  Kind kind = Kind::Bernoulli;
  double p = 0.0;            // Bernoulli parameter
  std::vector<Atom> atoms;   // FiniteSupport atoms, sorted by value

  static ArmModel bern(double p);
  static ArmModel finite(std::vector<Atom> atoms);

  FiniteCdf cdf() const;
  double mean() const;
  bool is_bernoulli() const { return kind == Kind::Bernoulli; }
};

/// Parse an arm list token: "bern:0.4,bern:0.9" or "atoms:0@0.6;1@0.4".
std::vector<ArmModel> parse_arms(const std::string& token);

/// Counter-based random stream keyed by (seed, trial, arm). Identical keys
/// reproduce identical sequences regardless of worker count or interleaving,
/// which is what makes parallel trials bit-reproducible.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t arm);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double next_double();

 private:
  std::uint64_t state_;
};

/// Draw one reward from the arm.
double sample(const ArmModel& arm, RngStream& rng);

/// Tallied observations for one arm; owned and mutated by a single policy
/// loop, never shared.
class EmpiricalCdf {
 public:
  void add(double value);
  std::size_t n() const { return n_; }
  double mean() const;
  const std::map<double, std::size_t>& counts() const { return counts_; }

 private:
  std::map<double, std::size_t> counts_;
  std::size_t n_ = 0;
  double sum_ = 0.0;
};

/// Step CDF with jumps tally/n at each observed value. Throws
/// std::domain_error when no samples have been recorded.
FiniteCdf empirical_to_cdf(const EmpiricalCdf& e);

/// Weighted mixture of CDFs: cum(x) = sum_i w_i F_i(x). Weights must lie on
/// the simplex and match the number of CDFs; zero-weight entries contribute
/// nothing.
FiniteCdf mix(const std::vector<double>& weights, const std::vector<FiniteCdf>& cdfs);

/// 1-Wasserstein distance: exact integral of |F - G| over the union of
/// breakpoints.
double wasserstein1(const FiniteCdf& f, const FiniteCdf& g);

/// Confidence radius of the distribution confidence space:
/// 16 (sqrt(2e log T) + 32) / sqrt(pulls). Throws std::domain_error for
/// pulls = 0. The horizon enters only through log(horizon).
double confidence_radius(std::uint64_t pulls, double horizon);

/// Monte-Carlo estimate (a maximum over sampled simplex pairs, hence a lower
/// bound) of W = max ||sum_i a_i F_i - sum_j b_j F_j||_W / ||a - b||_1.
double wasserstein_ratio(const std::vector<FiniteCdf>& arms, std::size_t samples,
                         std::uint64_t seed = 0);

}  // namespace drbandit
