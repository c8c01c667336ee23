#include "drbandit/dist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drbandit {

FiniteCdf FiniteCdf::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("FiniteCdf: no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });

  FiniteCdf out;
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (a.value < 0.0)
      throw std::domain_error("FiniteCdf: negative support is unsupported");
    if (a.prob < 0.0) throw std::invalid_argument("FiniteCdf: negative mass");
    if (a.prob == 0.0) continue;
    if (!out.values_.empty() && a.value - out.values_.back() <= kAtomMergeTol) {
      total += a.prob;
      out.cum_.back() = total;
    } else {
      total += a.prob;
      out.values_.push_back(a.value);
      out.cum_.push_back(total);
    }
  }
  if (out.values_.empty()) throw std::invalid_argument("FiniteCdf: zero total mass");
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("FiniteCdf: probabilities sum to " + std::to_string(total));
  out.cum_.back() = 1.0;
  return out;
}

FiniteCdf FiniteCdf::bernoulli(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli: p outside [0,1]");
  if (p <= 0.0) return point_mass(0.0);
  if (p >= 1.0) return point_mass(1.0);
  return from_atoms({{0.0, 1.0 - p}, {1.0, p}});
}

FiniteCdf FiniteCdf::point_mass(double value) { return from_atoms({{value, 1.0}}); }

double FiniteCdf::at(double x) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

std::vector<Atom> FiniteCdf::atoms() const {
  std::vector<Atom> out(values_.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out[i] = {values_[i], cum_[i] - prev};
    prev = cum_[i];
  }
  return out;
}

double FiniteCdf::mean() const {
  double m = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    m += values_[i] * (cum_[i] - prev);
    prev = cum_[i];
  }
  return m;
}

double FiniteCdf::max_value() const { return values_.empty() ? 0.0 : values_.back(); }

bool FiniteCdf::is_bernoulli() const {
  for (double v : values_)
    if (std::abs(v) > kAtomMergeTol && std::abs(v - 1.0) > kAtomMergeTol) return false;
  return true;
}

ArmModel ArmModel::bern(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bern: p outside [0,1]");
  ArmModel a;
  a.kind = Kind::Bernoulli;
  a.p = p;
  return a;
}

ArmModel ArmModel::finite(std::vector<Atom> atoms) {
  ArmModel a;
  a.kind = Kind::FiniteSupport;
  // Validates support/mass and normalizes ordering.
  a.atoms = FiniteCdf::from_atoms(std::move(atoms)).atoms();
  return a;
}

FiniteCdf ArmModel::cdf() const {
  if (kind == Kind::Bernoulli) return FiniteCdf::bernoulli(p);
  return FiniteCdf::from_atoms(atoms);
}

double ArmModel::mean() const { return kind == Kind::Bernoulli ? p : cdf().mean(); }

namespace {

double parse_number(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<ArmModel> parse_arms(const std::string& token) {
  std::vector<ArmModel> arms;
  for (const std::string& part : split(token, ',')) {
    if (part.empty()) continue;
    if (part.rfind("bern:", 0) == 0) {
      arms.push_back(ArmModel::bern(parse_number(part.substr(5))));
    } else if (part.rfind("atoms:", 0) == 0) {
      std::vector<Atom> atoms;
      for (const std::string& pair : split(part.substr(6), ';')) {
        auto at = pair.find('@');
        if (at == std::string::npos)
          throw std::invalid_argument("atom entry needs value@prob: '" + pair + "'");
        atoms.push_back({parse_number(pair.substr(0, at)), parse_number(pair.substr(at + 1))});
      }
      arms.push_back(ArmModel::finite(std::move(atoms)));
    } else {
      throw std::invalid_argument("unknown arm token: '" + part + "'");
    }
  }
  if (arms.empty()) throw std::invalid_argument("empty arm list");
  return arms;
}

namespace {

// splitmix64 finalizer; the stream key is folded in through it as well.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t arm) {
  state_ = mix64(seed);
  state_ = mix64(state_ ^ (trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  state_ = mix64(state_ ^ (arm * 0x9e3779b97f4a7c15ULL + 0x85ebca6b0f6bcdefULL));
}

std::uint64_t RngStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double sample(const ArmModel& arm, RngStream& rng) {
  if (arm.kind == ArmModel::Kind::Bernoulli)
    return rng.next_double() < arm.p ? 1.0 : 0.0;
  double u = rng.next_double();
  double acc = 0.0;
  for (const Atom& a : arm.atoms) {
    acc += a.prob;
    if (u < acc) return a.value;
  }
  return arm.atoms.back().value;
}

void EmpiricalCdf::add(double value) {
  ++counts_[value];
  ++n_;
  sum_ += value;
}

double EmpiricalCdf::mean() const {
  if (n_ == 0) throw std::domain_error("EmpiricalCdf: no samples");
  return sum_ / static_cast<double>(n_);
}

FiniteCdf empirical_to_cdf(const EmpiricalCdf& e) {
  if (e.n() == 0) throw std::domain_error("empirical_to_cdf: empty sample");
  std::vector<Atom> atoms;
  atoms.reserve(e.counts().size());
  const double n = static_cast<double>(e.n());
  for (const auto& [value, tally] : e.counts())
    atoms.push_back({value, static_cast<double>(tally) / n});
  return FiniteCdf::from_atoms(std::move(atoms));
}

FiniteCdf mix(const std::vector<double>& weights, const std::vector<FiniteCdf>& cdfs) {
  if (weights.size() != cdfs.size())
    throw std::invalid_argument("mix: weights/cdfs dimension mismatch");
  if (cdfs.empty()) throw std::invalid_argument("mix: no cdfs");
  double total = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw std::invalid_argument("mix: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("mix: weights sum to " + std::to_string(total));

  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < cdfs.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    for (const Atom& a : cdfs[i].atoms()) atoms.push_back({a.value, weights[i] * a.prob});
  }
  return FiniteCdf::from_atoms(std::move(atoms));
}

double wasserstein1(const FiniteCdf& f, const FiniteCdf& g) {
  std::vector<double> xs;
  xs.reserve(f.size() + g.size());
  xs.insert(xs.end(), f.values().begin(), f.values().end());
  xs.insert(xs.end(), g.values().begin(), g.values().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double dist = 0.0;
  for (std::size_t j = 0; j + 1 < xs.size(); ++j)
    dist += std::abs(f.at(xs[j]) - g.at(xs[j])) * (xs[j + 1] - xs[j]);
  return dist;
}

double confidence_radius(std::uint64_t pulls, double horizon) {
  if (pulls == 0) throw std::domain_error("confidence_radius: zero pulls");
  if (horizon < 2.0) throw std::invalid_argument("confidence_radius: horizon < 2");
  const double e = std::exp(1.0);
  return 16.0 * (std::sqrt(2.0 * e * std::log(horizon)) + 32.0) /
         std::sqrt(static_cast<double>(pulls));
}

namespace {

std::vector<double> random_simplex_point(std::size_t k, RngStream& rng) {
  // Exponential spacings give a uniform Dirichlet(1,...,1) draw.
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - rng.next_double());
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

double wasserstein_ratio(const std::vector<FiniteCdf>& arms, std::size_t samples,
                         std::uint64_t seed) {
  if (arms.size() < 2) throw std::invalid_argument("wasserstein_ratio: need >= 2 arms");
  RngStream rng(seed, 0, 0x57a55e);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    auto a = random_simplex_point(arms.size(), rng);
    auto b = random_simplex_point(arms.size(), rng);
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    if (l1 < 1e-9) continue;
    double w = wasserstein1(mix(a, arms), mix(b, arms));
    best = std::max(best, w / l1);
  }
  return best;
}

}  // namespace drbandit
