#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "drbandit/dist.hpp"

using namespace drbandit;

TEST_SUITE_BEGIN("dist");

TEST_CASE("arm parsing") {
  const auto arms = parse_arms("bern:0.4,bern:0.9");
  REQUIRE(arms.size() == 2);
  CHECK(arms[0].mean() == 0.4);
  CHECK(arms[1].mean() == 0.9);

  const auto finite = parse_arms("atoms:0@0.6;1@0.4");
  REQUIRE(finite.size() == 1);
  CHECK(finite[0].kind == ArmModel::Kind::FiniteSupport);
  CHECK(finite[0].mean() == doctest::Approx(0.4));

  CHECK_THROWS_AS(parse_arms("bern:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_arms("what:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_arms("atoms:0@0.5;1@0.2"), std::invalid_argument);
}

TEST_CASE("sampling stays on the support") {
  SUBCASE("degenerate arms") {
    RngStream rng(1, 0, 0);
    const ArmModel one = ArmModel::bern(1.0);
    const ArmModel point = ArmModel::finite({{2.0, 1.0}});
    for (int i = 0; i < 100; ++i) {
      CHECK(sample(one, rng) == 1.0);
      CHECK(sample(point, rng) == 2.0);
    }
  }
  SUBCASE("law of large numbers, 6 sigma band") {
    RngStream rng(2, 0, 0);
    const ArmModel arm = ArmModel::bern(0.4);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample(arm, rng);
    CHECK(std::abs(sum / n - 0.4) < 0.01);
  }
}

TEST_CASE("rng streams are keyed, not shared") {
  RngStream a(42, 3, 1), b(42, 3, 1), c(42, 4, 1), d(42, 3, 2);
  bool identical = true, trial_differs = false, arm_differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    identical = identical && va == b.next_u64();
    trial_differs = trial_differs || va != c.next_u64();
    arm_differs = arm_differs || va != d.next_u64();
  }
  CHECK(identical);
  CHECK(trial_differs);
  CHECK(arm_differs);
}

TEST_CASE("empirical cdf") {
  EmpiricalCdf e;
  CHECK_THROWS_AS(empirical_to_cdf(e), std::domain_error);

  e.add(1.0);
  e.add(1.0);
  e.add(1.0);
  const FiniteCdf point = empirical_to_cdf(e);
  CHECK(point.size() == 1);
  CHECK(point.mean() == 1.0);

  EmpiricalCdf f;
  f.add(0.0);
  f.add(1.0);
  const FiniteCdf half = empirical_to_cdf(f);
  CHECK(half.at(0.0) == 0.5);
  CHECK(half.is_bernoulli());

  EmpiricalCdf g;
  for (int i = 0; i < 3; ++i) g.add(0.0);
  g.add(1.0);
  CHECK(empirical_to_cdf(g).mean() == doctest::Approx(0.25));
}

TEST_CASE("mix merges weighted atoms") {
  const std::vector<FiniteCdf> arms = {FiniteCdf::bernoulli(0.4), FiniteCdf::bernoulli(0.9)};
  CHECK(mix({0.5, 0.5}, arms).mean() == doctest::Approx(0.65).epsilon(1e-14));
  CHECK(mix({0.8, 0.2}, arms).mean() == doctest::Approx(0.5).epsilon(1e-14));

  SUBCASE("degenerate weights return the first arm") {
    const FiniteCdf m = mix({1.0, 0.0}, arms);
    CHECK(m.values() == arms[0].values());
    CHECK(m.cum() == arms[0].cum());
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(mix({1.0}, arms), std::invalid_argument);
  }
  SUBCASE("mixing identical arms does not inflate the support") {
    const std::vector<FiniteCdf> same = {FiniteCdf::bernoulli(0.3),
                                         FiniteCdf::bernoulli(0.3)};
    CHECK(mix({0.5, 0.5}, same).size() == 2);
  }
}

TEST_CASE("wasserstein1 exact values") {
  CHECK(wasserstein1(FiniteCdf::bernoulli(0.4), FiniteCdf::bernoulli(0.9)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(wasserstein1(FiniteCdf::point_mass(2.0), FiniteCdf::point_mass(5.5)) ==
        doctest::Approx(3.5).epsilon(1e-14));
  const FiniteCdf f = FiniteCdf::from_atoms({{0.0, 0.25}, {1.0, 0.25}, {3.0, 0.5}});
  CHECK(wasserstein1(f, f) == 0.0);
}

TEST_CASE("wasserstein1 metric axioms on random triples") {
  RngStream rng(9, 0, 0);
  for (int i = 0; i < 200; ++i) {
    const auto draw = [&rng]() {
      std::vector<Atom> atoms;
      const std::size_t n = 1 + rng.next_u64() % 4;
      double mass = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        atoms.push_back({3.0 * rng.next_double(), 0.05 + rng.next_double()});
        mass += atoms.back().prob;
      }
      for (Atom& a : atoms) a.prob /= mass;
      return FiniteCdf::from_atoms(std::move(atoms));
    };
    const FiniteCdf f = draw(), g = draw(), h = draw();
    const double fg = wasserstein1(f, g), gf = wasserstein1(g, f);
    CHECK(fg == gf);
    CHECK(wasserstein1(f, h) <= fg + wasserstein1(g, h) + 1e-12);
    CHECK(fg >= 0.0);
  }
}

TEST_CASE("confidence radius formula") {
  const double e = std::exp(1.0);
  CHECK(confidence_radius(256, std::exp(2.0)) ==
        doctest::Approx(std::sqrt(4.0 * e) + 32.0).epsilon(1e-12));
  CHECK(confidence_radius(1, std::exp(1.0)) ==
        doctest::Approx(16.0 * (std::sqrt(2.0 * e) + 32.0)).epsilon(1e-12));
  // 1/sqrt(tau) scaling: quadrupling the pulls halves the radius.
  CHECK(confidence_radius(1024, 50000.0) ==
        doctest::Approx(confidence_radius(256, 50000.0) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(confidence_radius(0, 100.0), std::domain_error);
}

TEST_CASE("wasserstein ratio") {
  const std::vector<FiniteCdf> same = {FiniteCdf::bernoulli(0.5), FiniteCdf::bernoulli(0.5)};
  CHECK(wasserstein_ratio(same, 200) <= 1e-12);

  const std::vector<FiniteCdf> bern = {FiniteCdf::bernoulli(0.1), FiniteCdf::bernoulli(0.9),
                                       FiniteCdf::bernoulli(0.4)};
  const double r = wasserstein_ratio(bern, 2000);
  CHECK(r > 0.0);
  CHECK(r <= 0.5 + 1e-12);

  SUBCASE("support scaled to [0,c] scales the bound by c") {
    const double c = 7.0;
    const double sqrt_2pi = std::sqrt(2.0 * std::acos(-1.0));
    const std::vector<FiniteCdf> scaled = {
        FiniteCdf::from_atoms({{0.0, 0.5}, {c, 0.5}}),
        FiniteCdf::from_atoms({{0.2 * c, 0.3}, {0.9 * c, 0.7}}),
        FiniteCdf::point_mass(0.5 * c)};
    const double rs = wasserstein_ratio(scaled, 2000);
    CHECK(rs <= sqrt_2pi * c);
    CHECK(rs > 0.0);
  }
}

TEST_CASE("empirical cdf converges in wasserstein distance") {
  const ArmModel arm = ArmModel::bern(0.3);
  const FiniteCdf truth = arm.cdf();
  const auto median_w = [&](int n) {
    std::vector<double> ws;
    for (int rep = 0; rep < 200; ++rep) {
      RngStream rng(77, static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(n));
      EmpiricalCdf e;
      for (int i = 0; i < n; ++i) e.add(sample(arm, rng));
      ws.push_back(wasserstein1(empirical_to_cdf(e), truth));
    }
    std::nth_element(ws.begin(), ws.begin() + 100, ws.end());
    return ws[100];
  };
  const double w100 = median_w(100), w10000 = median_w(10000);
  CHECK(w10000 < w100);
  CHECK(w100 / w10000 >= 5.0);
}

TEST_CASE("wasserstein concentration bound is never violated") {
  // The tail bound is extremely loose at these sample sizes (the radius term
  // alone exceeds the diameter of the support), so non-violation is the only
  // meaningful assertion.
  const ArmModel arm = ArmModel::bern(0.35);
  const FiniteCdf truth = arm.cdf();
  for (const std::uint64_t tau : {1000ULL, 10000ULL}) {
    const double y = confidence_radius(tau, 100000.0);
    int violations = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
      RngStream rng(88, static_cast<std::uint64_t>(rep), tau);
      EmpiricalCdf e;
      for (std::uint64_t i = 0; i < tau; ++i) e.add(sample(arm, rng));
      if (wasserstein1(empirical_to_cdf(e), truth) > y) ++violations;
    }
    const double t = static_cast<double>(tau);
    const double bound =
        2.0 * std::exp(-(t / (256.0 * std::exp(1.0))) *
                       std::pow(y - 512.0 / std::sqrt(t), 2.0));
    CHECK(static_cast<double>(violations) / reps <= std::min(bound, 1.0));
  }
}

TEST_SUITE_END();
