#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "drbandit/riskmetric.hpp"

using namespace drbandit;

TEST_SUITE_BEGIN("riskmetric");

TEST_CASE("eval_h closed forms") {
  CHECK(eval_h(parse_riskmetric("gini"), 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eval_h(parse_riskmetric("cvar:0.75"), 0.1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(eval_h(parse_riskmetric("cvar:0.75"), 0.5) == 1.0);
  CHECK(eval_h(parse_riskmetric("dualpower:2"), 0.3) ==
        doctest::Approx(1.0 - 0.49).epsilon(1e-15));
  CHECK(eval_h(parse_riskmetric("quadratic:0.5"), 0.4) ==
        doctest::Approx(1.5 * 0.4 - 0.5 * 0.16).epsilon(1e-15));
  CHECK(eval_h(parse_riskmetric("pht:0.5"), 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_h(parse_riskmetric("mmd"), 0.7) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(eval_h(parse_riskmetric("ier"), 0.7) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(eval_h(parse_riskmetric("wang"), 0.25) == doctest::Approx(0.25).epsilon(1e-15));

  SUBCASE("h(0) = 0 and range [0,1] for every kind") {
    for (const char* token : {"mean", "dualpower:2", "quadratic:0.5", "cvar:0.75",
                              "pht:0.5", "mmd", "ier", "wang", "gini"}) {
      const DistortionSpec spec = parse_riskmetric(token);
      CHECK(eval_h(spec, 0.0) == 0.0);
      for (double u = 0.0; u <= 1.0; u += 1.0 / 64) {
        const double h = eval_h(spec, u);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0);
      }
    }
  }
}

TEST_CASE("parameter validation happens at construction") {
  CHECK_THROWS_AS(parse_riskmetric("cvar:1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_riskmetric("pht:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_riskmetric("dualpower:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_riskmetric("quadratic:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_riskmetric("nope"), std::invalid_argument);
  CHECK_THROWS_AS(parse_riskmetric("cvar"), std::invalid_argument);
}

TEST_CASE("holder metadata matches the tabulated constants") {
  const DistortionSpec gini = parse_riskmetric("gini");
  CHECK(gini.holder_q() == 1.0);
  CHECK(gini.holder_r() == 2.0);
  CHECK(gini.holder_L() == 1.0);
  CHECK_FALSE(gini.beta().has_value());
  CHECK_FALSE(gini.monotone());

  const DistortionSpec pht = parse_riskmetric("pht:0.5");
  CHECK(pht.holder_q() == 0.5);
  CHECK(pht.holder_r() == 0.5);
  CHECK(pht.holder_L() == 1.0);
  CHECK(pht.beta() == 1.0);

  const DistortionSpec ier = parse_riskmetric("ier");
  CHECK(ier.holder_L() == 2.0);

  const DistortionSpec wang = parse_riskmetric("wang");
  CHECK(wang.holder_q() == 0.5);
  CHECK(wang.holder_r() == 1.0);

  CHECK(parse_riskmetric("dualpower:3").holder_L() == 3.0);
  CHECK(parse_riskmetric("quadratic:0.5").holder_L() == 1.5);
  CHECK(parse_riskmetric("cvar:0.75").holder_L() == 4.0);
}

TEST_CASE("choquet on explicit supports") {
  const DistortionSpec mean = parse_riskmetric("mean");
  CHECK(choquet(mean, FiniteCdf::from_atoms({{1.0, 0.5}, {3.0, 0.5}})) ==
        doctest::Approx(2.0).epsilon(1e-15));

  const DistortionSpec gini = parse_riskmetric("gini");
  CHECK(choquet(gini, FiniteCdf::point_mass(7.0)) == 0.0);

  SUBCASE("bernoulli identity for every kind and random p") {
    RngStream rng(5, 0, 0);
    for (const char* token : {"mean", "dualpower:2", "quadratic:0.5", "cvar:0.75",
                              "pht:0.5", "mmd", "ier", "wang", "gini"}) {
      const DistortionSpec spec = parse_riskmetric(token);
      for (int i = 0; i < 64; ++i) {
        const double p = rng.next_double();
        CHECK(std::abs(choquet(spec, FiniteCdf::bernoulli(p)) - eval_h(spec, p)) <= 1e-12);
      }
    }
  }

  SUBCASE("negative atoms are rejected") {
    CHECK_THROWS_AS(FiniteCdf::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}), std::domain_error);
  }
}

TEST_CASE("choquet is representation invariant") {
  const DistortionSpec wang = parse_riskmetric("wang");
  const FiniteCdf plain = FiniteCdf::from_atoms({{0.5, 0.25}, {1.0, 0.5}, {2.0, 0.25}});
  // Duplicate and near-duplicate atoms merge; zero-mass atoms drop.
  const FiniteCdf messy = FiniteCdf::from_atoms(
      {{0.5, 0.1}, {0.5 + 1e-13, 0.15}, {0.75, 0.0}, {1.0, 0.5}, {2.0, 0.25}});
  CHECK(std::abs(choquet(wang, plain) - choquet(wang, messy)) < 1e-12);
}

TEST_CASE("mixture_value agrees across both evaluation paths") {
  RngStream rng(6, 0, 0);
  for (const char* token : {"gini", "cvar:0.75", "wang", "pht:0.5"}) {
    const DistortionSpec spec = parse_riskmetric(token);
    for (int i = 0; i < 32; ++i) {
      const double p1 = rng.next_double(), p2 = rng.next_double();
      const double w = rng.next_double();
      const std::vector<FiniteCdf> arms = {FiniteCdf::bernoulli(p1),
                                           FiniteCdf::bernoulli(p2)};
      const double shortcut = mixture_value(spec, {w, 1.0 - w}, arms);
      const double direct = choquet(spec, mix({w, 1.0 - w}, arms));
      CHECK(std::abs(shortcut - direct) < 1e-12);
    }
  }

  SUBCASE("degenerate mixture returns the solitary arm value") {
    const DistortionSpec spec = parse_riskmetric("wang");
    const std::vector<FiniteCdf> arms = {
        FiniteCdf::from_atoms({{0.2, 0.3}, {1.5, 0.7}}), FiniteCdf::bernoulli(0.3)};
    CHECK(mixture_value(spec, {1.0, 0.0}, arms) ==
          doctest::Approx(choquet(spec, arms[0])).epsilon(1e-14));
  }

  SUBCASE("known optimum of the two-arm gini instance") {
    const std::vector<FiniteCdf> arms = {FiniteCdf::bernoulli(0.4),
                                         FiniteCdf::bernoulli(0.9)};
    CHECK(mixture_value(parse_riskmetric("gini"), {0.8, 0.2}, arms) ==
          doctest::Approx(0.25).epsilon(1e-12));
  }

  SUBCASE("dimension mismatch") {
    const std::vector<FiniteCdf> arms = {FiniteCdf::bernoulli(0.4)};
    CHECK_THROWS_AS(mixture_value(parse_riskmetric("gini"), {0.5, 0.5}, arms),
                    std::invalid_argument);
  }
}

TEST_CASE("concave mixture dominance") {
  RngStream rng(7, 0, 0);
  for (const char* token : {"gini", "dualpower:2", "quadratic:0.5", "cvar:0.75"}) {
    const DistortionSpec spec = parse_riskmetric(token);
    for (int i = 0; i < 200; ++i) {
      const std::size_t k = 2 + rng.next_u64() % 3;
      std::vector<FiniteCdf> arms;
      std::vector<double> w(k);
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        arms.push_back(FiniteCdf::bernoulli(rng.next_double()));
        w[j] = -std::log(1.0 - rng.next_double());
        total += w[j];
      }
      double convex = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        w[j] /= total;
        convex += w[j] * choquet(spec, arms[j]);
      }
      CHECK(mixture_value(spec, w, arms) >= convex - 1e-12);
    }
  }
}

TEST_CASE("effective_r applies the straddle test") {
  const DistortionSpec gini = parse_riskmetric("gini");
  CHECK(effective_r(gini, {0.4, 0.9}) == 2.0);
  CHECK(effective_r(gini, {0.6, 0.9}) == 1.0);
  const DistortionSpec wang = parse_riskmetric("wang");
  CHECK(effective_r(wang, {0.1, 0.6}) == 1.0);
  CHECK(effective_r(wang, {0.3, 0.6}) == 0.5);
  const DistortionSpec mean = parse_riskmetric("mean");
  CHECK(effective_r(mean, {0.1, 0.9}) == 1.0);
}

TEST_CASE("cvar beta is conditional on the means") {
  const DistortionSpec cvar = parse_riskmetric("cvar:0.75");
  CHECK(effective_beta(cvar, {0.1, 0.2}) == 1.0);
  CHECK_FALSE(effective_beta(cvar, {0.1, 0.5}).has_value());
  CHECK(effective_beta(parse_riskmetric("mean"), {0.1, 0.9}) == 1.0);
  CHECK_FALSE(effective_beta(parse_riskmetric("gini"), {0.4, 0.9}).has_value());
}

TEST_CASE("dr_upper_bound scales with the support") {
  const std::vector<FiniteCdf> arms = {FiniteCdf::from_atoms({{1.0, 0.5}, {4.0, 0.5}}),
                                       FiniteCdf::bernoulli(0.3)};
  CHECK(dr_upper_bound(parse_riskmetric("gini"), arms) == doctest::Approx(1.0));
  CHECK(dr_upper_bound(parse_riskmetric("mean"), arms) == doctest::Approx(4.0));
}

TEST_SUITE_END();
