#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaplab/measures.hpp"
#include "test_util.hpp"

using namespace gaplab;
using namespace gaplab::testutil;

namespace {

FiniteMeasure binary(double p0, double p1) {
  return FiniteMeasure::from_weights("S", std::vector<double>{p0, p1});
}

}  // namespace

TEST_CASE("log_sum_exp basics") {
  CHECK(log_sum_exp(std::vector<double>{3.25}) == 3.25);
  CHECK(log_sum_exp(std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // Deep in the log domain the max-shift keeps everything finite.
  const double got = log_sum_exp(std::vector<double>{-1000.0, -1000.5});
  const double expected = -1000.0 + std::log(1.0 + std::exp(-0.5));
  CHECK(got == doctest::Approx(expected).epsilon(1e-15));
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), EmptyList);
}

TEST_CASE("absolute continuity is support inclusion") {
  const FiniteMeasure u = binary(0.5, 0.5);
  const FiniteMeasure point = binary(1.0, 0.0);
  CHECK(is_absolutely_continuous(u, u));
  CHECK_FALSE(is_absolutely_continuous(u, point));
  CHECK(is_absolutely_continuous(point, u));
  const FiniteMeasure other =
      FiniteMeasure::from_weights("T", std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(is_absolutely_continuous(u, other), SpaceMismatch);
}

TEST_CASE("radon_nikodym log-densities") {
  const FiniteMeasure q = binary(0.5, 0.5);
  SUBCASE("identical measures have density one") {
    const auto d = radon_nikodym(q, q);
    for (const auto& [atom, ld] : d) {
      CHECK(ld == doctest::Approx(0.0).epsilon(1e-15));
    }
  }
  SUBCASE("hand ratio (3/4, 1/4) vs uniform") {
    const auto d = radon_nikodym(binary(0.75, 0.25), q);
    CHECK(std::exp(d.at(0)) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(std::exp(d.at(1)) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("point mass vs uniform") {
    const auto d = radon_nikodym(binary(1.0, 0.0), q);
    CHECK(d.size() == 1);
    CHECK(std::exp(d.at(0)) == doctest::Approx(2.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(radon_nikodym(q, binary(1.0, 0.0)), NotAbsolutelyContinuous);
}

TEST_CASE("relative entropy values") {
  const FiniteMeasure u = binary(0.5, 0.5);
  CHECK(relative_entropy(u, u) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(relative_entropy(binary(1.0, 0.0), u) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // Counting reference gives the negative Shannon entropy.
  const FiniteMeasure counting = FiniteMeasure::counting("S", 2);
  const double expected = 0.75 * std::log(0.75) + 0.25 * std::log(0.25);
  CHECK(relative_entropy(binary(0.75, 0.25), counting) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(-0.5623351).epsilon(1e-6));
  CHECK_THROWS_AS(relative_entropy(u, binary(1.0, 0.0)),
                  NotAbsolutelyContinuous);
}

TEST_CASE("relative entropy is nonnegative, zero only at equality") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.next_below(5);
    const FiniteMeasure p = random_measure(rng, "S", k);
    const FiniteMeasure q = random_measure(rng, "S", k);
    const double d = relative_entropy(p, q);
    CHECK(d >= -1e-12);
    if (d < 1e-13) {
      for (std::size_t a = 0; a < k; ++a) {
        CHECK(p.mass(a) == doctest::Approx(q.mass(a)).epsilon(1e-5));
      }
    }
    CHECK(relative_entropy(p, p) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("mutual information") {
  SUBCASE("identical rows carry no information") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, binary(0.3, 0.7));
    rows.emplace(1, binary(0.3, 0.7));
    const Kernel k("C", 2, std::move(rows));
    CHECK(mutual_information(k, FiniteMeasure::uniform("C", 2)) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("identity kernel gives log 2") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, FiniteMeasure::point_mass("S", 2, 0));
    rows.emplace(1, FiniteMeasure::point_mass("S", 2, 1));
    const Kernel k("C", 2, std::move(rows));
    CHECK(mutual_information(k, FiniteMeasure::uniform("C", 2)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("noisy binary channel matches the 4-term direct sum") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, binary(0.9, 0.1));
    rows.emplace(1, binary(0.1, 0.9));
    const Kernel k("C", 2, std::move(rows));
    const FiniteMeasure prior = FiniteMeasure::uniform("C", 2);
    const double got = mutual_information(k, prior);
    // independent linear-domain oracle
    const double cond[2][2] = {{0.9, 0.1}, {0.1, 0.9}};
    double marg[2] = {0.0, 0.0};
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 2; ++m) marg[m] += 0.5 * cond[n][m];
    double expected = 0.0;
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 2; ++m)
        expected += 0.5 * cond[n][m] * std::log(cond[n][m] / marg[m]);
    CHECK(got == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("mutual information equals the brute-force double sum") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nc = 2 + rng.next_below(4);
    const std::size_t nm = 2 + rng.next_below(4);
    const Kernel k = random_kernel(rng, "C", nc, "S", nm);
    const FiniteMeasure prior = random_measure(rng, "C", nc);
    const double got = mutual_information(k, prior);
    double expected = 0.0;
    std::vector<double> marg(nm, 0.0);
    for (std::size_t n = 0; n < nc; ++n)
      for (std::size_t m = 0; m < nm; ++m)
        marg[m] += prior.mass(n) * k.row(n).mass(m);
    for (std::size_t n = 0; n < nc; ++n)
      for (std::size_t m = 0; m < nm; ++m)
        expected += prior.mass(n) * k.row(n).mass(m) *
                    std::log(k.row(n).mass(m) / marg[m]);
    CHECK(std::abs(got - expected) <= 1e-12);
  }
}

TEST_CASE("lautum information") {
  SUBCASE("identical rows") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, binary(0.3, 0.7));
    rows.emplace(1, binary(0.3, 0.7));
    const Kernel k("C", 2, std::move(rows));
    CHECK(lautum_information(k, FiniteMeasure::uniform("C", 2)) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("point-mass rows cannot dominate the marginal") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, FiniteMeasure::point_mass("S", 2, 0));
    rows.emplace(1, FiniteMeasure::point_mass("S", 2, 1));
    const Kernel k("C", 2, std::move(rows));
    CHECK_THROWS_AS(lautum_information(k, FiniteMeasure::uniform("C", 2)),
                    NotAbsolutelyContinuous);
  }
  SUBCASE("noisy binary channel matches the direct sum") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, binary(0.9, 0.1));
    rows.emplace(1, binary(0.1, 0.9));
    const Kernel k("C", 2, std::move(rows));
    const double got = lautum_information(k, FiniteMeasure::uniform("C", 2));
    const double cond[2][2] = {{0.9, 0.1}, {0.1, 0.9}};
    double marg[2] = {0.0, 0.0};
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 2; ++m) marg[m] += 0.5 * cond[n][m];
    double expected = 0.0;
    for (int n = 0; n < 2; ++n)
      for (int m = 0; m < 2; ++m)
        expected += 0.5 * marg[m] * std::log(marg[m] / cond[n][m]);
    CHECK(got == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("marginalize") {
  std::map<std::size_t, FiniteMeasure> rows;
  rows.emplace(0, binary(1.0, 0.0));
  rows.emplace(1, binary(0.0, 1.0));
  const Kernel k("C", 2, std::move(rows));
  SUBCASE("single-condition prior returns that row") {
    const FiniteMeasure m = marginalize(k, FiniteMeasure::point_mass("C", 2, 0));
    CHECK(m.mass(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.mass(1) == 0.0);
  }
  SUBCASE("uniform prior over disjoint point rows mixes evenly") {
    const FiniteMeasure m = marginalize(k, FiniteMeasure::uniform("C", 2));
    CHECK(m.mass(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.mass(1) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("identical rows are a fixed point") {
    std::map<std::size_t, FiniteMeasure> same;
    same.emplace(0, binary(0.2, 0.8));
    same.emplace(1, binary(0.2, 0.8));
    const Kernel k2("C", 2, std::move(same));
    const FiniteMeasure m = marginalize(k2, FiniteMeasure::uniform("C", 2));
    CHECK(m.mass(0) == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(m.mass(1) == doctest::Approx(0.8).epsilon(1e-13));
  }
}

TEST_CASE("bayes inversion") {
  SUBCASE("independence gives back the prior") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, binary(0.3, 0.7));
    rows.emplace(1, binary(0.3, 0.7));
    const Kernel k("C", 2, std::move(rows));
    const FiniteMeasure prior =
        FiniteMeasure::from_weights("C", std::vector<double>{0.6, 0.4});
    const BayesInversion inv = bayes_invert(k, prior);
    for (const auto& [m, row] : inv.posterior.rows()) {
      (void)m;
      CHECK(row.mass(0) == doctest::Approx(0.6).epsilon(1e-13));
      CHECK(row.mass(1) == doctest::Approx(0.4).epsilon(1e-13));
    }
  }
  SUBCASE("identity kernel under uniform prior inverts to itself") {
    std::map<std::size_t, FiniteMeasure> rows;
    rows.emplace(0, FiniteMeasure::point_mass("S", 2, 0));
    rows.emplace(1, FiniteMeasure::point_mass("S", 2, 1));
    const Kernel k("C", 2, std::move(rows));
    const BayesInversion inv = bayes_invert(k, FiniteMeasure::uniform("C", 2));
    CHECK(inv.posterior.row(0).mass(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(inv.posterior.row(1).mass(1) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("atomwise derivative identity on random kernels") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const Kernel k = random_kernel(rng, "C", 3, "S", 2);
      const FiniteMeasure prior = random_measure(rng, "C", 3);
      const BayesInversion inv = bayes_invert(k, prior);
      for (const auto& [m, row] : inv.posterior.rows()) {
        for (std::size_t c = 0; c < 3; ++c) {
          // dP_{N|M=m}/dP_N (c) == dP_{M|N=c}/dP_M (m)
          const double fwd = row.mass(c) / prior.mass(c);
          const double bwd = k.row(c).mass(m) / inv.marginal.mass(m);
          CHECK(fwd == doctest::Approx(bwd).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("invert then re-marginalize returns the prior") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nc = 2 + rng.next_below(4);
    const std::size_t nm = 2 + rng.next_below(4);
    const Kernel k = random_kernel(rng, "C", nc, "S", nm);
    const FiniteMeasure prior = random_measure(rng, "C", nc);
    const BayesInversion inv = bayes_invert(k, prior);
    const FiniteMeasure back = marginalize(inv.posterior, inv.marginal);
    for (std::size_t c = 0; c < nc; ++c) {
      CHECK(std::abs(back.mass(c) - prior.mass(c)) <= 1e-12);
    }
  }
}

TEST_CASE("reciprocity of the two derivative directions") {
  SplitMix64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const Kernel k = random_kernel(rng, "C", 4, "S", 3);
    const FiniteMeasure prior = random_measure(rng, "C", 4);
    const BayesInversion inv = bayes_invert(k, prior);
    for (const auto& [m, row] : inv.posterior.rows()) {
      for (std::size_t c = 0; c < 4; ++c) {
        const double fwd = row.mass(c) / prior.mass(c);
        const double bwd = inv.marginal.mass(m) / k.row(c).mass(m);
        CHECK(std::abs(fwd * bwd - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("product measure") {
  SUBCASE("n = 1 reproduces the base measure") {
    const FiniteMeasure p = binary(0.3, 0.7);
    const FiniteMeasure prod = product_measure(p, 1);
    CHECK(prod.space_id() == "S^1");
    CHECK(prod.mass(0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(prod.mass(1) == doctest::Approx(0.7).epsilon(1e-14));
  }
  SUBCASE("uniform squares to quarters") {
    const FiniteMeasure prod = product_measure(binary(0.5, 0.5), 2);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(prod.mass(i) == doctest::Approx(0.25).epsilon(1e-14));
    }
  }
  SUBCASE("(0.3, 0.7)^2 in encoding order") {
    const FiniteMeasure prod = product_measure(binary(0.3, 0.7), 2);
    CHECK(prod.mass(0) == doctest::Approx(0.09).epsilon(1e-13));
    CHECK(prod.mass(1) == doctest::Approx(0.21).epsilon(1e-13));
    CHECK(prod.mass(2) == doctest::Approx(0.21).epsilon(1e-13));
    CHECK(prod.mass(3) == doctest::Approx(0.49).epsilon(1e-13));
  }
  SUBCASE("total mass stays one") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t k = 2 + rng.next_below(3);
      const std::size_t n = 1 + rng.next_below(3);
      const FiniteMeasure prod =
          product_measure(random_measure(rng, "S", k), n);
      double total = 0.0;
      for (const auto& [atom, lm] : prod.log_masses()) {
        (void)atom;
        total += std::exp(lm);
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
  SUBCASE("cap is enforced") {
    CHECK_THROWS_AS(product_measure(binary(0.5, 0.5), 20, 1000),
                    EnumerationCapExceeded);
  }
}

TEST_CASE("convex combination") {
  const FiniteMeasure a = binary(1.0, 0.0);
  const FiniteMeasure b = binary(0.0, 1.0);
  SUBCASE("mixing a measure with itself is the identity") {
    const FiniteMeasure m = convex_combination(a, a, 0.3);
    CHECK(m.mass(0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("even mixture of disjoint points") {
    const FiniteMeasure m = convex_combination(a, b, 0.5);
    CHECK(m.mass(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.mass(1) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("weighted mixture") {
    const FiniteMeasure m = convex_combination(a, b, 0.25);
    CHECK(m.mass(0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m.mass(1) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(is_absolutely_continuous(a, m));
    CHECK(is_absolutely_continuous(b, m));
  }
  CHECK_THROWS_AS(convex_combination(a, b, 0.0), AlphaOutOfRange);
  CHECK_THROWS_AS(convex_combination(a, b, 1.0), AlphaOutOfRange);
}

TEST_CASE("normalized measures must sum to one") {
  CHECK_THROWS_AS(FiniteMeasure("S", 2, {{0, -0.1}, {1, -0.1}}, true),
                  InvalidMeasure);
  CHECK_THROWS_AS(FiniteMeasure("S", 2, {{5, 0.0}}, false), IndexOutOfRange);
}
