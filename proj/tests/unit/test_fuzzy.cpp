#include <cmath>
#include <random>

#include "doctest.h"
#include "nhad/error.hpp"
#include "nhad/fuzzy.hpp"
#include "oracle.hpp"

using namespace nhad;
using namespace nhad::fuzzy;

namespace {

const FuzzyInferenceSystem& default_fis() {
  static const FuzzyInferenceSystem fis = build_default_fis();
  return fis;
}

std::vector<double> sample(double lower, double upper, std::size_t n, auto f) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(lower + (upper - lower) * static_cast<double>(i) / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("low term of p1: plateau then linear fall") {
  const auto p1 = make_default_input_variables()[0];
  const auto& low = p1.terms()[*p1.term_index("low")].membership;
  CHECK(low.degree(0.2) == 1.0);
  CHECK(low.degree(0.45) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(low.degree(0.7) == 0.0);
  CHECK(low.degree(0.0) == 1.0);
  CHECK(low.degree(0.4) == 1.0);
  CHECK(low.degree(0.5) == 0.0);
}

TEST_CASE("default memberships agree with closed-form shapes") {
  const auto inputs = make_default_input_variables();
  for (std::size_t d = 0; d < kInputCount; ++d) {
    REQUIRE(inputs[d].terms().size() == 3);
    for (int level = 0; level < 3; ++level) {
      const auto& mf = inputs[d].terms()[static_cast<std::size_t>(level)].membership;
      for (int i = 0; i <= 2000; ++i) {
        const double x = i / 2000.0;
        CHECK(mf.degree(x) == doctest::Approx(oracle::input_degree(d, level, x)).epsilon(1e-12));
      }
    }
  }
  const auto out = make_default_output_variable();
  REQUIRE(out.terms().size() == 7);
  for (std::size_t t = 0; t < 7; ++t) {
    CHECK(out.terms()[t].label == kOutputLabels[t]);
    for (int i = 0; i <= 2000; ++i) {
      const double x = i / 2000.0;
      CHECK(out.terms()[t].membership.degree(x) == doctest::Approx(oracle::output_degree(t, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("membership function invariants") {
  CHECK_THROWS_AS(MembershipFunction({{0.0, 1.0}}), PreconditionError);
  CHECK_THROWS_AS(MembershipFunction({{0.5, 1.0}, {0.2, 0.0}}), PreconditionError);
  CHECK_THROWS_AS(MembershipFunction({{0.0, 0.0}, {1.0, 0.0}}), PreconditionError);
  CHECK_THROWS_AS(MembershipFunction({{0.0, 1.5}, {1.0, 0.0}}), PreconditionError);
  const MembershipFunction tri({{0.1, 0.0}, {0.3, 1.0}, {0.5, 0.0}});
  CHECK(tri.peak() == 0.3);
  CHECK(tri.degree(0.05) == 0.0);
  CHECK(tri.degree(0.6) == 0.0);
  CHECK(membership_degree(tri, 0.2) == doctest::Approx(0.5));
}

TEST_CASE("default system shape and anchor rules") {
  const auto& fis = default_fis();
  CHECK(fis.inputs().size() == 5);
  CHECK(fis.output().terms().size() == 7);
  CHECK(fis.rules().size() == 243);
  CHECK(fis.samples() == kDefaultSamples);

  const auto perfect = *fis.output().term_index("perfect");
  const auto worst = *fis.output().term_index("worst");
  bool saw_low = false;
  bool saw_high = false;
  for (const auto& r : fis.rules()) {
    REQUIRE(r.antecedent.size() == 5);
    bool all_low = true;
    bool all_high = true;
    std::array<int, 5> levels{};
    for (const auto& c : r.antecedent) {
      levels[c.input] = static_cast<int>(c.term);
      all_low = all_low && c.term == 0;
      all_high = all_high && c.term == 2;
    }
    CHECK(r.consequent == oracle::consequent(levels));
    if (all_low) {
      saw_low = true;
      CHECK(r.consequent == perfect);
    }
    if (all_high) {
      saw_high = true;
      CHECK(r.consequent == worst);
    }
  }
  CHECK(saw_low);
  CHECK(saw_high);
}

TEST_CASE("crisp output at reference activations") {
  const auto& fis = default_fis();
  const double calm = fis.crisp({0.05, 0.05, 0.05, 0.05, 0.05});
  CHECK(calm < 0.1);
  CHECK(calm == doctest::Approx(oracle::mamdani_crisp({0.05, 0.05, 0.05, 0.05, 0.05})).epsilon(1e-3));
  CHECK(calm == doctest::Approx(0.03333).epsilon(1e-9));

  const double loud = fis.crisp({0.97, 0.97, 0.95, 0.95, 0.95});
  CHECK(loud > 0.8);
  CHECK(loud == doctest::Approx(oracle::mamdani_crisp({0.97, 0.97, 0.95, 0.95, 0.95})).epsilon(1e-3));
  CHECK(loud == doctest::Approx(0.933335).epsilon(1e-9));

  CHECK(fis.crisp({0.3, 0.6, 0.2, 0.75, 0.5}) == doctest::Approx(0.36875).epsilon(1e-9));
}

TEST_CASE("activations outside the unit interval are rejected") {
  const auto& fis = default_fis();
  CHECK_THROWS_AS(fis.crisp({1.1, 0.0, 0.0, 0.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(fis.crisp({0.0, -0.01, 0.0, 0.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(fis.crisp({0.0, 0.0, std::nan(""), 0.0, 0.0}), PreconditionError);
}

TEST_CASE("rule-by-rule oracle on the same grid matches to rounding") {
  const auto& fis = default_fis();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    InputVector a{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const double got = fis.crisp(a);
    CHECK(got == doctest::Approx(oracle::mamdani_crisp(a, kDefaultSamples)).epsilon(1e-9));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("inference result carries the sampled aggregate") {
  const auto fis = default_fis().with_samples(501);
  const auto r = fis.infer({0.2, 0.2, 0.2, 0.2, 0.2});
  CHECK(r.aggregate.size() == 501);
  CHECK(r.crisp == doctest::Approx(defuzzify_cog(r.aggregate, 0.0, 1.0)));
  CHECK_THROWS_AS(default_fis().with_samples(1), PreconditionError);
}

TEST_CASE("a rule base that never fires is reported") {
  const auto& base = default_fis();
  // Only the all-high rule: calm inputs leave it silent.
  std::vector<FuzzyRule> rules;
  for (const auto& r : base.rules()) {
    bool all_high = true;
    for (const auto& c : r.antecedent) all_high = all_high && c.term == 2;
    if (all_high) rules.push_back(r);
  }
  REQUIRE(rules.size() == 1);
  const auto fis = base.with_rules(rules);
  CHECK_THROWS_AS(fis.crisp({0.1, 0.1, 0.1, 0.1, 0.1}), AllRulesSilent);
  CHECK(fis.crisp({1, 1, 1, 1, 1}) == doctest::Approx(0.933335).epsilon(1e-9));
  CHECK_THROWS_AS(base.with_rules({}), PreconditionError);
}

TEST_CASE("centroid defuzzification") {
  SUBCASE("constant curve") {
    const auto c = sample(0.0, 1.0, 1001, [](double) { return 0.4; });
    CHECK(defuzzify_cog(c, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("symmetric triangle") {
    const MembershipFunction tri({{0.1, 0.0}, {0.3, 1.0}, {0.5, 0.0}});
    const auto c = sample(0.0, 1.0, 1001, [&](double x) { return tri.degree(x); });
    CHECK(defuzzify_cog(c, 0.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("zero mass") {
    const std::vector<double> c(1001, 0.0);
    CHECK_THROWS_AS(defuzzify_cog(c, 0.0, 1.0), ZeroMass);
  }
  SUBCASE("mirror symmetry") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> c(1001);
      for (auto& v : c) v = u(rng);
      const std::vector<double> mirrored(c.rbegin(), c.rend());
      CHECK(defuzzify_cog(c, 0.0, 1.0) + defuzzify_cog(mirrored, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("shifted domain") {
    const auto c = sample(2.0, 4.0, 101, [](double) { return 1.0; });
    CHECK(defuzzify_cog(c, 2.0, 4.0) == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(defuzzify_cog(std::vector<double>{1.0}, 0.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(defuzzify_cog(std::vector<double>{1.0, 1.0}, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(defuzzify_cog(std::vector<double>{1.0, -1.0}, 0.0, 1.0), PreconditionError);
  }
}
