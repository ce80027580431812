#include <cmath>

#include "doctest.h"
#include "families.hpp"
#include "spaces.hpp"

using namespace rispace;

namespace {
StepFunction ind(double m) { return rearrange(SimpleFunction::indicator(m)); }
}  // namespace

TEST_CASE("Lorentz norm of an indicator has the closed form (p/q)^{1/q} m^{1/p}") {
  for (double p : {1.0, 2.0, 3.0}) {
    for (double q : {1.0, 2.0}) {
      for (double m : {0.1, 0.3, 0.9}) {
        double expected = std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p);
        CHECK(space_norm(ind(m), SpaceSpec::lorentz(p, q)) ==
              doctest::Approx(expected).epsilon(1e-12));
      }
    }
    CHECK(space_norm(ind(0.3), SpaceSpec::lorentz(p, kInf)) ==
          doctest::Approx(std::pow(0.3, 1.0 / p)).epsilon(1e-12));
  }
  // L^inf norm is the top level
  CHECK(space_norm(ind(0.3), SpaceSpec::lebesgue(kInf)) == doctest::Approx(1.0));
}

TEST_CASE("grand, small, and generalized-Gamma norms match frozen references") {
  // grand norms run a numerical sup over the defect parameter, so they carry
  // the optimizer's ~1e-9 accuracy rather than closed-form precision
  CHECK(space_norm(ind(0.3), SpaceSpec::grand(2, 1)) ==
        doctest::Approx(0.30476610329028494).epsilon(1e-8));
  CHECK(space_norm(ind(0.3), SpaceSpec::grand(3, 0.5)) ==
        doctest::Approx(0.55004656650018074).epsilon(1e-8));
  // alpha large enough that the log gain never beats the measure factor:
  // the norm collapses to the L^p value attained at the no-gain endpoint
  CHECK(space_norm(ind(0.9), SpaceSpec::grand(2, 2)) ==
        doctest::Approx(0.9).epsilon(1e-8));
  CHECK(space_norm(ind(0.3), SpaceSpec::small(2, 1)) ==
        doctest::Approx(1.0997224106647922).epsilon(1e-12));
  CHECK(space_norm(ind(0.3), SpaceSpec::small(3, 1.5)) ==
        doctest::Approx(2.8142779164651225).epsilon(1e-12));
  CHECK(space_norm(ind(0.3), SpaceSpec::ggamma(2, 3, {-0.5, 0}, {0, 1})) ==
        doctest::Approx(1.0553195720271537).epsilon(1e-12));
}

TEST_CASE("Lorentz--Zygmund norms reduce to Lebesgue ones at lambda = 0, q = p") {
  auto family = random_simple_family(17, 40);
  for (const auto& f : family) {
    StepFunction fs = rearrange(f);
    for (double p : {1.0, 2.0, 3.5}) {
      double lp = space_norm(fs, SpaceSpec::lebesgue(p));
      CHECK(space_norm(fs, SpaceSpec::lorentz(p, p)) ==
            doctest::Approx(lp).epsilon(1e-11));
      CHECK(space_norm(fs, SpaceSpec::lorentz_zygmund(p, p, 0.0)) ==
            doctest::Approx(lp).epsilon(1e-11));
    }
  }
}

TEST_CASE("divergent norms throw instead of returning garbage") {
  StepFunction c = rearrange(SimpleFunction::constant(1.0));
  // at p = inf with no log decay the weight integrates like t^{-1} near zero
  CHECK_THROWS_AS(space_norm(c, SpaceSpec::lorentz_zygmund(kInf, 1.0, 0.0)),
                  divergence_error);
  CHECK_THROWS_AS(space_norm(c, SpaceSpec::lorentz_zygmund(kInf, 1.0, 0.5)),
                  divergence_error);
  // enough log decay restores integrability
  CHECK(space_norm(c, SpaceSpec::lorentz_zygmund(kInf, 1.0, -3.0)) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("invalid space parameters are rejected") {
  CHECK_THROWS_AS(SpaceSpec::lebesgue(0.0).validate(), spec_error);
  CHECK_THROWS_AS(SpaceSpec::lorentz(0.5, 1.0).validate(), spec_error);
  CHECK_THROWS_AS(SpaceSpec::lorentz(2.0, 0.0).validate(), spec_error);
  CHECK_THROWS_AS(SpaceSpec::lorentz(kInf, 1.0).validate(), spec_error);
  CHECK_THROWS_AS(SpaceSpec::grand(1.0, 1.0).validate(), spec_error);
  CHECK_THROWS_AS(SpaceSpec::grand(2.0, -1.0).validate(), spec_error);
  CHECK_THROWS_AS(SpaceSpec::small(1.0, 1.0).validate(), spec_error);
  CHECK_THROWS_AS(SpaceSpec::ggamma(2, 3, {kInf, 0}, {0, 0}).validate(), spec_error);
}

TEST_CASE("maximal-function Lorentz norm obeys the Hardy bracket") {
  auto family = random_simple_family(23, 60);
  for (double p : {1.5, 2.0, 4.0}) {
    double pprime = p / (p - 1.0);
    for (const auto& f : family) {
      if (f.is_zero()) continue;
      StepFunction fs = rearrange(f);
      double base = space_norm(fs, SpaceSpec::lorentz(p, p));
      double viamax = lorentz_norm_via_maximal(fs, p, p);
      double ratio = viamax / base;
      CHECK(ratio >= 1.0 - 1e-10);
      CHECK(ratio <= pprime + 1e-10);
    }
  }
}

TEST_CASE("grand norm quantile characterization stays within equivalence range") {
  // frozen quadrature reference for the quantile form on the indicator
  CHECK(grand_norm_quantile(ind(0.3), 2, 1) ==
        doctest::Approx(0.25090746554228515).epsilon(1e-4));
  auto family = random_simple_family(31, 30);
  for (const auto& f : family) {
    if (f.is_zero()) continue;
    StepFunction fs = rearrange(f);
    double direct = space_norm(fs, SpaceSpec::grand(2, 1));
    double quant = grand_norm_quantile(fs, 2, 1);
    CHECK(quant <= 2.0 * direct);
    CHECK(direct <= 8.0 * quant);  // equivalence with a modest constant
  }
}

TEST_CASE("inclusion registry names the proving rule and never guesses") {
  auto expect = [](const SpaceSpec& a, const SpaceSpec& b, const char* rule) {
    auto r = find_embedding_rule(a, b);
    REQUIRE(r.has_value());
    CHECK(*r == rule);
  };
  expect(SpaceSpec::lebesgue(3), SpaceSpec::lorentz(2, 1.5), "lower_primary_exponent");
  expect(SpaceSpec::lorentz_zygmund(2, 2, 0.8), SpaceSpec::lorentz_zygmund(2, 2, 0.4),
         "same_primary_log_monotone");
  expect(SpaceSpec::lorentz_zygmund(2, 3, 0.5), SpaceSpec::lorentz_zygmund(2, 2, 0.2),
         "same_primary_secondary_tradeoff");
  expect(SpaceSpec::lorentz_zygmund(2, kInf, 0), SpaceSpec::grand(2, 1),
         "zygmund_into_grand");
  expect(SpaceSpec::grand(2, 1), SpaceSpec::lorentz_zygmund(2, kInf, -0.5),
         "grand_into_zygmund");
  expect(SpaceSpec::small(2, 1), SpaceSpec::lebesgue(2), "small_into_zygmund");
  expect(SpaceSpec::lorentz_zygmund(2, 2, 0.9), SpaceSpec::small(2, 0.8),
         "zygmund_into_small");
  expect(SpaceSpec::grand(2, 1), SpaceSpec::grand(1.8, 1), "grand_into_lower_grand");
  expect(SpaceSpec::grand(2, 0.5), SpaceSpec::grand(2, 1), "grand_parameter_monotone");
  expect(SpaceSpec::small(2, 1), SpaceSpec::small(1.7, 1), "small_into_lower_small");
  expect(SpaceSpec::lorentz(2, 1), SpaceSpec::lorentz(2, 1), "identity");

  // pairs with no registered rule must answer "unsupported", not "false"
  CHECK_FALSE(find_embedding_rule(SpaceSpec::lebesgue(2), SpaceSpec::small(2, 1)));
  CHECK_FALSE(find_embedding_rule(SpaceSpec::grand(2, 0.6),
                                  SpaceSpec::lorentz_zygmund(2, 2, 0)));
  CHECK_FALSE(find_embedding_rule(SpaceSpec::grand(2, 1), SpaceSpec::small(2, 1)));
  CHECK_FALSE(find_embedding_rule(SpaceSpec::lorentz(2, 3), SpaceSpec::lorentz(2, 1)));
}

TEST_CASE("embedding report measures the inclusion on a family") {
  auto family = random_simple_family(5, 80);
  EmbeddingReport rep = embedding_report(SpaceSpec::lebesgue(3),
                                         SpaceSpec::lorentz(2, 1.5), family);
  CHECK(rep.rule == "lower_primary_exponent");
  CHECK(rep.stats.pass);
  CHECK(rep.stats.count > 0);
  CHECK(rep.stats.max < 1e3);
  CHECK_THROWS_AS(embedding_report(SpaceSpec::grand(2, 1), SpaceSpec::small(2, 1),
                                   family),
                  unsupported_embedding);
}

TEST_CASE("equivalence report accepts L^{p,p} = L^p and rejects distinct spaces") {
  auto family = random_simple_family(9, 60);
  RatioStats same = equivalence_report(SpaceSpec::lorentz(2, 2),
                                       SpaceSpec::lebesgue(2), family, 10.0);
  CHECK(same.pass);
  CHECK(same.max == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(same.min == doctest::Approx(1.0).epsilon(1e-10));

  // L^2 and weak-L^2 are not equivalent: profiles with tails t^{-gamma},
  // gamma -> 1/2, keep the weak norm bounded while the strong one blows up
  std::vector<SimpleFunction> spiky = family;
  for (auto& f : power_log_family(0.49, 20)) spiky.push_back(std::move(f));
  RatioStats diff = equivalence_report(SpaceSpec::lebesgue(2),
                                       SpaceSpec::lorentz(2, kInf), spiky, 3.0);
  CHECK_FALSE(diff.pass);
}

TEST_CASE("weight admissibility report for generalized-Gamma specs") {
  WeightConditionReport ok = check_weight_conditions(
      SpaceSpec::ggamma(kInf, 1, {-1, 0}, {0.5, 0}));
  CHECK(ok.c1);
  CHECK(ok.c2);
  CHECK(ok.doubling_constant == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  // without the t^{1/2} inner damping the constant function has infinite norm
  WeightConditionReport bad = check_weight_conditions(
      SpaceSpec::ggamma(kInf, 1, {-1, 0}, {0, 0}));
  CHECK(bad.c1);
  CHECK_FALSE(bad.c2);
}

TEST_CASE("space JSON round trip covers every kind") {
  std::vector<SpaceSpec> specs = {
      SpaceSpec::lebesgue(2.5),
      SpaceSpec::lebesgue(kInf),
      SpaceSpec::lorentz(2, kInf),
      SpaceSpec::lorentz_zygmund(2, 1, -0.5),
      SpaceSpec::grand(2, 1),
      SpaceSpec::small(3, 1.5),
      SpaceSpec::ggamma(2, 3, {-0.5, 0}, {0, 1}),
  };
  for (const auto& s : specs) {
    nlohmann::json j = s;
    SpaceSpec back = j.get<SpaceSpec>();
    CHECK(back == s);
    CHECK(back.describe() == s.describe());
  }
  CHECK_THROWS_AS(nlohmann::json::parse("{\"kind\":\"mystery\",\"p\":2}")
                      .get<SpaceSpec>(),
                  spec_error);
}
