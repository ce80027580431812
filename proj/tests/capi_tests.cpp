// Exercises the C boundary of the shared library: every entry point's happy
// path, the status-code mapping for each failure family, and the last-error
// message contract. Links against the shared library only (rispace.h).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "rispace.h"

namespace {

// Owns a C string from the API so tests cannot leak on assertion failure.
struct ApiString {
  char* s = nullptr;
  ~ApiString() { ri_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

struct Fn {
  ri_function* f = nullptr;
  ~Fn() { ri_function_free(f); }
};

Fn make(const std::vector<double>& vals, const std::vector<double>& meas) {
  Fn h;
  REQUIRE(ri_function_create(vals.data(), meas.data(), vals.size(), &h.f) == RI_OK);
  return h;
}

}  // namespace

TEST_CASE("function handles round-trip values and JSON") {
  Fn h = make({2.0, -1.0, 3.0}, {0.25, 0.5, 0.1});
  ApiString js;
  REQUIRE(ri_function_to_json(h.f, &js.s) == RI_OK);
  CHECK(js.str().find("[2.0,0.25]") != std::string::npos);

  ri_function* back = nullptr;
  REQUIRE(ri_function_from_json(js.s, &back) == RI_OK);
  ApiString js2;
  REQUIRE(ri_function_to_json(back, &js2.s) == RI_OK);
  CHECK(js.str() == js2.str());
  ri_function_free(back);

  // null arguments are reported, not crashed on
  CHECK(ri_function_create(nullptr, nullptr, 2, &back) == RI_ERR_INVALID_ARG);
  CHECK(std::strlen(ri_last_error()) > 0);
  CHECK(ri_function_to_json(h.f, nullptr) == RI_ERR_INVALID_ARG);
}

TEST_CASE("parse and spec failures map to their own status codes") {
  ri_function* f = nullptr;
  CHECK(ri_function_from_json("not json", &f) == RI_ERR_PARSE);
  CHECK(std::strlen(ri_last_error()) > 0);
  CHECK(ri_function_from_json("[[1.0, 0.6], [2.0, 0.7]]", &f) == RI_ERR_SPEC);

  Fn h = make({1.0}, {0.5});
  double out = 0.0;
  CHECK(ri_norm(h.f, "{\"kind\":\"lebesgue\",\"p\":0.0}", &out) == RI_ERR_SPEC);
  CHECK(ri_norm(h.f, "{\"kind\":\"nosuch\",\"p\":2}", &out) == RI_ERR_SPEC);
  CHECK(ri_norm(h.f, "{broken", &out) == RI_ERR_PARSE);
}

TEST_CASE("rearrangement data obeys the documented step contract") {
  Fn h = make({2.0, -1.0, 3.0}, {0.25, 0.5, 0.1});
  ri_rearrangement* r = nullptr;
  REQUIRE(ri_rearrange(h.f, &r) == RI_OK);
  const size_t n = ri_rearrangement_size(r);
  REQUIRE(n == 3);
  std::vector<double> breaks(n), levels(n);
  REQUIRE(ri_rearrangement_data(r, breaks.data(), levels.data()) == RI_OK);
  const double eb[3] = {0.1, 0.35, 0.85}, el[3] = {3.0, 2.0, 1.0};
  for (size_t i = 0; i < n; ++i) {
    CHECK(breaks[i] == doctest::Approx(eb[i]));
    CHECK(levels[i] == doctest::Approx(el[i]));
  }

  double out = 0.0;
  REQUIRE(ri_norm_rearranged(r, "{\"kind\":\"lebesgue\",\"p\":1}", &out) == RI_OK);
  CHECK(out == doctest::Approx(2.0 * 0.25 + 1.0 * 0.5 + 3.0 * 0.1));
  ri_rearrangement_free(r);

  // zero function: empty rearrangement
  Fn z = make({0.0}, {1.0});
  ri_rearrangement* zr = nullptr;
  REQUIRE(ri_rearrange(z.f, &zr) == RI_OK);
  CHECK(ri_rearrangement_size(zr) == 0);
  ri_rearrangement_free(zr);
}

TEST_CASE("distribution and maximal enforce their domains") {
  Fn h = make({2.0}, {0.3});
  double out = 0.0;
  REQUIRE(ri_distribution(h.f, 0.0, &out) == RI_OK);
  CHECK(out == doctest::Approx(1.0));
  REQUIRE(ri_distribution(h.f, 2.0, &out) == RI_OK);
  CHECK(out == doctest::Approx(0.3));  // level sets count with >=
  REQUIRE(ri_distribution(h.f, 2.5, &out) == RI_OK);
  CHECK(out == 0.0);
  CHECK(ri_distribution(h.f, -1.0, &out) == RI_ERR_DOMAIN);

  REQUIRE(ri_maximal(h.f, 0.6, &out) == RI_OK);
  CHECK(out == doctest::Approx(2.0 * 0.3 / 0.6));
  CHECK(ri_maximal(h.f, 0.0, &out) == RI_ERR_DOMAIN);
  CHECK(ri_maximal(h.f, 1.5, &out) == RI_ERR_DOMAIN);
}

TEST_CASE("norms, divergence, and the embedding rule lookup") {
  Fn h = make({1.0}, {0.3});
  double out = 0.0;
  REQUIRE(ri_norm(h.f, "{\"kind\":\"lebesgue\",\"p\":2}", &out) == RI_OK);
  CHECK(out == doctest::Approx(std::sqrt(0.3)));
  REQUIRE(ri_norm(h.f, "{\"kind\":\"lorentz\",\"p\":2,\"q\":1}", &out) == RI_OK);
  CHECK(out == doctest::Approx(0.5 * std::sqrt(0.3) / 0.25));

  // spaces whose defining integral diverges on indicators
  CHECK(ri_norm(h.f,
                "{\"kind\":\"lorentz_zygmund\",\"p\":\"inf\",\"q\":1,\"lambda\":0}",
                &out) == RI_ERR_DIVERGENT);
  CHECK(std::strlen(ri_last_error()) > 0);

  ApiString rule;
  REQUIRE(ri_embedding_rule("{\"kind\":\"lebesgue\",\"p\":2}",
                            "{\"kind\":\"lebesgue\",\"p\":1.5}", &rule.s) == RI_OK);
  CHECK(rule.str() == "lower_primary_exponent");
  char* none = nullptr;
  CHECK(ri_embedding_rule("{\"kind\":\"lebesgue\",\"p\":1.5}",
                          "{\"kind\":\"lebesgue\",\"p\":2}", &none) ==
        RI_ERR_UNSUPPORTED);

  ApiString cond;
  REQUIRE(ri_weight_conditions(
              "{\"kind\":\"ggamma\",\"p\":\"inf\",\"m\":1,"
              "\"w1\":{\"a\":-1,\"b\":0},\"w2\":{\"a\":0.5,\"b\":0}}",
              &cond.s) == RI_OK);
  CHECK(cond.str().find("doubling_constant") != std::string::npos);
}

TEST_CASE("K-functional, interpolation norm, identification, quotient") {
  Fn h = make({2.0, 1.0}, {0.25, 0.5});
  const char* couple =
      "{\"x0\":{\"kind\":\"lebesgue\",\"p\":1},\"x1\":{\"kind\":\"lebesgue\",\"p\":\"inf\"}}";
  double out = 0.0;
  REQUIRE(ri_k_functional(h.f, couple, 0.25, &out) == RI_OK);
  CHECK(out == doctest::Approx(0.5));  // t f**(t) on (L1, Linf)
  CHECK(ri_k_functional(h.f, couple, 0.0, &out) == RI_ERR_DOMAIN);

  REQUIRE(ri_log_interp_norm(
              h.f, couple, "{\"theta\":0.5,\"q\":1,\"alpha\":0}", &out) == RI_OK);
  CHECK(out > 0.0);
  CHECK(ri_log_interp_norm(h.f, couple, "{\"theta\":1.0,\"q\":1,\"alpha\":0}",
                           &out) == RI_ERR_SPEC);  // inadmissible at theta = 1

  ApiString ident;
  REQUIRE(ri_identify(couple, "{\"theta\":0.5,\"q\":1,\"alpha\":0}", &ident.s) == RI_OK);
  CHECK(ident.str().find("ordinary_case") != std::string::npos);
  CHECK(ident.str().find("lorentz_zygmund") != std::string::npos);
  char* none = nullptr;
  CHECK(ri_identify(couple, "{\"theta\":1.0,\"q\":\"inf\",\"alpha\":0}", &none) ==
        RI_ERR_UNSUPPORTED);

  REQUIRE(ri_btheta_quotient(couple, 1e-12, &out) == RI_OK);
  CHECK(out == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ri_btheta_quotient(couple, 2.0, &out) == RI_ERR_DOMAIN);
}

TEST_CASE("solver entry point returns the documented payload") {
  const char* cfg =
      "{\"dim\":1,\"n\":127,\"p\":2.0,\"tol\":1e-10,"
      "\"f\":{\"kind\":\"const\",\"value\":1.0},"
      "\"gradient_norm_space\":{\"kind\":\"lorentz\",\"p\":2,\"q\":\"inf\"}}";
  ApiString out;
  REQUIRE(ri_solve(cfg, &out.s) == RI_OK);
  const std::string payload = out.str();
  CHECK(payload.find("\"converged\":true") != std::string::npos);
  CHECK(payload.find("\"max_abs\":") != std::string::npos);
  CHECK(payload.find("\"gradient_norm\":") != std::string::npos);
  // torsion max 1/8 shows up in the payload
  CHECK(payload.find("\"max_abs\":0.12") != std::string::npos);

  char* bad = nullptr;
  CHECK(ri_solve("{\"dim\":1,\"n\":31,\"p\":0.5,\"tol\":1e-8,"
                 "\"f\":{\"kind\":\"const\",\"value\":1}}",
                 &bad) == RI_ERR_SPEC);
  CHECK(ri_solve("{nope", &bad) == RI_ERR_PARSE);
  CHECK(ri_solve(nullptr, &bad) == RI_ERR_INVALID_ARG);
}

TEST_CASE("experiment run and CSV agree and zero timings when asked") {
  const char* cfg =
      "{\"experiment\":\"bounds\",\"variant\":\"uniform\",\"p\":1.5,"
      "\"dim\":2,\"levels\":[12],\"seed\":5,\"solver_tol\":1e-10}";
  ApiString run;
  REQUIRE(ri_experiment_run(cfg, &run.s) == RI_OK);
  CHECK(run.str().find("\"pass\":true") != std::string::npos);

  ApiString csv1, csv2;
  REQUIRE(ri_experiment_csv(cfg, 0, &csv1.s) == RI_OK);
  REQUIRE(ri_experiment_csv(cfg, 0, &csv2.s) == RI_OK);
  CHECK(csv1.str() == csv2.str());
  CHECK(csv1.str().rfind("experiment,config_hash,sample_id,", 0) == 0);

  char* bad = nullptr;
  CHECK(ri_experiment_run("{\"experiment\":\"nosuch\"}", &bad) == RI_ERR_SPEC);
  CHECK(ri_experiment_csv("{oops", 1, &bad) == RI_ERR_PARSE);
}

TEST_CASE("last error is empty after success and set after failure") {
  Fn h = make({1.0}, {0.5});
  double out = 0.0;
  CHECK(ri_distribution(h.f, -2.0, &out) == RI_ERR_DOMAIN);
  CHECK(std::strlen(ri_last_error()) > 0);
  REQUIRE(ri_distribution(h.f, 0.5, &out) == RI_OK);
  CHECK(std::strlen(ri_last_error()) == 0);
  // freeing a null string/handle is a no-op
  ri_string_free(nullptr);
  ri_function_free(nullptr);
  ri_rearrangement_free(nullptr);
}
