#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rearrange.hpp"

namespace rispace {

enum class SpaceKind {
  lebesgue,        // L^p
  lorentz,         // L^{p,q}
  lorentz_zygmund, // L^{p,q}(log L)^lambda
  grand,           // L^{p),alpha}: sup over eps of (eps^alpha ∫|f|^{p-eps})^{1/(p-eps)}
  small,           // L^{(p,alpha}: ∫₀¹ (1-log t)^{alpha/p'-1} (∫₀^t f_*^p)^{1/p} dt/t
  ggamma           // GGamma(p, m; w1, w2)
};

struct SpaceSpec {
  SpaceKind kind = SpaceKind::lebesgue;
  double p = 1.0;
  double q = 1.0;        // lorentz / lorentz_zygmund / ggamma outer exponent m
  double lambda = 0.0;   // lorentz_zygmund log exponent
  double alpha = 0.0;    // grand / small parameter
  LogPowerWeight w1{};   // ggamma outer weight
  LogPowerWeight w2{};   // ggamma inner weight

  static SpaceSpec lebesgue(double p);
  static SpaceSpec lorentz(double p, double q);
  static SpaceSpec lorentz_zygmund(double p, double q, double lambda);
  static SpaceSpec grand(double p, double alpha);
  static SpaceSpec small(double p, double alpha);
  static SpaceSpec ggamma(double p, double m, LogPowerWeight w1, LogPowerWeight w2 = {});

  void validate() const;          // throws spec_error on violated invariants
  std::string describe() const;   // short human-readable label
  bool operator==(const SpaceSpec& o) const;

  // View of Lebesgue/Lorentz/Lorentz–Zygmund specs as the (p, q, lambda)
  // triple; nullopt for grand/small/ggamma.
  struct LZView {
    double p, q, lambda;
  };
  std::optional<LZView> as_lz() const;
};

void to_json(nlohmann::json& j, const SpaceSpec& s);
void from_json(const nlohmann::json& j, SpaceSpec& s);

// Norm of a rearranged function in the given space. Throws divergence_error
// when the norm is infinite, spec_error on invalid specs.
double space_norm(const StepFunction& fs, const SpaceSpec& spec);
double space_norm(const SimpleFunction& f, const SpaceSpec& spec);

// Lorentz norm computed from the maximal function f_** instead of f_*; equal
// up to the Hardy factor p' = p/(p-1) for p > 1 (cross-check mode).
double lorentz_norm_via_maximal(const StepFunction& fs, double p, double q);

// Grand norm by the quantile characterization sup_t (1-log t)^{-alpha/p}
// (∫_t^1 f_*^p)^{1/p} (cross-check mode; equivalent up to constants).
double grand_norm_quantile(const StepFunction& fs, double p, double alpha);

// Weight admissibility report for a ggamma spec: c1 is the doubling property
// of the inner weight's primitive (always true for log-power weights, with the
// doubling constant reported); c2 asks whether the constant function 1 has
// finite norm, i.e. the primitive of w2 lies in L^{m/p}(w1).
struct WeightConditionReport {
  bool c1 = false;
  bool c2 = false;
  double doubling_constant = 0.0;
};
WeightConditionReport check_weight_conditions(const SpaceSpec& gg);

// Inclusion registry: returns the name of the rule that proves src ⊂ tgt
// (continuous embedding on the unit-measure domain), or nullopt when no rule
// applies. Never guesses: a missing rule means "unsupported", not "false".
std::optional<std::string> find_embedding_rule(const SpaceSpec& src, const SpaceSpec& tgt);

struct RatioStats {
  double min = kInf;
  double max = 0.0;
  double median = 0.0;
  int count = 0;      // included samples
  int divergent = 0;  // excluded samples (infinite norm)
  int zeros = 0;      // skipped samples (both norms zero)
  bool pass = false;
  std::vector<double> ratios;
};

// Bounded-ratio test ||f||_tgt <= budget * ||f||_src over a family. Throws
// unsupported_embedding when the registry has no rule for the pair.
struct EmbeddingReport {
  std::string rule;
  RatioStats stats;
};
EmbeddingReport embedding_report(const SpaceSpec& src, const SpaceSpec& tgt,
                                 const std::vector<SimpleFunction>& family,
                                 double budget = 1e3);

// Two-sided ratio test: max/min of ||f||_a / ||f||_b over the family must not
// exceed the budget.
RatioStats equivalence_report(const SpaceSpec& a, const SpaceSpec& b,
                              const std::vector<SimpleFunction>& family,
                              double budget = 1e3);

}  // namespace rispace
