#pragma once

// Peetre K-functionals on Lorentz--Zygmund couples, logarithmic interpolation
// norms, symbolic identification of the interpolated space, and checkers for
// the K-functional estimates satisfied by Hölder-continuous mappings.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spaces.hpp"

namespace rispace {

// A compatible couple (X0, X1). Members must live on the Lorentz--Zygmund
// scale (lebesgue / lorentz / lorentz_zygmund); x1_inside_x0 is derived from
// the inclusion registry, never guessed, and is required by the limiting
// interpolation cases theta in {0, 1}.
struct CoupleSpec {
  SpaceSpec x0;
  SpaceSpec x1;
  bool x1_inside_x0 = false;

  CoupleSpec();
  CoupleSpec(const SpaceSpec& a, const SpaceSpec& b);
  void validate() const;
  bool is_l1_linf() const;  // couple with the exact K(t) = ∫₀^t f_* formula
};

void to_json(nlohmann::json& j, const CoupleSpec& c);
void from_json(const nlohmann::json& j, CoupleSpec& c);

// Interpolation parameters (theta, q, alpha). Admissible combinations:
// 0 < theta < 1 with any alpha; theta = 0 with alpha >= -1/q;
// theta = 1 with alpha < -1/q; theta = 1, q = inf, alpha = 0.
struct InterpParams {
  double theta = 0.5;
  double q = 1.0;
  double alpha = 0.0;
  void validate() const;
};

void to_json(nlohmann::json& j, const InterpParams& p);
void from_json(const nlohmann::json& j, InterpParams& p);

// Norms of the two truncation parts of a fixed rearrangement, as functions of
// the truncation height tau: large_part(tau) = ‖(f_* - tau)₊‖ and
// small_part(tau) = ‖min(f_*, tau)‖ in one Lorentz--Zygmund-scale space.
// Per-piece weight integrals are precomputed so each evaluation costs
// O(log n) (finite integer q <= 4), O(log n) for small_part generally, and
// O(n) only for large_part with non-integer or infinite q.
class TruncNorm {
 public:
  TruncNorm(const StepFunction& fs, const SpaceSpec& spec);
  double large_part(double tau) const;
  double small_part(double tau) const;

 private:
  size_t count_above(double tau) const;

  SpaceSpec::LZView v_{1.0, 1.0, 0.0};
  bool plain_sup_ = false;  // L^inf: both parts are O(1)
  std::vector<double> levels_;
  std::vector<double> W_;       // piece weight integrals (finite q)
  std::vector<double> V_;       // piece weighted sups (q = inf)
  std::vector<double> pmaxV_;   // prefix max of V
  std::vector<double> smaxLV_;  // suffix max of L*V
  std::vector<double> cumW_;    // prefix sums of W
  std::vector<double> sufLW_;   // suffix sums of L^q W
  std::array<std::vector<double>, 5> S_{};  // binomial prefix tables
  int int_q_ = -1;
};

// K(f, t; X0, X1) over the truncation decomposition family
// f = (|f|-tau)₊ sign f + min(|f|, tau) sign f, minimized over tau.
class KEvaluator {
 public:
  // allow_fast = false forces the truncation minimizer even on (L1, Linf),
  // so the exact formula can serve as its oracle.
  KEvaluator(const SimpleFunction& f, const CoupleSpec& couple, bool allow_fast = true);
  double at(double t) const;
  bool fast_path() const { return fast_; }
  bool is_zero() const { return fs_.is_zero(); }

 private:
  StepFunction fs_;
  bool fast_ = false;
  std::optional<TruncNorm> n0_;
  std::optional<TruncNorm> n1_;
  std::vector<double> taus_;  // candidate truncation heights
};

double k_functional(const SimpleFunction& f, double t, const CoupleSpec& couple);

// ‖f‖_{theta,q;alpha} = ‖ t^{-theta-1/q} (1-log t)^alpha K(f,t) ‖_{L^q(0,1)}.
double log_interp_norm(const SimpleFunction& f, const CoupleSpec& couple,
                       const InterpParams& params);

// Symbolic identification of (X0, X1)_{theta,q;alpha} on the LZ scale, with
// the applied case recorded for serialization.
struct IdentifiedSpace {
  SpaceSpec space;
  std::string theorem_case;
};

void to_json(nlohmann::json& j, const IdentifiedSpace& s);

IdentifiedSpace identify_interp_space(const CoupleSpec& couple, const InterpParams& params);

// Quotient whose t -> 0 limit is 1/p0 - 1/p1 for the couple (used as the
// numeric counterpart of the slow-variation step in the identification proof):
// Q(t) = (1 - (1/p0 - 1/p1) log t - (a0 - a1) log(1 - log t)) / (1 - log t).
double btheta_quotient(const CoupleSpec& couple, double t);

struct IdentificationCheck {
  IdentifiedSpace identified;
  RatioStats stats;  // log-interp norm vs identified-space norm, two-sided
  std::array<double, 3> quotient{};  // b_theta quotient at t = 1e-4, 1e-8, 1e-12
  double quotient_target = 0.0;      // 1/p0 - 1/p1
  bool quotient_converges = false;
  bool pass = false;
};

IdentificationCheck verify_identification(const CoupleSpec& couple, const InterpParams& params,
                                          const std::vector<SimpleFunction>& family,
                                          double budget = 1e3);

// Hölder data for a nonlinear mapping T between couples:
//   ‖Ta - Tb‖_{Y0} <= f(‖a‖_{X0}, ‖b‖_{X0}) ‖a-b‖_{X0}^alpha,
//   ‖Ta‖_{Y1}      <= g(‖a‖_{X0}) ‖a‖_{X1}^beta,
// with G(sigma) = max{g(2 sigma), f(sigma, 2 sigma)} always recomputed.
struct HolderProfile {
  double alpha = 1.0;  // in (0, 1]
  double beta = 1.0;   // beta >= alpha
  double M0 = 1.0;
  double M1 = 1.0;
  std::function<double(double, double)> f;  // defaults to max(M0, M1)
  std::function<double(double)> g;          // defaults to max(M0, M1)

  double G(double sigma) const;
  void validate() const;
};

struct HolderSample {
  SimpleFunction a, Ta, b, Tb;
};

// Evaluates, over all samples and grid points t in (0,1):
//   single:  K(Ta, t^beta; Y) <= G(‖a‖_{X0}) ([K(a,t)]^beta + [K(a,t)]^alpha)
//   pair:    K(Ta-Tb, t^alpha; Y) <= 2 max(M0, M1) [K(a-b,t)]^alpha
// recording the worst left/right ratios; pass iff no ratio exceeds 1 beyond
// tolerance.
struct HolderKReport {
  double max_single = 0.0;
  double max_pair = 0.0;
  int violations = 0;
  bool pass = true;
};

HolderKReport holder_k_check(const std::vector<HolderSample>& samples,
                             const HolderProfile& profile, const CoupleSpec& couple_x,
                             const CoupleSpec& couple_y, const std::vector<double>& t_grid);

}  // namespace rispace
