#include "interp.hpp"

#include <algorithm>
#include <cmath>

namespace rispace {

namespace {

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

bool lz_equal(const SpaceSpec::LZView& v, double p, double q, double lambda) {
  auto same = [](double x, double y) {
    return (std::isinf(x) && std::isinf(y)) || x == y;
  };
  return same(v.p, p) && same(v.q, q) && v.lambda == lambda;
}

}  // namespace

CoupleSpec::CoupleSpec() : x0(SpaceSpec::lebesgue(1.0)), x1(SpaceSpec::lebesgue(kInf)) {
  x1_inside_x0 = true;
}

CoupleSpec::CoupleSpec(const SpaceSpec& a, const SpaceSpec& b) : x0(a), x1(b) {
  validate();
  x1_inside_x0 = find_embedding_rule(x1, x0).has_value();
}

void CoupleSpec::validate() const {
  x0.validate();
  x1.validate();
  if (!x0.as_lz() || !x1.as_lz())
    throw spec_error("couple members must be Lebesgue/Lorentz/Lorentz-Zygmund specs");
}

bool CoupleSpec::is_l1_linf() const {
  const auto v0 = x0.as_lz();
  const auto v1 = x1.as_lz();
  return v0 && v1 && lz_equal(*v0, 1.0, 1.0, 0.0) && lz_equal(*v1, kInf, kInf, 0.0);
}

void to_json(nlohmann::json& j, const CoupleSpec& c) {
  j = {{"x0", c.x0}, {"x1", c.x1}, {"x1_inside_x0", c.x1_inside_x0}};
}

void from_json(const nlohmann::json& j, CoupleSpec& c) {
  if (!j.is_object() || !j.contains("x0") || !j.contains("x1"))
    throw spec_error("couple JSON must contain 'x0' and 'x1'");
  c = CoupleSpec(j.at("x0").get<SpaceSpec>(), j.at("x1").get<SpaceSpec>());
}

void InterpParams::validate() const {
  if (!(q >= 1.0)) throw spec_error("interpolation exponent q must be >= 1");
  if (!std::isfinite(alpha)) throw spec_error("log exponent alpha must be finite");
  if (theta > 0.0 && theta < 1.0) return;
  if (theta == 0.0) {
    if (alpha >= -inv(q)) return;
    throw spec_error("theta = 0 requires alpha >= -1/q");
  }
  if (theta == 1.0) {
    if (alpha < -inv(q)) return;
    if (std::isinf(q) && alpha == 0.0) return;
    throw spec_error("theta = 1 requires alpha < -1/q (or q = inf with alpha = 0)");
  }
  throw spec_error("theta must lie in [0, 1]");
}

void to_json(nlohmann::json& j, const InterpParams& p) {
  j = {{"theta", p.theta}, {"q", std::isinf(p.q) ? nlohmann::json("inf") : nlohmann::json(p.q)},
       {"alpha", p.alpha}};
}

void from_json(const nlohmann::json& j, InterpParams& p) {
  p.theta = j.value("theta", 0.5);
  if (j.contains("q")) {
    const auto& qv = j.at("q");
    p.q = qv.is_string() ? kInf : qv.get<double>();
  }
  p.alpha = j.value("alpha", 0.0);
  p.validate();
}

// ---------------------------------------------------------------------------
// TruncNorm
// ---------------------------------------------------------------------------

TruncNorm::TruncNorm(const StepFunction& fs, const SpaceSpec& spec) {
  const auto lv = spec.as_lz();
  if (!lv) throw spec_error("truncation tables live on the Lorentz-Zygmund scale");
  v_ = *lv;
  levels_ = fs.levels();
  const size_t n = levels_.size();
  if (std::isinf(v_.q)) {
    if (std::isinf(v_.p) && v_.lambda == 0.0) {
      plain_sup_ = true;
      return;
    }
    const double c = std::isinf(v_.p) ? 0.0 : 1.0 / v_.p;
    V_.resize(n);
    pmaxV_.assign(n + 1, 0.0);
    smaxLV_.assign(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i) {
      V_[i] = logpow_sup(fs.lower(i), fs.breakpoints()[i], c, v_.lambda);
      pmaxV_[i + 1] = std::max(pmaxV_[i], V_[i]);
    }
    for (size_t i = n; i-- > 0;) smaxLV_[i] = std::max(smaxLV_[i + 1], levels_[i] * V_[i]);
    return;
  }
  const double a = (std::isinf(v_.p) ? 0.0 : v_.q / v_.p) - 1.0;
  W_.resize(n);
  cumW_.assign(n + 1, 0.0);
  sufLW_.assign(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    W_[i] = logpow_integral(fs.lower(i), fs.breakpoints()[i], a, v_.lambda * v_.q);
    cumW_[i + 1] = cumW_[i] + W_[i];
  }
  for (size_t i = n; i-- > 0;)
    sufLW_[i] = sufLW_[i + 1] + std::pow(levels_[i], v_.q) * W_[i];
  const double qr = std::round(v_.q);
  if (qr >= 1.0 && qr <= 4.0 && std::abs(v_.q - qr) < 1e-12) {
    int_q_ = static_cast<int>(qr);
    for (int jj = 0; jj <= int_q_; ++jj) {
      S_[jj].assign(n + 1, 0.0);
      for (size_t i = 0; i < n; ++i)
        S_[jj][i + 1] = S_[jj][i] + W_[i] * std::pow(levels_[i], double(int_q_ - jj));
    }
  }
}

size_t TruncNorm::count_above(double tau) const {
  return static_cast<size_t>(
      std::partition_point(levels_.begin(), levels_.end(),
                           [&](double L) { return L > tau; }) -
      levels_.begin());
}

double TruncNorm::large_part(double tau) const {
  if (levels_.empty()) return 0.0;
  if (plain_sup_) return std::max(levels_[0] - tau, 0.0);
  const size_t K = count_above(tau);
  if (K == 0) return 0.0;
  if (!V_.empty()) {
    double best = 0.0;
    for (size_t i = 0; i < K; ++i) best = std::max(best, (levels_[i] - tau) * V_[i]);
    return best;
  }
  if (int_q_ >= 1 && K > 8) {
    // (L - tau)^q expanded binomially over the precomputed prefix tables
    static constexpr double C[5][5] = {{1, 0, 0, 0, 0},
                                       {1, 1, 0, 0, 0},
                                       {1, 2, 1, 0, 0},
                                       {1, 3, 3, 1, 0},
                                       {1, 4, 6, 4, 1}};
    double sum = 0.0, tp = 1.0;
    for (int jj = 0; jj <= int_q_; ++jj) {
      sum += C[int_q_][jj] * (jj % 2 ? -tp : tp) * S_[jj][K];
      tp *= tau;
    }
    return std::pow(std::max(sum, 0.0), 1.0 / v_.q);
  }
  double sum = 0.0;
  for (size_t i = 0; i < K; ++i) sum += std::pow(levels_[i] - tau, v_.q) * W_[i];
  return std::pow(sum, 1.0 / v_.q);
}

double TruncNorm::small_part(double tau) const {
  if (levels_.empty() || tau <= 0.0) return 0.0;
  if (plain_sup_) return std::min(levels_[0], tau);
  const size_t K = count_above(tau);
  if (!V_.empty()) return std::max(tau * pmaxV_[K], smaxLV_[K]);
  return std::pow(std::pow(tau, v_.q) * cumW_[K] + sufLW_[K], 1.0 / v_.q);
}

// ---------------------------------------------------------------------------
// KEvaluator
// ---------------------------------------------------------------------------

KEvaluator::KEvaluator(const SimpleFunction& f, const CoupleSpec& couple, bool allow_fast)
    : fs_(rearrange(f)) {
  couple.validate();
  if (allow_fast && couple.is_l1_linf()) {
    fast_ = true;
    return;
  }
  if (fs_.is_zero()) return;
  n0_.emplace(fs_, couple.x0);
  n1_.emplace(fs_, couple.x1);
  const auto& lv = fs_.levels();
  taus_.push_back(0.0);
  const size_t step = std::max<size_t>(1, lv.size() / 32);
  for (size_t i = lv.size(); i-- > 0;) {
    if (i % step == 0 || i == 0) taus_.push_back(lv[i]);
  }
  if (taus_.back() != lv[0]) taus_.push_back(lv[0]);
}

double KEvaluator::at(double t) const {
  if (!(t > 0.0)) throw spec_error("K-functional arguments t must be positive");
  if (fast_) return fs_.is_zero() ? 0.0 : fs_.integral_to(std::min(t, 1.0));
  if (fs_.is_zero()) return 0.0;
  auto g = [&](double tau) { return n0_->large_part(tau) + t * n1_->small_part(tau); };
  double best = kInf;
  size_t best_i = 0;
  for (size_t i = 0; i < taus_.size(); ++i) {
    const double v = g(taus_[i]);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double lo = taus_[best_i == 0 ? 0 : best_i - 1];
  const double hi = taus_[std::min(best_i + 1, taus_.size() - 1)];
  if (hi > lo) best = std::min(best, golden_min(g, lo, hi, 1e-6).second);
  return best;
}

double k_functional(const SimpleFunction& f, double t, const CoupleSpec& couple) {
  return KEvaluator(f, couple).at(t);
}

// ---------------------------------------------------------------------------
// log-interpolation norm
// ---------------------------------------------------------------------------

double log_interp_norm(const SimpleFunction& f, const CoupleSpec& couple,
                       const InterpParams& params) {
  params.validate();
  couple.validate();
  if ((params.theta == 0.0 || params.theta == 1.0) && !couple.x1_inside_x0)
    throw spec_error(
        "limiting interpolation (theta in {0,1}) needs X1 inside X0 per the inclusion registry");
  const KEvaluator K(f, couple);
  if (K.is_zero()) return 0.0;
  const double u0 = std::log(1e-12);
  const int n = 2049;  // 2048 intervals; halving for the Richardson check is exact
  const double th = params.theta, al = params.alpha, q = params.q;
  if (std::isinf(q)) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = u0 * (1.0 - double(i) / (n - 1));
      best = std::max(best, std::exp(-th * u) * std::pow(1.0 - u, al) * K.at(std::exp(u)));
    }
    if (th == 1.0) best = std::max(best, K.at(1e-12) / 1e-12);  // sup K(t)/t limit
    return best;
  }
  std::vector<double> F(n);
  for (int i = 0; i < n; ++i) {
    const double u = u0 * (1.0 - double(i) / (n - 1));
    F[i] = std::exp(-th * q * u) * std::pow(1.0 - u, al * q) * std::pow(K.at(std::exp(u)), q);
  }
  const double h = -u0 / (n - 1);
  double fine = 0.0, coarse = 0.0;
  for (int i = 0; i + 1 < n; ++i) fine += 0.5 * (F[i] + F[i + 1]) * h;
  for (int i = 0; i + 2 < n; i += 2) coarse += (F[i] + F[i + 2]) * h;
  double total = fine + (fine - coarse) / 3.0;  // Richardson-extrapolated trapezoid
  if (std::abs(fine - coarse) > 0.05 * std::max(std::abs(fine), 1e-300))
    throw convergence_failure("interpolation-norm quadrature failed its Richardson check",
                              std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300));
  if (th == 1.0) {
    // analytic tail below t = 1e-12, where K(t) ~ t * ‖f‖_{X1}
    const double s1 = K.at(1e-12) / 1e-12;
    total += std::pow(s1, q) * std::pow(1.0 - u0, al * q + 1.0) / (-(al * q + 1.0));
  }
  return std::pow(total, 1.0 / q);
}

// ---------------------------------------------------------------------------
// identification
// ---------------------------------------------------------------------------

IdentifiedSpace identify_interp_space(const CoupleSpec& couple, const InterpParams& params) {
  params.validate();
  couple.validate();
  const auto v0 = *couple.x0.as_lz();
  const auto v1 = *couple.x1.as_lz();
  const double th = params.theta, q = params.q, al = params.alpha;
  if (!(v0.p < v1.p))
    throw unsupported_embedding("identification requires primary exponents p0 < p1");
  if (!(v0.p >= 1.0)) throw unsupported_embedding("identification requires p0 >= 1");
  const bool zygmund = v0.lambda != 0.0 || v1.lambda != 0.0;
  if (th > 0.0 && th < 1.0) {
    const double den = (1.0 - th) * inv(v0.p) + th * inv(v1.p);
    if (den <= 0.0)
      throw unsupported_embedding("interpolated primary exponent is not finite");
    const double ptheta = 1.0 / den;
    const double ltheta = (1.0 - th) * v0.lambda + th * v1.lambda + al;
    return {SpaceSpec::lorentz_zygmund(ptheta, q, ltheta),
            zygmund ? "zygmund_couple" : "ordinary_case"};
  }
  if (zygmund)
    throw unsupported_embedding("limiting cases are identified for log-free couples only");
  if (!couple.x1_inside_x0)
    throw unsupported_embedding("limiting cases need X1 inside X0 per the inclusion registry");
  if (std::isinf(q))
    throw unsupported_embedding("limiting-case identification needs finite q");
  if (th == 0.0) {
    if (!std::isinf(v0.q))
      return {SpaceSpec::ggamma(v0.q, q, {-1.0, al * q}, {v0.q / v0.p - 1.0, 0.0}),
              "limit_theta0_finite_q0"};
    return {SpaceSpec::ggamma(kInf, q, {-1.0, al * q}, {1.0 / v0.p, 0.0}),
            "limit_theta0_weak_x0"};
  }
  if (std::isinf(v1.q)) {
    if (std::isinf(v1.p))
      throw unsupported_embedding("theta = 1 against X1 = L^inf has no Gamma identification");
    return {SpaceSpec::ggamma(kInf, q, {-1.0, al * q}, {1.0 / v1.p, 0.0}),
            "limit_theta1_weak_x1"};
  }
  if (std::abs(v1.q - v1.p) < 1e-12)
    return {SpaceSpec::ggamma(v1.p, q, {-1.0, 0.0}, {0.0, al * v1.p}),
            "limit_theta1_diagonal_x1"};
  throw unsupported_embedding(
      "theta = 1 with an off-diagonal upper space has no Gamma identification");
}

void to_json(nlohmann::json& j, const IdentifiedSpace& s) {
  j = {{"space", s.space}, {"case", s.theorem_case}};
}

double btheta_quotient(const CoupleSpec& couple, double t) {
  couple.validate();
  if (!(t > 0.0 && t < 1.0)) throw spec_error("quotient argument must lie in (0,1)");
  const auto v0 = *couple.x0.as_lz();
  const auto v1 = *couple.x1.as_lz();
  const double delta = inv(v0.p) - inv(v1.p);
  const double u = 1.0 - std::log(t);
  return (1.0 - delta * std::log(t) - (v0.lambda - v1.lambda) * std::log(u)) / u;
}

IdentificationCheck verify_identification(const CoupleSpec& couple, const InterpParams& params,
                                          const std::vector<SimpleFunction>& family,
                                          double budget) {
  IdentificationCheck check;
  check.identified = identify_interp_space(couple, params);
  RatioStats& st = check.stats;
  for (const auto& f : family) {
    double a, b;
    try {
      a = log_interp_norm(f, couple, params);
      b = space_norm(f, check.identified.space);
    } catch (const divergence_error&) {
      ++st.divergent;
      continue;
    }
    if (a == 0.0 && b == 0.0) {
      ++st.zeros;
      continue;
    }
    if (a == 0.0 || b == 0.0) {
      ++st.divergent;
      continue;
    }
    st.ratios.push_back(a / b);
  }
  if (!st.ratios.empty()) {
    std::vector<double> sorted = st.ratios;
    std::sort(sorted.begin(), sorted.end());
    st.median = sorted[sorted.size() / 2];
    st.min = sorted.front();
    st.max = sorted.back();
  }
  st.count = static_cast<int>(st.ratios.size());
  st.pass = st.count > 0 && st.min > 0.0 && st.max / st.min <= budget;

  const auto v0 = *couple.x0.as_lz();
  const auto v1 = *couple.x1.as_lz();
  check.quotient_target = inv(v0.p) - inv(v1.p);
  const std::array<double, 3> ts{1e-4, 1e-8, 1e-12};
  std::array<double, 3> errs{};
  for (int i = 0; i < 3; ++i) {
    check.quotient[i] = btheta_quotient(couple, ts[i]);
    errs[i] = std::abs(check.quotient[i] - check.quotient_target);
  }
  const double scale = std::max(std::abs(check.quotient_target), 1e-6);
  check.quotient_converges =
      errs[2] <= 0.05 * scale && errs[0] >= errs[1] - 1e-12 && errs[1] >= errs[2] - 1e-12;
  check.pass = st.pass && check.quotient_converges;
  return check;
}

// ---------------------------------------------------------------------------
// Hölder K-functional estimates
// ---------------------------------------------------------------------------

double HolderProfile::G(double sigma) const {
  const double fallback = std::max(M0, M1);
  const double gv = g ? g(2.0 * sigma) : fallback;
  const double fv = f ? f(sigma, 2.0 * sigma) : fallback;
  return std::max(gv, fv);
}

void HolderProfile::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw spec_error("Hölder exponent alpha must be in (0,1]");
  if (!(beta >= alpha)) throw spec_error("the K-estimate needs beta >= alpha");
  if (!(M0 > 0.0 && M1 > 0.0)) throw spec_error("Hölder constants must be positive");
}

HolderKReport holder_k_check(const std::vector<HolderSample>& samples,
                             const HolderProfile& profile, const CoupleSpec& couple_x,
                             const CoupleSpec& couple_y, const std::vector<double>& t_grid) {
  profile.validate();
  couple_x.validate();
  couple_y.validate();
  constexpr double kTol = 1e-6;
  constexpr double kFloor = 1e-14;
  HolderKReport rep;
  auto record = [&](double lhs, double rhs, double& slot) {
    if (rhs <= kFloor) {
      if (lhs > kFloor) {
        slot = kInf;
        ++rep.violations;
        rep.pass = false;
      }
      return;
    }
    const double ratio = lhs / rhs;
    slot = std::max(slot, ratio);
    if (ratio > 1.0 + kTol) {
      ++rep.violations;
      rep.pass = false;
    }
  };
  const double pair_const = 2.0 * std::max(profile.M0, profile.M1);
  for (const auto& s : samples) {
    const KEvaluator Ka(s.a, couple_x);
    const KEvaluator KTa(s.Ta, couple_y);
    const KEvaluator Kab(s.a.sub_same_partition(s.b), couple_x);
    const KEvaluator KTab(s.Ta.sub_same_partition(s.Tb), couple_y);
    const double sigma = space_norm(s.a, couple_x.x0);
    const double Gs = profile.G(sigma);
    for (const double t : t_grid) {
      if (!(t > 0.0 && t < 1.0)) throw spec_error("Hölder check grid must lie in (0,1)");
      const double kat = Ka.at(t);
      record(KTa.at(std::pow(t, profile.beta)),
             Gs * (std::pow(kat, profile.beta) + std::pow(kat, profile.alpha)),
             rep.max_single);
      record(KTab.at(std::pow(t, profile.alpha)),
             pair_const * std::pow(Kab.at(t), profile.alpha), rep.max_pair);
    }
  }
  return rep;
}

}  // namespace rispace
