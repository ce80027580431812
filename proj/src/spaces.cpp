#include "spaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rispace {

namespace {

double num_or_inf(const nlohmann::json& j, const char* field) {
  const auto& v = j.at(field);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
    throw spec_error(std::string("field '") + field + "' must be a number or \"inf\"");
  }
  if (!v.is_number()) throw spec_error(std::string("field '") + field + "' must be a number or \"inf\"");
  return v.get<double>();
}

nlohmann::json inf_aware(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

std::string fmt(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

SpaceSpec SpaceSpec::lebesgue(double p) {
  SpaceSpec s;
  s.kind = SpaceKind::lebesgue;
  s.p = p;
  s.q = p;
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::lorentz(double p, double q) {
  SpaceSpec s;
  s.kind = SpaceKind::lorentz;
  s.p = p;
  s.q = q;
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::lorentz_zygmund(double p, double q, double lambda) {
  SpaceSpec s;
  s.kind = SpaceKind::lorentz_zygmund;
  s.p = p;
  s.q = q;
  s.lambda = lambda;
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::grand(double p, double alpha) {
  SpaceSpec s;
  s.kind = SpaceKind::grand;
  s.p = p;
  s.alpha = alpha;
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::small(double p, double alpha) {
  SpaceSpec s;
  s.kind = SpaceKind::small;
  s.p = p;
  s.alpha = alpha;
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::ggamma(double p, double m, LogPowerWeight w1, LogPowerWeight w2) {
  SpaceSpec s;
  s.kind = SpaceKind::ggamma;
  s.p = p;
  s.q = m;
  s.w1 = w1;
  s.w2 = w2;
  s.validate();
  return s;
}

void SpaceSpec::validate() const {
  switch (kind) {
    case SpaceKind::lebesgue:
      if (!(p > 0.0)) throw spec_error("Lebesgue exponent must be positive");
      return;
    case SpaceKind::lorentz:
      if (!(p >= 1.0)) throw spec_error("Lorentz primary exponent must be >= 1");
      if (!(q > 0.0)) throw spec_error("secondary exponent must be positive");
      if (std::isinf(p) && !std::isinf(q))
        throw spec_error("L^{inf,q} with finite q is trivial; use q = inf");
      return;
    case SpaceKind::lorentz_zygmund:
      if (!(p > 0.0)) throw spec_error("primary exponent must be positive");
      if (!(q > 0.0)) throw spec_error("secondary exponent must be positive");
      if (!std::isfinite(lambda)) throw spec_error("log exponent must be finite");
      return;
    case SpaceKind::grand:
    case SpaceKind::small:
      if (!(p > 1.0) || std::isinf(p))
        throw spec_error("grand/small spaces need a finite primary exponent > 1");
      if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw spec_error("grand/small spaces need a positive finite parameter");
      return;
    case SpaceKind::ggamma:
      if (!(p > 0.0)) throw spec_error("inner exponent must be positive");
      if (!(q > 0.0)) throw spec_error("outer exponent must be positive");
      if (!std::isfinite(w1.a) || !std::isfinite(w1.b) || !std::isfinite(w2.a) ||
          !std::isfinite(w2.b))
        throw spec_error("weight exponents must be finite");
      return;
  }
  throw spec_error("unknown space kind");
}

std::string SpaceSpec::describe() const {
  switch (kind) {
    case SpaceKind::lebesgue:
      return "L^{" + fmt(p) + "}";
    case SpaceKind::lorentz:
      return "L^{" + fmt(p) + "," + fmt(q) + "}";
    case SpaceKind::lorentz_zygmund:
      return "L^{" + fmt(p) + "," + fmt(q) + "}(log)^{" + fmt(lambda) + "}";
    case SpaceKind::grand:
      return "L^{" + fmt(p) + ")," + fmt(alpha) + "}";
    case SpaceKind::small:
      return "L^{(" + fmt(p) + "," + fmt(alpha) + "}";
    case SpaceKind::ggamma:
      return "GGamma(" + fmt(p) + "," + fmt(q) + ";t^{" + fmt(w1.a) + "}log^{" + fmt(w1.b) +
             "};t^{" + fmt(w2.a) + "}log^{" + fmt(w2.b) + "})";
  }
  return "?";
}

bool SpaceSpec::operator==(const SpaceSpec& o) const {
  auto same = [](double x, double y) {
    return (std::isinf(x) && std::isinf(y)) || x == y;
  };
  return kind == o.kind && same(p, o.p) && same(q, o.q) && lambda == o.lambda &&
         alpha == o.alpha && w1.a == o.w1.a && w1.b == o.w1.b && w2.a == o.w2.a &&
         w2.b == o.w2.b;
}

std::optional<SpaceSpec::LZView> SpaceSpec::as_lz() const {
  switch (kind) {
    case SpaceKind::lebesgue:
      return LZView{p, p, 0.0};
    case SpaceKind::lorentz:
      return LZView{p, q, 0.0};
    case SpaceKind::lorentz_zygmund:
      return LZView{p, q, lambda};
    default:
      return std::nullopt;
  }
}

void to_json(nlohmann::json& j, const SpaceSpec& s) {
  switch (s.kind) {
    case SpaceKind::lebesgue:
      j = {{"kind", "lebesgue"}, {"p", inf_aware(s.p)}};
      return;
    case SpaceKind::lorentz:
      j = {{"kind", "lorentz"}, {"p", inf_aware(s.p)}, {"q", inf_aware(s.q)}};
      return;
    case SpaceKind::lorentz_zygmund:
      j = {{"kind", "lorentz_zygmund"},
           {"p", inf_aware(s.p)},
           {"q", inf_aware(s.q)},
           {"lambda", s.lambda}};
      return;
    case SpaceKind::grand:
      j = {{"kind", "grand"}, {"p", s.p}, {"alpha", s.alpha}};
      return;
    case SpaceKind::small:
      j = {{"kind", "small"}, {"p", s.p}, {"alpha", s.alpha}};
      return;
    case SpaceKind::ggamma:
      j = {{"kind", "ggamma"},
           {"p", inf_aware(s.p)},
           {"m", inf_aware(s.q)},
           {"w1", s.w1},
           {"w2", s.w2}};
      return;
  }
}

void from_json(const nlohmann::json& j, SpaceSpec& s) {
  if (!j.is_object() || !j.contains("kind"))
    throw spec_error("space JSON must be an object with a 'kind' field");
  const std::string kind = j.at("kind").get<std::string>();
  s = SpaceSpec{};
  if (kind == "lebesgue") {
    s.kind = SpaceKind::lebesgue;
    s.p = num_or_inf(j, "p");
    s.q = s.p;
  } else if (kind == "lorentz") {
    s.kind = SpaceKind::lorentz;
    s.p = num_or_inf(j, "p");
    s.q = num_or_inf(j, "q");
  } else if (kind == "lorentz_zygmund") {
    s.kind = SpaceKind::lorentz_zygmund;
    s.p = num_or_inf(j, "p");
    s.q = num_or_inf(j, "q");
    s.lambda = j.value("lambda", 0.0);
  } else if (kind == "grand" || kind == "grand_lebesgue") {
    s.kind = SpaceKind::grand;
    s.p = num_or_inf(j, "p");
    s.alpha = j.value("alpha", 1.0);
  } else if (kind == "small" || kind == "small_lebesgue") {
    s.kind = SpaceKind::small;
    s.p = num_or_inf(j, "p");
    s.alpha = j.value("alpha", 1.0);
  } else if (kind == "ggamma") {
    s.kind = SpaceKind::ggamma;
    s.p = num_or_inf(j, "p");
    s.q = num_or_inf(j, "m");
    if (j.contains("w1")) s.w1 = j.at("w1").get<LogPowerWeight>();
    if (j.contains("w2")) s.w2 = j.at("w2").get<LogPowerWeight>();
  } else {
    throw spec_error("unknown space kind '" + kind +
                     "' (expected lebesgue|lorentz|lorentz_zygmund|grand|small|ggamma)");
  }
  s.validate();
}

namespace {

// ---------------------------------------------------------------------------
// generalized Gamma norm: [ ∫₀¹ w1(t) (∫₀^t f_*^p w2)^{m/p} dt ]^{1/m},
// with the usual sup conventions at p = inf (inner) and m = inf (outer).
// ---------------------------------------------------------------------------
double ggamma_norm(const StepFunction& fs, double p, double m, const LogPowerWeight& w1,
                   const LogPowerWeight& w2) {
  if (fs.is_zero()) return 0.0;
  const bool inner_sup = std::isinf(p);
  std::optional<WeightedPrefix> prefix;
  std::optional<WeightedSup> sup;
  if (inner_sup)
    sup.emplace(fs, w2);  // throws divergence_error when the running sup is infinite
  else
    prefix.emplace(fs, w2, p);  // throws divergence_error when the inner integral is infinite
  if (std::isinf(m)) {
    // the inner functional is nondecreasing in t, so the sup sits at t = 1
    return inner_sup ? sup->total() : std::pow(prefix->total(), 1.0 / p);
  }
  // Detect outer divergence from the t -> 0 power/log exponents of the
  // integrand w1(t) * Phi(t)^m. For an integrable inner weight the primitive
  // behaves like t^{a2+1}(1-log t)^{b2}; in the resonant a2 == -1 case like
  // (1-log t)^{b2+1}.
  double A, B;
  if (inner_sup) {
    A = w1.a + w2.a * m;
    B = w1.b + w2.b * m;
  } else if (w2.a > -1.0 + 1e-13) {
    A = w1.a + (w2.a + 1.0) * m / p;
    B = w1.b + w2.b * m / p;
  } else {
    A = w1.a;
    B = w1.b + (w2.b + 1.0) * m / p;
  }
  if (A < -1.0 - 1e-13 || (std::abs(A + 1.0) <= 1e-13 && B >= -1.0 - 1e-13))
    throw divergence_error("outer integral of the generalized Gamma norm diverges at 0");
  const double mu_out = A + 1.0;
  const double inner_pow = inner_sup ? m : m / p;
  auto integrand = [&](double u) {
    const double t = std::exp(1.0 - u);
    const double base = inner_sup ? sup->at(t) : prefix->at(t);
    if (!(base > 0.0)) return 0.0;
    // assembled in log space so huge/tiny factor pairs cannot overflow
    const double lg = (1.0 - u) * (w1.a + 1.0) + w1.b * std::log(u) + inner_pow * std::log(base);
    return std::exp(lg);
  };
  // split at the piece boundaries mapped to u = 1 - log t
  std::vector<double> splits{1.0};
  for (size_t i = fs.size(); i-- > 0;) {
    const double b = fs.breakpoints()[i];
    if (b < 1.0) splits.push_back(1.0 - std::log(b));
  }
  std::sort(splits.begin(), splits.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < splits.size(); ++i)
    total += adaptive_simpson(integrand, splits[i], splits[i + 1], 1e-11);
  // tail across the first piece: geometric decay at rate mu_out > 0
  double left = splits.back();
  double step = std::max(1.0, 1.0 / mu_out);
  const double poly_guard = left + 2.0 * std::max(B, 0.0) / mu_out;
  for (int k = 0; k < 300; ++k) {
    double right = left + step;
    if (right > 700.0) {  // exp underflow horizon; append the analytic remainder
      total += integrand(700.0) / mu_out;
      break;
    }
    total += adaptive_simpson(integrand, left, right, 1e-11);
    if (right >= poly_guard && integrand(right) * 2.6 / mu_out <= 1e-15 * std::max(total, 1e-300))
      break;
    left = right;
    step *= 1.5;
  }
  return std::pow(total, 1.0 / m);
}

// grand norm by its definition: sup over eps in (0, p-1) of
// (eps^alpha ∫ |f|^{p-eps})^{1/(p-eps)}, on a geometric grid refined twice.
double grand_norm(const StepFunction& fs, double p, double alpha) {
  if (fs.is_zero()) return 0.0;
  const auto& lv = fs.levels();
  std::vector<double> widths(fs.size());
  for (size_t i = 0; i < fs.size(); ++i) widths[i] = fs.breakpoints()[i] - fs.lower(i);
  auto value = [&](double eps) {
    const double r = p - eps;
    double s = 0.0;
    for (size_t i = 0; i < lv.size(); ++i) s += widths[i] * std::pow(lv[i], r);
    return std::exp((alpha * std::log(eps) + std::log(s)) / r);
  };
  const double span = p - 1.0;
  std::vector<double> pts = geomspace(span * 1e-9, span * (1.0 - 1e-9), 64);
  double best_x = pts[0], best = -kInf;
  for (int round = 0; round < 3; ++round) {
    size_t best_i = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      const double v = value(pts[i]);
      if (v > best) {
        best = v;
        best_x = pts[i];
        best_i = i;
      }
    }
    if (round == 2) break;
    const double lo = pts[best_i == 0 ? 0 : best_i - 1];
    const double hi = pts[std::min(best_i + 1, pts.size() - 1)];
    pts = linspace(lo, hi, 64);
  }
  (void)best_x;
  return best;
}

double lz_norm(const StepFunction& fs, const SpaceSpec::LZView& v) {
  if (fs.is_zero()) return 0.0;
  if (std::isinf(v.q)) {
    if (std::isinf(v.p) && v.lambda == 0.0) return fs.max_level();
    const double c = std::isinf(v.p) ? 0.0 : 1.0 / v.p;
    double best = 0.0;
    for (size_t i = 0; i < fs.size(); ++i)
      best = std::max(best,
                      fs.levels()[i] * logpow_sup(fs.lower(i), fs.breakpoints()[i], c, v.lambda));
    return best;
  }
  const double a = (std::isinf(v.p) ? 0.0 : v.q / v.p) - 1.0;
  return std::pow(integrate_weighted(fs, {a, v.lambda * v.q}, v.q), 1.0 / v.q);
}

}  // namespace

double space_norm(const StepFunction& fs, const SpaceSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case SpaceKind::lebesgue:
      if (std::isinf(spec.p)) return fs.max_level();
      return std::pow(integrate_weighted(fs, {0.0, 0.0}, spec.p), 1.0 / spec.p);
    case SpaceKind::lorentz:
    case SpaceKind::lorentz_zygmund:
      return lz_norm(fs, *spec.as_lz());
    case SpaceKind::grand:
      return grand_norm(fs, spec.p, spec.alpha);
    case SpaceKind::small: {
      // L^{(p,alpha}: outer weight (1-log t)^{alpha/p'-1} dt/t over the
      // p-th root of the prefix integral — a generalized Gamma norm.
      const double c = spec.alpha * (spec.p - 1.0) / spec.p;
      return ggamma_norm(fs, spec.p, 1.0, {-1.0, c - 1.0}, {0.0, 0.0});
    }
    case SpaceKind::ggamma:
      return ggamma_norm(fs, spec.p, spec.q, spec.w1, spec.w2);
  }
  throw spec_error("unknown space kind");
}

double space_norm(const SimpleFunction& f, const SpaceSpec& spec) {
  return space_norm(rearrange(f), spec);
}

double lorentz_norm_via_maximal(const StepFunction& fs, double p, double q) {
  if (!(p > 1.0) || std::isinf(p))
    throw spec_error("maximal-function Lorentz norm needs finite p > 1");
  if (fs.is_zero()) return 0.0;
  // On piece i the maximal function is f_**(t) = L_i + C_i / t with
  // C_i = cum_{i-1} - L_i * lower_i >= 0; beyond the support it is T / t.
  const double T = fs.total_integral();
  const double S = fs.support();
  if (std::isinf(q)) {
    double best = 0.0;
    auto g = [&](double L, double C, double t) {
      return std::pow(t, 1.0 / p) * (L + C / t);
    };
    double cum_below = 0.0;
    for (size_t i = 0; i < fs.size(); ++i) {
      const double L = fs.levels()[i];
      const double lo = fs.lower(i), hi = fs.breakpoints()[i];
      const double C = cum_below - L * lo;
      best = std::max(best, g(L, C, hi));
      if (lo > 0.0) best = std::max(best, g(L, C, lo));
      if (C > 0.0 && L > 0.0) {
        const double tstar = C * (p - 1.0) / L;
        if (tstar > lo && tstar < hi) best = std::max(best, g(L, C, tstar));
      }
      cum_below += L * (hi - lo);
    }
    if (S < 1.0) best = std::max(best, std::pow(S, 1.0 / p) * (T / S));  // decreasing beyond
    return best;
  }
  double total = 0.0;
  double cum_below = 0.0;
  for (size_t i = 0; i < fs.size(); ++i) {
    const double L = fs.levels()[i];
    const double lo = fs.lower(i), hi = fs.breakpoints()[i];
    const double C = cum_below - L * lo;
    if (C <= 0.0 || lo == 0.0) {
      total += std::pow(L, q) * logpow_integral(lo, hi, q / p - 1.0, 0.0);
    } else {
      auto h = [&](double t) {
        return std::pow(t, q / p - 1.0) * std::pow(L + C / t, q);
      };
      total += adaptive_simpson(h, lo, hi, 1e-11);
    }
    cum_below += L * (hi - lo);
  }
  if (S < 1.0) total += std::pow(T, q) * logpow_integral(S, 1.0, q / p - 1.0 - q, 0.0);
  return std::pow(total, 1.0 / q);
}

double grand_norm_quantile(const StepFunction& fs, double p, double alpha) {
  if (!(p > 1.0) || std::isinf(p)) throw spec_error("grand norm needs finite p > 1");
  if (fs.is_zero()) return 0.0;
  WeightedPrefix prefix(fs, {0.0, 0.0}, p);
  const double total = prefix.total();
  auto value = [&](double t) {
    const double suffix = std::max(total - prefix.at(t), 0.0);
    return std::pow(1.0 - std::log(t), -alpha / p) * std::pow(suffix, 1.0 / p);
  };
  std::vector<double> grid = geomspace(1e-13, 1.0, 257);
  grid.insert(grid.end(), fs.breakpoints().begin(), fs.breakpoints().end());
  std::sort(grid.begin(), grid.end());
  double best = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    best = std::max(best, value(std::min(grid[i], 1.0)));
    if (i + 1 < grid.size() && grid[i + 1] > grid[i])
      best = std::max(best, value(std::sqrt(grid[i] * grid[i + 1])));
  }
  return best;
}

WeightConditionReport check_weight_conditions(const SpaceSpec& gg) {
  if (gg.kind != SpaceKind::ggamma)
    throw spec_error("weight conditions are defined for ggamma specs");
  WeightConditionReport rep;
  // Log-power primitives always satisfy W(2t) <= K W(t) on (0, 1/2]: the power
  // part contributes 2^a and the slowly varying log part at most 2^{|b|}.
  rep.c1 = true;
  rep.doubling_constant =
      std::max(std::pow(2.0, gg.w2.a), std::pow(2.0, gg.w2.a) * std::pow(2.0, std::abs(gg.w2.b)));
  try {
    (void)space_norm(SimpleFunction::constant(1.0), gg);
    rep.c2 = true;
  } catch (const divergence_error&) {
    rep.c2 = false;
  }
  return rep;
}

namespace {

constexpr double kRuleTol = 1e-12;

// Bennett–Rudnick comparisons for L^{p,q}(log L)^{lambda} over a unit-measure
// domain. src ⊂ tgt?
bool lz_embeds(const SpaceSpec::LZView& a, const SpaceSpec::LZView& b, std::string* rule) {
  const bool both_inf = std::isinf(a.p) && std::isinf(b.p);
  if (!both_inf && b.p < a.p - kRuleTol) {
    *rule = "lower_primary_exponent";
    return true;
  }
  const bool same_p = both_inf || std::abs(a.p - b.p) <= kRuleTol;
  if (!same_p) return false;
  if (a.q <= b.q + kRuleTol && a.lambda >= b.lambda - kRuleTol) {
    *rule = "same_primary_log_monotone";
    return true;
  }
  if (a.q > b.q && a.lambda + inv(a.q) > b.lambda + inv(b.q) + kRuleTol) {
    *rule = "same_primary_secondary_tradeoff";
    return true;
  }
  if (both_inf && a.q < b.q &&
      std::abs(a.lambda + inv(a.q) - (b.lambda + inv(b.q))) <= kRuleTol) {
    *rule = "linf_log_borderline";
    return true;
  }
  return false;
}

// grand(P, th) sits between the Zygmund scales: LZ(P,P,l) ⊂ grand for
// l >= -th/P, and grand ⊂ LZ(P,q,l) for l < -th/P - 1/q (l <= -th/P at q=inf,
// which is the weak-type estimate itself).
bool lz_into_grand(const SpaceSpec::LZView& a, double P, double th) {
  if (a.p > P + kRuleTol) return true;  // via an intermediate Lebesgue exponent
  if (std::abs(a.p - P) > kRuleTol) return false;
  if (a.q <= P + kRuleTol && a.lambda >= -th / P - kRuleTol) return true;
  if (a.lambda >= (1.0 - th) / P - kRuleTol) return true;  // via the weak space
  if (a.q > P && a.lambda + inv(a.q) > (1.0 - th) / P + kRuleTol) return true;
  return false;
}

bool grand_into_lz(double P, double th, const SpaceSpec::LZView& b) {
  if (b.p < P - kRuleTol) return true;  // grand ⊂ every lower Lebesgue exponent
  if (std::isinf(b.p) || std::abs(b.p - P) > kRuleTol) return false;
  if (std::isinf(b.q)) return b.lambda <= -th / P + kRuleTol;
  if (P <= b.q + kRuleTol) return b.lambda < -th / P - kRuleTol;
  return b.lambda + inv(b.q) < -th / P + 1.0 / P - kRuleTol;
}

// small(P, al) sits between the Zygmund scales at the exponent c = al/P':
// LZ(P,P,l) ⊂ small for l > c, and small ⊂ LZ(P,P,l) for l <= c.
bool lz_into_small(const SpaceSpec::LZView& a, double P, double al) {
  if (std::isinf(a.p)) return true;  // L^inf-scale sources embed everywhere here
  if (a.p > P + kRuleTol) return true;
  if (std::abs(a.p - P) > kRuleTol) return false;
  const double c = al * (P - 1.0) / P;
  if (a.q <= P + kRuleTol) return a.lambda > c + kRuleTol;
  return a.lambda + inv(a.q) > c + 1.0 / P + kRuleTol;
}

bool small_into_lz(double P, double al, const SpaceSpec::LZView& b) {
  if (b.p < P - kRuleTol) return true;
  if (std::isinf(b.p) || std::abs(b.p - P) > kRuleTol) return false;
  const double c = al * (P - 1.0) / P;
  if (P <= b.q + kRuleTol) return b.lambda <= c + kRuleTol;
  return c + 1.0 / P > b.lambda + inv(b.q) + kRuleTol;
}

}  // namespace

std::optional<std::string> find_embedding_rule(const SpaceSpec& src, const SpaceSpec& tgt) {
  src.validate();
  tgt.validate();
  if (src == tgt) return "identity";
  const auto a = src.as_lz();
  const auto b = tgt.as_lz();
  if (a && b) {
    std::string rule;
    if (lz_embeds(*a, *b, &rule)) return rule;
    return std::nullopt;
  }
  if (tgt.kind == SpaceKind::grand) {
    if (a && lz_into_grand(*a, tgt.p, tgt.alpha)) return "zygmund_into_grand";
    if (src.kind == SpaceKind::small) {
      if (src.p >= tgt.p - kRuleTol) return "small_into_grand";
      return std::nullopt;
    }
    if (src.kind == SpaceKind::grand) {
      if (src.p > tgt.p + kRuleTol) return "grand_into_lower_grand";
      if (std::abs(src.p - tgt.p) <= kRuleTol && src.alpha <= tgt.alpha + kRuleTol)
        return "grand_parameter_monotone";
      return std::nullopt;
    }
    return std::nullopt;
  }
  if (tgt.kind == SpaceKind::small) {
    if (a && lz_into_small(*a, tgt.p, tgt.alpha)) return "zygmund_into_small";
    if (src.kind == SpaceKind::small) {
      if (src.p > tgt.p + kRuleTol) return "small_into_lower_small";
      if (std::abs(src.p - tgt.p) <= kRuleTol && tgt.alpha <= src.alpha + kRuleTol)
        return "small_parameter_monotone";
      return std::nullopt;
    }
    if (src.kind == SpaceKind::grand && src.p > tgt.p + kRuleTol)
      return "grand_into_lower_small";
    return std::nullopt;
  }
  if (src.kind == SpaceKind::grand && b) {
    if (grand_into_lz(src.p, src.alpha, *b)) return "grand_into_zygmund";
    return std::nullopt;
  }
  if (src.kind == SpaceKind::small && b) {
    if (small_into_lz(src.p, src.alpha, *b)) return "small_into_zygmund";
    return std::nullopt;
  }
  return std::nullopt;
}

namespace {

void finish_stats(RatioStats& st, double budget, bool two_sided) {
  if (!st.ratios.empty()) {
    std::vector<double> sorted = st.ratios;
    std::sort(sorted.begin(), sorted.end());
    st.median = sorted[sorted.size() / 2];
    st.min = sorted.front();
    st.max = sorted.back();
  } else {
    st.min = 0.0;
    st.max = 0.0;
  }
  st.count = static_cast<int>(st.ratios.size());
  if (two_sided)
    st.pass = st.count > 0 && st.min > 0.0 && st.max / st.min <= budget;
  else
    st.pass = st.count > 0 && st.max <= budget;
}

}  // namespace

EmbeddingReport embedding_report(const SpaceSpec& src, const SpaceSpec& tgt,
                                 const std::vector<SimpleFunction>& family, double budget) {
  const auto rule = find_embedding_rule(src, tgt);
  if (!rule)
    throw unsupported_embedding("no inclusion rule for " + src.describe() + " into " +
                                tgt.describe());
  EmbeddingReport rep;
  rep.rule = *rule;
  bool violated = false;
  for (const auto& f : family) {
    const StepFunction fs = rearrange(f);
    double ns;
    try {
      ns = space_norm(fs, src);
    } catch (const divergence_error&) {
      ++rep.stats.divergent;  // member outside the source space: nothing to test
      continue;
    }
    if (ns == 0.0) {
      ++rep.stats.zeros;
      continue;
    }
    double nt;
    try {
      nt = space_norm(fs, tgt);
    } catch (const divergence_error&) {
      ++rep.stats.divergent;
      violated = true;  // finite source norm but infinite target norm: not an inclusion
      continue;
    }
    rep.stats.ratios.push_back(nt / ns);
  }
  finish_stats(rep.stats, budget, /*two_sided=*/false);
  if (violated) rep.stats.pass = false;
  return rep;
}

RatioStats equivalence_report(const SpaceSpec& a, const SpaceSpec& b,
                              const std::vector<SimpleFunction>& family, double budget) {
  RatioStats st;
  for (const auto& f : family) {
    const StepFunction fs = rearrange(f);
    double na, nb;
    try {
      na = space_norm(fs, a);
      nb = space_norm(fs, b);
    } catch (const divergence_error&) {
      ++st.divergent;
      continue;
    }
    if (na == 0.0 && nb == 0.0) {
      ++st.zeros;
      continue;
    }
    if (na == 0.0 || nb == 0.0) {
      ++st.divergent;
      continue;
    }
    st.ratios.push_back(na / nb);
  }
  finish_stats(st, budget, /*two_sided=*/true);
  return st;
}

}  // namespace rispace
