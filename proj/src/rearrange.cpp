#include "rearrange.hpp"

#include <algorithm>
#include <cmath>

namespace rispace {

namespace {

constexpr double kMeasureTol = 1e-12;

}  // namespace

SimpleFunction::SimpleFunction(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  double total = 0.0;
  for (auto& pc : pieces_) {
    if (!std::isfinite(pc.value) || !std::isfinite(pc.measure))
      throw spec_error("simple function pieces must be finite");
    if (pc.measure < -kMeasureTol)
      throw spec_error("piece measure must be nonnegative");
    if (pc.measure < 0.0) pc.measure = 0.0;
    total += pc.measure;
  }
  if (total > 1.0 + 1e-10)
    throw spec_error("piece measures sum to more than the unit domain");
  if (total < 1.0 - kMeasureTol)
    pieces_.push_back({0.0, 1.0 - total});
}

SimpleFunction SimpleFunction::indicator(double measure, double value) {
  if (!(measure >= 0.0 && measure <= 1.0 + 1e-12))
    throw spec_error("indicator measure must lie in [0, 1]");
  return SimpleFunction({{value, std::min(measure, 1.0)}});
}

bool SimpleFunction::is_zero() const {
  for (const auto& pc : pieces_)
    if (pc.value != 0.0 && pc.measure > 0.0) return false;
  return true;
}

double SimpleFunction::max_abs() const {
  double m = 0.0;
  for (const auto& pc : pieces_)
    if (pc.measure > 0.0) m = std::max(m, std::abs(pc.value));
  return m;
}

double SimpleFunction::total_measure() const {
  double total = 0.0;
  for (const auto& pc : pieces_) total += pc.measure;
  return total;
}

SimpleFunction SimpleFunction::scaled(double c) const {
  std::vector<Piece> out = pieces_;
  for (auto& pc : out) pc.value *= c;
  return SimpleFunction(std::move(out));
}

SimpleFunction SimpleFunction::abs() const {
  std::vector<Piece> out = pieces_;
  for (auto& pc : out) pc.value = std::abs(pc.value);
  return SimpleFunction(std::move(out));
}

SimpleFunction SimpleFunction::sub_same_partition(const SimpleFunction& other) const {
  if (pieces_.size() != other.pieces_.size())
    throw spec_error("pointwise difference requires a shared partition");
  std::vector<Piece> out(pieces_.size());
  for (size_t i = 0; i < pieces_.size(); ++i) {
    if (std::abs(pieces_[i].measure - other.pieces_[i].measure) > kMeasureTol)
      throw spec_error("pointwise difference requires a shared partition");
    out[i] = {pieces_[i].value - other.pieces_[i].value, pieces_[i].measure};
  }
  return SimpleFunction(std::move(out));
}

void to_json(nlohmann::json& j, const SimpleFunction& f) {
  j = nlohmann::json::array();
  for (const auto& pc : f.pieces()) j.push_back({pc.value, pc.measure});
}

void from_json(const nlohmann::json& j, SimpleFunction& f) {
  if (!j.is_array()) throw spec_error("simple function JSON must be an array of [value, measure]");
  std::vector<Piece> pieces;
  pieces.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
      throw spec_error("simple function JSON must be an array of [value, measure]");
    pieces.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  f = SimpleFunction(std::move(pieces));
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> levels)
    : breaks_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (breaks_.size() != levels_.size())
    throw spec_error("step function needs one level per breakpoint");
  // Zero levels are representation noise: the zero tail is implicit.
  while (!levels_.empty() && levels_.back() == 0.0) {
    levels_.pop_back();
    breaks_.pop_back();
  }
  double prev_break = 0.0;
  double prev_level = kInf;
  for (size_t i = 0; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > prev_break))
      throw spec_error("breakpoints must be strictly increasing in (0, 1]");
    if (breaks_[i] > 1.0 + 1e-12)
      throw spec_error("breakpoints must not exceed the unit domain");
    if (!(levels_[i] > 0.0) || !std::isfinite(levels_[i]))
      throw spec_error("levels must be positive and finite");
    if (!(levels_[i] < prev_level))
      throw spec_error("levels must be strictly decreasing");
    prev_break = breaks_[i];
    prev_level = levels_[i];
  }
  if (!breaks_.empty() && breaks_.back() > 1.0) breaks_.back() = 1.0;
  cum_.resize(breaks_.size());
  double acc = 0.0, lo = 0.0;
  for (size_t i = 0; i < breaks_.size(); ++i) {
    acc += levels_[i] * (breaks_[i] - lo);
    cum_[i] = acc;
    lo = breaks_[i];
  }
}

double StepFunction::value_at(double s) const {
  if (s < 0.0) throw spec_error("rearrangement is defined on [0, 1]");
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
  const size_t idx = static_cast<size_t>(it - breaks_.begin());
  return idx < levels_.size() ? levels_[idx] : 0.0;
}

double StepFunction::integral_to(double s) const {
  if (s <= 0.0) return 0.0;
  s = std::min(s, 1.0);
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), s);
  const size_t idx = static_cast<size_t>(it - breaks_.begin());
  if (idx >= levels_.size()) return total_integral();
  const double below = idx == 0 ? 0.0 : cum_[idx - 1];
  return below + levels_[idx] * (s - lower(idx));
}

void to_json(nlohmann::json& j, const StepFunction& g) {
  j = nlohmann::json{{"breakpoints", g.breakpoints()}, {"levels", g.levels()}};
}

void from_json(const nlohmann::json& j, StepFunction& g) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("levels"))
    throw spec_error("step function JSON needs 'breakpoints' and 'levels' arrays");
  g = StepFunction(j.at("breakpoints").get<std::vector<double>>(),
                   j.at("levels").get<std::vector<double>>());
}

double distribution(const SimpleFunction& f, double t) {
  if (t < 0.0) throw spec_error("distribution argument must be nonnegative");
  double m = 0.0;
  for (const auto& pc : f.pieces())
    if (std::abs(pc.value) >= t) m += pc.measure;
  return m;
}

double distribution(const StepFunction& g, double t) {
  if (t < 0.0) throw spec_error("distribution argument must be nonnegative");
  if (t == 0.0) return 1.0;  // the implicit zero tail counts at height zero
  const auto& lv = g.levels();
  // levels are strictly decreasing; find how many are >= t
  const auto it = std::partition_point(lv.begin(), lv.end(), [&](double L) { return L >= t; });
  const size_t idx = static_cast<size_t>(it - lv.begin());
  return idx == 0 ? 0.0 : g.breakpoints()[idx - 1];
}

StepFunction rearrange(const SimpleFunction& f) {
  std::vector<std::pair<double, double>> items;  // (|value|, measure)
  items.reserve(f.pieces().size());
  for (const auto& pc : f.pieces())
    if (pc.measure > 0.0 && pc.value != 0.0) items.push_back({std::abs(pc.value), pc.measure});
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> breaks, levels;
  breaks.reserve(items.size());
  levels.reserve(items.size());
  double acc = 0.0;
  for (const auto& [val, mea] : items) {
    acc += mea;
    if (!levels.empty() && levels.back() == val) {
      breaks.back() = acc;  // merge ties in |value|
    } else {
      levels.push_back(val);
      breaks.push_back(acc);
    }
  }
  if (!breaks.empty()) breaks.back() = std::min(breaks.back(), 1.0);
  return StepFunction(std::move(breaks), std::move(levels));
}

double maximal(const StepFunction& g, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw spec_error("maximal function argument must lie in (0, 1]");
  return g.integral_to(s) / s;
}

void to_json(nlohmann::json& j, const LogPowerWeight& w) {
  j = nlohmann::json{{"a", w.a}, {"b", w.b}};
}

void from_json(const nlohmann::json& j, LogPowerWeight& w) {
  if (!j.is_object()) throw spec_error("weight JSON must be an object with 'a' and 'b'");
  w.a = j.value("a", 0.0);
  w.b = j.value("b", 0.0);
}

namespace {

constexpr double kExpTol = 1e-13;  // window for detecting the a == -1 resonance

bool is_small_nonneg_integer(double b, double* rounded) {
  const double r = std::round(b);
  if (r >= 1.0 && r <= 60.0 && std::abs(b - r) < 1e-12) {
    *rounded = r;
    return true;
  }
  return false;
}

// boundary term t^mu (1 - log t)^k, with the t -> 0 limit handled.
double boundary_term(double t, double mu, double k) {
  if (t <= 0.0) return 0.0;  // only reached when mu > 0, where the limit is 0
  return std::pow(t, mu) * std::pow(1.0 - std::log(t), k);
}

// ∫ e^{(1-u)mu} u^b du over [ua, ub] (finite), smooth integrand.
double u_integral_finite(double ua, double ub, double mu, double b) {
  auto h = [&](double u) { return std::exp((1.0 - u) * mu) * std::pow(u, b); };
  return adaptive_simpson(h, ua, ub, 1e-11);
}

// ∫_{ua}^{∞} e^{(1-u)mu} u^b du for mu > 0: growing segments until the
// geometric tail bound drops below the running total's precision.
double u_integral_tail(double ua, double mu, double b) {
  auto h = [&](double u) { return std::exp((1.0 - u) * mu) * std::pow(u, b); };
  double total = 0.0;
  double left = ua;
  double step = std::max(1.0, 1.0 / mu);
  const double poly_guard = 2.0 * std::max(b, 0.0) / mu;
  for (int k = 0; k < 300; ++k) {
    const double right = left + step;
    total += adaptive_simpson(h, left, right, 1e-11);
    // once past the polynomial hump, h decays at least like e^{-mu u / 2}
    const double tail_bound = h(right) * 2.6 / mu;
    if (right >= poly_guard && tail_bound <= 1e-15 * std::max(total, 1e-300)) break;
    left = right;
    step *= 1.5;
  }
  return total;
}

}  // namespace

double logpow_integral(double lo, double hi, double a, double b) {
  if (!(lo >= 0.0 && hi <= 1.0 + 1e-12 && lo < hi))
    throw spec_error("log-power integral needs 0 <= lo < hi <= 1");
  hi = std::min(hi, 1.0);
  const double mu = a + 1.0;
  const bool at_zero = lo == 0.0;
  if (at_zero) {
    if (mu < -kExpTol) throw divergence_error("t^a not integrable at 0 for a < -1");
    if (std::abs(mu) <= kExpTol && b >= -1.0 - kExpTol)
      throw divergence_error("t^{-1}(1-log t)^b not integrable at 0 for b >= -1");
  }
  const double u_hi = 1.0 - std::log(hi);
  if (std::abs(mu) <= kExpTol) {
    // pure u-integral: ∫ u^b du with u = 1 - log t, du = -dt/t
    const double u_lo = 1.0 - std::log(lo);  // +inf when lo == 0 (b < -1 then)
    if (std::abs(b + 1.0) <= kExpTol) return std::log(u_lo / u_hi);
    const double e = b + 1.0;
    const double upper = at_zero ? 0.0 : std::pow(u_lo, e);
    return (upper - std::pow(u_hi, e)) / e;
  }
  if (b == 0.0) return (std::pow(hi, mu) - (at_zero ? 0.0 : std::pow(lo, mu))) / mu;
  double bint = 0.0;
  if (is_small_nonneg_integer(b, &bint)) {
    // by parts: mu * I_k = [t^mu (1-log t)^k] + k I_{k-1}
    double ik = (std::pow(hi, mu) - (at_zero ? 0.0 : std::pow(lo, mu))) / mu;  // I_0
    for (int k = 1; k <= static_cast<int>(bint); ++k) {
      const double boundary = boundary_term(hi, mu, k) - boundary_term(lo, mu, k);
      ik = (boundary + k * ik) / mu;
    }
    return ik;
  }
  if (at_zero) return u_integral_tail(u_hi, mu, b);
  return u_integral_finite(u_hi, 1.0 - std::log(lo), mu, b);
}

double logpow_sup(double lo, double hi, double c, double lambda) {
  if (!(lo >= 0.0 && hi <= 1.0 + 1e-12 && lo < hi))
    throw spec_error("log-power sup needs 0 <= lo < hi <= 1");
  hi = std::min(hi, 1.0);
  auto phi = [&](double t) { return std::pow(t, c) * std::pow(1.0 - std::log(t), lambda); };
  if (std::abs(c) < 1e-15) {
    if (lambda == 0.0) return 1.0;
    if (lambda > 0.0) {
      if (lo == 0.0) throw divergence_error("(1-log t)^lambda unbounded at 0 for lambda > 0");
      return phi(lo);
    }
    return phi(hi);
  }
  if (c > 0.0) {
    if (lambda <= 0.0) return phi(hi);  // strictly increasing
    const double tstar = std::exp(1.0 - lambda / c);
    if (tstar >= hi) return phi(hi);
    if (tstar <= lo) return phi(lo);
    return phi(tstar);
  }
  // c < 0: the power factor dominates near 0
  if (lo == 0.0) throw divergence_error("t^c unbounded at 0 for c < 0");
  return std::max(phi(lo), phi(hi));
}

double integrate_weighted(const StepFunction& g, const LogPowerWeight& w, double r) {
  if (!(r > 0.0)) throw spec_error("integrate_weighted requires a positive power");
  double total = 0.0;
  for (size_t i = 0; i < g.size(); ++i)
    total += std::pow(g.levels()[i], r) * logpow_integral(g.lower(i), g.breakpoints()[i], w.a, w.b);
  return total;
}

WeightedPrefix::WeightedPrefix(const StepFunction& g, LogPowerWeight w, double r) : w_(w) {
  if (!(r > 0.0)) throw spec_error("weighted prefix requires a positive power");
  breaks_ = g.breakpoints();
  powed_.resize(g.size());
  cum_.resize(g.size());
  double acc = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    powed_[i] = std::pow(g.levels()[i], r);
    acc += powed_[i] * logpow_integral(g.lower(i), breaks_[i], w.a, w.b);
    cum_[i] = acc;
  }
}

double WeightedPrefix::at(double t) const {
  if (t <= 0.0) return 0.0;
  t = std::min(t, 1.0);
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
  const size_t idx = static_cast<size_t>(it - breaks_.begin());
  if (idx >= powed_.size()) return total();
  const double below = idx == 0 ? 0.0 : cum_[idx - 1];
  const double lo = idx == 0 ? 0.0 : breaks_[idx - 1];
  if (t <= lo) return below;
  return below + powed_[idx] * logpow_integral(lo, t, w_.a, w_.b);
}

WeightedSup::WeightedSup(const StepFunction& g, LogPowerWeight w) : w_(w) {
  breaks_ = g.breakpoints();
  levels_ = g.levels();
  prefix_.resize(g.size());
  double run = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    run = std::max(run, levels_[i] * logpow_sup(g.lower(i), breaks_[i], w.a, w.b));
    prefix_[i] = run;
  }
}

double WeightedSup::at(double t) const {
  if (t <= 0.0) return 0.0;
  t = std::min(t, 1.0);
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
  const size_t idx = static_cast<size_t>(it - breaks_.begin());
  if (idx >= levels_.size()) return total();
  const double before = idx == 0 ? 0.0 : prefix_[idx - 1];
  const double lo = idx == 0 ? 0.0 : breaks_[idx - 1];
  if (t <= lo) return before;
  return std::max(before, levels_[idx] * logpow_sup(lo, t, w_.a, w_.b));
}

}  // namespace rispace
