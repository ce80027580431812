#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "common.hpp"

namespace rispace {

// One constant piece of a simple function: the function takes `value` on a set
// of size `measure`. The ambient domain is normalized to total measure 1; a
// piece list with smaller total mass gets an explicit zero piece appended.
struct Piece {
  double value = 0.0;
  double measure = 0.0;
};

class SimpleFunction {
 public:
  SimpleFunction() = default;
  explicit SimpleFunction(std::vector<Piece> pieces);

  // Indicator of a set of the given measure, scaled by `value`; the zero
  // complement piece is added automatically.
  static SimpleFunction indicator(double measure, double value = 1.0);
  static SimpleFunction constant(double value) { return indicator(1.0, value); }

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_zero() const;
  double max_abs() const;
  double total_measure() const;  // always 1 up to rounding, by construction

  SimpleFunction scaled(double c) const;
  SimpleFunction abs() const;
  // Pointwise difference; defined only for functions on the same partition
  // (piecewise equal measures).
  SimpleFunction sub_same_partition(const SimpleFunction& other) const;

 private:
  std::vector<Piece> pieces_;
};

void to_json(nlohmann::json& j, const SimpleFunction& f);
void from_json(const nlohmann::json& j, SimpleFunction& f);

// Decreasing right-continuous step function on (0, 1]: value levels_[i] on
// [breaks_[i-1], breaks_[i]), implicit zero beyond the last breakpoint.
// Levels are positive and strictly decreasing; breakpoints strictly increase.
class StepFunction {
 public:
  StepFunction() = default;  // the zero function
  StepFunction(std::vector<double> breakpoints, std::vector<double> levels);

  size_t size() const { return levels_.size(); }
  bool is_zero() const { return levels_.empty(); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& levels() const { return levels_; }
  double lower(size_t i) const { return i == 0 ? 0.0 : breaks_[i - 1]; }

  double value_at(double s) const;     // f_*(s), right-continuous
  double integral_to(double s) const;  // ∫₀^s f_*
  double total_integral() const { return cum_.empty() ? 0.0 : cum_.back(); }
  double max_level() const { return levels_.empty() ? 0.0 : levels_.front(); }
  double support() const { return breaks_.empty() ? 0.0 : breaks_.back(); }

 private:
  std::vector<double> breaks_, levels_, cum_;
};

void to_json(nlohmann::json& j, const StepFunction& g);
void from_json(const nlohmann::json& j, StepFunction& g);

// Distribution function D(t) = measure of {|f| >= t}; D(0) is the whole domain.
double distribution(const SimpleFunction& f, double t);
double distribution(const StepFunction& g, double t);

// Decreasing rearrangement of |f|: sort levels, accumulate measures, merge
// ties, drop zeros.
StepFunction rearrange(const SimpleFunction& f);

// Hardy–Littlewood maximal value f_**(s) = (1/s)∫₀^s f_*, 0 < s <= 1.
double maximal(const StepFunction& g, double s);

// Weight w(t) = t^a (1 - log t)^b on (0, 1]. Closed under products.
struct LogPowerWeight {
  double a = 0.0;
  double b = 0.0;
  double operator()(double t) const {
    return std::pow(t, a) * std::pow(1.0 - std::log(t), b);
  }
  LogPowerWeight operator*(const LogPowerWeight& o) const { return {a + o.a, b + o.b}; }
};

void to_json(nlohmann::json& j, const LogPowerWeight& w);
void from_json(const nlohmann::json& j, LogPowerWeight& w);

// ∫_lo^hi t^a (1 - log t)^b dt, 0 <= lo < hi <= 1. Exact power/by-parts forms
// where available, adaptive quadrature in u = 1 - log t otherwise. Throws
// divergence_error when the integral is infinite (lo == 0 with a < -1, or
// a == -1 with b >= -1).
double logpow_integral(double lo, double hi, double a, double b);

// sup over (lo, hi] of t^c (1 - log t)^lambda, 0 <= lo < hi <= 1. Throws
// divergence_error when the sup is infinite (possible only for lo == 0).
double logpow_sup(double lo, double hi, double c, double lambda);

// ∫₀¹ g(t)^r w(t) dt for a decreasing step function g (zero tail contributes
// nothing). r > 0. Divergence of the first-piece integral propagates.
double integrate_weighted(const StepFunction& g, const LogPowerWeight& w, double r);

// Cumulative weighted power integral F(t) = ∫₀^t g^r w, exact per piece.
class WeightedPrefix {
 public:
  WeightedPrefix(const StepFunction& g, LogPowerWeight w, double r);
  double at(double t) const;
  double total() const { return cum_.empty() ? 0.0 : cum_.back(); }

 private:
  std::vector<double> breaks_, powed_, cum_;
  LogPowerWeight w_;
};

// Running weighted sup S(t) = sup_{0 < s <= t} w(s) g(s), exact per piece.
class WeightedSup {
 public:
  WeightedSup(const StepFunction& g, LogPowerWeight w);
  double at(double t) const;
  double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }

 private:
  std::vector<double> breaks_, levels_, prefix_;
  LogPowerWeight w_;
};

}  // namespace rispace
