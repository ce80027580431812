#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace rispace {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A requested quantity (norm, integral) is genuinely infinite. Distinct from
// floating-point overflow, which is a numerical accident, not a result.
class divergence_error : public std::runtime_error {
 public:
  explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid space/couple/config parameters (violated invariants, bad JSON shape).
class spec_error : public std::invalid_argument {
 public:
  explicit spec_error(const std::string& what) : std::invalid_argument(what) {}
};

// The inclusion registry has no rule for the requested pair of spaces.
class unsupported_embedding : public std::invalid_argument {
 public:
  explicit unsupported_embedding(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative method stopped without meeting its tolerance.
class convergence_failure : public std::runtime_error {
 public:
  convergence_failure(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual = 0.0;
};

inline bool nearly_equal(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// n points from lo to hi inclusive with constant ratio (lo, hi > 0, n >= 2).
inline std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double eps, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with a relative tolerance. The error scale is
// estimated from the first coarse pass, so the tolerance is relative to the
// integral's own magnitude (with a small floor to survive near-zero results).
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-10, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale =
      std::max({std::abs(whole), (b - a) * std::abs(fm), (b - a) * std::abs(fa), 1e-300});
  return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

// Golden-section minimization on [lo, hi]; tolerance is relative to the
// initial bracket width. Returns (argmin, min). Assumes unimodality on the
// bracket; callers narrow the bracket with a coarse scan first.
template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, double rel_tol = 1e-6,
                                     int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  if (!(b > a)) return {a, f(a)};
  const double span = b - a;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int iters = 0;
  while ((b - a) > rel_tol * span && ++iters < max_iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  double bx = xm, bf = fm;
  if (f1 < bf) { bx = x1; bf = f1; }
  if (f2 < bf) { bx = x2; bf = f2; }
  return {bx, bf};
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Runs fn(0..n-1) across a small thread pool. Deterministic as long as each
// call writes only to its own slot; exceptions are captured and rethrown.
template <class Fn>
void parallel_for(int n, Fn&& fn, int max_threads = 0) {
  if (n <= 0) return;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 4;
  const int nt = std::min(n, max_threads > 0 ? max_threads : std::min(hw, 8));
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace rispace
