#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toleq {

// Comparison slack shared by every consistency, dominance and feasibility test.
struct Tolerance {
  double eps = 1e-9;

  // TOLEQ_EPSNUM overrides the default when set to a parseable non-negative real.
  static Tolerance from_env() {
    Tolerance tol;
    if (const char* raw = std::getenv("TOLEQ_EPSNUM")) {
      char* end = nullptr;
      const double v = std::strtod(raw, &end);
      if (end == raw || *end != '\0' || !(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("TOLEQ_EPSNUM is not a non-negative real: ") + raw);
      }
      tol.eps = v;
    }
    return tol;
  }
};

inline bool approx_le(double a, double b, const Tolerance& tol) { return a <= b + tol.eps; }
inline bool approx_eq(double a, double b, const Tolerance& tol) { return std::abs(a - b) <= tol.eps; }

// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is zero).
// Stops once the bracket is narrower than x_tol or |f(mid)| <= f_tol.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol, double f_tol = 0.0, int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bisect: endpoints do not bracket a sign change");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0 || std::abs(fm) <= f_tol || (hi - lo) * 0.5 <= x_tol) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return mid;
}

// n+1 equally spaced points covering [lo, hi], endpoints exact.
inline std::vector<double> linspace(double lo, double hi, std::size_t intervals) {
  if (intervals == 0) throw std::invalid_argument("linspace: need at least one interval");
  std::vector<double> xs(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(intervals);
  }
  xs.back() = hi;
  return xs;
}

}  // namespace toleq
