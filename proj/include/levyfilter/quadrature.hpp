#pragma once

// Thin adapters over Boost.Math adaptive Gauss-Kronrod quadrature.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "levyfilter/errors.hpp"

namespace levyfilter::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

inline constexpr double kDefaultTol = 1e-10;

/// Adaptive G10-K21 on [a, b]; b may be +infinity.
template <class F>
Result integrate(F&& f, double a, double b, double tol = kDefaultTol, unsigned max_depth = 20) {
  if (a == b) return {};
  double err = 0.0;
  double l1 = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  if (std::isinf(b)) {
    const double v = GK::integrate(f, a, b, max_depth, tol, &err, &l1);
    return {v, err};
  }
  // Boost's error estimate degrades on intervals far from unit scale, so
  // integrate over [0, 1] instead.
  const double h = b - a;
  auto g = [&](double t) { return h * f(a + h * t); };
  const double v = GK::integrate(g, 0.0, 1.0, max_depth, tol, &err, &l1);
  return {v, err};
}

/// Integral over [a, b] split at 1 when 1 lies inside, so that power
/// singularities near zero and exponential tails are refined separately.
template <class F>
Result integrate_split(F&& f, double a, double b, double tol = kDefaultTol) {
  if (a < 1.0 && b > 1.0) {
    const Result lo = integrate(f, a, 1.0, tol);
    const Result hi = integrate(f, 1.0, b, tol);
    return {lo.value + hi.value, lo.error + hi.error};
  }
  return integrate(f, a, b, tol);
}

/// Integral over [a, b], 0 < a < b, split into decades so that integrands
/// varying like powers of z are resolved at every scale.
template <class F>
Result integrate_decades(F&& f, double a, double b, double tol = kDefaultTol) {
  Result total;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(lo * 10.0, b);
    const Result piece = integrate(f, lo, hi, tol);
    total.value += piece.value;
    total.error += piece.error;
    lo = hi;
  }
  return total;
}

/// Integral over (0, a] of an integrand with an integrable power singularity
/// at zero: geometric panels [a q^{k+1}, a q^k], each regular for G-K.
/// Throws NumericalError when the panel contributions fail to shrink.
template <class F>
Result integrate_graded(F&& f, double a, double tol = kDefaultTol, int max_panels = 400) {
  constexpr double q = 0.25;
  Result total;
  double hi = a;
  double prev = std::numeric_limits<double>::infinity();
  int small_run = 0;
  for (int k = 0; k < max_panels; ++k) {
    const double lo = hi * q;
    const Result piece = integrate(f, lo, hi, tol * 0.1, 12);
    total.value += piece.value;
    total.error += piece.error;
    const double mag = std::abs(piece.value);
    if (mag <= tol * std::max(std::abs(total.value), 1e-300)) {
      if (++small_run >= 3) {
        // Geometric remainder bound from the last contraction ratio.
        const double ratio = prev > 0.0 && std::isfinite(prev) ? mag / prev : 0.0;
        if (ratio < 1.0) total.error += mag * ratio / (1.0 - ratio);
        return total;
      }
    } else {
      small_run = 0;
    }
    prev = mag;
    hi = lo;
    if (hi < 1e-300) break;
  }
  throw NumericalError("graded quadrature did not converge on (0, " + std::to_string(a) + "]");
}

}  // namespace levyfilter::quad
