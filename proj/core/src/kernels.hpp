#pragma once

#include <cmath>

namespace vexp::detail {

/// |x|^p with cheap paths for the integer exponents that dominate test runs.
inline double pow_abs(double x, double p) noexcept {
  const double a = std::abs(x);
  if (p == 2.0) return a * a;
  if (p == 4.0) {
    const double s = a * a;
    return s * s;
  }
  if (a == 0.0) return 0.0;
  return std::pow(a, p);
}

/// sign(x) |x|^{p-1}, the derivative of |x|^p / p; zero at x = 0 for p > 1.
inline double signed_pow(double x, double p) noexcept {
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x;
  if (p == 4.0) return x * x * x;
  return std::copysign(std::pow(std::abs(x), p - 1.0), x);
}

/// t^p ln t with the clamp t < floor -> 0 (t^p ln t -> 0 as t -> 0+).
inline double pow_log(double t, double p, double floor) noexcept {
  if (t < floor) return 0.0;
  return pow_abs(t, p) * std::log(t);
}

}  // namespace vexp::detail
