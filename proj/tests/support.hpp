#pragma once

// Seeded generators and closed-form oracles shared by the test suites.

#include <cmath>
#include <limits>
#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "vexp/exponents.hpp"
#include "vexp/functional.hpp"
#include "vexp/grid.hpp"

namespace vexp::testing {

inline constexpr double kPi = std::numbers::pi;

/// Small wrapper over a fixed-seed engine so every property test is replayable.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::mt19937_64& engine() { return rng_; }

  /// Sum of 1-3 Gaussian bumps with random sign, amplitude, width and centre.
  ScalarField bumps(const GridPtr& g, bool signed_amp = true) {
    const int parts = integer(1, 3);
    const double L = g->truncation();
    const bool radial = g->mode() == GridMode::radial;
    std::vector<double> amp, width;
    std::vector<Point> centre;
    for (int i = 0; i < parts; ++i) {
      double a = uniform(0.3, 2.0);
      if (signed_amp && uniform(0.0, 1.0) < 0.3) a = -a;
      amp.push_back(a);
      width.push_back(L * uniform(0.05, 0.25));
      Point c{0.0, 0.0, 0.0};
      if (!radial) {
        for (int d = 0; d < g->dimension(); ++d) c[d] = uniform(-0.3 * L, 0.3 * L);
      }
      centre.push_back(c);
    }
    return ScalarField::sample(g, [&](const Point& x) {
      double v = 0.0;
      for (int i = 0; i < parts; ++i) {
        const double dx = x[0] - centre[i][0], dy = x[1] - centre[i][1], dz = x[2] - centre[i][2];
        v += amp[i] * std::exp(-(dx * dx + dy * dy + dz * dz) / (width[i] * width[i]));
      }
      return v;
    });
  }

  /// Smooth radial exponent base + amp * exp(-|x|^2 / w^2), values in [base, base + amp].
  ExponentField smooth_exponent(double base, double amp) {
    const double w = uniform(0.5, 2.5);
    return make_custom_exponent(
        [=](const Point& x) { return base + amp * std::exp(-radius(x) * radius(x) / (w * w)); },
        [=](const Point& x) {
          const double r2 = radius(x) * radius(x);
          return -2.0 * amp * r2 / (w * w) * std::exp(-r2 / (w * w));
        },
        2.0 * amp / w, true);
  }

 private:
  std::mt19937_64 rng_;
};

/// int_R x^{2m} e^{-a x^2} dx
inline double gauss_moment_1d(int m, double a) {
  return std::tgamma(m + 0.5) / std::pow(a, m + 0.5);
}

/// Scalar bisection on an increasing function; the independent root oracle.
template <class F>
double bisect(F&& f, double lo, double hi, double target, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Largest relative deviation of energy_gradient from a fourth-order central
/// difference of energy_value, over interior nodes. Errors are relative to
/// max(|g_i|, 1e-3 max|g|). |t|^p with non-integer p is not smooth at t = 0, so
/// with kink_aware the step shrinks to 1% of the distance to the nearest zero of
/// u or of an adjacent gradient sample. Nodes closer than 1e-3 are skipped:
/// the step there is so small that rounding in E swamps the difference.
inline double fd_gradient_error(const ScalarField& u, const Problem& prob, bool kink_aware) {
  const auto grad = energy_gradient(u, prob);
  const Grid& g = u.grid();
  const auto w = g.weights();
  double gmax = 0.0;
  for (double v : grad.values()) gmax = std::max(gmax, std::abs(v));
  std::vector<double> reach(u.size(), std::numeric_limits<double>::infinity());
  if (kink_aware) {
    const auto& gs = g.gradient_samples();
    const auto mag = prob.gradient_magnitude(u);
    for (std::size_t s = 0; s < gs.size(); ++s) {
      for (int c = 0; c < gs.components; ++c) {
        for (int node : gs.taps[s * gs.components + c]) {
          if (node >= 0) reach[node] = std::min(reach[node], mag[s] / gs.inv_h);
        }
      }
    }
  }
  ScalarField v = u;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    if (std::abs(u[i]) <= 1e-8) continue;
    double h = 1e-3 * (1.0 + std::abs(u[i]));
    if (kink_aware) {
      const double dist = std::min(std::abs(u[i]), reach[i]);
      if (dist < 1e-3) continue;
      h = std::min(h, 1e-2 * dist);
    }
    auto at = [&](double t) {
      v[i] = u[i] + t;
      return energy_value(v, prob);
    };
    // exact up to rounding for polynomial energies
    const double fd = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h) / w[i];
    v[i] = u[i];
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max(std::abs(grad[i]), 1e-3 * gmax));
  }
  return worst;
}

}  // namespace vexp::testing
