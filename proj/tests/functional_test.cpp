#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vexp/error.hpp"
#include "vexp/functional.hpp"
#include "vexp/modular.hpp"

namespace vexp {
namespace {

using testing::Gen;
using testing::gauss_moment_1d;
using testing::kPi;

ScalarField gauss(const GridPtr& g) {
  return ScalarField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
}

TEST(Energy, ZeroField) {
  const auto g = build_grid(1, GridMode::tensor, 6.0, 256);
  const auto r = energy(ScalarField::zeros(g), make_constant_exponent(2.0), make_constant_exponent(4.0), 2.0);
  EXPECT_EQ(r.grad_term, 0.0);
  EXPECT_EQ(r.confine_term, 0.0);
  EXPECT_EQ(r.nonlinear_term, 0.0);
  EXPECT_EQ(r.energy, 0.0);
  EXPECT_EQ(r.mass, 0.0);
}

TEST(Energy, GaussianComponents) {
  const auto g = build_grid(1, GridMode::tensor, 6.0, 8192);
  const auto r = energy(gauss(g), make_constant_exponent(2.0), make_constant_exponent(4.0), 2.0);
  // (1/2) int 4 x^2 e^{-2x^2}, (1/2) int x^2 e^{-2x^2}, (1/4) int e^{-4x^2}
  EXPECT_NEAR(r.grad_term, 2.0 * gauss_moment_1d(1, 2.0), 1e-6);
  EXPECT_NEAR(r.confine_term, 0.5 * gauss_moment_1d(1, 2.0), 1e-7);
  EXPECT_NEAR(r.nonlinear_term, 0.25 * gauss_moment_1d(0, 4.0), 1e-7);
  EXPECT_NEAR(r.nonlinear_term, std::sqrt(kPi) / 8, 1e-7);
  EXPECT_EQ(r.energy, r.grad_term + r.confine_term - r.nonlinear_term);
  EXPECT_NEAR(r.mass, 0.5 * std::sqrt(kPi / 2), 1e-8);
  EXPECT_NEAR(r.mass, modular_lp(gauss(g), {make_constant_exponent(2.0), 0.0}) / 2.0, 1e-15);
}

TEST(Mass, MonotoneInAmplitude) {
  Gen gen(401);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 256);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = gen.bumps(g);
    const auto p = gen.smooth_exponent(gen.uniform(1.3, 2.5), gen.uniform(0.0, 1.0));
    double prev = 0.0;
    for (double t = 0.05; t < 20.0; t *= 1.5) {
      const double m = mass(t * u, p);
      EXPECT_GT(m, prev);
      prev = m;
    }
  }
  EXPECT_EQ(mass(ScalarField::zeros(g), make_constant_exponent(2.0)), 0.0);
}

TEST(EnergyGradient, MatchesFiniteDifferencesConstant) {
  Gen gen(402);
  const auto g = build_grid(1, GridMode::tensor, 6.0, 512);
  const Problem prob(g, make_constant_exponent(2.0), make_constant_exponent(4.0), 2.0);
  for (int trial = 0; trial < 5; ++trial) EXPECT_LE(testing::fd_gradient_error(gen.bumps(g), prob, false), 1e-6);
}

TEST(EnergyGradient, MatchesFiniteDifferencesVariable) {
  Gen gen(403);
  for (auto [dim, mode, n] : {std::tuple{1, GridMode::tensor, 256}, {3, GridMode::radial, 256},
                              {2, GridMode::tensor, 24}}) {
    const auto g = build_grid(dim, mode, 4.0, n);
    const Problem prob(g, gen.smooth_exponent(2.0, 0.5), gen.smooth_exponent(4.0, 0.6), 1.5);
    EXPECT_LE(testing::fd_gradient_error(gen.bumps(g), prob, true), 1e-5) << "N = " << dim;
  }
}

TEST(EnergyGradient, ZeroAtZero) {
  const auto g = build_grid(1, GridMode::tensor, 6.0, 128);
  const auto e = energy_gradient(ScalarField::zeros(g), make_constant_exponent(2.0), make_constant_exponent(4.0), 2.0);
  for (double v : e.values()) EXPECT_EQ(v, 0.0);
}

TEST(EnergyGradient, QuadraticCaseIsThreePointLaplacian) {
  Gen gen(404);
  const auto g = build_grid(1, GridMode::tensor, 4.0, 200);
  const auto u = gen.bumps(g);
  const auto e = energy_gradient(u, make_constant_exponent(2.0), make_constant_exponent(4.0), 0.0);
  const double h = g->spacing();
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? u[i - 1] : 0.0;
    const double right = i + 1 < n ? u[i + 1] : 0.0;
    // -u'' + |x|^0 u - u^3
    const double expect = (2 * u[i] - left - right) / (h * h) + u[i] - u[i] * u[i] * u[i];
    EXPECT_NEAR(e[i], expect, 1e-10 * std::max(1.0, std::abs(expect)));
  }
}

TEST(ConstraintGradient, ExponentTwoIsIdentity) {
  Gen gen(405);
  const auto g = build_grid(1, GridMode::tensor, 4.0, 128);
  const auto u = gen.bumps(g);
  const auto c = constraint_gradient(u, make_constant_exponent(2.0));
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(c[i], u[i]);
  const auto z = constraint_gradient(ScalarField::zeros(g), make_constant_exponent(3.0));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(ConstraintGradient, DirectionalDerivativeOfMass) {
  Gen gen(406);
  const auto g = build_grid(1, GridMode::tensor, 4.0, 256);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = gen.bumps(g), d = gen.bumps(g);
    const auto p = gen.smooth_exponent(2.0, 1.0);
    const double t = 1e-6;
    const double fd = (mass(u + t * d, p) - mass(u - t * d, p)) / (2 * t);
    const double an = inner(constraint_gradient(u, p), d);
    EXPECT_NEAR(fd, an, 1e-7 * std::max(1.0, std::abs(an)));
  }
}

TEST(GN, GaussianRatio) {
  const auto g = build_grid(1, GridMode::tensor, 6.0, 8192);
  const auto r = gn_ratio(gauss(g), make_constant_exponent(2.0), make_constant_exponent(4.0));
  EXPECT_DOUBLE_EQ(r.alpha, 0.25);
  const double l4 = std::pow(gauss_moment_1d(0, 4.0), 0.25);
  const double l2 = std::pow(gauss_moment_1d(0, 2.0), 0.5);
  const double d2 = std::sqrt(4.0 * gauss_moment_1d(1, 2.0));
  EXPECT_NEAR(r.lhs, l4, 1e-7);
  EXPECT_NEAR(r.rhs_base, std::pow(l2, 0.75) * std::pow(d2, 0.25), 1e-6);
  EXPECT_NEAR(r.ratio, 0.8667, 1e-4);
}

TEST(GN, ScaleInvariantForConstantExponents) {
  Gen gen(407);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 512);
  const auto p = make_constant_exponent(2.0), q = make_constant_exponent(5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = gen.bumps(g);
    const double base = gn_ratio(u, p, q).ratio;
    for (double t : {0.01, 0.7, 13.0}) EXPECT_NEAR(gn_ratio(t * u, p, q).ratio, base, 1e-10 * base);
  }
}

TEST(GN, BoundedOverMixtureFamily) {
  Gen gen(408);
  const auto g = build_grid(1, GridMode::tensor, 6.0, 512);
  const auto p = make_constant_exponent(2.0), q = make_constant_exponent(4.0);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int m = 0; m < 50; ++m) {
    const double r = gn_ratio(gen.bumps(g), p, q).ratio;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_TRUE(std::isfinite(hi));
  RecordProperty("gn_ratio_min", std::to_string(lo));
  RecordProperty("gn_ratio_max", std::to_string(hi));
}

TEST(GN, RejectsZeroField) {
  const auto g = build_grid(1, GridMode::tensor, 6.0, 64);
  EXPECT_THROW(gn_ratio(ScalarField::zeros(g), make_constant_exponent(2.0), make_constant_exponent(4.0)),
               DomainError);
}

// Coercivity: E >= rho_X / p+ - rho_q / q- for every field.
TEST(EnergyProperty, CoercivityFingerprint) {
  Gen gen(409);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 256);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = gen.smooth_exponent(gen.uniform(1.5, 2.5), gen.uniform(0.0, 0.8));
    const auto q = gen.smooth_exponent(gen.uniform(3.0, 5.0), gen.uniform(0.0, 1.0));
    const auto u = gen.log_uniform(0.1, 3.0) * gen.bumps(g);
    const Problem prob(g, p, q, gen.uniform(0.5, 3.0));
    const auto r = energy(u, prob);
    EXPECT_GE(r.energy, r.modular_X / prob.ps().plus - r.modular_q / prob.qs().minus - 1e-12);
    EXPECT_GE(r.grad_term, 0.0);
    EXPECT_GE(r.confine_term, 0.0);
    EXPECT_GE(r.nonlinear_term, 0.0);
  }
}

TEST(Problem, GradEpsilonRule) {
  const auto g = build_grid(1, GridMode::tensor, 5.0, 64);
  EXPECT_EQ(Problem(g, make_constant_exponent(2.0), make_constant_exponent(4.0), 1.0).grad_epsilon(), 0.0);
  EXPECT_EQ(Problem(g, make_constant_exponent(1.5), make_constant_exponent(4.0), 1.0).grad_epsilon(),
            kDefaultGradEpsilon);
  EXPECT_THROW(Problem(g, make_constant_exponent(2.0), make_constant_exponent(4.0), -1.0), DomainError);
}

}  // namespace
}  // namespace vexp
