#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vexp/grid.hpp"
#include "vexp/modular.hpp"

namespace vexp {
namespace {

using testing::Gen;
using testing::kPi;

GridPtr line(int n = 4096) { return build_grid(1, GridMode::tensor, 6.0, n); }

ScalarField gauss(const GridPtr& g) {
  return ScalarField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
}

TEST(ModularLp, GaussianOracles) {
  const auto g = line();
  const auto u = gauss(g);
  const ModularSpec plain{make_constant_exponent(2.0), 0.0};
  const ModularSpec weighted{make_constant_exponent(2.0), 2.0};
  EXPECT_NEAR(modular_lp(u, plain), std::sqrt(kPi / 2), 1e-7);
  EXPECT_NEAR(modular_lp(u, weighted), testing::gauss_moment_1d(1, 2.0), 1e-7);
  EXPECT_NEAR(testing::gauss_moment_1d(1, 2.0), std::sqrt(kPi / 2) / 4, 1e-15);
  EXPECT_EQ(modular_lp(ScalarField::zeros(g), plain), 0.0);
}

TEST(Luxemburg, ConstantExponentClosedForm) {
  const auto g = line();
  const auto u = gauss(g);
  const ModularSpec spec{make_constant_exponent(2.0), 0.0};
  EXPECT_NEAR(luxemburg_norm(u, spec), std::pow(kPi / 2, 0.25), 1e-7);
  EXPECT_EQ(luxemburg_norm(ScalarField::zeros(g), spec), 0.0);
}

TEST(Luxemburg, PiecewiseQuarticExample) {
  // (0, 2) with p = 2 on (0, 1) and p = 4 on (1, 2); u = 2.
  const auto g = build_interval_grid(0.0, 2.0, 400);
  const auto p = make_custom_exponent([](const Point& x) { return x[0] < 1.0 ? 2.0 : 4.0; },
                                      [](const Point&) { return 0.0; }, 0.0, false);
  const auto u = ScalarField::sample(g, [](const Point&) { return 2.0; });
  const double eta = luxemburg_norm(u, {p, 0.0});
  // Independent oracle: t^2 + t^4 = 1 with t = 2 / eta.
  const double t = testing::bisect([](double s) { return s * s + s * s * s * s; }, 0.0, 1.0, 1.0);
  EXPECT_NEAR(eta, 2.0 / t, 1e-10);
  EXPECT_NEAR(eta, 2.5441, 1e-4);
}

TEST(Luxemburg, ResidualAtRootAndMonotoneMap) {
  Gen gen(301);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 512);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = gen.bumps(g);
    const ModularSpec spec{gen.smooth_exponent(gen.uniform(1.3, 2.5), gen.uniform(0.0, 1.5)), gen.uniform(0, 3)};
    const double eta = luxemburg_norm(u, spec);
    EXPECT_NEAR(modular_lp((1.0 / eta) * u, spec), 1.0, 1e-10);
    double prev = std::numeric_limits<double>::infinity();
    for (double s = 0.2; s < 5.0; s *= 1.3) {
      const double r = modular_lp((1.0 / (s * eta)) * u, spec);
      EXPECT_LT(r, prev);
      prev = r;
    }
  }
}

TEST(ModularX, TildeVariantAndRatioBounds) {
  Gen gen(302);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 512);
  EXPECT_EQ(modular_X(ScalarField::zeros(g), make_constant_exponent(2.0), 1.0), 0.0);
  EXPECT_EQ(modular_X_tilde(ScalarField::zeros(g), make_constant_exponent(2.0), 1.0), 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = gen.bumps(g);
    const double k = gen.uniform(0.0, 3.0);
    const double pc = gen.uniform(1.5, 3.0);
    const auto pconst = make_constant_exponent(pc);
    EXPECT_NEAR(modular_X_tilde(u, pconst, k), modular_X(u, pconst, k) / pc,
                1e-14 * modular_X(u, pconst, k));
    const double base = gen.uniform(1.5, 2.5), amp = gen.uniform(0.1, 1.0);
    const auto p = gen.smooth_exponent(base, amp);
    const auto s = sample_exponent(p, *g);
    const double ratio = modular_X(u, p, k) / modular_X_tilde(u, p, k);
    EXPECT_GE(ratio, s.minus * (1 - 1e-14));
    EXPECT_LE(ratio, s.plus * (1 + 1e-14));
  }
}

TEST(NormX, ConstantTwoReducesToL2Norms) {
  const auto g = line(1024);
  const auto u = gauss(g);
  const auto gs = g->gradient_samples();
  const auto d = sample_gradient(u);
  double grad2 = 0.0;
  for (std::size_t s = 0; s < d.size(); ++s) grad2 += gs.weights[s] * (d[s][0] * d[s][0] + d[s][1] * d[s][1]);
  EXPECT_NEAR(norm_X(u, make_constant_exponent(2.0), 0.0), l2_norm(u) + std::sqrt(grad2), 1e-12);
  EXPECT_EQ(norm_X(ScalarField::zeros(g), make_constant_exponent(2.0), 0.0), 0.0);
}

TEST(NormX, StrictlyIncreasingUnderScaling) {
  Gen gen(303);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 256);
  for (int trial = 0; trial < 30; ++trial) {
    const auto u = gen.bumps(g);
    const auto p = gen.smooth_exponent(gen.uniform(1.5, 2.5), gen.uniform(0.0, 1.0));
    double prev = 0.0;
    for (int j = 0; j < 12; ++j) {
      const double t = std::pow(1.7, j - 6);
      const double n = norm_X(t * u, p, 2.0);
      EXPECT_GT(n, prev);
      prev = n;
    }
  }
}

TEST(Relations, UnitNormGivesUnitModular) {
  Gen gen(304);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 512);
  const auto u = gen.bumps(g);
  const ModularSpec spec{gen.smooth_exponent(2.0, 1.0), 1.0};
  const auto unit = (1.0 / luxemburg_norm(u, spec)) * u;
  EXPECT_NEAR(modular_lp(unit, spec), 1.0, 1e-10);
  EXPECT_TRUE(check_modular_norm_relations(unit, spec).all_hold());
}

TEST(Relations, NormTwoWithExponentTwoToThree) {
  Gen gen(305);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 512);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u0 = gen.bumps(g);
    const ModularSpec spec{gen.smooth_exponent(2.0, 1.0), 0.0};
    const auto u = (2.0 / luxemburg_norm(u0, spec)) * u0;
    const double rho = modular_lp(u, spec);
    EXPECT_GE(rho, 4.0 * (1 - 1e-10));
    EXPECT_LE(rho, 8.0 * (1 + 1e-10));
  }
}

TEST(Relations, ConstantExponentEquality) {
  Gen gen(306);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 256);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = gen.uniform(0.01, 30.0) * gen.bumps(g);
    const double p = gen.uniform(1.2, 4.0);
    const ModularSpec spec{make_constant_exponent(p), gen.uniform(0.0, 2.0)};
    const double rho = modular_lp(u, spec);
    EXPECT_NEAR(std::pow(luxemburg_norm(u, spec), p), rho, 1e-11 * rho);
  }
}

TEST(Relations, ReportFlagsViolations) {
  // rho = 3 with norm 0.5 breaks both the iff and item (iii).
  const auto rep = relation_report(0.5, 3.0, 2.0, 3.0);
  EXPECT_FALSE(rep.all_hold());
  EXPECT_TRUE(relation_report(0.5, std::pow(0.5, 2.5), 2.0, 3.0).all_hold());
  EXPECT_TRUE(relation_report(2.0, std::pow(2.0, 2.5), 2.0, 3.0).all_hold());
}

TEST(Relations, SumNormCanBreakSpaceRelation) {
  // ||u|| = ||grad u|| = 1/2 with p = 2: the sum norm is 1 while
  // rho_X = 2 (1/2)^2 = 1/2. The joint Luxemburg norm avoids this.
  const double a = 0.5, p = 2.0;
  const double rho = 2.0 * std::pow(a, p);
  EXPECT_FALSE(relation_report(a + a, rho, p, p).all_hold());
  EXPECT_TRUE(relation_report(std::sqrt(rho), rho, p, p).all_hold());
}

TEST(SpaceRelations, HoldForRandomFields) {
  Gen gen(307);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 256);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = gen.log_uniform(0.05, 20.0) * gen.bumps(g);
    const auto p = gen.smooth_exponent(gen.uniform(1.3, 2.5), gen.uniform(0.0, 1.2));
    EXPECT_TRUE(check_space_relations(u, p, gen.uniform(0.0, 3.0)).all_hold());
  }
}

// Modular convergence and norm convergence go together.
TEST(Convergence, ModularAndNormTogether) {
  Gen gen(308);
  const auto g = build_grid(1, GridMode::tensor, 5.0, 256);
  const auto delta = gen.bumps(g);
  const ModularSpec spec{gen.smooth_exponent(1.8, 1.0), 1.0};
  double prev_rho = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= 8; ++m) {
    const auto dm = std::pow(0.3, m) * delta;
    const double rho = modular_lp(dm, spec), nrm = luxemburg_norm(dm, spec);
    EXPECT_LT(rho, prev_rho);
    prev_rho = rho;
    if (m == 8) {
      EXPECT_LT(rho, 1e-6);
      EXPECT_LT(nrm, 1e-3);
    }
  }
}

}  // namespace
}  // namespace vexp
