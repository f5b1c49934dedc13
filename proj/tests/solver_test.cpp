#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vexp/error.hpp"
#include "vexp/functional.hpp"
#include "vexp/modular.hpp"
#include "vexp/solver.hpp"
#include "vexp/thresholds.hpp"

namespace vexp {
namespace {

using testing::Gen;

GridPtr line(int n = 1024) { return build_grid(1, GridMode::tensor, 6.0, n); }

Problem default_problem(const GridPtr& g) {
  return Problem(g, make_constant_exponent(2.0), make_constant_exponent(4.0), 2.0);
}

const SolveResult& default_solution() {
  static const auto g = line();
  static const SolveResult r = minimize(default_problem(g), SolveConfig{});
  return r;
}

TEST(ProjectToMass, FixedPointAndHomogeneity) {
  Gen gen(601);
  const auto g = line(256);
  const auto p = make_constant_exponent(2.0);
  const auto u = gen.bumps(g);
  const double m = mass(u, p);
  const auto same = project_to_mass(u, m, p);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(same[i], u[i], 1e-12 * std::abs(u[i]) + 1e-300);
  const double t = std::sqrt(2 * 0.2 / inner(u, u));
  const auto proj = project_to_mass(u, 0.2, p);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(proj[i], t * u[i], 1e-12 * std::abs(t * u[i]) + 1e-300);
  EXPECT_THROW(project_to_mass(ScalarField::zeros(g), 0.2, p), DomainError);
}

TEST(ProjectToMass, VariableExponentRecheck) {
  Gen gen(602);
  const auto g = build_grid(3, GridMode::radial, 5.0, 256);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = gen.smooth_exponent(gen.uniform(1.4, 2.4), gen.uniform(0.0, 0.5));
    const double c = gen.log_uniform(1e-3, 1.0);
    const auto v = project_to_mass(gen.bumps(g), c, p);
    const auto s = sample_exponent(p, *g);
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) m += g->weights()[i] * std::pow(std::abs(v[i]), s.at_nodes[i]) / s.at_nodes[i];
    EXPECT_NEAR(m, c, 1e-10 * c);
  }
}

TEST(Minimize, ZeroStepReturnsTrialFunction) {
  const auto g = line();
  const auto prob = default_problem(g);
  SolveConfig cfg;
  cfg.step0 = 0.0;
  const auto r = minimize(prob, cfg);
  const auto phi = trial_function(cfg.c, prob.p(), g).phi;
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_EQ(r.u[i], phi[i]);
  EXPECT_EQ(r.gamma, energy_value(phi, prob));
  EXPECT_EQ(r.stop_reason, "zero step");
}

TEST(Minimize, DefaultRunConverges) {
  const auto& r = default_solution();
  const auto g = r.u.grid_ptr();
  const auto prob = default_problem(g);
  EXPECT_TRUE(r.converged) << r.stop_reason;
  EXPECT_LE(r.kkt, 1e-8);
  EXPECT_LE(r.mass_error, 1e-8);
  EXPECT_FALSE(r.on_ball_boundary);
  EXPECT_LE(r.norm_X, 1.0 + 1e-8);
  EXPECT_LE(r.gamma, energy_value(trial_function(0.05, prob.p(), g).phi, prob));
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].energy, r.trace[i - 1].energy + 1e-12 * std::max(1.0, std::abs(r.trace[i - 1].energy)));
    EXPECT_LE(r.trace[i].mass_error, 1e-8 * 0.05);
  }
}

// Tridiagonal solve (Thomas algorithm) for the oracle below.
std::vector<double> thomas(std::vector<double> diag, double off, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = off / diag[i - 1];
    diag[i] -= m * off;
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - off * x[i + 1]) / diag[i];
  return x;
}

// Independent oracle: self-consistent inverse iteration for
// -u'' + x^2 u - u^3 = lambda u with int u^2 / 2 = c on the same lattice.
TEST(Minimize, MatchesSelfConsistentInverseIteration) {
  const auto& r = default_solution();
  const Grid& g = r.u.grid();
  const std::size_t n = g.size();
  const double h = g.spacing(), c = 0.05;
  std::vector<double> u(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = g.nodes()[i][0];
    u[i] = std::exp(-x[i] * x[i]);
  }
  double lambda = 0.0;
  for (int outer = 0; outer < 400; ++outer) {
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 / (h * h) + x[i] * x[i] - u[i] * u[i];
    const double shift = lambda - 0.5;
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = diag[i] - shift;
    std::vector<double> v = u;
    for (int inner = 0; inner < 20; ++inner) {
      v = thomas(d2, -1.0 / (h * h), v);
      double s = 0.0;
      for (double t : v) s += t * t;
      for (double& t : v) t /= std::sqrt(s);
    }
    // Rayleigh quotient and mass normalization
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i ? v[i - 1] : 0.0, right = i + 1 < n ? v[i + 1] : 0.0;
      num += v[i] * (diag[i] * v[i] - (left + right) / (h * h));
      den += v[i] * v[i];
    }
    lambda = num / den;
    const double m = 0.5 * h * den;
    const double t = std::sqrt(c / m) * (v[n / 2] < 0 ? -1.0 : 1.0);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      change = std::max(change, std::abs(t * v[i] - u[i]));
      u[i] = t * v[i];
    }
    if (change < 1e-14) break;
  }
  double err = 0.0, amp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    err = std::max(err, std::abs(r.u[i] - u[i]));
    amp = std::max(amp, std::abs(u[i]));
  }
  EXPECT_LE(err / amp, 1e-6);
  EXPECT_NEAR(r.lambda, lambda, 1e-6 * std::abs(lambda));
}

TEST(Multiplier, ExactEigenmode) {
  // A Dirichlet sine mode of the 3-point Laplacian with k = 0 and a tiny
  // amplitude: grad E = (mu_j + 1) u exactly in floating point.
  const auto g = build_grid(1, GridMode::tensor, 3.0, 128);
  const int n = g->cells(), j = 2;
  const double h = g->spacing();
  const double theta = std::numbers::pi * j / (n + 1);
  const double mu = (2.0 - 2.0 * std::cos(theta)) / (h * h);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = 1e-5 * std::sin(theta * (i + 1));
  const ScalarField u(g, v);
  const auto m = recover_multiplier(u, make_constant_exponent(2.0), make_constant_exponent(40.0), 0.0);
  EXPECT_NEAR(m.lambda, mu + 1.0, 1e-10 * (mu + 1.0));
  EXPECT_LE(l2_norm(m.residual), 1e-10 * (mu + 1.0) * l2_norm(u));
  EXPECT_THROW(recover_multiplier(ScalarField::zeros(g), make_constant_exponent(2.0), make_constant_exponent(4.0), 0.0),
               DomainError);
}

TEST(Multiplier, WeakFormAgreesAtMinimizer) {
  const auto& r = default_solution();
  const auto prob = default_problem(r.u.grid_ptr());
  const auto e = energy(r.u, prob);
  // lambda int u^2 = int |u'|^2 + int x^2 u^2 - int u^4 for p = 2, q = 4
  const double weak = (2 * e.grad_term + 2 * e.confine_term - e.modular_q) / (2 * e.mass);
  EXPECT_NEAR(weak, r.lambda, 1e-6 * std::abs(r.lambda));
}

TEST(Kkt, LeastSquaresMinimumAndPerturbation) {
  const auto& r = default_solution();
  const auto prob = default_problem(r.u.grid_ptr());
  const double at = kkt_residual(r.u, r.lambda, prob);
  EXPECT_LE(at, 1e-3);
  EXPECT_GT(kkt_residual(r.u, r.lambda + 0.1, prob), at);
  EXPECT_GT(kkt_residual(r.u, r.lambda - 0.1, prob), at);
  // The trial function: the recovered multiplier minimizes the residual.
  const auto phi = trial_function(0.05, prob.p(), r.u.grid_ptr()).phi;
  const auto m = recover_multiplier(phi, prob);
  const double base = kkt_residual(phi, m.lambda, prob);
  for (double d : {-1e-3, 1e-3}) EXPECT_GT(kkt_residual(phi, m.lambda + d, prob), base);
}

TEST(Minimize, IterationLimitReported) {
  const auto g = line();
  SolveConfig cfg;
  cfg.max_iters = 1;
  const auto r = minimize(default_problem(g), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.stop_reason, "iteration limit");
  EXPECT_EQ(r.trace.size(), 2u);
}

TEST(Minimize, SmallBallIsReported) {
  const auto g = line();
  SolveConfig cfg;
  cfg.sigma = 0.46;
  cfg.max_iters = 50;
  const auto r = minimize(default_problem(g), cfg);
  EXPECT_TRUE(r.on_ball_boundary);
  EXPECT_LE(r.norm_X, cfg.sigma + 1e-8);
}

TEST(Minimize, L2DirectionDescends) {
  const auto g = line(256);
  SolveConfig cfg;
  cfg.direction = Direction::l2;
  cfg.max_iters = 200;
  cfg.step0 = 1e-3;
  const auto r = minimize(default_problem(g), cfg);
  ASSERT_GE(r.trace.size(), 2u);
  EXPECT_LT(r.trace.back().energy, r.trace.front().energy);
  EXPECT_LT(r.trace.back().kkt, r.trace.front().kkt);
}

TEST(Minimize, MassSweepDecreasesModular) {
  const auto g = line();
  const auto prob = default_problem(g);
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {0.04, 0.02, 0.01, 0.005}) {
    SolveConfig cfg;
    cfg.c = c;
    const auto r = minimize(prob, cfg);
    ASSERT_TRUE(r.converged);
    const double rho = modular_X(r.u, prob.p(), prob.k());
    EXPECT_LT(rho, prev);
    prev = rho;
  }
}

TEST(Minimize, VariableExponentRadial) {
  const auto g = build_grid(3, GridMode::radial, 6.0, 512);
  const auto p = make_radial_exponent(plateau_profile(2.0, 0.1, 0.5, 1.5), sobolev_range(3));
  const Problem prob(g, p, make_constant_exponent(5.0), 2.0);
  SolveConfig cfg;
  cfg.c = 0.02;
  cfg.tol_kkt = 1e-7;
  const auto r = minimize(prob, cfg);
  EXPECT_TRUE(r.converged) << r.stop_reason << " kkt " << r.kkt;
  EXPECT_LE(r.mass_error, 1e-8 * cfg.c);
  const double rho_p = modular_lp(r.u, {p, 0.0});
  EXPECT_GE(rho_p, cfg.c * prob.ps().minus * (1 - 1e-12));
  EXPECT_LE(rho_p, cfg.c * prob.ps().plus * (1 + 1e-12));
}

}  // namespace
}  // namespace vexp
