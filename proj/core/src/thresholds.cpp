#include "vexp/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "vexp/error.hpp"
#include "vexp/functional.hpp"
#include "vexp/modular.hpp"

namespace vexp {

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField unit_trial(const ExponentField& p, const GridPtr& grid) {
  const double p_plus = sample_exponent(p, *grid).plus;
  return ScalarField::sample(grid, [p_plus](const Point& x) {
    const double r = radius(x);
    return std::exp(-kPi * r * r / p_plus);
  });
}

// omega_N int_0^inf r^{N-1+m} e^{-beta r^2} dr
double radial_moment(int dimension, double m, double beta) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double a = dimension - 1 + m;
  // log form: the power alone overflows long before the Gaussian factor underflows
  auto f = [&](double r) { return r > 0.0 ? std::exp(a * std::log(r) - beta * r * r) : (a == 0.0 ? 1.0 : 0.0); };
  return unit_sphere_measure(dimension) * integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

double mass_scale_root(const ScalarField& u, double c, const SampledExponent& p) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("mass level c must be positive");
  if (u.is_zero()) throw DomainError("cannot rescale the zero field to a mass level");
  // mass(t u) = c  <=>  Luxemburg norm of u with factors 1/(p c) equals 1/t.
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 / (p.at_nodes[i] * c);
  const ModularPart part{u.values(), p.at_nodes, u.grid().weights(), f};
  return 1.0 / luxemburg({&part, 1});
}

double mass_scale_root(const ScalarField& u, double c, const ExponentField& p) {
  return mass_scale_root(u, c, sample_exponent(p, u.grid()));
}

double trial_mass(double a, const ExponentField& p, const Grid& grid) {
  const auto ps = sample_exponent(p, grid);
  const auto w = grid.weights();
  const auto r = grid.radii();
  double g = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double pi = ps.at_nodes[i];
    g += w[i] * std::pow(a, pi) / pi * std::exp(-kPi * pi * r[i] * r[i] / ps.plus);
  }
  return g;
}

TrialFunction trial_function(double c, const ExponentField& p, const GridPtr& grid) {
  if (!(c > 0.0)) throw DomainError("trial function needs c > 0");
  ScalarField phi = unit_trial(p, grid);
  const double a = mass_scale_root(phi, c, p);
  phi *= a;
  return {a, std::move(phi)};
}

GaussianConstants gaussian_bound_constants(double p_minus, double p_plus, int dimension, double k) {
  if (!(p_minus > 1.0 && p_plus >= p_minus)) throw DomainError("gaussian constants need 1 < p- <= p+");
  GaussianConstants g;
  g.p_minus = p_minus;
  g.p_plus = p_plus;
  g.dimension = dimension;
  g.k = k;
  const double n = dimension;
  const double s = 0.5 * (n + p_plus);
  const double lead = std::pow(2.0 * kPi / p_plus, p_plus);
  g.closed_form = lead * unit_sphere_measure(dimension) * std::pow(kPi, -s) *
                  std::pow(p_plus / p_minus, -s) * std::tgamma(s);
  const double beta = kPi * p_minus / p_plus;
  g.moment_p_plus = radial_moment(dimension, p_plus, beta);
  g.direct_c1 = lead * g.moment_p_plus;
  g.direct_c2 = radial_moment(dimension, k, beta);
  g.const_c1 = std::max(g.closed_form, g.direct_c1);
  g.const_c2 = std::max(g.closed_form, g.direct_c2);
  g.c2_bound_warning = g.closed_form < g.direct_c2;
  return g;
}

GaussianConstants gaussian_bound_constants(const ExponentField& p, const Grid& grid, double k) {
  const auto ps = sample_exponent(p, grid);
  return gaussian_bound_constants(ps.minus, ps.plus, grid.dimension(), k);
}

double threshold_c1(double sigma, double p_minus, double p_plus, double c1_plus_c2) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double e = p_plus / p_minus;
  const double t1 = 1.0 / p_plus;
  const double t2 = std::pow(std::pow(sigma, p_plus) / c1_plus_c2, e) / p_plus;
  const double t3 = std::pow(std::pow(sigma, p_minus) / c1_plus_c2, e) / p_plus;
  return std::min({t1, t2, t3});
}

SeparationRadii choose_a1_a2(double sigma, double p_minus, double p_plus) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double spread = std::pow(sigma, p_plus - p_minus);
  SeparationRadii r;
  r.a1 = 0.5 * std::min(1.0, std::pow(p_minus / (p_plus * spread), 1.0 / p_plus));
  const double lower = std::max(r.a1, std::pow(p_plus / p_minus * spread * std::pow(r.a1, p_plus), 1.0 / p_minus));
  r.a2 = 0.5 * (lower + 1.0);
  r.bracket_c3 = std::pow(r.a2 * sigma, p_minus) / p_plus - std::pow(r.a1 * sigma, p_plus) / p_minus;
  r.bracket_c4 = std::pow(r.a2 * sigma, p_plus) / p_plus - std::pow(r.a1 * sigma, p_minus) / p_minus;
  return r;
}

GNConstants estimate_gn_constant(const ExponentField& p, const ExponentField& q, const GridPtr& grid,
                                 std::uint64_t seed, int members) {
  if (members < 1) throw DomainError("GN probe family needs at least one member");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = grid->truncation();
  const bool radial = grid->mode() == GridMode::radial;
  const int dim = grid->dimension();

  GNConstants out;
  out.members = members;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (int m = 0; m < members; ++m) {
    const int parts = 1 + static_cast<int>(unit(rng) * 3.0) % 3;
    std::vector<std::array<double, 5>> g(parts);  // amp, width, cx, cy, unused
    for (auto& c : g) {
      c[0] = 0.5 + 1.5 * unit(rng);
      c[1] = L * (0.05 + 0.2 * unit(rng));
      c[2] = radial ? 0.0 : L * (unit(rng) - 0.5) * 0.6;
      c[3] = (radial || dim < 2) ? 0.0 : L * (unit(rng) - 0.5) * 0.6;
    }
    const auto u = ScalarField::sample(grid, [&g](const Point& x) {
      double v = 0.0;
      for (const auto& c : g) {
        const double dx = x[0] - c[2], dy = x[1] - c[3];
        v += c[0] * std::exp(-(dx * dx + dy * dy) / (c[1] * c[1]));
      }
      return v;
    });
    const GNReport r = gn_ratio(u, p, q);
    out.alpha = r.alpha;
    out.k_alpha = std::max(out.k_alpha, r.ratio);
    out.min_ratio = std::min(out.min_ratio, r.ratio);
  }
  const auto qs = sample_exponent(q, *grid);
  out.k_prime = std::max(std::pow(out.k_alpha, qs.plus), std::pow(out.k_alpha, qs.minus));
  out.k_double_prime = out.k_prime;
  return out;
}

ThresholdReport threshold_c0(double sigma, const ExponentField& p, const ExponentField& q,
                             const Grid& grid, double k, double k_prime, double k_double_prime) {
  if (!(k_prime > 0.0) || !(k_double_prime > 0.0)) throw DomainError("GN constant estimates must be positive");
  ThresholdReport t;
  t.sigma = sigma;
  const auto ps = sample_exponent(p, grid);
  const auto qs = sample_exponent(q, grid);
  t.p_minus = ps.minus;
  t.p_plus = ps.plus;
  t.q_minus = qs.minus;
  t.q_plus = qs.plus;
  t.constants = gaussian_bound_constants(ps.minus, ps.plus, grid.dimension(), k);
  if (t.constants.c2_bound_warning) {
    t.notes.push_back("printed weighted-moment constant is below the k-moment; using the k-moment");
  }
  if (t.constants.closed_form < t.constants.direct_c1) {
    t.notes.push_back("printed gradient constant is below the direct moment; using the direct moment");
  }
  t.alpha_used = grid.dimension() * (1.0 / t.p_plus - 1.0 / t.q_minus);
  t.k_prime = k_prime;
  t.k_double_prime = k_double_prime;

  std::vector<std::string> violations;
  if (!(t.alpha_used > 0.0 && t.alpha_used < 1.0)) {
    violations.push_back("GN exponent alpha = " + std::to_string(t.alpha_used) + " outside (0, 1)");
  }
  const auto radii = choose_a1_a2(sigma, t.p_minus, t.p_plus);
  t.a1 = radii.a1;
  t.a2 = radii.a2;
  t.bracket_c3 = radii.bracket_c3;
  t.bracket_c4 = radii.bracket_c4;
  if (!(t.bracket_c3 > 0.0)) violations.push_back("separation bracket for c3 is not positive");
  if (!(t.bracket_c4 > 0.0)) violations.push_back("separation bracket for c4 is not positive");
  if (!violations.empty()) throw ConfigError(violations);

  const double cc = t.constants.const_c1 + t.constants.const_c2;
  t.c1_sigma = threshold_c1(sigma, t.p_minus, t.p_plus, cc);
  t.c2_sigma = threshold_c1(t.a1 * sigma, t.p_minus, t.p_plus, cc);
  const double e = t.p_plus / (t.q_minus * (1.0 - t.alpha_used));
  t.c3_sigma = std::pow(t.q_minus / (k_prime * std::pow(sigma, t.alpha_used * t.q_plus)) * t.bracket_c3, e) / t.p_plus;
  t.c4_sigma =
      std::pow(t.q_minus / (k_double_prime * std::pow(sigma, t.alpha_used * t.q_minus)) * t.bracket_c4, e) / t.p_plus;
  t.c0 = 0.99 * std::min({t.c2_sigma, t.c3_sigma, t.c4_sigma});
  return t;
}

DecayEnvelopes decay_envelopes(double c, double p_minus, double p_plus, double c1_plus_c2) {
  return {std::pow(c * p_plus, p_minus) * c1_plus_c2, std::pow(c * p_plus, p_minus / p_plus) * c1_plus_c2};
}

}  // namespace vexp
