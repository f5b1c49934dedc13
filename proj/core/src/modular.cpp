#include "vexp/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "kernels.hpp"
#include "vexp/error.hpp"

namespace vexp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LogTerm {
  double log_coeff;  // ln(weight * factor)
  double log_abs;    // ln|value|
  double exponent;
};

std::vector<LogTerm> collect_terms(std::span<const ModularPart> parts, double& p_minus, double& p_plus) {
  std::vector<LogTerm> terms;
  p_minus = kInf;
  p_plus = -kInf;
  for (const auto& part : parts) {
    const bool has_factor = !part.factors.empty();
    for (std::size_t i = 0; i < part.values.size(); ++i) {
      const double v = std::abs(part.values[i]);
      const double c = part.weights[i] * (has_factor ? part.factors[i] : 1.0);
      if (v == 0.0 || c == 0.0) continue;
      if (!std::isfinite(v)) throw NumericError("non-finite value in modular");
      terms.push_back({std::log(c), std::log(v), part.exponents[i]});
      p_minus = std::min(p_minus, part.exponents[i]);
      p_plus = std::max(p_plus, part.exponents[i]);
    }
  }
  return terms;
}

// ln sum_i c_i |v_i / e^s|^{p_i}, evaluated with log-sum-exp.
double log_modular(const std::vector<LogTerm>& terms, double s) {
  double m = -kInf;
  for (const auto& t : terms) m = std::max(m, t.log_coeff + t.exponent * (t.log_abs - s));
  double sum = 0.0;
  for (const auto& t : terms) sum += std::exp(t.log_coeff + t.exponent * (t.log_abs - s) - m);
  return m + std::log(sum);
}

std::vector<double> node_exponents(const ExponentField& p, const Grid& grid) {
  std::vector<double> e;
  e.reserve(grid.size());
  for (const Point& x : grid.nodes()) e.push_back(p(x));
  return e;
}

std::vector<double> sample_exponents(const ExponentField& p, const Grid& grid) {
  std::vector<double> e;
  const auto& s = grid.gradient_samples();
  e.reserve(s.size());
  for (const Point& x : s.positions) e.push_back(p(x));
  return e;
}

std::vector<double> weight_factors(const Grid& grid, double k) {
  std::vector<double> f;
  if (k == 0.0) return f;
  f.reserve(grid.size());
  for (double r : grid.radii()) f.push_back(std::pow(r, k));
  return f;
}

std::vector<double> gradient_magnitudes(const ScalarField& u) {
  const auto g = sample_gradient(u);
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) t[i] = std::hypot(g[i][0], g[i][1]);
  return t;
}

// Everything needed to assemble rho_X for one field.
struct SpaceParts {
  std::vector<double> p_nodes, p_samples, factors, grad;
  ModularPart lebesgue(const ScalarField& u) const {
    return {u.values(), p_nodes, u.grid().weights(), factors};
  }
  ModularPart gradient(const ScalarField& u) const {
    return {grad, p_samples, u.grid().gradient_samples().weights};
  }
};

SpaceParts space_parts(const ScalarField& u, const ExponentField& p, double k) {
  return {node_exponents(p, u.grid()), sample_exponents(p, u.grid()), weight_factors(u.grid(), k),
          gradient_magnitudes(u)};
}

}  // namespace

double modular_sum(std::span<const ModularPart> parts) {
  double sum = 0.0;
  for (const auto& part : parts) {
    const bool has_factor = !part.factors.empty();
    for (std::size_t i = 0; i < part.values.size(); ++i) {
      const double f = has_factor ? part.factors[i] : 1.0;
      sum += part.weights[i] * f * detail::pow_abs(part.values[i], part.exponents[i]);
    }
  }
  return sum;
}

double luxemburg(std::span<const ModularPart> parts) {
  double p_minus = 0.0, p_plus = 0.0;
  const auto terms = collect_terms(parts, p_minus, p_plus);
  if (terms.empty()) return 0.0;

  const double log_rho = log_modular(terms, 0.0);
  if (!std::isfinite(log_rho)) throw NumericError("Luxemburg norm: modular is not finite");

  // ln(norm) lies between ln(rho)/p+ and ln(rho)/p-.
  double lo = std::min(log_rho / p_plus, log_rho / p_minus);
  double hi = std::max(log_rho / p_plus, log_rho / p_minus);
  if (p_minus == p_plus) return std::exp(log_rho / p_minus);

  auto g = [&terms](double s) { return log_modular(terms, s); };
  double widen = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
  lo -= widen;
  hi += widen;
  double g_lo = g(lo), g_hi = g(hi);
  for (int expand = 0; g_lo < 0.0 && expand < 200; ++expand) {
    lo -= widen;
    widen *= 2.0;
    g_lo = g(lo);
  }
  widen = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
  for (int expand = 0; g_hi > 0.0 && expand < 200; ++expand) {
    hi += widen;
    widen *= 2.0;
    g_hi = g(hi);
  }
  if (!(g_lo >= 0.0 && g_hi <= 0.0)) throw NumericError("Luxemburg norm: failed to bracket the root");
  if (g_lo == 0.0) return std::exp(lo);
  if (g_hi == 0.0) return std::exp(hi);

  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, tol, max_iter);
  return std::exp(0.5 * (a + b));
}

double modular_lp(const ScalarField& u, const ModularSpec& spec) {
  const auto e = node_exponents(spec.exponent, u.grid());
  const auto f = weight_factors(u.grid(), spec.k);
  const ModularPart part{u.values(), e, u.grid().weights(), f};
  return modular_sum({&part, 1});
}

double luxemburg_norm(const ScalarField& u, const ModularSpec& spec) {
  const auto e = node_exponents(spec.exponent, u.grid());
  const auto f = weight_factors(u.grid(), spec.k);
  const ModularPart part{u.values(), e, u.grid().weights(), f};
  return luxemburg({&part, 1});
}

double modular_X(const ScalarField& u, const ExponentField& p, double k) {
  const auto sp = space_parts(u, p, k);
  const ModularPart parts[2] = {sp.gradient(u), sp.lebesgue(u)};
  return modular_sum(parts);
}

double modular_X_tilde(const ScalarField& u, const ExponentField& p, double k) {
  auto sp = space_parts(u, p, k);
  // fold 1/p(x) into the factors
  std::vector<double> node_f(u.size()), sample_f(sp.grad.size());
  for (std::size_t i = 0; i < node_f.size(); ++i) {
    node_f[i] = (sp.factors.empty() ? 1.0 : sp.factors[i]) / sp.p_nodes[i];
  }
  for (std::size_t i = 0; i < sample_f.size(); ++i) sample_f[i] = 1.0 / sp.p_samples[i];
  const ModularPart parts[2] = {
      {sp.grad, sp.p_samples, u.grid().gradient_samples().weights, sample_f},
      {u.values(), sp.p_nodes, u.grid().weights(), node_f}};
  return modular_sum(parts);
}

double norm_X(const ScalarField& u, const ExponentField& p, double k) {
  const auto sp = space_parts(u, p, k);
  const ModularPart leb = sp.lebesgue(u);
  const ModularPart grad = sp.gradient(u);
  return luxemburg({&leb, 1}) + luxemburg({&grad, 1});
}

double norm_X_modular(const ScalarField& u, const ExponentField& p, double k) {
  const auto sp = space_parts(u, p, k);
  const ModularPart parts[2] = {sp.gradient(u), sp.lebesgue(u)};
  return luxemburg(parts);
}

bool ModularRelationReport::all_hold() const {
  return std::all_of(items.begin(), items.end(), [](const RelationCheck& c) { return c.holds; });
}

ModularRelationReport relation_report(double norm, double rho, double p_minus, double p_plus) {
  constexpr double kNormTol = 1e-12;
  constexpr double kRhoTol = 1e-10;
  constexpr double kBoundTol = 1e-12;

  ModularRelationReport rep{norm, rho, p_minus, p_plus, {}};
  const bool n_lt = norm < 1.0 - kNormTol;
  const bool n_gt = norm > 1.0 + kNormTol;
  const bool n_eq = !n_lt && !n_gt;

  rep.items.push_back({"i_lt", (!n_lt || rho < 1.0) && (!(rho < 1.0 - kRhoTol) || norm < 1.0),
                       std::abs(1.0 - rho)});
  rep.items.push_back({"i_eq", !n_eq || std::abs(rho - 1.0) <= kRhoTol, kRhoTol - std::abs(rho - 1.0)});
  rep.items.push_back({"i_gt", (!n_gt || rho > 1.0) && (!(rho > 1.0 + kRhoTol) || norm > 1.0),
                       std::abs(rho - 1.0)});

  auto bracket = [&](const char* name, bool active, double lower, double upper) {
    if (!active) {
      rep.items.push_back({name, true, std::numeric_limits<double>::infinity()});
      return;
    }
    const bool ok = lower * (1.0 - kBoundTol) <= rho && rho <= upper * (1.0 + kBoundTol);
    rep.items.push_back({name, ok, std::min(rho - lower, upper - rho) / rho});
  };
  bracket("ii", n_gt, std::pow(norm, p_minus), std::pow(norm, p_plus));
  bracket("iii", n_lt, std::pow(norm, p_plus), std::pow(norm, p_minus));
  return rep;
}

ModularRelationReport check_modular_norm_relations(const ScalarField& u, const ModularSpec& spec) {
  if (u.is_zero()) throw DomainError("modular-norm relations need a nonzero field");
  const auto e = node_exponents(spec.exponent, u.grid());
  const auto [mn, mx] = std::minmax_element(e.begin(), e.end());
  return relation_report(luxemburg_norm(u, spec), modular_lp(u, spec), *mn, *mx);
}

ModularRelationReport check_space_relations(const ScalarField& u, const ExponentField& p, double k) {
  if (u.is_zero()) throw DomainError("modular-norm relations need a nonzero field");
  const auto sp = space_parts(u, p, k);
  double mn = kInf, mx = -kInf;
  for (double v : sp.p_nodes) mn = std::min(mn, v), mx = std::max(mx, v);
  for (double v : sp.p_samples) mn = std::min(mn, v), mx = std::max(mx, v);
  return relation_report(norm_X_modular(u, p, k), modular_X(u, p, k), mn, mx);
}

}  // namespace vexp
