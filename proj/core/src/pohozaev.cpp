#include "vexp/pohozaev.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"
#include "vexp/error.hpp"

namespace vexp {

using detail::pow_abs;
using detail::pow_log;

namespace {

// (ln t - 1/p) t^p with the clamp applied to t^p ln t.
double log_term(double t, double p, double clamp) { return pow_log(t, p, clamp) - pow_abs(t, p) / p; }

}  // namespace

Remainder remainder_R(const ScalarField& u, double lambda, const Problem& prob, double log_clamp) {
  return pohozaev_terms(u, lambda, prob, log_clamp).remainder;
}

Remainder remainder_R(const ScalarField& u, double lambda, const ExponentField& p, const ExponentField& q,
                      double k, double log_clamp) {
  return remainder_R(u, lambda, Problem(u.grid_ptr(), p, q, k), log_clamp);
}

PohozaevReport pohozaev_terms(const ScalarField& u, double lambda, const Problem& prob, double log_clamp) {
  const Grid& grid = prob.grid();
  const double n = grid.dimension();
  const double k = prob.k();
  const auto& ps = prob.ps();
  const auto& qs = prob.qs();
  const auto& conf = prob.confinement();
  const auto& gs = grid.gradient_samples();
  const auto mag = prob.gradient_magnitude(u);

  PohozaevReport r;
  r.lambda = lambda;
  r.log_clamp = log_clamp;
  Remainder& R = r.remainder;

  double grad_mod = 0.0;
  for (std::size_t s = 0; s < mag.size(); ++s) {
    const double p = ps.at_samples[s];
    const double w = gs.weights[s];
    const double tp = pow_abs(mag[s], p);
    grad_mod += w * tp;
    r.lhs_grad += w * (n - p) / p * tp;
    const double drift = ps.drift_at_samples[s];
    if (drift != 0.0) R.R4 += w * log_term(mag[s], p, log_clamp) * drift / p;
  }

  const auto wn = grid.weights();
  double mass = 0.0, rho_p = 0.0, rho_q = 0.0, confine = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double p = ps.at_nodes[i];
    const double q = qs.at_nodes[i];
    const double w = wn[i];
    const double a = std::abs(u[i]);
    const double up = pow_abs(a, p);
    const double uq = pow_abs(a, q);
    rho_p += w * up;
    rho_q += w * uq;
    mass += w * up / p;
    confine += w * conf[i] * up;
    r.lhs_confine += w * (n + k) / p * conf[i] * up;
    r.rhs_q_vol += w * n * uq / q;
    const double dp = ps.drift_at_nodes[i];
    const double dq = qs.drift_at_nodes[i];
    if (dp != 0.0) {
      const double lp = log_term(a, p, log_clamp) * dp / p;
      R.R1 += w * lp;
      R.R3 += w * conf[i] * lp;
    }
    if (dq != 0.0) R.R2 += w * log_term(a, q, log_clamp) * dq / q;
  }

  r.lhs_mass = n * lambda * mass;
  r.rhs_q_log = R.R2;
  r.rhs_p_log_grad = R.R4;
  r.rhs_p_log_confine = R.R3;
  r.rhs_p_log_mass = lambda * R.R1;
  R.R = lambda * R.R1 + R.R2 - R.R4 - R.R3;

  r.lhs = r.lhs_grad + r.lhs_confine - r.lhs_mass;
  r.rhs = r.rhs_q_log + r.rhs_q_vol - r.rhs_p_log_grad - r.rhs_p_log_confine + r.rhs_p_log_mass;
  r.residual = r.lhs - r.rhs;
  const double scale = std::max({std::abs(r.lhs_grad), std::abs(r.lhs_confine), std::abs(r.lhs_mass),
                                 std::abs(r.rhs_q_log), std::abs(r.rhs_q_vol), std::abs(r.rhs_p_log_grad),
                                 std::abs(r.rhs_p_log_confine), std::abs(r.rhs_p_log_mass)});
  r.relative_residual = scale > 0.0 ? std::abs(r.residual) / scale : 0.0;

  r.weak_form_residual = grad_mod - lambda * rho_p - rho_q + confine;
  const double wscale = std::max({grad_mod, std::abs(lambda) * rho_p, rho_q, confine});
  r.weak_form_relative = wscale > 0.0 ? std::abs(r.weak_form_residual) / wscale : 0.0;
  return r;
}

PohozaevReport pohozaev_terms(const ScalarField& u, double lambda, const ExponentField& p,
                              const ExponentField& q, double k, double log_clamp) {
  return pohozaev_terms(u, lambda, Problem(u.grid_ptr(), p, q, k), log_clamp);
}

PositivityCheck positivity_check(double energy, double rho_X, double R, double p_minus, double p_plus,
                                 double q_minus, int dimension) {
  if (!(q_minus > p_minus)) throw DomainError("positivity bracket needs q- > p-");
  const double n = dimension;
  const double gap = q_minus - p_minus;
  PositivityCheck c;
  c.bracket = 1.0 / p_plus - (n * (p_plus - p_minus) + p_plus * p_minus) / (n * p_plus * gap) -
              (p_plus - p_minus) / (p_plus * gap);
  c.rho_X = rho_X;
  c.remainder_term = std::abs(R) * p_minus / (n * gap);
  c.bound = c.bracket * rho_X - c.remainder_term;
  c.energy = energy;
  c.margin = energy - c.bound;
  return c;
}

namespace {

struct LineSample {
  double x, y, value;
};

// Staggered first differences grouped by grid line.
std::vector<std::vector<LineSample>> derivative_lines(const ScalarField& u) {
  const Grid& g = u.grid();
  const double inv_h = 1.0 / g.spacing();
  std::vector<std::vector<LineSample>> lines;
  const auto nodes = g.nodes();
  if (g.mode() == GridMode::tensor && g.dimension() == 2) {
    const int n = g.cells();
    for (int j = 0; j < n; ++j) {
      std::vector<LineSample> row, col;
      for (int i = 0; i + 1 < n; ++i) {
        const int a = i + n * j, b = i + 1 + n * j;
        row.push_back({0.5 * (nodes[a][0] + nodes[b][0]), nodes[a][1], (u[b] - u[a]) * inv_h});
        const int c = j + n * i, d = j + n * (i + 1);
        col.push_back({nodes[c][0], 0.5 * (nodes[c][1] + nodes[d][1]), (u[d] - u[c]) * inv_h});
      }
      lines.push_back(std::move(row));
      lines.push_back(std::move(col));
    }
    return lines;
  }
  std::vector<LineSample> line;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    line.push_back({0.5 * (nodes[i][0] + nodes[i + 1][0]), 0.0, (u[i + 1] - u[i]) * inv_h});
  }
  lines.push_back(std::move(line));
  return lines;
}

}  // namespace

RegularityReport regularity_diagnostics(const ScalarField& u, int annuli) {
  if (annuli < 1) throw DomainError("regularity diagnostics need at least one annulus");
  const Grid& g = u.grid();
  const double L = g.truncation();
  RegularityReport rep;

  const auto r = g.radii();
  for (int a = 0; a < annuli; ++a) {
    AnnulusSup s{L * a / annuli, L * (a + 1) / annuli, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (r[i] >= s.r_inner && r[i] < s.r_outer) s.sup_abs = std::max(s.sup_abs, std::abs(u[i]));
    }
    rep.annuli.push_back(s);
  }

  const double h = g.spacing();
  const double limit = 0.5 * L;
  const auto lines = derivative_lines(u);
  for (int m = 2; m <= 8; ++m) {
    double sup = 0.0;
    for (const auto& line : lines) {
      for (std::size_t i = 0; i + m < line.size(); ++i) {
        const auto& a = line[i];
        const auto& b = line[i + m];
        if (std::hypot(a.x, a.y) > limit || std::hypot(b.x, b.y) > limit) continue;
        sup = std::max(sup, std::abs(b.value - a.value));
        ++rep.pairs;
      }
    }
    rep.distances.push_back(m * h);
    rep.sup_differences.push_back(sup);
  }
  if (rep.pairs < 32) throw DomainError("regularity diagnostics: fewer than 32 usable pairs");

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rep.distances.size(); ++i) {
    if (rep.sup_differences[i] > 0.0) {
      lx.push_back(std::log(rep.distances[i]));
      ly.push_back(std::log(rep.sup_differences[i]));
    }
  }
  if (lx.size() < 2) {
    rep.degenerate = true;
    return rep;
  }
  const double nx = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= nx;
  my /= nx;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  rep.alpha_hat = sxy / sxx;
  rep.holder_constant = std::exp(my - rep.alpha_hat * mx);
  rep.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  // Differences at rounding level carry no smoothness information.
  const double scale = *std::max_element(rep.sup_differences.begin(), rep.sup_differences.end());
  double umax = 0.0;
  for (double v : u.values()) umax = std::max(umax, std::abs(v));
  rep.degenerate = scale <= 1e-12 * std::max(umax / h, 1e-300);
  return rep;
}

}  // namespace vexp
