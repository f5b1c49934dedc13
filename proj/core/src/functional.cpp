#include "vexp/functional.hpp"

#include <cmath>

#include "kernels.hpp"
#include "vexp/error.hpp"
#include "vexp/modular.hpp"

namespace vexp {

using detail::pow_abs;
using detail::signed_pow;

Problem::Problem(GridPtr grid, ExponentField p, ExponentField q, double k, double grad_epsilon)
    : grid_(std::move(grid)), p_(std::move(p)), q_(std::move(q)), k_(k) {
  if (!grid_) throw DomainError("problem needs a grid");
  if (!std::isfinite(k_) || k_ < 0.0) throw DomainError("confinement power k must be finite and >= 0");
  ps_ = sample_exponent(p_, *grid_);
  qs_ = sample_exponent(q_, *grid_);
  double p_min = ps_.minus;
  for (double v : ps_.at_samples) p_min = std::min(p_min, v);
  eps_ = grad_epsilon >= 0.0 ? grad_epsilon : (p_min < 2.0 ? kDefaultGradEpsilon : 0.0);
  conf_.resize(grid_->size());
  const auto r = grid_->radii();
  for (std::size_t i = 0; i < conf_.size(); ++i) conf_[i] = k_ == 0.0 ? 1.0 : std::pow(r[i], k_);
}

std::vector<double> Problem::gradient_magnitude(const ScalarField& u) const {
  const auto g = sample_gradient(u);
  std::vector<double> t(g.size());
  const double e2 = eps_ * eps_;
  for (std::size_t s = 0; s < g.size(); ++s) {
    t[s] = std::sqrt(g[s][0] * g[s][0] + g[s][1] * g[s][1] + e2);
  }
  return t;
}

namespace {

struct Terms {
  double grad = 0.0, confine = 0.0, nonlinear = 0.0, mass = 0.0, rho_x = 0.0, rho_q = 0.0;
};

Terms terms(const ScalarField& u, const Problem& prob) {
  Terms t;
  const auto& gs = prob.grid().gradient_samples();
  const auto mag = prob.gradient_magnitude(u);
  const auto& ps = prob.ps();
  const auto& qs = prob.qs();
  for (std::size_t s = 0; s < mag.size(); ++s) {
    const double a = gs.weights[s] * pow_abs(mag[s], ps.at_samples[s]);
    t.rho_x += a;
    t.grad += a / ps.at_samples[s];
  }
  const auto w = prob.grid().weights();
  const auto& conf = prob.confinement();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double up = w[i] * pow_abs(u[i], ps.at_nodes[i]);
    const double uq = w[i] * pow_abs(u[i], qs.at_nodes[i]);
    t.mass += up / ps.at_nodes[i];
    t.confine += conf[i] * up / ps.at_nodes[i];
    t.rho_x += conf[i] * up;
    t.nonlinear += uq / qs.at_nodes[i];
    t.rho_q += uq;
  }
  return t;
}

}  // namespace

double energy_value(const ScalarField& u, const Problem& prob) {
  const Terms t = terms(u, prob);
  return t.grad + t.confine - t.nonlinear;
}

EnergyReport energy(const ScalarField& u, const Problem& prob) {
  const Terms t = terms(u, prob);
  EnergyReport r;
  r.grad_term = t.grad;
  r.confine_term = t.confine;
  r.nonlinear_term = t.nonlinear;
  r.energy = t.grad + t.confine - t.nonlinear;
  r.mass = t.mass;
  r.modular_X = t.rho_x;
  r.modular_q = t.rho_q;
  r.norm_X = norm_X(u, prob.p(), prob.k());
  r.grad_epsilon = prob.grad_epsilon();
  return r;
}

EnergyReport energy(const ScalarField& u, const ExponentField& p, const ExponentField& q, double k) {
  return energy(u, Problem(u.grid_ptr(), p, q, k));
}

double mass(const ScalarField& u, const SampledExponent& p) {
  const auto w = u.grid().weights();
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m += w[i] * pow_abs(u[i], p.at_nodes[i]) / p.at_nodes[i];
  return m;
}

double mass(const ScalarField& u, const ExponentField& p) { return mass(u, sample_exponent(p, u.grid())); }

ScalarField energy_gradient(const ScalarField& u, const Problem& prob) {
  const Grid& grid = prob.grid();
  const auto& gs = grid.gradient_samples();
  const auto g = sample_gradient(u);
  const auto& ps = prob.ps();
  const auto& qs = prob.qs();
  const double e2 = prob.grad_epsilon() * prob.grad_epsilon();

  std::vector<double> out(u.size(), 0.0);
  for (std::size_t s = 0; s < g.size(); ++s) {
    const double m2 = g[s][0] * g[s][0] + g[s][1] * g[s][1] + e2;
    if (m2 == 0.0) continue;
    const double pe = ps.at_samples[s];
    // (|g|^2 + eps^2)^{(p-2)/2}
    const double coeff = gs.weights[s] * (pe == 2.0 ? 1.0 : std::pow(m2, 0.5 * (pe - 2.0))) * gs.inv_h;
    for (int c = 0; c < gs.components; ++c) {
      const auto& tap = gs.taps[s * gs.components + c];
      const double f = coeff * g[s][c];
      if (tap[0] >= 0) out[tap[0]] += f;
      if (tap[1] >= 0) out[tap[1]] -= f;
    }
  }
  const auto w = grid.weights();
  const auto& conf = prob.confinement();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = out[i] / w[i] + conf[i] * signed_pow(u[i], ps.at_nodes[i]) - signed_pow(u[i], qs.at_nodes[i]);
  }
  return ScalarField(u.grid_ptr(), std::move(out));
}

ScalarField energy_gradient(const ScalarField& u, const ExponentField& p, const ExponentField& q,
                            double k) {
  return energy_gradient(u, Problem(u.grid_ptr(), p, q, k));
}

ScalarField constraint_gradient(const ScalarField& u, const SampledExponent& p) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = signed_pow(u[i], p.at_nodes[i]);
  return ScalarField(u.grid_ptr(), std::move(out));
}

ScalarField constraint_gradient(const ScalarField& u, const ExponentField& p) {
  return constraint_gradient(u, sample_exponent(p, u.grid()));
}

GNReport gn_ratio(const ScalarField& u, const ExponentField& p, const ExponentField& q) {
  if (u.is_zero()) throw DomainError("GN ratio of the zero field");
  const Grid& grid = u.grid();
  const auto ps = sample_exponent(p, grid);
  const auto qs = sample_exponent(q, grid);

  const auto g = sample_gradient(u);
  std::vector<double> mag(g.size());
  bool any = false;
  for (std::size_t s = 0; s < g.size(); ++s) {
    mag[s] = std::hypot(g[s][0], g[s][1]);
    any = any || mag[s] > 0.0;
  }
  if (!any) throw DomainError("GN ratio undefined: gradient vanishes");

  GNReport r;
  r.alpha = grid.dimension() * (1.0 / ps.plus - 1.0 / qs.minus);
  const ModularPart uq{u.values(), qs.at_nodes, grid.weights()};
  const ModularPart up{u.values(), ps.at_nodes, grid.weights()};
  const ModularPart gp{mag, ps.at_samples, grid.gradient_samples().weights};
  r.lhs = luxemburg({&uq, 1});
  const double lp = luxemburg({&up, 1});
  const double lg = luxemburg({&gp, 1});
  r.rhs_base = std::pow(lp, 1.0 - r.alpha) * std::pow(lg, r.alpha);
  r.ratio = r.lhs / r.rhs_base;
  return r;
}

}  // namespace vexp
