#include "vexp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "vexp/modular.hpp"
#include "vexp/thresholds.hpp"

namespace vexp {

std::string to_string(Direction d) { return d == Direction::sobolev ? "sobolev" : "l2"; }

ScalarField project_to_mass(const ScalarField& u, double c, const SampledExponent& p) {
  const double t = mass_scale_root(u, c, p);
  return t * u;
}

ScalarField project_to_mass(const ScalarField& u, double c, const ExponentField& p) {
  return project_to_mass(u, c, sample_exponent(p, u.grid()));
}

Multiplier recover_multiplier(const ScalarField& u, const Problem& prob) {
  const ScalarField e = energy_gradient(u, prob);
  const ScalarField g = constraint_gradient(u, prob.ps());
  const double gg = inner(g, g);
  if (gg == 0.0) throw DomainError("multiplier undefined: constraint gradient vanishes");
  const double lambda = inner(e, g) / gg;
  return {lambda, e - lambda * g};
}

Multiplier recover_multiplier(const ScalarField& u, const ExponentField& p, const ExponentField& q,
                              double k) {
  return recover_multiplier(u, Problem(u.grid_ptr(), p, q, k));
}

double kkt_residual(const ScalarField& u, double lambda, const Problem& prob) {
  const ScalarField e = energy_gradient(u, prob);
  const ScalarField g = constraint_gradient(u, prob.ps());
  const double num = l2_norm(e - lambda * g);
  const double den = l2_norm(e);
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

double kkt_residual(const ScalarField& u, double lambda, const ExponentField& p, const ExponentField& q,
                    double k) {
  return kkt_residual(u, lambda, Problem(u.grid_ptr(), p, q, k));
}

namespace {

constexpr double kFlatSlack = 1e-14;

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// -div(a grad) + W (mu + |x|^k b) with a, b frozen at u.
class Preconditioner {
 public:
  Preconditioner(const Problem& prob, double shift) : prob_(prob), shift_(shift) {
    const auto& ps = prob.ps();
    frozen_ = std::all_of(ps.at_samples.begin(), ps.at_samples.end(), [](double v) { return v == 2.0; }) &&
              std::all_of(ps.at_nodes.begin(), ps.at_nodes.end(), [](double v) { return v == 2.0; });
  }

  void update(const ScalarField& u) {
    if (frozen_ && ready_) return;
    const Grid& grid = prob_.grid();
    const auto& gs = grid.gradient_samples();
    const auto& ps = prob_.ps();
    const auto g = sample_gradient(u);

    double gmax = 0.0, umax = 0.0;
    for (const auto& v : g) gmax = std::max(gmax, std::hypot(v[0], v[1]));
    for (double v : u.values()) umax = std::max(umax, std::abs(v));
    const double gfloor = std::max(1e-3 * gmax, prob_.grad_epsilon()) + 1e-300;
    const double ufloor = 1e-3 * umax + 1e-300;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(gs.size() * gs.components * 4 + u.size());
    const double h2 = gs.inv_h * gs.inv_h;
    for (std::size_t s = 0; s < gs.size(); ++s) {
      const double pe = ps.at_samples[s];
      double a = 1.0;
      if (pe != 2.0) {
        const double m = std::max(std::hypot(g[s][0], g[s][1]), gfloor);
        a = std::pow(m, pe - 2.0);
      }
      const double coeff = gs.weights[s] * a * h2;
      for (int c = 0; c < gs.components; ++c) {
        const auto& t = gs.taps[s * gs.components + c];
        if (t[0] >= 0) trip.emplace_back(t[0], t[0], coeff);
        if (t[1] >= 0) trip.emplace_back(t[1], t[1], coeff);
        if (t[0] >= 0 && t[1] >= 0) {
          trip.emplace_back(t[0], t[1], -coeff);
          trip.emplace_back(t[1], t[0], -coeff);
        }
      }
    }
    const auto w = grid.weights();
    const auto& conf = prob_.confinement();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double pe = ps.at_nodes[i];
      const double b = pe == 2.0 ? 1.0 : std::pow(std::max(std::abs(u[i]), ufloor), pe - 2.0);
      trip.emplace_back(i, i, w[i] * (shift_ + conf[i] * b));
    }
    const auto n = static_cast<Eigen::Index>(u.size());
    SpMat P(n, n);
    P.setFromTriplets(trip.begin(), trip.end());
    if (!ready_) solver_.analyzePattern(P);
    solver_.factorize(P);
    if (solver_.info() != Eigen::Success) throw NumericError("preconditioner factorization failed");
    ready_ = true;
  }

  Vec solve(const Vec& rhs) const { return solver_.solve(rhs); }

 private:
  const Problem& prob_;
  double shift_;
  bool frozen_ = false;
  bool ready_ = false;
  Eigen::SimplicialLDLT<SpMat> solver_;
};

Vec weighted(const ScalarField& f) {
  const auto w = f.grid().weights();
  Vec v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = w[i] * f[i];
  return v;
}

ScalarField as_field(const GridPtr& grid, const Vec& v) {
  return ScalarField(grid, std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

SolveResult minimize(const Problem& prob, const SolveConfig& cfg) {
  if (!(cfg.c > 0.0) || !(cfg.sigma > 0.0)) throw DomainError("solve needs c > 0 and sigma > 0");
  if (!(cfg.armijo_tau > 0.0 && cfg.armijo_tau < 1.0)) throw DomainError("armijo_tau must lie in (0, 1)");
  if (!(cfg.armijo_beta > 0.0 && cfg.armijo_beta < 1.0)) throw DomainError("armijo_beta must lie in (0, 1)");
  if (!(cfg.step0 >= 0.0)) throw DomainError("step0 must be >= 0");

  const GridPtr& grid = prob.grid_ptr();
  const auto& ps = prob.ps();
  ScalarField u = cfg.init ? project_to_mass(*cfg.init, cfg.c, ps) : trial_function(cfg.c, prob.p(), grid).phi;
  if (&u.grid() != grid.get()) throw DomainError("initial field lives on a different grid");

  SolveResult res{u};
  double E = energy_value(u, prob);
  double nx = norm_X(u, prob.p(), prob.k());
  if (!std::isfinite(E)) throw DivergenceError("initial energy is not finite", {});
  bool touched = nx >= cfg.sigma - 1e-8;

  Preconditioner precond(prob, cfg.precond_shift);
  double step = cfg.step0;
  double last_step = 0.0;
  int it = 0;
  for (;; ++it) {
    const ScalarField e = energy_gradient(u, prob);
    const ScalarField g = constraint_gradient(u, ps);
    const double gg = inner(g, g);
    const double lambda = inner(e, g) / gg;
    const ScalarField r = e - lambda * g;
    const double en = l2_norm(e);
    const double kkt = en == 0.0 ? (l2_norm(r) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                 : l2_norm(r) / en;
    res.lambda = lambda;
    res.kkt = kkt;
    if (cfg.record_trace) {
      res.trace.push_back({it, E, std::abs(mass(u, ps) - cfg.c), last_step, kkt, nx});
    }
    if (kkt <= cfg.tol_kkt) {
      res.converged = true;
      res.stop_reason = "kkt tolerance reached";
      break;
    }
    if (it >= cfg.max_iters) {
      res.stop_reason = "iteration limit";
      break;
    }

    ScalarField d = ScalarField::zeros(grid);
    if (cfg.direction == Direction::sobolev) {
      precond.update(u);
      const Vec we = weighted(e), wg = weighted(g);
      const Vec z = precond.solve(we), y = precond.solve(wg);
      const double lp = wg.dot(z) / wg.dot(y);
      d = as_field(grid, -(z - lp * y));
    } else {
      d = -1.0 * r;
    }
    // d is tangent, so <e, d> = <r, d>; the residual form keeps its sign near convergence.
    const double slope = inner(r, d);
    if (!(slope < 0.0)) {
      res.stop_reason = "no descent direction";
      break;
    }
    if (step == 0.0) {
      res.stop_reason = "zero step";
      break;
    }

    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      ScalarField trial = u;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += step * d[i];
      if (trial.is_zero()) {
        step *= cfg.armijo_beta;
        continue;
      }
      trial = project_to_mass(trial, cfg.c, ps);
      const double Et = energy_value(trial, prob);
      if (!std::isfinite(Et)) {
        step *= cfg.armijo_beta;
        continue;
      }
      const bool armijo = Et <= E + cfg.armijo_tau * step * slope;
      // Near convergence the predicted decrease drops below the rounding of E;
      // there a step within rounding slack is taken only if it improves stationarity.
      const double scale = std::max(1.0, std::abs(E));
      const bool flat = !armijo && std::abs(step * slope) <= 1e-12 * scale && Et <= E + kFlatSlack * scale &&
                        kkt_residual(trial, recover_multiplier(trial, prob).lambda, prob) < kkt;
      if (!armijo && !flat) {
        step *= cfg.armijo_beta;
        continue;
      }
      const double nt = norm_X(trial, prob.p(), prob.k());
      if (nt > cfg.sigma) {
        ++res.ball_rejections;
        step *= 0.5;
        continue;
      }
      u = std::move(trial);
      E = Et;
      nx = nt;
      touched = touched || nx >= cfg.sigma - 1e-8;
      last_step = step;
      accepted = true;
      break;
    }
    if (!accepted) {
      if (!std::isfinite(E)) throw DivergenceError("energy is not finite", res.trace);
      res.stop_reason = "line search failed";
      break;
    }
    // The preconditioned direction is scaled like a Newton step, so the
    // unit step is never exceeded; the plain L2 direction has no scale.
    step = cfg.direction == Direction::sobolev ? std::min(2.0 * step, cfg.step0) : 2.0 * step;
  }

  res.u = std::move(u);
  res.gamma = E;
  res.iterations = it;
  res.norm_X = nx;
  res.on_ball_boundary = touched;
  res.mass_error = std::abs(mass(res.u, ps) - cfg.c);
  return res;
}

}  // namespace vexp
