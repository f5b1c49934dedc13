#pragma once

#include <vector>

#include "vexp/exponents.hpp"
#include "vexp/grid.hpp"

namespace vexp {

/// Gradient smoothing used when the default is requested: applied only when
/// min p < 2.
inline constexpr double kDefaultGradEpsilon = 1e-10;

/// The discretized problem: grid, exponents sampled once, and |x|^k per node.
/// Immutable; share freely between solves.
class Problem {
 public:
  /// grad_epsilon < 0 selects the default rule.
  Problem(GridPtr grid, ExponentField p, ExponentField q, double k, double grad_epsilon = -1.0);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const ExponentField& p() const noexcept { return p_; }
  const ExponentField& q() const noexcept { return q_; }
  double k() const noexcept { return k_; }
  double grad_epsilon() const noexcept { return eps_; }

  const SampledExponent& ps() const noexcept { return ps_; }
  const SampledExponent& qs() const noexcept { return qs_; }
  /// |x_i|^k
  const std::vector<double>& confinement() const noexcept { return conf_; }

  /// Smoothed gradient magnitude at every gradient sample.
  std::vector<double> gradient_magnitude(const ScalarField& u) const;

 private:
  GridPtr grid_;
  ExponentField p_;
  ExponentField q_;
  double k_;
  double eps_;
  SampledExponent ps_;
  SampledExponent qs_;
  std::vector<double> conf_;
};

struct EnergyReport {
  double grad_term = 0.0;       ///< int |grad u|^p / p
  double confine_term = 0.0;    ///< int |x|^k |u|^p / p
  double nonlinear_term = 0.0;  ///< int |u|^q / q
  double energy = 0.0;
  double mass = 0.0;            ///< int |u|^p / p
  double norm_X = 0.0;
  double modular_X = 0.0;
  double modular_q = 0.0;       ///< int |u|^q
  double grad_epsilon = 0.0;
};

/// Energy without the norm computations (used inside line searches).
double energy_value(const ScalarField& u, const Problem& prob);

EnergyReport energy(const ScalarField& u, const Problem& prob);
EnergyReport energy(const ScalarField& u, const ExponentField& p, const ExponentField& q, double k);

double mass(const ScalarField& u, const SampledExponent& p);
double mass(const ScalarField& u, const ExponentField& p);

/// dE/du_i divided by the node weight; the exact gradient of the discrete energy.
ScalarField energy_gradient(const ScalarField& u, const Problem& prob);
ScalarField energy_gradient(const ScalarField& u, const ExponentField& p, const ExponentField& q,
                            double k);

/// |u_i|^{p_i - 2} u_i, the weight-normalized gradient of the mass.
ScalarField constraint_gradient(const ScalarField& u, const SampledExponent& p);
ScalarField constraint_gradient(const ScalarField& u, const ExponentField& p);

struct GNReport {
  /// N (1/p+ - 1/q-), a single scalar standing in for the pointwise exponent.
  double alpha = 0.0;
  double lhs = 0.0;       ///< ||u||_{L^q}
  double rhs_base = 0.0;  ///< ||u||_{L^p}^{1-alpha} ||grad u||_{L^p}^alpha
  double ratio = 0.0;
};

GNReport gn_ratio(const ScalarField& u, const ExponentField& p, const ExponentField& q);

}  // namespace vexp
