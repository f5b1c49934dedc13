#pragma once

#include <span>
#include <string>
#include <vector>

#include "vexp/exponents.hpp"
#include "vexp/grid.hpp"

namespace vexp {

/// Exponent and weight power k of the space L^{p(x)}(|x|^k).
struct ModularSpec {
  ExponentField exponent;
  double k = 0.0;
};

/// One quadrature block of a modular: sum_i weight_i * factor_i * |value_i|^{exponent_i}.
/// An empty `factors` span means factor 1.
struct ModularPart {
  std::span<const double> values;
  std::span<const double> exponents;
  std::span<const double> weights;
  std::span<const double> factors = {};
};

double modular_sum(std::span<const ModularPart> parts);

/// Luxemburg norm inf{eta > 0 : sum of parts at u/eta <= 1}. Zero for a zero
/// field. Solved in log(eta) with a TOMS 748 bracket built from the
/// modular-norm inequalities.
double luxemburg(std::span<const ModularPart> parts);

/// rho(u) = int |x|^k |u|^{p(x)} dx
double modular_lp(const ScalarField& u, const ModularSpec& spec);

double luxemburg_norm(const ScalarField& u, const ModularSpec& spec);

/// rho_X(u) = int |grad u|^p + int |x|^k |u|^p, gradient taken at the grid's
/// gradient samples.
double modular_X(const ScalarField& u, const ExponentField& p, double k);
/// Same integrands divided by p(x).
double modular_X_tilde(const ScalarField& u, const ExponentField& p, double k);

/// ||u||_{L^p(|x|^k)} + ||grad u||_{L^p}.
double norm_X(const ScalarField& u, const ExponentField& p, double k);

/// Luxemburg norm induced by rho_X itself; equivalent to norm_X within a
/// factor of two.
double norm_X_modular(const ScalarField& u, const ExponentField& p, double k);

struct RelationCheck {
  std::string name;
  bool holds = true;
  /// Relative slack of the inequality; +inf for vacuous items.
  double margin = 0.0;
};

struct ModularRelationReport {
  double norm = 0.0;
  double rho = 0.0;
  double p_minus = 0.0;
  double p_plus = 0.0;
  std::vector<RelationCheck> items;

  bool all_hold() const;
};

/// The norm-modular relations for a (norm, modular) pair:
///   i_lt / i_eq / i_gt : norm <1 (=1, >1) iff rho <1 (=1, >1)
///   ii                 : norm > 1 => norm^{p-} <= rho <= norm^{p+}
///   iii                : norm < 1 => norm^{p+} <= rho <= norm^{p-}
ModularRelationReport relation_report(double norm, double rho, double p_minus, double p_plus);

ModularRelationReport check_modular_norm_relations(const ScalarField& u, const ModularSpec& spec);

/// Same relations for rho_X against norm_X_modular.
ModularRelationReport check_space_relations(const ScalarField& u, const ExponentField& p, double k);

}  // namespace vexp
