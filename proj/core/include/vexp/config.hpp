#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vexp/exponents.hpp"
#include "vexp/grid.hpp"
#include "vexp/solver.hpp"

namespace vexp {

/// Named radial profile from the registry: "constant", "radial-bump", "plateau".
struct ProfileSpec {
  std::string name = "constant";
  double value = 0.0;  ///< constant
  double base = 0.0;   ///< radial-bump, plateau
  double amp = 0.0;    ///< radial-bump, plateau
  double width = 0.0;  ///< radial-bump
  double r_inner = 0.0, r_outer = 0.0;  ///< plateau
};

/// kind "constant" uses p0; "radial" uses profile; "class_P" blends p0 with
/// the profile through the cutoff at r0.
struct ExponentSpec {
  std::string kind = "constant";
  double p0 = 2.0;
  double r0 = 0.0;
  ProfileSpec profile;
};

struct RunConfig {
  // problem
  int dimension = 1;
  double k = 2.0;
  ExponentSpec p;
  ExponentSpec q;
  /// Conditions checked before solving, from {p_H, q_H, cond_q1, cond_q2}; k > 0 always.
  std::vector<std::string> enforce = {"p_H", "q_H", "cond_q1"};
  // grid
  GridMode mode = GridMode::tensor;
  double L = 6.0;
  int n = 1024;
  // solve
  std::vector<double> c = {0.05};
  std::vector<double> sigma = {1.0};
  std::vector<double> r0;  ///< remainder sweep
  double tol_kkt = 1e-8;
  int max_iters = 5000;
  double step0 = 1.0;
  double armijo_beta = 0.5;
  double armijo_tau = 1e-4;
  Direction direction = Direction::sobolev;
  double precond_shift = 1.0;
  double grad_epsilon = -1.0;  ///< < 0: default rule
  double log_clamp = 1e-14;
  int gn_members = 200;
  // outputs
  std::string out_dir = "out";
  bool write_json = true;
  bool write_csv = true;
  std::uint64_t seed = 20240611;

  bool is_sweep() const noexcept { return c.size() > 1 || sigma.size() > 1 || !r0.empty(); }
};

/// Structural parse of the JSON document; collects every violation.
RunConfig parse_config_json(const nlohmann::json& doc);

/// Reads, parses and validates (admissibility included). Throws ConfigError.
RunConfig parse_config(const std::string& path);

ExponentField build_exponent(const ExponentSpec& spec, ExponentRange range);

/// Grid and exponents of a configuration.
struct Setup {
  GridPtr grid;
  ExponentField p;
  ExponentField q;
  AdmissibilityReport admissibility;
};

/// Builds the setup; exponent range violations are reported as ConfigError.
Setup build_setup(const RunConfig& cfg);

/// Problem-level checks (admissibility, k > 0) with the failing condition named.
std::vector<std::string> admissibility_violations(const RunConfig& cfg, const AdmissibilityReport& rep);

/// Throws ConfigError when admissibility_violations is nonempty.
void validate(const RunConfig& cfg);

nlohmann::ordered_json to_json(const ExponentSpec& spec);

}  // namespace vexp
