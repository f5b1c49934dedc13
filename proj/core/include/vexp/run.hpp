#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vexp/config.hpp"
#include "vexp/pohozaev.hpp"
#include "vexp/solver.hpp"
#include "vexp/thresholds.hpp"

namespace vexp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Everything measured for one (c, sigma) point.
struct PointResult {
  double c = 0.0;
  double sigma = 0.0;
  double r0 = 0.0;  ///< 0 outside remainder sweeps
  SolveResult solve;
  EnergyReport energy;
  PohozaevReport pohozaev;
  RegularityReport regularity;
  bool have_regularity = false;
  PositivityCheck positivity;
  bool have_positivity = false;
  DecayEnvelopes envelopes;
  double tail_mass = 0.0;  ///< int |u|^p over the outermost cell layer
};

/// Solves one point on a prepared setup.
PointResult solve_point(const RunConfig& cfg, const Setup& setup, double c, double sigma,
                        const GaussianConstants& constants);

/// Threshold block for thresholds.json; failures become an "error" entry.
nlohmann::ordered_json thresholds_json(const RunConfig& cfg, const Setup& setup, double sigma, double c,
                                       const GNConstants& gn);

nlohmann::ordered_json config_json(const RunConfig& cfg);
nlohmann::ordered_json solve_json(const RunConfig& cfg, const PointResult& r);
nlohmann::ordered_json pohozaev_json(const PohozaevReport& r);

/// Writes thresholds.json, solve.json, pohozaev.json, trace.csv and field.csv.
/// Returns 0 on convergence, 3 otherwise.
int run_single(const RunConfig& cfg, bool quiet, std::ostream& log);

/// Writes sweep.csv, one row per point in sweep order. Returns 0 when every
/// point converged, 3 otherwise.
int run_sweep(const RunConfig& cfg, bool quiet, std::ostream& log);

/// Column names of sweep.csv.
const std::vector<std::string>& sweep_columns();

/// Worker count from VARD_WORKERS (default: hardware threads), at least 1.
int sweep_workers(std::size_t points);

}  // namespace vexp
