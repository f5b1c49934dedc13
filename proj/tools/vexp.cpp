// Command-line driver: single runs and sweeps from a JSON configuration.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vexp/config.hpp"
#include "vexp/error.hpp"
#include "vexp/run.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "a,b,c" -> {a, b, c}; every entry must be a finite positive number.
std::vector<double> parse_list(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(flag + ": values must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty sweep list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized solutions of variable-exponent p(x)-Laplacian problems"};
  std::string config_path, out_dir, sweep_c, sweep_sigma, sweep_r0;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides outputs.directory)");
  auto* oc = app.add_option("--sweep-c", sweep_c, "comma-separated mass values");
  auto* os = app.add_option("--sweep-sigma", sweep_sigma, "comma-separated ball radii");
  auto* orr = app.add_option("--sweep-r0", sweep_r0, "comma-separated class-P radii");
  app.add_flag("--quiet", quiet, "suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : vexp::kExitConfig;
  }

  try {
    vexp::RunConfig cfg = vexp::parse_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (*oc) cfg.c = parse_list("--sweep-c", sweep_c);
    if (*os) cfg.sigma = parse_list("--sweep-sigma", sweep_sigma);
    if (*orr) {
      cfg.r0 = parse_list("--sweep-r0", sweep_r0);
      if (cfg.p.kind != "class_P" && cfg.q.kind != "class_P") {
        throw UsageError("--sweep-r0 needs a class_P exponent");
      }
    }
    if (!cfg.r0.empty() && (cfg.c.size() > 1 || cfg.sigma.size() > 1)) {
      throw UsageError("an r0 sweep takes a single c and sigma");
    }
    return cfg.is_sweep() ? vexp::run_sweep(cfg, quiet, std::cerr) : vexp::run_single(cfg, quiet, std::cerr);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return vexp::kExitConfig;
  } catch (const vexp::ConfigError& e) {
    std::cerr << "configuration rejected:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return vexp::kExitConfig;
  } catch (const vexp::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return vexp::kExitNumeric;
  } catch (const vexp::DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return vexp::kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vexp::kExitNumeric;
  }
}
