#include "vexp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "vexp/error.hpp"

namespace vexp {

using nlohmann::json;

namespace {

// Reads fields while collecting violations instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  const json* object(const json& parent, const std::string& key, const std::string& path, bool required) {
    if (!parent.contains(key)) {
      if (required) errors_.push_back(path + key + ": missing");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      errors_.push_back(path + key + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  void number(const json& parent, const std::string& key, const std::string& path, double& out,
              bool required = false) {
    if (!parent.contains(key) || parent.at(key).is_null()) {
      if (required) errors_.push_back(path + key + ": missing");
      return;
    }
    const json& v = parent.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      errors_.push_back(path + key + ": expected a finite number");
      return;
    }
    out = v.get<double>();
  }

  void integer(const json& parent, const std::string& key, const std::string& path, int& out,
               bool required = false) {
    if (!parent.contains(key)) {
      if (required) errors_.push_back(path + key + ": missing");
      return;
    }
    const json& v = parent.at(key);
    if (!v.is_number_integer()) {
      errors_.push_back(path + key + ": expected an integer");
      return;
    }
    out = v.get<int>();
  }

  void string(const json& parent, const std::string& key, const std::string& path, std::string& out,
              bool required = false) {
    if (!parent.contains(key)) {
      if (required) errors_.push_back(path + key + ": missing");
      return;
    }
    const json& v = parent.at(key);
    if (!v.is_string()) {
      errors_.push_back(path + key + ": expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  /// A number or a nonempty array of numbers.
  void numbers(const json& parent, const std::string& key, const std::string& path, std::vector<double>& out) {
    if (!parent.contains(key)) return;
    const json& v = parent.at(key);
    std::vector<double> vals;
    if (v.is_number()) {
      vals.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
      for (const auto& e : v) {
        if (!e.is_number()) {
          errors_.push_back(path + key + ": expected numbers");
          return;
        }
        vals.push_back(e.get<double>());
      }
    } else {
      errors_.push_back(path + key + ": expected a number or a nonempty list of numbers");
      return;
    }
    out = std::move(vals);
  }

  void error(const std::string& msg) { errors_.push_back(msg); }

 private:
  std::vector<std::string>& errors_;
};

void read_profile(Reader& rd, const json& j, const std::string& path, ProfileSpec& out) {
  rd.string(j, "profile", path, out.name, true);
  if (out.name == "constant") {
    rd.number(j, "value", path, out.value, true);
  } else if (out.name == "radial-bump") {
    rd.number(j, "base", path, out.base, true);
    rd.number(j, "amp", path, out.amp, true);
    rd.number(j, "width", path, out.width, true);
  } else if (out.name == "plateau") {
    rd.number(j, "base", path, out.base, true);
    rd.number(j, "amp", path, out.amp, true);
    rd.number(j, "r_inner", path, out.r_inner, true);
    rd.number(j, "r_outer", path, out.r_outer, true);
  } else {
    rd.error(path + "profile: unknown profile '" + out.name + "' (constant, radial-bump, plateau)");
  }
}

void read_exponent(Reader& rd, const json& j, const std::string& path, ExponentSpec& out) {
  rd.string(j, "kind", path, out.kind, true);
  if (out.kind == "constant") {
    rd.number(j, "p0", path, out.p0, true);
  } else if (out.kind == "radial") {
    read_profile(rd, j, path, out.profile);
  } else if (out.kind == "class_P") {
    rd.number(j, "p0", path, out.p0, true);
    rd.number(j, "r0", path, out.r0, true);
    if (const json* inner = rd.object(j, "inner", path, true)) read_profile(rd, *inner, path + "inner.", out.profile);
    if (!(out.r0 > 0.0)) rd.error(path + "r0: must be > 0");
  } else {
    rd.error(path + "kind: unknown exponent kind '" + out.kind + "' (constant, radial, class_P)");
  }
}

RadialProfile build_profile(const ProfileSpec& s) {
  if (s.name == "radial-bump") return bump_profile(s.base, s.amp, s.width);
  if (s.name == "plateau") return plateau_profile(s.base, s.amp, s.r_inner, s.r_outer);
  return constant_profile(s.value);
}

nlohmann::ordered_json profile_json(const ProfileSpec& s) {
  nlohmann::ordered_json j;
  j["profile"] = s.name;
  if (s.name == "constant") {
    j["value"] = s.value;
  } else if (s.name == "radial-bump") {
    j["base"] = s.base;
    j["amp"] = s.amp;
    j["width"] = s.width;
  } else {
    j["base"] = s.base;
    j["amp"] = s.amp;
    j["r_inner"] = s.r_inner;
    j["r_outer"] = s.r_outer;
  }
  return j;
}

bool enforced(const RunConfig& cfg, const std::string& name) {
  return std::find(cfg.enforce.begin(), cfg.enforce.end(), name) != cfg.enforce.end();
}

}  // namespace

RunConfig parse_config_json(const json& doc) {
  std::vector<std::string> errors;
  Reader rd(errors);
  RunConfig cfg;
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});

  if (const json* pb = rd.object(doc, "problem", "", true)) {
    rd.integer(*pb, "N", "problem.", cfg.dimension, true);
    rd.number(*pb, "k", "problem.", cfg.k, true);
    if (const json* p = rd.object(*pb, "p", "problem.", true)) read_exponent(rd, *p, "problem.p.", cfg.p);
    if (const json* q = rd.object(*pb, "q", "problem.", true)) read_exponent(rd, *q, "problem.q.", cfg.q);
    if (pb->contains("enforce")) {
      const json& e = pb->at("enforce");
      static const std::set<std::string> known = {"p_H", "q_H", "cond_q1", "cond_q2"};
      if (!e.is_array()) {
        rd.error("problem.enforce: expected a list");
      } else {
        cfg.enforce.clear();
        for (const auto& item : e) {
          if (!item.is_string() || !known.count(item.get<std::string>())) {
            rd.error("problem.enforce: entries must be among p_H, q_H, cond_q1, cond_q2");
            continue;
          }
          cfg.enforce.push_back(item.get<std::string>());
        }
      }
    }
  }

  if (const json* gb = rd.object(doc, "grid", "", true)) {
    std::string mode = "tensor";
    rd.string(*gb, "mode", "grid.", mode);
    if (mode == "radial" || mode == "tensor") {
      cfg.mode = grid_mode_from_string(mode);
    } else {
      rd.error("grid.mode: expected 'radial' or 'tensor'");
    }
    rd.number(*gb, "L", "grid.", cfg.L, true);
    rd.integer(*gb, "n", "grid.", cfg.n, true);
  }

  if (const json* sb = rd.object(doc, "solve", "", true)) {
    rd.numbers(*sb, "c", "solve.", cfg.c);
    rd.numbers(*sb, "sigma", "solve.", cfg.sigma);
    rd.number(*sb, "tol_kkt", "solve.", cfg.tol_kkt);
    rd.integer(*sb, "max_iters", "solve.", cfg.max_iters);
    rd.number(*sb, "step0", "solve.", cfg.step0);
    rd.number(*sb, "armijo_beta", "solve.", cfg.armijo_beta);
    rd.number(*sb, "armijo_tau", "solve.", cfg.armijo_tau);
    rd.number(*sb, "precond_shift", "solve.", cfg.precond_shift);
    rd.number(*sb, "grad_epsilon", "solve.", cfg.grad_epsilon);
    rd.number(*sb, "log_clamp", "solve.", cfg.log_clamp);
    rd.integer(*sb, "gn_members", "solve.", cfg.gn_members);
    std::string dir = "sobolev";
    rd.string(*sb, "direction", "solve.", dir);
    if (dir == "sobolev") {
      cfg.direction = Direction::sobolev;
    } else if (dir == "l2") {
      cfg.direction = Direction::l2;
    } else {
      rd.error("solve.direction: expected 'sobolev' or 'l2'");
    }
    std::string init = "trial";
    rd.string(*sb, "init", "solve.", init);
    if (init != "trial") rd.error("solve.init: only 'trial' is supported in configuration files");
  }

  if (doc.contains("sweep")) {
    if (const json* sw = rd.object(doc, "sweep", "", false)) {
      rd.numbers(*sw, "c", "sweep.", cfg.c);
      rd.numbers(*sw, "sigma", "sweep.", cfg.sigma);
      rd.numbers(*sw, "r0", "sweep.", cfg.r0);
    }
  }

  if (doc.contains("outputs")) {
    if (const json* ob = rd.object(doc, "outputs", "", false)) {
      rd.string(*ob, "directory", "outputs.", cfg.out_dir);
      if (ob->contains("formats")) {
        const json& f = ob->at("formats");
        cfg.write_json = cfg.write_csv = false;
        if (!f.is_array()) {
          rd.error("outputs.formats: expected a list");
        } else {
          for (const auto& item : f) {
            const std::string s = item.is_string() ? item.get<std::string>() : "";
            if (s == "json") {
              cfg.write_json = true;
            } else if (s == "csv") {
              cfg.write_csv = true;
            } else {
              rd.error("outputs.formats: entries must be 'json' or 'csv'");
            }
          }
        }
      }
    }
  }

  if (doc.contains("seed")) {
    if (doc.at("seed").is_number_unsigned()) {
      cfg.seed = doc.at("seed").get<std::uint64_t>();
    } else {
      rd.error("seed: expected a nonnegative integer");
    }
  }

  // Value ranges.
  if (cfg.dimension < 1 || cfg.dimension > 3) errors.push_back("problem.N: must be 1, 2 or 3");
  if (cfg.mode == GridMode::tensor && cfg.dimension > 2) {
    errors.push_back("grid: tensor grids support N <= 2 only; use radial mode for N = 3");
  }
  if (!(cfg.L > 0.0)) errors.push_back("grid.L: must be > 0");
  if (cfg.n < 16) errors.push_back("grid.n: must be >= 16");
  for (double c : cfg.c) {
    if (!(c > 0.0)) errors.push_back("solve.c: mass levels must be > 0");
  }
  for (double s : cfg.sigma) {
    if (!(s > 0.0)) errors.push_back("solve.sigma: must be > 0");
  }
  for (double r : cfg.r0) {
    if (!(r > 0.0)) errors.push_back("sweep.r0: radii must be > 0");
  }
  if (!(cfg.armijo_tau > 0.0 && cfg.armijo_tau < 1.0)) errors.push_back("solve.armijo_tau: must lie in (0, 1)");
  if (!(cfg.armijo_beta > 0.0 && cfg.armijo_beta < 1.0)) errors.push_back("solve.armijo_beta: must lie in (0, 1)");
  if (!(cfg.tol_kkt > 0.0)) errors.push_back("solve.tol_kkt: must be > 0");
  if (cfg.max_iters < 0) errors.push_back("solve.max_iters: must be >= 0");
  if (!(cfg.step0 >= 0.0)) errors.push_back("solve.step0: must be >= 0");
  if (!(cfg.log_clamp > 0.0)) errors.push_back("solve.log_clamp: must be > 0");
  if (cfg.gn_members < 1) errors.push_back("solve.gn_members: must be >= 1");

  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

ExponentField build_exponent(const ExponentSpec& spec, ExponentRange range) {
  if (spec.kind == "constant") return make_constant_exponent(spec.p0, range);
  // The radial profile alone may leave the range as long as the blend does not.
  const ExponentRange open{1.0, std::numeric_limits<double>::infinity()};
  if (spec.kind == "radial") return make_radial_exponent(build_profile(spec.profile), range);
  const ExponentField inner = make_radial_exponent(build_profile(spec.profile), open);
  return make_class_P_exponent(spec.p0, inner, spec.r0, range);
}

Setup build_setup(const RunConfig& cfg) {
  std::vector<std::string> errors;
  GridPtr grid;
  try {
    grid = build_grid(cfg.dimension, cfg.mode, cfg.L, cfg.n);
  } catch (const DomainError& e) {
    errors.push_back(std::string("grid: ") + e.what());
  }
  const ExponentRange p_range = enforced(cfg, "p_H") ? sobolev_range(cfg.dimension) : ExponentRange{};
  std::optional<ExponentField> p, q;
  try {
    p = build_exponent(cfg.p, p_range);
  } catch (const DomainError& e) {
    const bool range = std::string(e.what()).find("outside") != std::string::npos;
    errors.push_back(std::string(range && enforced(cfg, "p_H") ? "(p_H) violated: " : "problem.p: ") + e.what());
  }
  try {
    q = build_exponent(cfg.q, ExponentRange{});
  } catch (const DomainError& e) {
    errors.push_back(std::string("problem.q: ") + e.what());
  }
  if (!errors.empty()) throw ConfigError(errors);
  const auto rep = check_admissibility(*p, *q, cfg.dimension, cfg.k, *grid);
  return {grid, *p, *q, rep};
}

std::vector<std::string> admissibility_violations(const RunConfig& cfg, const AdmissibilityReport& rep) {
  std::vector<std::string> v;
  if (!rep.k_positive) v.push_back("k>0 violated: confinement power k must be positive");
  if (enforced(cfg, "p_H") && !rep.cond_pH) {
    v.push_back("(p_H) violated: need 1 < p- and p+ < N (p- = " + std::to_string(rep.p_minus) +
                ", p+ = " + std::to_string(rep.p_plus) + ")");
  }
  if (enforced(cfg, "q_H") && !rep.cond_qH) {
    v.push_back("(q_H) violated: need p < q < p* (inf(p* - q) = " + std::to_string(rep.sobolev_gap) + ")");
  }
  if (enforced(cfg, "cond_q1") && !rep.cond_q1) {
    v.push_back("cond_q1 violated: need p+ + (p+)^2/N = " + std::to_string(rep.threshold_q1) +
                " < q- = " + std::to_string(rep.q_minus) + " and q below p*");
  }
  if (enforced(cfg, "cond_q2") && !rep.cond_q2) {
    v.push_back("cond_q2 violated: need 2p+ - p- + p+p-/N = " + std::to_string(rep.threshold_q2) +
                " < q- = " + std::to_string(rep.q_minus) + " and q below p*");
  }
  return v;
}

void validate(const RunConfig& cfg) {
  const Setup s = build_setup(cfg);
  const auto v = admissibility_violations(cfg, s.admissibility);
  if (!v.empty()) throw ConfigError(v);
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open configuration file " + path});
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  RunConfig cfg = parse_config_json(doc);
  validate(cfg);
  return cfg;
}

nlohmann::ordered_json to_json(const ExponentSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = spec.kind;
  if (spec.kind != "radial") j["p0"] = spec.p0;
  if (spec.kind == "class_P") {
    j["r0"] = spec.r0;
    j["inner"] = profile_json(spec.profile);
  } else if (spec.kind == "radial") {
    j["profile"] = profile_json(spec.profile)["profile"];
    for (auto& [key, val] : profile_json(spec.profile).items()) j[key] = val;
  }
  return j;
}

}  // namespace vexp
