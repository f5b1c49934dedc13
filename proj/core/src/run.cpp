#include "vexp/run.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "vexp/error.hpp"
#include "vexp/modular.hpp"

namespace vexp {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

void write_trace(const fs::path& path, const std::vector<TraceRow>& trace) {
  std::string s = "iter,energy,mass_error,step,kkt,norm_X\n";
  for (const auto& r : trace) {
    s += std::to_string(r.iter) + "," + fmt(r.energy) + "," + fmt(r.mass_error) + "," + fmt(r.step) + "," +
         fmt(r.kkt) + "," + fmt(r.norm_X) + "\n";
  }
  write_text(path, s);
}

SolveConfig solve_config(const RunConfig& cfg, double c, double sigma) {
  SolveConfig sc;
  sc.c = c;
  sc.sigma = sigma;
  sc.max_iters = cfg.max_iters;
  sc.step0 = cfg.step0;
  sc.armijo_beta = cfg.armijo_beta;
  sc.armijo_tau = cfg.armijo_tau;
  sc.tol_kkt = cfg.tol_kkt;
  sc.direction = cfg.direction;
  sc.precond_shift = cfg.precond_shift;
  return sc;
}

// int |u|^p over nodes in the outermost cell layer.
double tail_mass(const ScalarField& u, const SampledExponent& ps) {
  const Grid& g = u.grid();
  const double edge = g.truncation() - g.spacing();
  const auto nodes = g.nodes();
  const auto w = g.weights();
  double t = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double extent = g.mode() == GridMode::radial
                              ? radius(nodes[i])
                              : std::max(std::abs(nodes[i][0]), std::abs(nodes[i][1]));
    if (extent > edge) t += w[i] * std::pow(std::abs(u[i]), ps.at_nodes[i]);
  }
  return t;
}

ojson admissibility_json(const AdmissibilityReport& a) {
  ojson j;
  j["dimension"] = a.dimension;
  j["k"] = a.k;
  j["p_minus"] = a.p_minus;
  j["p_plus"] = a.p_plus;
  j["q_minus"] = a.q_minus;
  j["q_plus"] = a.q_plus;
  j["sobolev_gap"] = std::isfinite(a.sobolev_gap) ? ojson(a.sobolev_gap) : ojson("inf");
  j["threshold_q1"] = a.threshold_q1;
  j["threshold_q2"] = a.threshold_q2;
  j["k_positive"] = a.k_positive;
  j["cond_pH"] = a.cond_pH;
  j["cond_qH"] = a.cond_qH;
  j["cond_q1"] = a.cond_q1;
  j["cond_q2"] = a.cond_q2;
  return j;
}

ojson constants_json(const GaussianConstants& g) {
  ojson j;
  j["closed_form"] = g.closed_form;
  j["moment_p_plus"] = g.moment_p_plus;
  j["direct_c1"] = g.direct_c1;
  j["direct_c2"] = g.direct_c2;
  j["const_c1"] = g.const_c1;
  j["const_c2"] = g.const_c2;
  j["c2_bound_warning"] = g.c2_bound_warning;
  return j;
}

ojson gn_json(const GNConstants& g) {
  ojson j;
  j["alpha"] = g.alpha;
  j["alpha_convention"] = "N (1/p+ - 1/q-)";
  j["K_alpha"] = g.k_alpha;
  j["min_ratio"] = g.min_ratio;
  j["K_prime"] = g.k_prime;
  j["K_double_prime"] = g.k_double_prime;
  j["members"] = g.members;
  return j;
}

ojson energy_json(const EnergyReport& e) {
  ojson j;
  j["energy"] = e.energy;
  j["grad_term"] = e.grad_term;
  j["confine_term"] = e.confine_term;
  j["nonlinear_term"] = e.nonlinear_term;
  j["mass"] = e.mass;
  j["norm_X"] = e.norm_X;
  j["modular_X"] = e.modular_X;
  j["modular_q"] = e.modular_q;
  j["grad_epsilon"] = e.grad_epsilon;
  return j;
}

std::string csv_escape(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
  }
  return s;
}

template <class Fn>
void run_pool(std::size_t count, int workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  std::vector<std::thread> threads;
  for (int t = 1; t < workers; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
}

ExponentSpec base_of(const ExponentSpec& s) {
  if (s.kind != "class_P") return s;
  ExponentSpec b;
  b.kind = "constant";
  b.p0 = s.p0;
  return b;
}

// The inner profile's radii scale with r0 so that its drift stays inside 2 r0.
ExponentSpec with_r0(ExponentSpec s, double r0) {
  if (s.kind != "class_P") return s;
  const double f = r0 / s.r0;
  s.r0 = r0;
  s.profile.r_inner *= f;
  s.profile.r_outer *= f;
  s.profile.width *= f;
  return s;
}

bool enforces_pH(const RunConfig& cfg) {
  return std::find(cfg.enforce.begin(), cfg.enforce.end(), "p_H") != cfg.enforce.end();
}

}  // namespace

int sweep_workers(std::size_t points) {
  int w = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("VARD_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) w = v;
  }
  return std::max(1, std::min<int>(w, static_cast<int>(std::max<std::size_t>(points, 1))));
}

PointResult solve_point(const RunConfig& cfg, const Setup& setup, double c, double sigma,
                        const GaussianConstants& constants) {
  const Problem prob(setup.grid, setup.p, setup.q, cfg.k, cfg.grad_epsilon);
  PointResult r{c, sigma, 0.0, minimize(prob, solve_config(cfg, c, sigma))};
  const ScalarField& u = r.solve.u;
  r.energy = energy(u, prob);
  r.pohozaev = pohozaev_terms(u, r.solve.lambda, prob, cfg.log_clamp);
  try {
    r.regularity = regularity_diagnostics(u);
    r.have_regularity = true;
  } catch (const DomainError&) {
    r.have_regularity = false;
  }
  const auto& ps = prob.ps();
  const auto& qs = prob.qs();
  if (qs.minus > ps.minus) {
    r.positivity = positivity_check(r.energy.energy, r.energy.modular_X, r.pohozaev.remainder.R, ps.minus,
                                    ps.plus, qs.minus, setup.grid->dimension());
    r.have_positivity = true;
  }
  r.envelopes = decay_envelopes(c, ps.minus, ps.plus, constants.const_c1 + constants.const_c2);
  r.tail_mass = tail_mass(u, ps);
  return r;
}

ojson thresholds_json(const RunConfig& cfg, const Setup& setup, double sigma, double c, const GNConstants& gn) {
  ojson j;
  j["admissibility"] = admissibility_json(setup.admissibility);
  const auto constants = gaussian_bound_constants(setup.p, *setup.grid, cfg.k);
  j["gaussian_constants"] = constants_json(constants);
  j["gn"] = gn_json(gn);
  j["sigma"] = sigma;
  j["c"] = c;
  try {
    const auto t = threshold_c0(sigma, setup.p, setup.q, *setup.grid, cfg.k, gn.k_prime, gn.k_double_prime);
    ojson tj;
    tj["alpha_used"] = t.alpha_used;
    tj["a1"] = t.a1;
    tj["a2"] = t.a2;
    tj["bracket_c3"] = t.bracket_c3;
    tj["bracket_c4"] = t.bracket_c4;
    tj["c1_sigma"] = t.c1_sigma;
    tj["c2_sigma"] = t.c2_sigma;
    tj["c3_sigma"] = t.c3_sigma;
    tj["c4_sigma"] = t.c4_sigma;
    tj["c0"] = t.c0;
    tj["c_below_c0"] = c < t.c0;
    tj["notes"] = t.notes;
    j["thresholds"] = tj;
  } catch (const ConfigError& e) {
    j["thresholds"] = ojson{{"error", e.violations()}};
  }
  const auto env = decay_envelopes(c, setup.admissibility.p_minus, setup.admissibility.p_plus,
                                   constants.const_c1 + constants.const_c2);
  j["decay_envelopes"] = ojson{{"printed", env.printed}, {"chain", env.chain}};
  return j;
}

ojson config_json(const RunConfig& cfg) {
  ojson j;
  j["problem"] = ojson{{"N", cfg.dimension}, {"k", cfg.k}, {"p", to_json(cfg.p)}, {"q", to_json(cfg.q)},
                       {"enforce", cfg.enforce}};
  j["grid"] = ojson{{"mode", to_string(cfg.mode)}, {"L", cfg.L}, {"n", cfg.n}};
  j["solve"] = ojson{{"c", cfg.c},
                     {"sigma", cfg.sigma},
                     {"tol_kkt", cfg.tol_kkt},
                     {"max_iters", cfg.max_iters},
                     {"step0", cfg.step0},
                     {"armijo_beta", cfg.armijo_beta},
                     {"armijo_tau", cfg.armijo_tau},
                     {"direction", to_string(cfg.direction)},
                     {"precond_shift", cfg.precond_shift},
                     {"grad_epsilon", cfg.grad_epsilon},
                     {"log_clamp", cfg.log_clamp}};
  if (!cfg.r0.empty()) j["sweep"] = ojson{{"r0", cfg.r0}};
  j["seed"] = cfg.seed;
  return j;
}

ojson pohozaev_json(const PohozaevReport& r) {
  ojson j;
  j["lambda"] = r.lambda;
  j["lhs_grad"] = r.lhs_grad;
  j["lhs_confine"] = r.lhs_confine;
  j["lhs_mass"] = r.lhs_mass;
  j["rhs_q_log"] = r.rhs_q_log;
  j["rhs_q_vol"] = r.rhs_q_vol;
  j["rhs_p_log_grad"] = r.rhs_p_log_grad;
  j["rhs_p_log_confine"] = r.rhs_p_log_confine;
  j["rhs_p_log_mass"] = r.rhs_p_log_mass;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["residual"] = r.residual;
  j["relative_residual"] = r.relative_residual;
  j["R"] = r.remainder.R;
  j["R1"] = r.remainder.R1;
  j["R2"] = r.remainder.R2;
  j["R3"] = r.remainder.R3;
  j["R4"] = r.remainder.R4;
  j["weak_form_residual"] = r.weak_form_residual;
  j["weak_form_relative"] = r.weak_form_relative;
  j["log_clamp"] = r.log_clamp;
  return j;
}

ojson solve_json(const RunConfig& cfg, const PointResult& r) {
  ojson j;
  j["config"] = config_json(cfg);
  const SolveResult& s = r.solve;
  j["converged"] = s.converged;
  j["stop_reason"] = s.stop_reason;
  j["iterations"] = s.iterations;
  j["c"] = r.c;
  j["sigma"] = r.sigma;
  j["lambda"] = s.lambda;
  j["gamma"] = s.gamma;
  j["kkt_residual"] = s.kkt;
  j["mass_error"] = s.mass_error;
  j["norm_X"] = s.norm_X;
  j["on_ball_boundary"] = s.on_ball_boundary;
  j["ball_rejections"] = s.ball_rejections;
  j["energy"] = energy_json(r.energy);
  j["tail_mass"] = r.tail_mass;
  j["decay_envelopes"] = ojson{{"printed", r.envelopes.printed}, {"chain", r.envelopes.chain}};
  if (r.have_positivity) {
    j["positivity"] = ojson{{"bracket", r.positivity.bracket},         {"rho_X", r.positivity.rho_X},
                            {"remainder_term", r.positivity.remainder_term}, {"bound", r.positivity.bound},
                            {"energy", r.positivity.energy},           {"margin", r.positivity.margin}};
  }
  if (r.have_regularity) {
    ojson reg;
    ojson ann = ojson::array();
    for (const auto& a : r.regularity.annuli) {
      ann.push_back(ojson{{"r_inner", a.r_inner}, {"r_outer", a.r_outer}, {"sup_abs", a.sup_abs}});
    }
    reg["annuli"] = ann;
    reg["alpha_hat"] = r.regularity.alpha_hat;
    reg["holder_constant"] = r.regularity.holder_constant;
    reg["r_squared"] = r.regularity.r_squared;
    reg["pairs"] = r.regularity.pairs;
    reg["degenerate"] = r.regularity.degenerate;
    j["regularity"] = reg;
  }
  return j;
}

int run_single(const RunConfig& cfg, bool quiet, std::ostream& log) {
  const Setup setup = build_setup(cfg);
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  const double c = cfg.c.front();
  const double sigma = cfg.sigma.front();

  const GNConstants gn = estimate_gn_constant(setup.p, setup.q, setup.grid, cfg.seed, cfg.gn_members);
  const ojson thr = thresholds_json(cfg, setup, sigma, c, gn);
  if (cfg.write_json) write_json(dir / "thresholds.json", thr);
  const auto constants = gaussian_bound_constants(setup.p, *setup.grid, cfg.k);

  PointResult r = [&] {
    try {
      return solve_point(cfg, setup, c, sigma, constants);
    } catch (const DivergenceError& e) {
      if (cfg.write_csv) write_trace(dir / "trace.csv", e.trace());
      if (cfg.write_json) write_json(dir / "solve.json", ojson{{"config", config_json(cfg)}, {"error", e.what()}});
      throw;
    }
  }();

  if (cfg.write_json) {
    write_json(dir / "solve.json", solve_json(cfg, r));
    write_json(dir / "pohozaev.json", pohozaev_json(r.pohozaev));
  }
  if (cfg.write_csv) {
    write_trace(dir / "trace.csv", r.solve.trace);
    write_field_csv(r.solve.u, (dir / "field.csv").string());
  }
  if (!quiet) {
    log << "c = " << fmt(c) << "  sigma = " << fmt(sigma) << "  " << r.solve.stop_reason << " after "
        << r.solve.iterations << " iterations\n"
        << "  gamma = " << fmt(r.solve.gamma) << "  lambda = " << fmt(r.solve.lambda)
        << "  kkt = " << fmt(r.solve.kkt) << "\n"
        << "  pohozaev relative residual = " << fmt(r.pohozaev.relative_residual) << "\n";
    if (thr["thresholds"].contains("c_below_c0") && !thr["thresholds"]["c_below_c0"].get<bool>()) {
      log << "  warning: c is not below the computed c0\n";
    }
  }
  return r.solve.converged ? kExitOk : kExitNumeric;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "index",          "c",         "sigma",        "r0",           "gamma",          "lambda",
      "rho_X",          "norm_X",    "kkt",          "pohozaev_residual", "R",          "R1",
      "R2",             "R3",        "R4",           "energy",       "grad_term",      "confine_term",
      "nonlinear_term", "mass",      "envelope_printed", "envelope_chain", "c0",         "converged",
      "iterations",     "errors"};
  return cols;
}

int run_sweep(const RunConfig& cfg, bool quiet, std::ostream& log) {
  const Setup setup = build_setup(cfg);
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  const auto constants = gaussian_bound_constants(setup.p, *setup.grid, cfg.k);
  const GNConstants gn = estimate_gn_constant(setup.p, setup.q, setup.grid, cfg.seed, cfg.gn_members);

  struct Point {
    double c, sigma, r0;
  };
  std::vector<Point> points;
  if (!cfg.r0.empty()) {
    for (double r0 : cfg.r0) points.push_back({cfg.c.front(), cfg.sigma.front(), r0});
  } else {
    for (double s : cfg.sigma) {
      for (double c : cfg.c) points.push_back({c, s, 0.0});
    }
  }

  // Remainder sweeps evaluate every radius on one field: the minimizer of the
  // problem with class-P exponents frozen at their base value p0.
  std::optional<SolveResult> fixed;
  std::string fixed_error;
  ExponentRange p_range = enforces_pH(cfg) ? sobolev_range(cfg.dimension) : ExponentRange{};
  if (!cfg.r0.empty()) {
    try {
      const ExponentField pb = build_exponent(base_of(cfg.p), p_range);
      const ExponentField qb = build_exponent(base_of(cfg.q), ExponentRange{});
      const Problem prob(setup.grid, pb, qb, cfg.k, cfg.grad_epsilon);
      fixed = minimize(prob, solve_config(cfg, points.front().c, points.front().sigma));
      if (!fixed->converged) fixed_error = "reference solve did not converge: " + fixed->stop_reason;
    } catch (const std::exception& e) {
      fixed_error = e.what();
    }
  }

  std::vector<std::string> rows(points.size());
  std::vector<char> ok(points.size(), 0);
  auto row_for = [&](std::size_t i) {
    const Point& pt = points[i];
    std::vector<double> v(sweep_columns().size() - 4, std::nan(""));
    // v indexes columns 1..22
    int conv = 0, iters = 0;
    std::string err;
    try {
      double c0 = std::nan("");
      try {
        c0 = threshold_c0(pt.sigma, setup.p, setup.q, *setup.grid, cfg.k, gn.k_prime, gn.k_double_prime).c0;
      } catch (const ConfigError& e) {
        err = e.violations().front();
      }
      v[21] = c0;
      if (cfg.r0.empty()) {
        const PointResult r = solve_point(cfg, setup, pt.c, pt.sigma, constants);
        v[3] = r.solve.gamma;
        v[4] = r.solve.lambda;
        v[5] = r.energy.modular_X;
        v[6] = r.solve.norm_X;
        v[7] = r.solve.kkt;
        v[8] = r.pohozaev.relative_residual;
        v[9] = r.pohozaev.remainder.R;
        v[10] = r.pohozaev.remainder.R1;
        v[11] = r.pohozaev.remainder.R2;
        v[12] = r.pohozaev.remainder.R3;
        v[13] = r.pohozaev.remainder.R4;
        v[14] = r.energy.energy;
        v[15] = r.energy.grad_term;
        v[16] = r.energy.confine_term;
        v[17] = r.energy.nonlinear_term;
        v[18] = r.energy.mass;
        v[19] = r.envelopes.printed;
        v[20] = r.envelopes.chain;
        conv = r.solve.converged;
        iters = r.solve.iterations;
        if (!conv) err = (err.empty() ? "" : err + "; ") + "not converged: " + r.solve.stop_reason;
      } else {
        if (!fixed) throw NumericError(fixed_error);
        const ExponentField p = build_exponent(with_r0(cfg.p, pt.r0), p_range);
        const ExponentField q = build_exponent(with_r0(cfg.q, pt.r0), ExponentRange{});
        const Problem prob(setup.grid, p, q, cfg.k, cfg.grad_epsilon);
        const auto e = energy(fixed->u, prob);
        const auto pz = pohozaev_terms(fixed->u, fixed->lambda, prob, cfg.log_clamp);
        const auto ps = sample_exponent(p, *setup.grid);
        const auto env = decay_envelopes(pt.c, ps.minus, ps.plus, constants.const_c1 + constants.const_c2);
        v[3] = fixed->gamma;
        v[4] = fixed->lambda;
        v[5] = e.modular_X;
        v[6] = e.norm_X;
        v[7] = fixed->kkt;
        v[8] = pz.relative_residual;
        v[9] = pz.remainder.R;
        v[10] = pz.remainder.R1;
        v[11] = pz.remainder.R2;
        v[12] = pz.remainder.R3;
        v[13] = pz.remainder.R4;
        v[14] = e.energy;
        v[15] = e.grad_term;
        v[16] = e.confine_term;
        v[17] = e.nonlinear_term;
        v[18] = e.mass;
        v[19] = env.printed;
        v[20] = env.chain;
        conv = fixed->converged;
        iters = fixed->iterations;
        if (!fixed_error.empty()) err = (err.empty() ? "" : err + "; ") + fixed_error;
      }
    } catch (const std::exception& e) {
      err = (err.empty() ? "" : err + "; ") + e.what();
      conv = 0;
    }
    v[0] = pt.c;
    v[1] = pt.sigma;
    v[2] = pt.r0;
    std::string row = std::to_string(i);
    for (double x : v) row += "," + (std::isfinite(x) ? fmt(x) : std::string());
    row += "," + std::to_string(conv) + "," + std::to_string(iters) + "," + csv_escape(err) + "\n";
    rows[i] = std::move(row);
    ok[i] = conv;
  };
  run_pool(points.size(), sweep_workers(points.size()), row_for);

  std::string csv;
  for (std::size_t i = 0; i < sweep_columns().size(); ++i) csv += (i ? "," : "") + sweep_columns()[i];
  csv += "\n";
  for (const auto& r : rows) csv += r;
  write_text(dir / "sweep.csv", csv);
  if (!quiet) log << "sweep: " << points.size() << " points written to " << (dir / "sweep.csv").string() << "\n";
  return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; }) ? kExitOk : kExitNumeric;
}

}  // namespace vexp
