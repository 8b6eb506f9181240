// phasebench: thermo tables, equilibrium solves, geometry verification, and
// radial Stefan runs, driven by one config file. See README for the schema.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "phasebench/config.hpp"
#include "phasebench/equilibria.hpp"
#include "phasebench/error.hpp"
#include "phasebench/geometry.hpp"
#include "phasebench/stefan.hpp"
#include "phasebench/thermo.hpp"

namespace fs = std::filesystem;
using namespace phasebench;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* v = std::getenv("PHASEBENCH_LOG");
  if (!v) return LogLevel::info;
  const std::string s = v;
  if (s == "quiet") return LogLevel::quiet;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  std::fprintf(stderr, "warning: unknown PHASEBENCH_LOG value '%s', using info\n", v);
  return LogLevel::info;
}

void usage(std::FILE* out) {
  std::fprintf(out,
               "usage: phasebench <subcommand> --config <path> --out <dir> [--seed <u64>]\n"
               "subcommands:\n"
               "  thermo-table    tabulate psi/eta/eps/kappa and jump quantities over a theta range\n"
               "  equilibria      solve phi(theta) = E0 and classify stability\n"
               "  geometry-check  curvature convergence study against the polar oracle\n"
               "  simulate        radial two-phase run with energy/entropy diagnostics\n"
               "environment: PHASEBENCH_LOG = quiet | info | debug (default info)\n"
               "--seed is reserved for reproducibility plumbing; no subcommand is stochastic.\n");
}

std::FILE* open_out(const fs::path& p) {
  std::FILE* f = std::fopen(p.string().c_str(), "w");
  if (!f)
    fail(errc::missing_file, "out-file", "cannot open " + p.string() + " for writing");
  return f;
}

void require_key(const RunConfig& cfg, const std::string& key, const char* sub) {
  if (!cfg.has(key))
    fail(errc::invariant_violation, "missing-required-key",
         std::string(sub) + ": config key '" + key + "' is required");
}

int run_thermo_table(const RunConfig& cfg, const fs::path& dir, LogLevel lvl) {
  if (cfg.tab_samples < 2)
    fail(errc::invariant_violation, "sample-count",
         "thermo-table: need thermo.samples >= 2");
  if (!(cfg.tab_theta_min > 0.0) || !(cfg.tab_theta_max > cfg.tab_theta_min))
    fail(errc::invariant_violation, "theta-domain",
         "thermo-table: need 0 < thermo.theta_min < thermo.theta_max");
  std::FILE* f = open_out(dir / "thermo_table.csv");
  std::fprintf(f, "theta,psi1,psi2,eta1,eta2,eps1,eps2,kappa1,kappa2,psi_jump,latent\n");
  for (int k = 0; k < cfg.tab_samples; ++k) {
    const double th = cfg.tab_theta_min +
                      (cfg.tab_theta_max - cfg.tab_theta_min) * k / (cfg.tab_samples - 1);
    const auto e1 = eval_phase(cfg.medium.phase1, th);
    const auto e2 = eval_phase(cfg.medium.phase2, th);
    const auto j = eval_jumps(cfg.medium, th);
    std::fprintf(f,
                 "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 th, e1.psi, e2.psi, e1.eta, e2.eta, e1.eps, e2.eps, e1.kappa,
                 e2.kappa, j.psi_jump, j.latent);
  }
  std::fclose(f);
  if (lvl >= LogLevel::info)
    std::fprintf(stderr, "thermo-table: %d rows -> %s\n", cfg.tab_samples,
                 (dir / "thermo_table.csv").string().c_str());
  return 0;
}

int run_equilibria(const RunConfig& cfg, const fs::path& dir, LogLevel lvl) {
  require_key(cfg, "equilibria.E0", "equilibria");
  EquilibriumProblem p;
  p.medium = cfg.medium;
  p.n = cfg.n;
  p.domain_volume = cfg.has("domain.volume")
                        ? cfg.volume
                        : unit_sphere_area(cfg.n) * std::pow(cfg.R_out, cfg.n) / cfg.n;
  p.m = cfg.m;
  p.R_star = cfg.R_star;
  p.E0 = cfg.E0;
  p.theta_min = cfg.eq_theta_min;
  p.theta_max = cfg.eq_theta_max;
  const auto states = solve_equilibria(p);

  std::FILE* f = open_out(dir / "equilibria.csv");
  std::fprintf(f, "theta,radius,pressure_jump,phi,phi_prime,stable\n");
  for (const auto& st : states)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", st.theta, st.radius,
                 st.pressure_jump, st.phi, st.phi_prime,
                 st.stable ? "true" : "false");
  std::fclose(f);
  if (lvl >= LogLevel::info)
    std::fprintf(stderr, "equilibria: %zu roots -> %s\n", states.size(),
                 (dir / "equilibria.csv").string().c_str());
  return 0;
}

int run_geometry_check(const RunConfig& cfg, const fs::path& dir, LogLevel lvl) {
  struct Family {
    const char* name;
    double (*radius)(double phi, double R);
  };
  static const Family families[] = {
      {"offcenter_circle",
       [](double phi, double R) {
         const double d = 0.3;
         return R * (d * std::cos(phi) +
                     std::sqrt(1.0 - d * d * std::sin(phi) * std::sin(phi)));
       }},
      {"ellipse",
       [](double phi, double R) {
         const double c = std::cos(phi), s = std::sin(phi);
         return 1.2 * R / std::sqrt(1.44 * c * c + s * s);
       }},
  };
  static const int grids[] = {64, 128, 256, 512};

  std::FILE* f = open_out(dir / "geometry_check.csv");
  std::fprintf(f, "test,grid_N,sup_error,observed_order\n");
  for (const auto& fam : families) {
    double prev_err = 0.0;
    bool first = true;
    for (int N : grids) {
      SphereChart chart;
      chart.n = 2;
      chart.R_sigma = cfg.R_sigma;
      chart.a = cfg.tube_a;
      chart.grid_n = N;
      validate_chart(chart);
      HeightField h;
      std::vector<double> r(N);
      h.values.resize(N);
      for (int i = 0; i < N; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / N;
        r[i] = fam.radius(phi, cfg.R_sigma);
        h.values[i] = r[i] - cfg.R_sigma;
      }
      const auto H = curvature(chart, h);
      const auto Ho = curvature_oracle(r);
      double err = 0.0;
      for (int i = 0; i < N; ++i) err = std::max(err, std::fabs(H[i] - Ho[i]));
      if (first)
        std::fprintf(f, "%s,%d,%.17g,\n", fam.name, N, err);
      else
        std::fprintf(f, "%s,%d,%.17g,%.17g\n", fam.name, N, err,
                     std::log2(prev_err / err));
      prev_err = err;
      first = false;
    }
  }
  std::fclose(f);
  if (lvl >= LogLevel::info)
    std::fprintf(stderr, "geometry-check: 2 families x 4 grids -> %s\n",
                 (dir / "geometry_check.csv").string().c_str());
  return 0;
}

int run_simulate(const RunConfig& cfg, const fs::path& dir, LogLevel lvl) {
  require_key(cfg, "sim.t_end", "simulate");
  require_key(cfg, "sim.dt", "simulate");
  if (cfg.n != 2 && cfg.n != 3)
    fail(errc::invariant_violation, "dimension", "simulate: domain.n must be 2 or 3");
  if (!(cfg.dt > 0.0))
    fail(errc::invariant_violation, "time-step", "simulate: sim.dt must be positive");
  if (!(cfg.t_end >= 0.0))
    fail(errc::invariant_violation, "time-horizon",
         "simulate: sim.t_end must be nonnegative");

  RadialConfig rc;
  rc.medium = cfg.medium;
  rc.n = cfg.n;
  rc.R_out = cfg.R_out;
  rc.N1 = cfg.N1;
  rc.N2 = cfg.N2;
  rc.t_end = cfg.t_end;
  rc.dt = cfg.dt;
  rc.output_every = cfg.output_every;
  rc.delta_R = cfg.delta_R;
  rc.l_min = cfg.l_min;
  rc.theta_cap = cfg.theta_cap;
  rc.budget_after = cfg.budget_after;
  rc.max_steps = cfg.max_steps;

  std::optional<RadialState> init;
  if (!cfg.resume.empty()) {
    const auto loaded = load_state(cfg.resume);
    if (loaded.n != cfg.n || loaded.R_out != cfg.R_out)
      fail(errc::invariant_violation, "state-shape",
           "simulate: checkpoint domain (n, R_out) does not match the config");
    if (static_cast<int>(loaded.state.theta1.size()) != cfg.N1 ||
        static_cast<int>(loaded.state.theta2.size()) != cfg.N2)
      fail(errc::invariant_violation, "state-shape",
           "simulate: checkpoint grid sizes do not match sim.N1/sim.N2");
    init = loaded.state;
  } else {
    require_key(cfg, "sim.R0", "simulate");
    if (std::isnan(cfg.theta_init1) || std::isnan(cfg.theta_init2))
      fail(errc::invariant_violation, "missing-required-key",
           "simulate: set sim.theta_init or both sim.theta_init1 and sim.theta_init2");
    if (!(cfg.delta_R > 0.0) || !(cfg.R0 > cfg.delta_R) ||
        !(cfg.R0 < cfg.R_out - cfg.delta_R))
      fail(errc::invariant_violation, "interface-position",
           "simulate: need 0 < delta_R < R0 < R_out - delta_R");
    rc.R0 = cfg.R0;
    rc.theta10 = cfg.theta_init1;
    rc.theta20 = cfg.theta_init2;
  }

  const auto rep = run(rc, init);

  std::FILE* f = open_out(dir / "simulate.csv");
  std::fprintf(f, "t,R,theta_gamma,j,V,E,Phi,production\n");
  for (const auto& r : rep.records) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.R,
                 r.theta_gamma, r.j, r.V, r.E, r.Phi, r.production);
    if (lvl >= LogLevel::debug)
      std::fprintf(stderr, "record t=%.17g R=%.17g E=%.17g Phi=%.17g\n", r.t, r.R,
                   r.E, r.Phi);
  }
  std::fclose(f);

  std::FILE* rf = open_out(dir / "report.txt");
  std::fprintf(rf, "status = %s\n",
               rep.abort_reason.empty() ? "completed" : rep.abort_reason.c_str());
  std::fprintf(rf, "steps = %lld\n", rep.steps);
  std::fprintf(rf, "final_t = %.17g\n", rep.final_state.t);
  std::fprintf(rf, "final_R = %.17g\n", rep.final_state.R);
  std::fprintf(rf, "theta_mean_final = %.17g\n", rep.theta_mean_final);
  std::fprintf(rf, "max_energy_drift = %.17g\n", rep.max_energy_drift);
  std::fprintf(rf, "min_entropy_increment = %.17g\n", rep.min_entropy_increment);
  std::fprintf(rf, "max_budget_residual = %.17g\n", rep.max_budget_residual);
  std::fprintf(rf, "predicted_valid = %s\n", rep.predicted_valid ? "true" : "false");
  if (rep.predicted_valid) {
    std::fprintf(rf, "predicted_theta = %.17g\n", rep.predicted_theta);
    std::fprintf(rf, "predicted_R = %.17g\n", rep.predicted_R);
  }
  std::fclose(rf);

  save_state((dir / "state.txt").string(), rc, rep.final_state);

  if (lvl >= LogLevel::info)
    std::fprintf(stderr, "simulate: %lld steps, %zu records -> %s\n", rep.steps,
                 rep.records.size(), (dir / "simulate.csv").string().c_str());
  if (!rep.abort_reason.empty()) {
    std::fprintf(stderr, "simulate: guarded abort at t=%.17g\n", rep.final_state.t);
    std::fprintf(stderr, "ERROR code=1 reason=%s\n", rep.abort_reason.c_str());
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  const LogLevel lvl = log_level();

  if (argc >= 2 && (!std::strcmp(argv[1], "--help") || !std::strcmp(argv[1], "-h") ||
                    !std::strcmp(argv[1], "help"))) {
    usage(stdout);
    return 0;
  }
  static const std::set<std::string> subs = {"thermo-table", "equilibria",
                                             "geometry-check", "simulate"};
  const std::string sub = argc >= 2 ? argv[1] : "";
  if (!subs.count(sub)) {
    usage(stderr);
    std::fprintf(stderr, "ERROR code=64 reason=unknown-subcommand\n");
    return 64;
  }

  std::string config_path, out_dir;
  bool have_config = false, have_out = false;
  for (int i = 2; i < argc; ++i) {
    const std::string a = argv[i];
    auto next_arg = [&](const char* flag) -> const char* {
      if (i + 1 >= argc) {
        usage(stderr);
        std::fprintf(stderr, "missing value for %s\nERROR code=64 reason=usage\n", flag);
        std::exit(64);
      }
      return argv[++i];
    };
    if (a == "--config") {
      config_path = next_arg("--config");
      have_config = true;
    } else if (a == "--out") {
      out_dir = next_arg("--out");
      have_out = true;
    } else if (a == "--seed") {
      const char* v = next_arg("--seed");
      char* end = nullptr;
      (void)std::strtoull(v, &end, 10);
      if (end == v || *end != '\0') {
        usage(stderr);
        std::fprintf(stderr, "bad --seed value\nERROR code=64 reason=usage\n");
        return 64;
      }
      if (lvl >= LogLevel::debug)
        std::fprintf(stderr, "seed accepted (reserved, unused): %s\n", v);
    } else {
      usage(stderr);
      std::fprintf(stderr, "unknown argument '%s'\nERROR code=64 reason=usage\n",
                   a.c_str());
      return 64;
    }
  }
  if (!have_config || !have_out) {
    usage(stderr);
    std::fprintf(stderr, "--config and --out are required\nERROR code=64 reason=usage\n");
    return 64;
  }

  try {
    const RunConfig cfg = parse_config(config_path);
    if (lvl >= LogLevel::info) echo_config(stderr, cfg);
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
      fail(errc::missing_file, "out-dir",
           "cannot create output directory " + out_dir + ": " + ec.message());

    if (sub == "thermo-table") return run_thermo_table(cfg, dir, lvl);
    if (sub == "equilibria") return run_equilibria(cfg, dir, lvl);
    if (sub == "geometry-check") return run_geometry_check(cfg, dir, lvl);
    return run_simulate(cfg, dir, lvl);
  } catch (const error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    std::fprintf(stderr, "ERROR code=%d reason=%s\n", static_cast<int>(e.code()),
                 e.slug().c_str());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    std::fprintf(stderr, "ERROR code=5 reason=internal\n");
    return 5;
  }
}
