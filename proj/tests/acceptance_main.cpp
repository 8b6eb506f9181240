// Acceptance gate. Runs the seven module-level checks end to end and prints
// one PASS/FAIL line per criterion. Usage: acceptance [k ...] with k in 1..7;
// no arguments runs all seven. Exit status 0 iff every selected criterion
// passes, including its runtime budget.

#include <phasebench/config.hpp>
#include <phasebench/equilibria.hpp>
#include <phasebench/geometry.hpp>
#include <phasebench/stefan.hpp>
#include <phasebench/thermo.hpp>

#include "reference_medium.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using namespace phasebench;

namespace {

constexpr double pi = std::numbers::pi;

bool check(bool cond, const char* what) {
  if (!cond) std::fprintf(stderr, "  check failed: %s\n", what);
  return cond;
}

// ---------------------------------------------------------------- criterion 1

bool criterion_thermo() {
  std::mt19937_64 rng(20260819u);
  std::uniform_real_distribution<double> uc(0.5, 3.0), ud(-1.0, 1.0),
      ue(-1.0, 1.0), uth(0.3, 5.0);
  bool ok = true;
  for (int s = 0; s < 100; ++s) {
    PhaseMaterial m;
    m.c = uc(rng); m.d = ud(rng); m.e = ue(rng);
    const double theta = uth(rng);
    const ThermoEval ev = eval_phase(m, theta);

    ok &= check(std::fabs(ev.eps - (ev.psi + theta * ev.eta)) <=
                    1e-12 * std::max(1.0, std::fabs(ev.eps)),
                "eps = psi + theta eta");

    // latent heat both ways across a random pair of phases
    Medium med;
    med.phase1 = m;
    med.phase2.c = uc(rng); med.phase2.d = ud(rng); med.phase2.e = ue(rng);
    const ThermoEval o2 = eval_phase(med.phase2, theta);
    const double l_dpsi = theta * (detail::dpsi_value(med.phase2, theta) -
                                   detail::dpsi_value(med.phase1, theta));
    const double l_eta = -theta * (o2.eta - ev.eta);
    const double lscale = std::max({1.0, std::fabs(l_dpsi), std::fabs(l_eta)});
    ok &= check(std::fabs(l_dpsi - l_eta) <= 1e-12 * lscale,
                "latent heat forms agree");
    const JumpEval J = eval_jumps(med, theta);
    ok &= check(std::fabs(J.latent - l_eta) <= 1e-12 * lscale,
                "eval_jumps latent matches");

    // centered differences at two spacings: the error must drop ~4x
    const auto psi_of = [&](double t) { return eval_phase(m, t).psi; };
    const double d1 = 1e-2 * theta, d2 = 0.5 * d1;
    const double fe1 =
        std::fabs(-(psi_of(theta + d1) - psi_of(theta - d1)) / (2.0 * d1) - ev.eta);
    const double fe2 =
        std::fabs(-(psi_of(theta + d2) - psi_of(theta - d2)) / (2.0 * d2) - ev.eta);
    ok &= check(fe2 <= 0.45 * fe1 + 1e-12, "eta FD error is O(delta^2)");
    ok &= check(fe1 <= 1e-2 * std::max(1.0, std::fabs(ev.eta)), "eta FD sane");

    const auto kfd = [&](double d) {
      return -theta *
             (psi_of(theta + d) - 2.0 * psi_of(theta) + psi_of(theta - d)) / (d * d);
    };
    const double ke1 = std::fabs(kfd(d1) - ev.kappa);
    const double ke2 = std::fabs(kfd(d2) - ev.kappa);
    ok &= check(ke2 <= 0.45 * ke1 + 1e-9, "kappa FD error is O(delta^2)");
    ok &= check(ke1 <= 1e-2 * std::max(1.0, std::fabs(ev.kappa)), "kappa FD sane");
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_equilibria() {
  EquilibriumProblem p;
  p.medium = reference_medium();
  p.n = 3;
  p.domain_volume = 36.0 * pi;
  p.m = 1;
  p.R_star = 3.0;
  p.E0 = 296.0 * pi / 3.0;

  bool ok = true;
  const auto states = solve_equilibria(p);
  const EquilibriumState* st = nullptr;
  for (const auto& s : states)
    if (s.stable) st = &s;
  ok &= check(st != nullptr, "stable equilibrium found");
  if (!st) return false;

  ok &= check(std::fabs(st->theta - 2.0) <= 1e-9, "theta* = 2");
  ok &= check(std::fabs(st->radius - 2.0) <= 1e-9, "R* = 2");
  ok &= check(std::fabs(st->pressure_jump + 1.0) <= 1e-9, "[[pi]] = -1");
  ok &= check(std::fabs(st->phi_prime + 28.0 * pi) <= 1e-6 * 28.0 * pi,
              "phi' = -28 pi");
  ok &= check(st->stable, "stable flag");

  // phi() cross-checks its direct and reduced forms to 1e-12 relative on
  // every call and throws on disagreement; sweep the admissible range.
  int sampled = 0;
  const double lo = 5.0 / 3.0 * (1.0 + 1e-9), hi = p.theta_max;
  for (int k = 0; k < 300; ++k) {
    const double theta = lo * std::pow(hi / lo, k / 299.0);
    if (!admissible_temperature(p, theta)) continue;
    try {
      phi(p, theta);
      ++sampled;
    } catch (const error&) {
      ok = check(false, "phi dual forms agree on the admissible range");
    }
  }
  ok &= check(sampled >= 250, "admissible range covered");
  return ok;
}

// ---------------------------------------------------------------- criterion 3

bool criterion_curvature() {
  bool ok = true;

  struct Family {
    const char* name;
    double (*radius)(double);
  };
  static const Family families[] = {
      {"offcenter_circle",
       [](double phi) {
         const double d = 0.3;
         return d * std::cos(phi) +
                std::sqrt(1.0 - d * d * std::sin(phi) * std::sin(phi));
       }},
      {"ellipse",
       [](double phi) {
         const double c = std::cos(phi), s = std::sin(phi);
         return 1.2 / std::sqrt(1.44 * c * c + s * s);
       }},
  };
  for (const auto& fam : families) {
    double prev = 0.0;
    for (int N : {64, 128, 256, 512}) {
      SphereChart chart;
      chart.n = 2; chart.R_sigma = 1.0; chart.a = 0.5; chart.grid_n = N;
      HeightField h;
      h.values.resize(N);
      std::vector<double> r(N);
      for (int i = 0; i < N; ++i) {
        const double phi = 2.0 * pi * i / N;
        r[i] = fam.radius(phi);
        h.values[i] = r[i] - 1.0;
      }
      const auto H = curvature(chart, h);
      const auto Ho = curvature_oracle(r);
      double err = 0.0;
      for (int i = 0; i < N; ++i) err = std::max(err, std::fabs(H[i] - Ho[i]));
      if (prev > 0.0) {
        const double order = std::log2(prev / err);
        if (!(order >= 1.9)) {
          std::fprintf(stderr, "  %s at N=%d: order %.3f\n", fam.name, N, order);
          ok = false;
        }
      }
      prev = err;
    }
  }

  // constant height: exact sphere curvature, bitwise
  for (int n : {2, 3}) {
    SphereChart chart;
    chart.n = n; chart.R_sigma = 1.0; chart.a = 0.5; chart.grid_n = 64;
    const auto H = curvature(chart, HeightField::constant(64, 0.0));
    for (double v : H)
      ok &= check(v == -static_cast<double>(n - 1), "h = 0 is exact");
  }

  // Richardson in the perturbation size eliminates the O(eps) term of the
  // difference quotient; the limit must match the closed-form linearization.
  {
    const int N = 256;
    SphereChart chart;
    chart.n = 2; chart.R_sigma = 1.0; chart.a = 0.5; chart.grid_n = N;
    HeightField dir;
    dir.values.resize(N);
    for (int i = 0; i < N; ++i) {
      const double phi = 2.0 * pi * i / N;
      dir.values[i] = std::cos(3.0 * phi) + 0.5 * std::sin(2.0 * phi);
    }
    const auto lin = curvature_linearized(chart, dir);
    const auto H0 = curvature(chart, HeightField::constant(N, 0.0));
    const auto quot = [&](double eps) {
      HeightField he;
      he.values.resize(N);
      for (int i = 0; i < N; ++i) he.values[i] = eps * dir.values[i];
      const auto H = curvature(chart, he);
      std::vector<double> d(N);
      for (int i = 0; i < N; ++i) d[i] = (H[i] - H0[i]) / eps;
      return d;
    };
    const double eps = 1e-3;
    const auto d1 = quot(eps), d2 = quot(0.5 * eps);
    double res = 0.0;
    for (int i = 0; i < N; ++i)
      res = std::max(res, std::fabs(2.0 * d2[i] - d1[i] - lin[i]));
    std::fprintf(stderr, "  linearization residual %.3e\n", res);
    ok &= check(res <= 1e-4, "Richardson limit matches linearization");
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_jacobian() {
  std::mt19937_64 rng(77002u);
  std::uniform_real_distribution<double> u01(0.0, 1.0), us(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool ok = true;

  const auto identity_residual = [&](const SphereChart& c, const HeightField& h,
                                     const std::vector<double>& x) {
    const int n = c.n;
    const auto m1 = jacobian_m1(c, h, x);
    // displacement gradient by centered differences of the map itself, at a
    // spacing different from the one jacobian_m1 uses internally
    const double delta = 2e-6 * c.a;
    std::vector<double> dxi(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> xp(x), xm(x);
      xp[j] += delta;
      xm[j] -= delta;
      const auto mp = hanzawa_map(c, h, xp);
      const auto mm = hanzawa_map(c, h, xm);
      for (int i = 0; i < n; ++i)
        dxi[i * n + j] = (mp[i] - mm[i]) / (2.0 * delta) - (i == j ? 1.0 : 0.0);
    }
    // P = (I - M1^T)(I + Dxi) - I, column-sum norm
    std::vector<double> P(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          const double t = (i == k ? 1.0 : 0.0) - m1[k * n + i];
          const double b = (k == j ? 1.0 : 0.0) + dxi[k * n + j];
          acc += t * b;
        }
        P[i * n + j] = acc - (i == j ? 1.0 : 0.0);
      }
    double norm = 0.0;
    for (int j = 0; j < n; ++j) {
      double col = 0.0;
      for (int i = 0; i < n; ++i) col += std::fabs(P[i * n + j]);
      norm = std::max(norm, col);
    }
    return norm;
  };

  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    if (s % 5 == 4) {
      // constant height over a 2-sphere in 3 dimensions
      SphereChart c;
      c.n = 3; c.R_sigma = 1.0; c.a = 0.5; c.grid_n = 64;
      const HeightField h =
          HeightField::constant(64, us(rng) * 0.45 * mapping_bound(c));
      std::vector<double> x(3);
      double rho2 = 0.0;
      for (auto& v : x) { v = gauss(rng); rho2 += v * v; }
      const double rho = c.R_sigma + 0.9 * c.a * us(rng);
      for (auto& v : x) v *= rho / std::sqrt(rho2);
      worst = std::max(worst, identity_residual(c, h, x));
    } else {
      // random trigonometric height over the circle, scaled admissible
      SphereChart c;
      c.n = 2; c.R_sigma = 1.0; c.a = 0.5; c.grid_n = 128;
      HeightField h;
      h.values.assign(128, 0.0);
      for (int k = 0; k <= 4; ++k) {
        const double ak = us(rng), bk = us(rng);
        for (int i = 0; i < 128; ++i) {
          const double phi = 2.0 * pi * i / 128;
          h.values[i] += ak * std::cos(k * phi) + bk * std::sin(k * phi);
        }
      }
      const double t = 0.45 * std::min(mapping_bound(c) / sup_abs(h),
                                       (1.0 / 3.0) / sup_grad(c, h));
      for (auto& v : h.values) v *= t;
      ok &= check(mapping_admissible(c, h), "scaled field is admissible");
      const double ang = 2.0 * pi * u01(rng);
      const double rho = c.R_sigma + 0.9 * c.a * us(rng);
      const std::vector<double> x = {rho * std::cos(ang), rho * std::sin(ang)};
      worst = std::max(worst, identity_residual(c, h, x));
    }
  }
  std::fprintf(stderr, "  worst identity residual %.3e\n", worst);
  ok &= check(worst < 1e-6, "inverse jacobian identity");

  // admissibility boundary, bitwise: the sup bound is strict
  {
    SphereChart c;
    c.n = 2; c.R_sigma = 1.0; c.a = 0.5; c.grid_n = 64;
    const double b = mapping_bound(c);
    ok &= check(!mapping_admissible(c, HeightField::constant(64, b)),
                "h = bound rejected");
    ok &= check(
        mapping_admissible(c, HeightField::constant(64, std::nextafter(b, 0.0))),
        "h just below bound accepted");
    ok &= check(
        !mapping_admissible(c, HeightField::constant(64, std::nextafter(b, 1.0))),
        "h just above bound rejected");
    ok &= check(!mapping_admissible(c, HeightField::constant(64, -b)),
                "h = -bound rejected");
    ok &= check(mapping_admissible(
                    c, HeightField::constant(64, -std::nextafter(b, 0.0))),
                "h just above -bound accepted");
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_simulator() {
  bool ok = true;
  RadialConfig base;
  base.medium = reference_medium();
  base.n = 3;
  base.R_out = 3.0;
  base.N1 = base.N2 = 256;
  base.R0 = 2.0;
  base.t_end = 5.0;

  // (a) equilibrium data is a fixed point: energy, entropy, radius constant
  {
    RadialConfig cfg = base;
    cfg.theta10 = cfg.theta20 = 2.0;
    cfg.dt = 0.01;
    cfg.output_every = 1;
    const RunReport rep = run(cfg);
    ok &= check(rep.abort_reason.empty(), "equilibrium run completes");
    ok &= check(rep.max_energy_drift < 1e-9, "equilibrium energy drift < 1e-9");
    double dR = 0.0, dPhi = 0.0;
    const double Phi0 = rep.records.front().Phi;
    for (const auto& r : rep.records) {
      dR = std::max(dR, std::fabs(r.R - 2.0));
      dPhi = std::max(dPhi, std::fabs(r.Phi - Phi0));
    }
    std::fprintf(stderr, "  equilibrium: dE %.2e, dR %.2e, dPhi %.2e\n",
                 rep.max_energy_drift, dR, dPhi / std::fabs(Phi0));
    ok &= check(dR < 1e-9, "radius constant to 1e-9");
    ok &= check(dPhi < 1e-9 * std::fabs(Phi0), "entropy constant to 1e-9");
  }

  // (b)-(d) perturbed data at two resolutions
  RadialConfig pert = base;
  pert.theta10 = pert.theta20 = 2.05;
  pert.dt = 2e-4;
  pert.output_every = 1000;
  pert.budget_after = 0.5;
  const RunReport rb = run(pert);

  RadialConfig fine = pert;
  fine.N1 = fine.N2 = 512;
  fine.dt = 5e-5;
  const RunReport rc = run(fine);

  ok &= check(rb.abort_reason.empty() && rc.abort_reason.empty(),
              "perturbed runs complete");
  std::fprintf(stderr, "  perturbed: dE %.2e (N=256), %.2e (N=512)\n",
               rb.max_energy_drift, rc.max_energy_drift);
  ok &= check(rb.max_energy_drift < 1e-3, "energy drift < 1e-3");
  ok &= check(rc.max_energy_drift < 2.5e-4, "refined energy drift < 2.5e-4");

  // (c) entropy monotone per step; budget |dPhi/dt - production| within the
  // discretization bound C (dr^2 + dt), C = 1 (measured margin > 100x)
  const double Phi0 = rb.records.front().Phi;
  ok &= check(rb.min_entropy_increment > -1e-8 * std::max(1.0, std::fabs(Phi0)),
              "entropy nondecreasing per step");
  const double bound_b = (base.R_out / 256) * (base.R_out / 256) + pert.dt;
  const double bound_f = (base.R_out / 512) * (base.R_out / 512) + fine.dt;
  std::fprintf(stderr, "  budget: %.2e vs %.2e (N=256), %.2e vs %.2e (N=512)\n",
               rb.max_budget_residual, bound_b, rc.max_budget_residual, bound_f);
  ok &= check(rb.max_budget_residual <= bound_b, "entropy budget at N=256");
  ok &= check(rc.max_budget_residual <= bound_f, "entropy budget at N=512");

  // (d) terminal state vs the equilibria prediction for E0 = E(0)
  for (const RunReport* r : {&rb, &rc}) {
    ok &= check(r->predicted_valid, "prediction available");
    if (!r->predicted_valid) continue;
    const double eR = std::fabs(r->final_state.R - r->predicted_R) / r->predicted_R;
    const double eT =
        std::fabs(r->theta_mean_final - r->predicted_theta) / r->predicted_theta;
    std::fprintf(stderr, "  terminal: |R - R*|/R* %.2e, |th - th*|/th* %.2e\n",
                 eR, eT);
    ok &= check(eR < 0.01, "terminal radius within 1%");
    ok &= check(eT < 0.01, "terminal mean temperature within 1%");
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_ostwald() {
  EquilibriumProblem p;
  p.medium = reference_medium();
  p.n = 3;
  p.domain_volume = 36.0 * pi;
  p.m = 2;
  p.R_star = 1.4;
  p.E0 = 356.0 * pi / 3.0;  // symmetric pair at theta = 3, R = (1, 1)

  std::vector<double> radii;
  for (int k = 0; k < 25; ++k) radii.push_back(1.8 * k / 24.0);
  const OstwaldReport rep = ostwald_scan(p, radii);

  bool ok = true;
  ok &= check(std::fabs(rep.r_star - 1.0) < 1e-9, "symmetric radius");
  ok &= check(std::fabs(rep.theta_star - 3.0) < 1e-9, "symmetric temperature");
  ok &= check(rep.critical, "critical point flag");
  ok &= check(rep.grad_norm <= rep.grad_tol, "entropy gradient below grid tol");
  ok &= check(rep.not_local_max, "not a local maximum");
  ok &= check(rep.hess_eig_max > 0.0, "escape direction exists");
  return ok;
}

// ---------------------------------------------------------------- criterion 7

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string last_line(const std::string& s) {
  std::string t = s;
  while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.pop_back();
  const auto pos = t.find_last_of('\n');
  return pos == std::string::npos ? t : t.substr(pos + 1);
}

int run_cli(const std::string& args, const fs::path& errfile, std::string& err) {
  const std::string cmd = "PHASEBENCH_LOG=quiet " PHASEBENCH_EXE " " + args +
                          " 2>" + errfile.string();
  const int rc = std::system(cmd.c_str());
  err = slurp(errfile);
  if (!WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

bool guarded_abort_case(const fs::path& work, const std::string& name,
                        const std::string& cfg_text, const std::string& reason,
                        std::size_t min_data_rows) {
  const fs::path cfg = work / (name + ".cfg");
  const fs::path out = work / name;
  std::ofstream(cfg) << cfg_text;
  std::string err;
  const int code =
      run_cli("simulate --config " + cfg.string() + " --out " + out.string(),
              work / (name + ".stderr"), err);
  bool ok = true;
  ok &= check(code == 1, (name + ": exit code 1").c_str());
  ok &= check(last_line(err) == "ERROR code=1 reason=" + reason,
              (name + ": named reason on stderr").c_str());

  const std::string csv = slurp(out / "simulate.csv");
  ok &= check(csv.rfind("t,R,theta_gamma,j,V,E,Phi,production\n", 0) == 0,
              (name + ": csv header intact").c_str());
  const std::size_t rows =
      static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
  ok &= check(rows >= min_data_rows, (name + ": partial csv rows").c_str());

  const std::string rep = slurp(out / "report.txt");
  ok &= check(rep.find("status = " + reason + "\n") != std::string::npos,
              (name + ": report status").c_str());
  return ok;
}

bool criterion_guards() {
  const fs::path work = fs::temp_directory_path() / "phasebench_acceptance";
  fs::create_directories(work);
  bool ok = true;

  // ball-condition guard: a small hot droplet melts into the inner margin
  ok &= guarded_abort_case(work, "melt",
                           "[medium]\n"
                           "c1 = 1\nd1 = 0\ne1 = 1\nc2 = 1\nd2 = 1\ne2 = 0\n"
                           "sigma = 1\n"
                           "[domain]\nn = 3\nR_out = 3\n"
                           "[sim]\n"
                           "R0 = 0.15\ntheta_init = 1.2\nN1 = 32\nN2 = 32\n"
                           "dt = 1.0\nt_end = 5\ndelta_R = 0.1\n"
                           "output_every = 1\n",
                           "uniform-ball", 1);

  // latent-heat guard: l(theta) = theta log(theta) decays toward l_min as the
  // interface cools
  ok &= guarded_abort_case(work, "latent",
                           "[medium]\n"
                           "c1 = 2\nd1 = 1\ne1 = 0\nc2 = 1\nd2 = 0\ne2 = 1\n"
                           "sigma = 1\n"
                           "[domain]\nn = 3\nR_out = 3\n"
                           "[sim]\n"
                           "R0 = 1.8\ntheta_init = 3.0\nN1 = 32\nN2 = 32\n"
                           "dt = 0.005\nt_end = 5\nl_min = 2.9\n"
                           "output_every = 1\n",
                           "latent-heat-degeneracy", 1);

  // positivity guard: a checkpoint carrying a negative temperature is refused
  // before any step runs
  {
    RadialConfig rc;
    rc.medium = reference_medium();
    rc.n = 3; rc.R_out = 3.0; rc.N1 = rc.N2 = 24;
    rc.R0 = 2.0; rc.theta10 = rc.theta20 = 2.0;
    rc.dt = 0.01; rc.t_end = 0.1;
    RadialState st;
    st.t = 0.02; st.R = 2.0;
    st.theta1.assign(24, 2.0);
    st.theta2.assign(24, 2.0);
    st.theta1[7] = -1.0;
    const fs::path bad = work / "bad_state.txt";
    save_state(bad.string(), rc, st);
    ok &= guarded_abort_case(work, "tamper",
                             "[domain]\nn = 3\nR_out = 3\n"
                             "[sim]\n"
                             "N1 = 24\nN2 = 24\ndt = 0.01\nt_end = 0.1\n"
                             "resume = " + bad.string() + "\n",
                             "theta-positivity", 0);
  }
  return ok;
}

// ------------------------------------------------------------------- driver

struct Criterion {
  int id;
  const char* label;
  double budget_s;
  bool (*fn)();
};

const Criterion kCriteria[] = {
    {1, "thermo identities and second-order FD checks", 1.0, criterion_thermo},
    {2, "equilibria cross-check and dual energy forms", 1.0, criterion_equilibria},
    {3, "curvature convergence, exact sphere, linearization", 10.0,
     criterion_curvature},
    {4, "tube-map jacobian identity and admissibility boundary", 5.0,
     criterion_jacobian},
    {5, "radial simulator conservation, entropy, terminal state", 120.0,
     criterion_simulator},
    {6, "two-ball entropy scan critical but not maximal", 30.0,
     criterion_ostwald},
    {7, "guarded aborts with named reasons and partial output", 30.0,
     criterion_guards},
};

} // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > 7) {
      std::fprintf(stderr, "usage: %s [criterion ...] with criterion in 1..7\n",
                   argv[0]);
      return 64;
    }
    selected.push_back(k);
  }
  if (selected.empty())
    for (const auto& c : kCriteria) selected.push_back(c.id);

  int failures = 0;
  for (int k : selected) {
    const Criterion& c = kCriteria[k - 1];
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "  unexpected exception: %s\n", e.what());
      ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > c.budget_s) {
      std::fprintf(stderr, "  runtime %.2f s exceeds the %.0f s budget\n", secs,
                   c.budget_s);
      ok = false;
    }
    std::printf("%s %d %s (%.2f s)\n", ok ? "PASS" : "FAIL", c.id, c.label,
                secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
