#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "equilibria.hpp"
#include "error.hpp"
#include "rootfind.hpp"
#include "thermo.hpp"

namespace phasebench {

// Radially symmetric two-phase problem with a sharp interface at r = R(t):
// phase 1 on (0, R), phase 2 on (R, R_out), insulated outer wall. With equal
// bulk densities the velocity vanishes, so the interface moves by phase
// transition alone: V = -j. Viscous dissipation is identically zero here;
// entropy is produced by heat conduction only.
struct RadialConfig {
  Medium medium;
  int n = 3;
  double R_out = 3.0;
  int N1 = 256, N2 = 256;   // cells per phase
  double R0 = 0.0;          // initial interface radius
  double theta10 = 0.0;     // uniform initial temperatures
  double theta20 = 0.0;
  double t_end = 0.0;
  double dt = 0.0;          // base time step (adapted by CFL and t_end)
  int output_every = 100;   // record cadence in steps
  double delta_R = 0.0;     // guard margin to r = 0 and r = R_out
  double l_min = 1e-6;      // guard: smallest admissible latent heat
  double theta_cap = 1e3;   // bracket top for interface temperature solves
  double budget_after = 0.0;  // entropy budget tracked for t >= this
  long long max_steps = 200000000;
};

struct RadialState {
  double t = 0.0;
  double R = 0.0;
  std::vector<double> theta1;  // cell averages on the uniform xi-grid, r = xi R
  std::vector<double> theta2;  // cell averages, r = R + eta (R_out - R)
};

struct DiagnosticsRecord {
  double t = 0.0;
  double R = 0.0;
  double theta_gamma = 0.0;
  double j = 0.0;           // mass flux across the interface
  double V = 0.0;           // normal velocity, V = -j
  double E = 0.0;           // total energy incl. surface term
  double Phi = 0.0;         // total entropy
  double production = 0.0;  // conductive entropy production rate
};

struct InterfaceFluxes {
  double theta_gamma = 0.0;
  double grad1 = 0.0;  // one-sided d(theta)/dr on the phase-1 side
  double grad2 = 0.0;
  double j = 0.0;
  double V = 0.0;
};

struct RunReport {
  std::vector<DiagnosticsRecord> records;
  RadialState final_state;
  long long steps = 0;
  std::string abort_reason;           // empty when the run completed
  double max_energy_drift = 0.0;      // max |E - E(0)| / |E(0)| over steps
  double min_entropy_increment = 0.0; // min per-step Phi increment
  double max_budget_residual = 0.0;   // max |dPhi/dt - production|, t >= budget_after
  double theta_mean_final = 0.0;      // volume-weighted mean temperature
  bool predicted_valid = false;       // stable equilibrium exists for E(0)
  double predicted_theta = 0.0;
  double predicted_R = 0.0;
};

namespace detail {

inline double ipow(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

inline void inner_faces(double R, int N, std::vector<double>& f) {
  f.resize(N + 1);
  for (int i = 0; i <= N; ++i) f[i] = R * double(i) / N;
}

inline void outer_faces(double R, double R_out, int N, std::vector<double>& f) {
  f.resize(N + 1);
  for (int i = 0; i <= N; ++i) f[i] = R + (R_out - R) * double(i) / N;
}

inline void validate_radial(const RadialConfig& c) {
  validate(c.medium);
  if (c.n < 2)
    fail(errc::invariant_violation, "dimension", "simulate: need n >= 2");
  if (!(c.R_out > 0.0))
    fail(errc::invariant_violation, "domain-size", "simulate: R_out must be positive");
  if (c.N1 < 16 || c.N2 < 16)
    fail(errc::invariant_violation, "grid-size", "simulate: need at least 16 cells per phase");
  if (!(c.dt >= 0.0) || !std::isfinite(c.dt))
    fail(errc::invariant_violation, "time-step", "simulate: dt must be nonnegative");
  if (!(c.delta_R >= 0.0) || !(2.0 * c.delta_R < c.R_out))
    fail(errc::invariant_violation, "guard-margin",
         "simulate: delta_R must satisfy 0 <= 2 delta_R < R_out");
  if (c.output_every < 1)
    fail(errc::invariant_violation, "output-cadence", "simulate: output_every >= 1");
}

} // namespace detail

// Temperature at which the interface of radius R is in local equilibrium:
// [[psi(theta)]] = sigma (n-1)/R. A previous solution can be passed as hint
// to avoid the global bracket scan.
inline double interface_temperature(
    const Medium& med, int n, double R, double theta_cap = 1e3,
    double hint = std::numeric_limits<double>::quiet_NaN()) {
  if (!(R > 0.0))
    fail(errc::invariant_violation, "interface-position",
         "interface_temperature: R must be positive");
  const double target = med.sigma * (n - 1) / R;
  auto f = [&](double th) { return eval_jumps(med, th).psi_jump - target; };
  auto df = [&](double th) { return -eval_jumps(med, th).eta_jump; };

  const double theta_floor = 1e-6;
  if (std::isfinite(hint) && hint > theta_floor && hint < theta_cap) {
    double w = 1e-3 * hint;
    for (int grow = 0; grow < 8; ++grow) {
      const double lo = std::max(theta_floor, hint - w);
      const double hi = std::min(theta_cap, hint + w);
      if (f(lo) * f(hi) <= 0.0)
        return newton_bisect(f, df, lo, hi, 1e-13 * hi).x;
      w *= 4.0;
    }
  }
  const int K = 1024;
  const double la = std::log(theta_floor), lb = std::log(theta_cap);
  double pt = theta_floor, pf = f(pt);
  for (int k = 1; k < K; ++k) {
    const double t = std::exp(la + (lb - la) * k / (K - 1));
    const double ft = f(t);
    if (pf == 0.0) return pt;
    if (pf * ft <= 0.0) return newton_bisect(f, df, pt, t, 1e-13 * t).x;
    pt = t;
    pf = ft;
  }
  fail(errc::invariant_violation, "interface-temperature",
       "no interface temperature with [[psi]] = " + std::to_string(target) +
           " in (0, " + std::to_string(theta_cap) + "]");
}

// One-sided second-order interface gradients and the resulting mass flux
// j = -[[d grad theta . nu]] / l, V = -j.
inline InterfaceFluxes interface_fluxes(
    const RadialConfig& cfg, const RadialState& s,
    double hint = std::numeric_limits<double>::quiet_NaN()) {
  const int N1 = static_cast<int>(s.theta1.size());
  const int N2 = static_cast<int>(s.theta2.size());
  InterfaceFluxes out;
  out.theta_gamma = interface_temperature(cfg.medium, cfg.n, s.R, cfg.theta_cap, hint);
  const double ds1 = s.R / N1;
  const double ds2 = (cfg.R_out - s.R) / N2;
  out.grad1 = (8.0 * out.theta_gamma - 9.0 * s.theta1[N1 - 1] + s.theta1[N1 - 2]) /
              (3.0 * ds1);
  out.grad2 = (-8.0 * out.theta_gamma + 9.0 * s.theta2[0] - s.theta2[1]) /
              (3.0 * ds2);
  const double l = eval_jumps(cfg.medium, out.theta_gamma).latent;
  const double jump = cfg.medium.dcond2 * out.grad2 - cfg.medium.dcond1 * out.grad1;
  out.j = -jump / l;
  out.V = -out.j;
  return out;
}

// Total energy: bulk internal energy in the cell measure r^{n-1} dr times
// the unit sphere area, plus surface energy sigma |Gamma|.
inline double energy(const RadialConfig& cfg, const RadialState& s) {
  const double omega = unit_sphere_area(cfg.n);
  const int N1 = static_cast<int>(s.theta1.size());
  const int N2 = static_cast<int>(s.theta2.size());
  double bulk = 0.0;
  std::vector<double> f;
  detail::inner_faces(s.R, N1, f);
  for (int i = 0; i < N1; ++i) {
    const double m = (detail::ipow(f[i + 1], cfg.n) - detail::ipow(f[i], cfg.n)) / cfg.n;
    bulk += m * eval_phase(cfg.medium.phase1, s.theta1[i]).eps;
  }
  detail::outer_faces(s.R, cfg.R_out, N2, f);
  for (int i = 0; i < N2; ++i) {
    const double m = (detail::ipow(f[i + 1], cfg.n) - detail::ipow(f[i], cfg.n)) / cfg.n;
    bulk += m * eval_phase(cfg.medium.phase2, s.theta2[i]).eps;
  }
  return omega * bulk + cfg.medium.sigma * omega * detail::ipow(s.R, cfg.n - 1);
}

inline double entropy(const RadialConfig& cfg, const RadialState& s) {
  const double omega = unit_sphere_area(cfg.n);
  const int N1 = static_cast<int>(s.theta1.size());
  const int N2 = static_cast<int>(s.theta2.size());
  double sum = 0.0;
  std::vector<double> f;
  detail::inner_faces(s.R, N1, f);
  for (int i = 0; i < N1; ++i) {
    const double m = (detail::ipow(f[i + 1], cfg.n) - detail::ipow(f[i], cfg.n)) / cfg.n;
    sum += m * eval_phase(cfg.medium.phase1, s.theta1[i]).eta;
  }
  detail::outer_faces(s.R, cfg.R_out, N2, f);
  for (int i = 0; i < N2; ++i) {
    const double m = (detail::ipow(f[i + 1], cfg.n) - detail::ipow(f[i], cfg.n)) / cfg.n;
    sum += m * eval_phase(cfg.medium.phase2, s.theta2[i]).eta;
  }
  return omega * sum;
}

// Conductive entropy production omega int d/theta^2 (d theta/dr)^2 r^{n-1} dr,
// assembled on faces where the scheme's gradients live.
inline double production_rate(const RadialConfig& cfg, const RadialState& s,
                              const InterfaceFluxes& fl) {
  const double omega = unit_sphere_area(cfg.n);
  const int N1 = static_cast<int>(s.theta1.size());
  const int N2 = static_cast<int>(s.theta2.size());
  double sum = 0.0;
  const double ds1 = s.R / N1;
  for (int f = 1; f < N1; ++f) {
    const double rf = ds1 * f;
    const double g = (s.theta1[f] - s.theta1[f - 1]) / ds1;
    const double th = 0.5 * (s.theta1[f] + s.theta1[f - 1]);
    sum += cfg.medium.dcond1 / (th * th) * g * g * detail::ipow(rf, cfg.n - 1) * ds1;
  }
  {  // interface-side segment of phase 1, half cell wide
    const double g = fl.grad1;
    const double th = 0.5 * (fl.theta_gamma + s.theta1[N1 - 1]);
    sum += cfg.medium.dcond1 / (th * th) * g * g * detail::ipow(s.R, cfg.n - 1) * 0.5 * ds1;
  }
  const double ds2 = (cfg.R_out - s.R) / N2;
  {  // interface-side segment of phase 2
    const double g = fl.grad2;
    const double th = 0.5 * (fl.theta_gamma + s.theta2[0]);
    sum += cfg.medium.dcond2 / (th * th) * g * g * detail::ipow(s.R, cfg.n - 1) * 0.5 * ds2;
  }
  for (int f = 1; f < N2; ++f) {
    const double rf = s.R + ds2 * f;
    const double g = (s.theta2[f] - s.theta2[f - 1]) / ds2;
    const double th = 0.5 * (s.theta2[f] + s.theta2[f - 1]);
    sum += cfg.medium.dcond2 / (th * th) * g * g * detail::ipow(rf, cfg.n - 1) * ds2;
  }
  return omega * sum;
}

inline DiagnosticsRecord diagnostics(const RadialConfig& cfg, const RadialState& s,
                                     double hint = std::numeric_limits<double>::quiet_NaN()) {
  const auto fl = interface_fluxes(cfg, s, hint);
  DiagnosticsRecord rec;
  rec.t = s.t;
  rec.R = s.R;
  rec.theta_gamma = fl.theta_gamma;
  rec.j = fl.j;
  rec.V = fl.V;
  rec.E = energy(cfg, s);
  rec.Phi = entropy(cfg, s);
  rec.production = production_rate(cfg, s, fl);
  return rec;
}

namespace detail {

// Backward-Euler update of one phase on a moving mesh. Finite volumes in the
// r^{n-1} dr measure; energy is linearized around the old state
// (exact for the built-in family where eps is affine in theta). Swept cell
// volumes carry donor-cell energy so the advective part preserves the
// discrete maximum principle; the interface face carries the Dirichlet
// value with a one-sided second-order stencil. The assembled matrix is an
// M-matrix, so positivity of theta is structural.
struct PhaseSolve {
  std::vector<double> lower, diag, upper, rhs;
  std::vector<double> mO, mN, dm, eps_o, kap;

  // gamma_at_end: interface is the last face (phase 1) or the first (phase 2)
  void update(const PhaseMaterial& mat, double dcond, int n,
              const std::vector<double>& fO, const std::vector<double>& fN,
              const std::vector<double>& th_old, double theta_g, double eps_g,
              bool gamma_at_end, double dt, std::vector<double>& th_new) {
    const int N = static_cast<int>(th_old.size());
    lower.assign(N, 0.0);
    diag.assign(N, 0.0);
    upper.assign(N, 0.0);
    rhs.assign(N, 0.0);
    mO.resize(N);
    mN.resize(N);
    dm.resize(N + 1);
    eps_o.resize(N);
    kap.resize(N);

    for (int i = 0; i < N; ++i) {
      mO[i] = (ipow(fO[i + 1], n) - ipow(fO[i], n)) / n;
      mN[i] = (ipow(fN[i + 1], n) - ipow(fN[i], n)) / n;
      const auto ev = eval_phase(mat, th_old[i]);
      eps_o[i] = ev.eps;
      kap[i] = ev.kappa;
    }
    for (int f = 0; f <= N; ++f) dm[f] = (ipow(fN[f], n) - ipow(fO[f], n)) / n;

    const double ds = (fN[N] - fN[0]) / N;  // uniform spacing on the new mesh

    for (int i = 0; i < N; ++i) {
      diag[i] = mN[i] * kap[i];
      rhs[i] = mO[i] * eps_o[i] - mN[i] * (eps_o[i] - kap[i] * th_old[i]);
    }

    // interior faces: implicit diffusion plus donor-cell swept transfer
    for (int f = 1; f < N; ++f) {
      const double D = dt * dcond * ipow(fN[f], n - 1) / ds;
      diag[f - 1] += D;
      upper[f - 1] -= D;
      diag[f] += D;
      lower[f] -= D;
      const double m = dm[f];
      if (m != 0.0) {
        const int d = m > 0.0 ? f : f - 1;
        const double cd = eps_o[d] - kap[d] * th_old[d];
        // cell f-1 sees -Phi_f, cell f sees +Phi_f
        if (d == f) {
          upper[f - 1] -= m * kap[d];
          diag[f] += m * kap[d];
        } else {
          diag[f - 1] -= m * kap[d];
          lower[f] += m * kap[d];
        }
        rhs[f - 1] += m * cd;
        rhs[f] -= m * cd;
      }
    }

    if (gamma_at_end) {
      // flux at the last face: q (8 theta_g - 9 th[N-1] + th[N-2]) + dm eps_g
      const double q = dt * dcond * ipow(fN[N], n - 1) / (3.0 * ds);
      diag[N - 1] += 9.0 * q;
      lower[N - 1] -= q;
      rhs[N - 1] += 8.0 * q * theta_g + dm[N] * eps_g;
      // first face is r = 0 or a fixed wall: no flux, no sweep
    } else {
      const double q = dt * dcond * ipow(fN[0], n - 1) / (3.0 * ds);
      diag[0] += 9.0 * q;
      upper[0] -= q;
      rhs[0] += 8.0 * q * theta_g - dm[0] * eps_g;
    }

    // Thomas solve; diagonal dominance holds by construction
    th_new.resize(N);
    for (int i = 1; i < N; ++i) {
      const double w = lower[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    th_new[N - 1] = rhs[N - 1] / diag[N - 1];
    for (int i = N - 2; i >= 0; --i)
      th_new[i] = (rhs[i] - upper[i] * th_new[i + 1]) / diag[i];
  }
};

struct StepWorkspace {
  PhaseSolve p1, p2;
  std::vector<double> fO1, fN1, fO2, fN2, th1, th2;
};

} // namespace detail

struct StepResult {
  RadialState state;
  double dt_used = 0.0;
  double theta_gamma = 0.0;
  double j = 0.0;
  double V = 0.0;
  std::string guard;  // empty, or the guard that stopped the step
};

namespace detail {

// One conservative step. dR is chosen so the discrete total energy change
// vanishes exactly: G(dR) = interface heat fluxes (implicit) - advected
// interface energy + surface energy increment = 0. This is the
// backward-Euler form of the Stefan condition; the explicit flux balance
// only provides the predictor and the CFL bound.
inline StepResult step_impl(const RadialState& s, const RadialConfig& cfg,
                            double dt_request, StepWorkspace& ws,
                            double hint) {
  StepResult out;
  out.state = s;
  const int N1 = static_cast<int>(s.theta1.size());
  const int N2 = static_cast<int>(s.theta2.size());

  const auto fl = interface_fluxes(cfg, s, hint);
  out.theta_gamma = fl.theta_gamma;
  out.j = fl.j;
  out.V = fl.V;
  {
    const double l = eval_jumps(cfg.medium, fl.theta_gamma).latent;
    if (l < cfg.l_min) {
      out.guard = "latent-heat-degeneracy";
      return out;
    }
  }

  double dt = dt_request;
  if (fl.V != 0.0) {
    const double cell = std::min(s.R / N1, (cfg.R_out - s.R) / N2);
    dt = std::min(dt, 0.4 * cell / std::fabs(fl.V));
  }
  if (dt <= 0.0) {
    out.dt_used = 0.0;
    return out;  // identical state
  }

  inner_faces(s.R, N1, ws.fO1);
  outer_faces(s.R, cfg.R_out, N2, ws.fO2);

  double th_g = fl.theta_gamma;
  auto G = [&](double dR) {
    const double Rn = s.R + dR;
    if (!(Rn > 0.0) || !(Rn < cfg.R_out))
      fail(errc::invariant_violation, "interface-position",
           "step: implicit interface update left the domain");
    th_g = interface_temperature(cfg.medium, cfg.n, Rn, cfg.theta_cap, th_g);
    inner_faces(Rn, N1, ws.fN1);
    outer_faces(Rn, cfg.R_out, N2, ws.fN2);
    const double eg1 = eval_phase(cfg.medium.phase1, th_g).eps;
    const double eg2 = eval_phase(cfg.medium.phase2, th_g).eps;
    ws.p1.update(cfg.medium.phase1, cfg.medium.dcond1, cfg.n, ws.fO1, ws.fN1,
                 s.theta1, th_g, eg1, true, dt, ws.th1);
    ws.p2.update(cfg.medium.phase2, cfg.medium.dcond2, cfg.n, ws.fO2, ws.fN2,
                 s.theta2, th_g, eg2, false, dt, ws.th2);
    const double ds1 = Rn / N1;
    const double ds2 = (cfg.R_out - Rn) / N2;
    const double g1 = (8.0 * th_g - 9.0 * ws.th1[N1 - 1] + ws.th1[N1 - 2]) / (3.0 * ds1);
    const double g2 = (-8.0 * th_g + 9.0 * ws.th2[0] - ws.th2[1]) / (3.0 * ds2);
    const double rg = ipow(Rn, cfg.n - 1);
    const double dmg = (ipow(Rn, cfg.n) - ipow(s.R, cfg.n)) / cfg.n;
    return dt * rg * (cfg.medium.dcond1 * g1 - cfg.medium.dcond2 * g2) -
           dmg * (eg2 - eg1) +
           cfg.medium.sigma * (rg - ipow(s.R, cfg.n - 1));
  };

  // secant on dR from the explicit predictor
  double x0 = dt * fl.V;
  double g0 = G(x0);
  const double cell = std::min(s.R / N1, (cfg.R_out - s.R) / N2);
  const double scale = cfg.medium.sigma * ipow(s.R, cfg.n - 1) +
                       std::fabs(g0) + 1e-30;
  double x1 = x0 + std::max(1e-8 * cell, 1e-6 * std::fabs(x0));
  double g1v = G(x1);
  for (int it = 0; it < 60 && std::fabs(g1v) > 1e-15 * scale; ++it) {
    const double denom = g1v - g0;
    if (denom == 0.0) break;
    const double x2 = x1 - g1v * (x1 - x0) / denom;
    x0 = x1;
    g0 = g1v;
    x1 = x2;
    g1v = G(x1);
    if (std::fabs(x1 - x0) <= 1e-16 * std::max(1.0, std::fabs(x1))) break;
  }
  if (std::fabs(g1v) > 1e-9 * scale)
    fail(errc::invariant_violation, "stefan-implicit",
         "step: implicit interface balance did not converge");
  // ws.th1/th2, th_g correspond to the last evaluated x1

  const double R_new = s.R + x1;
  out.state.t = s.t + dt;
  out.state.R = R_new;
  out.state.theta1 = ws.th1;
  out.state.theta2 = ws.th2;
  out.dt_used = dt;
  out.theta_gamma = th_g;
  out.V = x1 / dt;
  out.j = -out.V;

  for (double v : out.state.theta1)
    if (!(v > 0.0)) {
      out.guard = "theta-positivity";
      return out;
    }
  for (double v : out.state.theta2)
    if (!(v > 0.0)) {
      out.guard = "theta-positivity";
      return out;
    }
  return out;
}

} // namespace detail

inline StepResult step(const RadialState& s, const RadialConfig& cfg,
                       double dt_request) {
  detail::validate_radial(cfg);
  detail::StepWorkspace ws;
  return detail::step_impl(s, cfg, dt_request, ws,
                           std::numeric_limits<double>::quiet_NaN());
}

// Plain-text checkpoint, 17 significant digits, exact double round-trip.
inline void save_state(const std::string& path, const RadialConfig& cfg,
                       const RadialState& s) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f)
    fail(errc::missing_file, "state-write",
         "save_state: cannot open " + path + " for writing");
  std::fprintf(f, "phasebench-state v1\n");
  std::fprintf(f, "n %d\n", cfg.n);
  std::fprintf(f, "R_out %.17g\n", cfg.R_out);
  std::fprintf(f, "t %.17g\n", s.t);
  std::fprintf(f, "R %.17g\n", s.R);
  std::fprintf(f, "N1 %zu\n", s.theta1.size());
  std::fprintf(f, "N2 %zu\n", s.theta2.size());
  std::fprintf(f, "theta1\n");
  for (double v : s.theta1) std::fprintf(f, "%.17g\n", v);
  std::fprintf(f, "theta2\n");
  for (double v : s.theta2) std::fprintf(f, "%.17g\n", v);
  std::fclose(f);
}

struct LoadedState {
  RadialState state;
  int n = 0;
  double R_out = 0.0;
};

inline LoadedState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    fail(errc::missing_file, "state-missing", "load_state: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "phasebench-state v1")
    fail(errc::parse_error, "state-version",
         "load_state: unrecognized header in " + path);
  LoadedState out;
  std::string key;
  std::size_t n1 = 0, n2 = 0;
  auto want = [&](const char* expect) {
    if (!(in >> key) || key != expect)
      fail(errc::parse_error, "state-format",
           "load_state: expected field '" + std::string(expect) + "' in " + path);
  };
  want("n");
  in >> out.n;
  want("R_out");
  in >> out.R_out;
  want("t");
  in >> out.state.t;
  want("R");
  in >> out.state.R;
  want("N1");
  in >> n1;
  want("N2");
  in >> n2;
  if (!in || n1 < 2 || n2 < 2 || n1 > 100000000 || n2 > 100000000)
    fail(errc::parse_error, "state-format", "load_state: bad grid sizes in " + path);
  want("theta1");
  out.state.theta1.resize(n1);
  for (auto& v : out.state.theta1) in >> v;
  want("theta2");
  out.state.theta2.resize(n2);
  for (auto& v : out.state.theta2) in >> v;
  if (!in)
    fail(errc::parse_error, "state-format", "load_state: truncated data in " + path);
  return out;
}

// Full trajectory with per-step energy/entropy tracking. Guard violations
// abort the run, keeping the partial trajectory and naming the reason.
inline RunReport run(const RadialConfig& cfg,
                     std::optional<RadialState> init = std::nullopt) {
  detail::validate_radial(cfg);
  RadialState s;
  if (init) {
    s = *init;
  } else {
    if (!(cfg.R0 > 0.0) || !(cfg.R0 < cfg.R_out))
      fail(errc::invariant_violation, "interface-position",
           "run: need 0 < R0 < R_out");
    if (!(cfg.theta10 > 0.0) || !(cfg.theta20 > 0.0))
      fail(errc::invariant_violation, "theta-domain",
           "run: initial temperatures must be positive");
    s.t = 0.0;
    s.R = cfg.R0;
    s.theta1.assign(cfg.N1, cfg.theta10);
    s.theta2.assign(cfg.N2, cfg.theta20);
  }

  RunReport rep;
  rep.min_entropy_increment = std::numeric_limits<double>::infinity();

  auto guard_state = [&](const RadialState& st) -> std::string {
    for (double v : st.theta1)
      if (!(v > 0.0)) return "theta-positivity";
    for (double v : st.theta2)
      if (!(v > 0.0)) return "theta-positivity";
    if (!(st.R > cfg.delta_R) || !(st.R < cfg.R_out - cfg.delta_R))
      return "uniform-ball";
    return "";
  };

  detail::StepWorkspace ws;
  double hint = std::numeric_limits<double>::quiet_NaN();

  if (auto g = guard_state(s); !g.empty()) {
    rep.abort_reason = g;
    // diagnostics need positive temperatures and an interface inside the domain
    if (g != "theta-positivity" && s.R > 0.0 && s.R < cfg.R_out) {
      const auto rec = diagnostics(cfg, s, hint);
      rep.records.push_back(rec);
    }
    rep.final_state = s;
    return rep;
  }

  DiagnosticsRecord rec = diagnostics(cfg, s, hint);
  hint = rec.theta_gamma;
  rep.records.push_back(rec);
  const double E0 = rec.E;
  const double Escale = std::max(std::fabs(E0), 1e-30);
  double Phi_prev = rec.Phi;
  double P_prev = rec.production;
  double t_prev = s.t;

  while (s.t < cfg.t_end &&
         cfg.t_end - s.t > 1e-14 * std::max(1.0, cfg.t_end)) {
    if (rep.steps >= cfg.max_steps)
      fail(errc::invariant_violation, "step-limit",
           "run: exceeded max_steps = " + std::to_string(cfg.max_steps));
    auto res = detail::step_impl(s, cfg, std::min(cfg.dt, cfg.t_end - s.t), ws, hint);
    if (!res.guard.empty()) {
      rep.abort_reason = res.guard;
      break;
    }
    if (res.dt_used == 0.0) break;  // dt = 0: nothing can advance
    s = std::move(res.state);
    hint = res.theta_gamma;
    ++rep.steps;

    if (auto g = guard_state(s); !g.empty()) {
      rep.abort_reason = g;
      break;
    }

    rec = diagnostics(cfg, s, hint);
    rep.max_energy_drift =
        std::max(rep.max_energy_drift, std::fabs(rec.E - E0) / Escale);
    const double dPhi = rec.Phi - Phi_prev;
    rep.min_entropy_increment = std::min(rep.min_entropy_increment, dPhi);
    if (t_prev >= cfg.budget_after) {
      const double residual =
          std::fabs(dPhi / res.dt_used - 0.5 * (rec.production + P_prev));
      rep.max_budget_residual = std::max(rep.max_budget_residual, residual);
    }
    Phi_prev = rec.Phi;
    P_prev = rec.production;
    t_prev = s.t;

    if (rep.steps % cfg.output_every == 0) rep.records.push_back(rec);
  }

  if (rep.records.empty() || rep.records.back().t != s.t) {
    if (rep.abort_reason != "theta-positivity" && s.R > 0.0 && s.R < cfg.R_out)
      rep.records.push_back(diagnostics(cfg, s, hint));
  }
  if (!std::isfinite(rep.min_entropy_increment)) rep.min_entropy_increment = 0.0;

  {  // volume-weighted mean temperature of the final state
    double vsum = 0.0, tsum = 0.0;
    std::vector<double> f;
    detail::inner_faces(s.R, static_cast<int>(s.theta1.size()), f);
    for (std::size_t i = 0; i < s.theta1.size(); ++i) {
      const double m = (detail::ipow(f[i + 1], cfg.n) - detail::ipow(f[i], cfg.n)) / cfg.n;
      vsum += m;
      tsum += m * s.theta1[i];
    }
    detail::outer_faces(s.R, cfg.R_out, static_cast<int>(s.theta2.size()), f);
    for (std::size_t i = 0; i < s.theta2.size(); ++i) {
      const double m = (detail::ipow(f[i + 1], cfg.n) - detail::ipow(f[i], cfg.n)) / cfg.n;
      vsum += m;
      tsum += m * s.theta2[i];
    }
    rep.theta_mean_final = tsum / vsum;
  }

  rep.final_state = s;

  // equilibrium predicted from the conserved energy
  try {
    EquilibriumProblem p;
    p.medium = cfg.medium;
    p.n = cfg.n;
    p.domain_volume = unit_sphere_area(cfg.n) * detail::ipow(cfg.R_out, cfg.n) / cfg.n;
    p.m = 1;
    p.R_star = cfg.R_out;
    p.E0 = E0;
    for (const auto& st : solve_equilibria(p)) {
      if (st.stable) {
        rep.predicted_valid = true;
        rep.predicted_theta = st.theta;
        rep.predicted_R = st.radius;
        break;
      }
    }
  } catch (const error&) {
    rep.predicted_valid = false;
  }
  return rep;
}

} // namespace phasebench
