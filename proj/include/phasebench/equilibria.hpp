#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "rootfind.hpp"
#include "thermo.hpp"

namespace phasebench {

// Surface measure of the unit sphere in R^n. Ball volume is area/n * R^n.
inline double unit_sphere_area(int n) {
  if (n == 2) return 2.0 * std::numbers::pi;
  if (n == 3) return 4.0 * std::numbers::pi;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// Equilibria of the closed two-phase system: phase 1 occupies m disjoint
// balls of equal radius, temperature is uniform, velocity zero. States are
// parametrized by temperature; the radius follows from the interface
// curvature condition [[psi(theta)]] = sigma (n-1)/R.
struct EquilibriumProblem {
  Medium medium;
  int n = 3;                   // ambient dimension
  double domain_volume = 0.0;  // |Omega|
  int m = 1;                   // number of balls
  double R_star = 0.0;         // largest radius admitted by the domain
  double E0 = 0.0;             // prescribed total energy
  double theta_min = 1e-6;     // temperature scan window
  double theta_max = 1e3;
};

struct EquilibriumState {
  double theta = 0.0;
  double radius = 0.0;
  double pressure_jump = 0.0;  // [[pi]] = -sigma (n-1)/R
  double phi = 0.0;            // reduced energy at this temperature
  double phi_prime = 0.0;
  bool stable = false;         // single ball on the descending branch
};

namespace detail {

inline void validate_problem(const EquilibriumProblem& p) {
  validate(p.medium);
  if (p.n < 2)
    fail(errc::invariant_violation, "dimension", "equilibria: need n >= 2");
  if (p.m < 1)
    fail(errc::invariant_violation, "ball-count", "equilibria: need m >= 1");
  if (!(p.domain_volume > 0.0))
    fail(errc::invariant_violation, "domain-volume",
         "equilibria: domain volume must be positive");
  if (!(p.R_star > 0.0))
    fail(errc::invariant_violation, "radius-bound",
         "equilibria: R_star must be positive");
  if (!std::isfinite(p.E0))
    fail(errc::invariant_violation, "energy-value",
         "equilibria: E0 must be finite");
  if (!(p.theta_min > 0.0) || !(p.theta_max > p.theta_min))
    fail(errc::invariant_violation, "theta-window",
         "equilibria: need 0 < theta_min < theta_max");
}

} // namespace detail

inline double radius_of_temperature(const EquilibriumProblem& p, double theta) {
  const auto j = eval_jumps(p.medium, theta);
  if (!(j.psi_jump > 0.0))
    fail(errc::invariant_violation, "inadmissible-temperature",
         "radius_of_temperature: [[psi]] must be positive, got " +
             std::to_string(j.psi_jump) + " at theta = " + std::to_string(theta));
  return (p.n - 1) * p.medium.sigma / j.psi_jump;
}

// theta admits an equilibrium radius below R_star iff [[psi(theta)]] clears
// sigma (n-1)/R_star.
inline bool admissible_temperature(const EquilibriumProblem& p, double theta) {
  const auto j = eval_jumps(p.medium, theta);
  return j.psi_jump > p.medium.sigma * (p.n - 1) / p.R_star;
}

// Reduced total energy along the equilibrium branch, evaluated two ways:
// directly as bulk plus surface energy of m balls of radius R(theta), and in
// the form with R eliminated through [[psi]]. The two must agree to roundoff;
// disagreement means inconsistent material callbacks.
inline double phi(const EquilibriumProblem& p, double theta) {
  const double omega = unit_sphere_area(p.n);
  const auto j = eval_jumps(p.medium, theta);
  const auto e2 = eval_phase(p.medium.phase2, theta);
  if (!(j.psi_jump > 0.0))
    fail(errc::invariant_violation, "inadmissible-temperature",
         "phi: [[psi]] must be positive at theta = " + std::to_string(theta));
  const double R = (p.n - 1) * p.medium.sigma / j.psi_jump;
  const double ball_vol = p.m * (omega / p.n) * std::pow(R, p.n);
  const double ball_area = p.m * omega * std::pow(R, p.n - 1);
  const double direct =
      p.domain_volume * e2.eps - ball_vol * j.eps_jump + p.medium.sigma * ball_area;

  const double h = j.psi_jump;
  const double hp = -j.eta_jump;  // [[psi']]
  const double cn = p.m * omega / (p.n * (p.n - 1)) *
                    std::pow((p.n - 1) * p.medium.sigma, p.n);
  const double reduced =
      p.domain_volume * e2.eps +
      cn * (std::pow(h, 1 - p.n) + (p.n - 1) * theta * hp / std::pow(h, p.n));

  const double scale = std::max({1.0, std::fabs(direct), std::fabs(reduced)});
  if (std::fabs(direct - reduced) > 1e-12 * scale)
    fail(errc::invariant_violation, "phi-consistency",
         "phi: direct and reduced forms disagree at theta = " + std::to_string(theta));
  return direct;
}

// d(phi)/d(theta) in the factored form: the sign of the brace decides
// stability of the branch point.
inline double phi_prime(const EquilibriumProblem& p, double theta) {
  const double omega = unit_sphere_area(p.n);
  const auto j = eval_jumps(p.medium, theta);
  if (!(j.psi_jump > 0.0))
    fail(errc::invariant_violation, "inadmissible-temperature",
         "phi_prime: [[psi]] must be positive at theta = " + std::to_string(theta));
  const double R = (p.n - 1) * p.medium.sigma / j.psi_jump;
  const double k1 = eval_phase(p.medium.phase1, theta).kappa;
  const double k2 = eval_phase(p.medium.phase2, theta).kappa;
  const double ball_vol = p.m * (omega / p.n) * std::pow(R, p.n);
  const double ball_area = p.m * omega * std::pow(R, p.n - 1);
  const double kappa_avg = (p.domain_volume - ball_vol) * k2 + ball_vol * k1;
  const double l = j.latent;
  const double pref = kappa_avg * R * R / (p.medium.sigma * (p.n - 1));
  return pref * (p.medium.sigma * (p.n - 1) / (R * R) -
                 l * l * ball_area / (theta * kappa_avg));
}

namespace detail {

// Interval endpoints where [[psi]] crosses the admissibility threshold,
// located on a log grid and sharpened by bisection.
inline std::vector<std::pair<double, double>>
admissible_intervals(const EquilibriumProblem& p) {
  const double hmin = p.medium.sigma * (p.n - 1) / p.R_star;
  auto excess = [&](double theta) {
    return eval_jumps(p.medium, theta).psi_jump - hmin;
  };
  const int K = 4096;
  const double la = std::log(p.theta_min), lb = std::log(p.theta_max);
  std::vector<std::pair<double, double>> out;
  double prev_t = p.theta_min;
  double prev_f = excess(prev_t);
  double open_at = prev_f > 0.0 ? prev_t : -1.0;
  for (int k = 1; k < K; ++k) {
    const double t = std::exp(la + (lb - la) * k / (K - 1));
    const double f = excess(t);
    if (prev_f <= 0.0 && f > 0.0) {
      const auto r = bisect(excess, prev_t, t, 1e-13 * t);
      open_at = r.x;
    } else if (prev_f > 0.0 && f <= 0.0) {
      const auto r = bisect(excess, prev_t, t, 1e-13 * t);
      if (open_at >= 0.0 && r.x > open_at) out.emplace_back(open_at, r.x);
      open_at = -1.0;
    }
    prev_t = t;
    prev_f = f;
  }
  if (open_at >= 0.0 && p.theta_max > open_at)
    out.emplace_back(open_at, p.theta_max);
  return out;
}

// 512 sample points per interval, graded geometrically towards both
// endpoints: roots crowd where R approaches R_star and near the interior
// minimum of phi, both of which can sit arbitrarily close to an edge.
inline std::vector<double> graded_samples(double a, double b) {
  const int half = 256;
  std::vector<double> s;
  s.reserve(2 * half);
  const double w = b - a;
  for (int k = 0; k < half; ++k) {
    const double t = std::pow(10.0, -12.0 * (1.0 - double(k) / (half - 1)));
    s.push_back(a + w * t);
    s.push_back(b - w * t);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

} // namespace detail

// All equilibrium temperatures with phi(theta) = E0 inside the admissible
// set, sorted by theta. Stability: single ball on a strictly descending
// branch of phi.
inline std::vector<EquilibriumState>
solve_equilibria(const EquilibriumProblem& p) {
  detail::validate_problem(p);
  auto g = [&](double theta) { return phi(p, theta) - p.E0; };
  std::vector<double> roots;
  for (const auto& [a, b] : detail::admissible_intervals(p)) {
    // keep strictly inside: phi blows up only through its R(theta) factors,
    // but [[psi]] itself is safe to evaluate at the edges
    const double pad = 1e-12 * (b - a);
    const auto samples = detail::graded_samples(a + pad, b - pad);
    double pt = samples.front();
    double pf = g(pt);
    if (pf == 0.0) roots.push_back(pt);
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const double t = samples[i];
      const double f = g(t);
      if (f == 0.0) {
        roots.push_back(t);
      } else if (pf * f < 0.0) {
        auto r = bisect(g, pt, t, 1e-12);
        // polish: guarded Newton with the closed-form derivative
        double x = r.x;
        double fx = r.fx;
        for (int it = 0; it < 3; ++it) {
          const double d = phi_prime(p, x);
          if (d == 0.0) break;
          const double xn = x - fx / d;
          if (!(xn > pt) || !(xn < t)) break;
          const double fn = g(xn);
          if (std::fabs(fn) >= std::fabs(fx)) break;
          x = xn;
          fx = fn;
        }
        roots.push_back(x);
      }
      pt = t;
      pf = f;
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) {
                            return std::fabs(x - y) <= 1e-9 * std::max(1.0, std::fabs(x));
                          }),
              roots.end());
  std::vector<EquilibriumState> states;
  states.reserve(roots.size());
  for (double theta : roots) {
    EquilibriumState s;
    s.theta = theta;
    s.radius = radius_of_temperature(p, theta);
    s.pressure_jump = -(p.n - 1) * p.medium.sigma / s.radius;
    s.phi = phi(p, theta);
    s.phi_prime = phi_prime(p, theta);
    s.stable = (p.m == 1) && (s.phi_prime < 0.0);
    states.push_back(s);
  }
  return states;
}

// Two-ball entropy landscape at fixed total energy. The symmetric
// equilibrium (R*, R*) is a critical point of the constrained entropy but
// never a local maximum: growing one ball at the expense of the other
// raises entropy.
struct OstwaldReport {
  std::vector<double> radii;     // scan grid along each axis
  std::vector<double> entropy;   // row-major S(radii[i], radii[j]); NaN invalid
  std::vector<std::uint8_t> valid;
  double r_star = 0.0;
  double theta_star = 0.0;
  double s_star = 0.0;
  double grad_norm = 0.0;
  double grad_tol = 0.0;
  bool critical = false;
  double hess_eig_min = 0.0;
  double hess_eig_max = 0.0;
  bool not_local_max = false;
};

inline OstwaldReport ostwald_scan(const EquilibriumProblem& p,
                                  const std::vector<double>& radii) {
  detail::validate_problem(p);
  if (p.m != 2)
    fail(errc::invariant_violation, "ball-count",
         "ostwald_scan: defined for the two-ball problem only");
  if (radii.empty())
    fail(errc::invariant_violation, "scan-grid", "ostwald_scan: empty grid");
  const double omega = unit_sphere_area(p.n);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // uniform temperature from the energy constraint; monotone in theta
  auto theta_of = [&](double r1, double r2, double& theta) -> bool {
    const double v1 = (omega / p.n) * (std::pow(r1, p.n) + std::pow(r2, p.n));
    if (!(v1 < p.domain_volume)) return false;
    const double area = omega * (std::pow(r1, p.n - 1) + std::pow(r2, p.n - 1));
    auto f = [&](double t) {
      const auto j = eval_jumps(p.medium, t);
      const auto e2 = eval_phase(p.medium.phase2, t);
      return p.domain_volume * e2.eps - v1 * j.eps_jump +
             p.medium.sigma * area - p.E0;
    };
    auto df = [&](double t) {
      const double k1 = eval_phase(p.medium.phase1, t).kappa;
      const double k2 = eval_phase(p.medium.phase2, t).kappa;
      return (p.domain_volume - v1) * k2 + v1 * k1;
    };
    const double flo = f(p.theta_min), fhi = f(p.theta_max);
    if (flo * fhi > 0.0) return false;
    theta = newton_bisect(f, df, p.theta_min, p.theta_max, 1e-13).x;
    return true;
  };
  auto entropy_of = [&](double r1, double r2, double& S) -> bool {
    double theta;
    if (!theta_of(r1, r2, theta)) return false;
    const double v1 = (omega / p.n) * (std::pow(r1, p.n) + std::pow(r2, p.n));
    const auto j = eval_jumps(p.medium, theta);
    const auto e2 = eval_phase(p.medium.phase2, theta);
    S = p.domain_volume * e2.eta - v1 * j.eta_jump;
    return true;
  };

  OstwaldReport rep;
  rep.radii = radii;
  const std::size_t K = radii.size();
  rep.entropy.assign(K * K, nan);
  rep.valid.assign(K * K, 0);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) {
      double S;
      if (entropy_of(radii[i], radii[j], S)) {
        rep.entropy[i * K + j] = S;
        rep.valid[i * K + j] = 1;
      }
    }

  const auto states = solve_equilibria(p);
  if (states.empty())
    fail(errc::invariant_violation, "no-critical-point",
         "ostwald_scan: no symmetric equilibrium for this energy");
  rep.theta_star = states.front().theta;
  rep.r_star = states.front().radius;
  if (!entropy_of(rep.r_star, rep.r_star, rep.s_star))
    fail(errc::invariant_violation, "no-critical-point",
         "ostwald_scan: symmetric equilibrium outside the valid region");

  const double rscale = std::max(rep.r_star, 1.0);
  const double dg = 1e-5 * rscale;
  auto S_at = [&](double r1, double r2) {
    double S;
    if (!entropy_of(r1, r2, S))
      fail(errc::invariant_violation, "no-critical-point",
           "ostwald_scan: stencil around the critical point leaves the valid region");
    return S;
  };
  const double g1 = (S_at(rep.r_star + dg, rep.r_star) -
                     S_at(rep.r_star - dg, rep.r_star)) / (2.0 * dg);
  const double g2 = (S_at(rep.r_star, rep.r_star + dg) -
                     S_at(rep.r_star, rep.r_star - dg)) / (2.0 * dg);
  rep.grad_norm = std::hypot(g1, g2);
  rep.grad_tol = 1e-6 * (1.0 + std::fabs(rep.s_star));
  rep.critical = rep.grad_norm <= rep.grad_tol;

  const double dh = 1e-3 * rscale;
  const double s00 = S_at(rep.r_star, rep.r_star);
  const double h11 = (S_at(rep.r_star + dh, rep.r_star) - 2.0 * s00 +
                      S_at(rep.r_star - dh, rep.r_star)) / (dh * dh);
  const double h22 = (S_at(rep.r_star, rep.r_star + dh) - 2.0 * s00 +
                      S_at(rep.r_star, rep.r_star - dh)) / (dh * dh);
  const double h12 = (S_at(rep.r_star + dh, rep.r_star + dh) -
                      S_at(rep.r_star + dh, rep.r_star - dh) -
                      S_at(rep.r_star - dh, rep.r_star + dh) +
                      S_at(rep.r_star - dh, rep.r_star - dh)) / (4.0 * dh * dh);
  const double tr = h11 + h22;
  const double disc = std::hypot(h11 - h22, 2.0 * h12);
  rep.hess_eig_min = 0.5 * (tr - disc);
  rep.hess_eig_max = 0.5 * (tr + disc);

  double grid_max = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < K * K; ++idx)
    if (rep.valid[idx]) grid_max = std::max(grid_max, rep.entropy[idx]);
  const double eig_tol = 1e-6 * (1.0 + std::fabs(rep.s_star)) / (rscale * rscale);
  rep.not_local_max = rep.hess_eig_max > eig_tol ||
                      grid_max > rep.s_star + 1e-9 * (1.0 + std::fabs(rep.s_star));
  return rep;
}

} // namespace phasebench
