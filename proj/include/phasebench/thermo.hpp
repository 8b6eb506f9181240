#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "error.hpp"

namespace phasebench {

// One bulk phase, described by its Helmholtz free energy density psi(theta).
// The built-in family is
//   psi(theta) = -c theta log theta + d theta + e,
// which gives eta = c log theta + c - d, eps = c theta + e, kappa = c.
// A custom free energy can be attached as value / first / second derivative
// callbacks; derived quantities then follow from
//   eta = -psi', eps = psi + theta eta, kappa = -theta psi''.
struct PhaseMaterial {
  double c = 1.0;
  double d = 0.0;
  double e = 0.0;

  std::function<double(double)> psi_fn;    // psi(theta)
  std::function<double(double)> dpsi_fn;   // psi'(theta)
  std::function<double(double)> d2psi_fn;  // psi''(theta)

  bool custom() const { return static_cast<bool>(psi_fn); }
};

struct ThermoEval {
  double psi;    // free energy density
  double eta;    // entropy density, -psi'
  double eps;    // internal energy density, psi + theta eta
  double kappa;  // heat capacity, -theta psi'' (must be > 0)
};

// Two phases plus interface/transport constants. Jumps are phase2 - phase1.
struct Medium {
  PhaseMaterial phase1;  // dispersed phase (inside the interface)
  PhaseMaterial phase2;  // continuous phase
  double sigma = 1.0;    // surface tension
  double mu1 = 1.0, mu2 = 1.0;        // shear viscosities
  double dcond1 = 1.0, dcond2 = 1.0;  // heat conductivities
};

struct JumpEval {
  double psi_jump;
  double eta_jump;
  double eps_jump;
  double latent;  // l(theta) = theta [[psi']] = -theta [[eta]]
};

namespace detail {

inline double dpsi_value(const PhaseMaterial& m, double theta) {
  if (m.custom()) return m.dpsi_fn(theta);
  return -m.c * (std::log(theta) + 1.0) + m.d;
}

} // namespace detail

inline ThermoEval eval_phase(const PhaseMaterial& m, double theta) {
  if (!(theta > 0.0))
    fail(errc::invariant_violation, "theta-domain",
         "eval_phase: theta must be positive, got " + std::to_string(theta));
  ThermoEval out;
  if (m.custom()) {
    if (!m.dpsi_fn || !m.d2psi_fn)
      fail(errc::invariant_violation, "incomplete-material",
           "eval_phase: custom free energy needs both derivative callbacks");
    out.psi = m.psi_fn(theta);
    out.eta = -m.dpsi_fn(theta);
    out.eps = out.psi + theta * out.eta;
    out.kappa = -theta * m.d2psi_fn(theta);
  } else {
    const double L = std::log(theta);
    out.psi = -m.c * theta * L + m.d * theta + m.e;
    out.eta = m.c * L + (m.c - m.d);
    out.eps = m.c * theta + m.e;
    out.kappa = m.c;
  }
  if (!(out.kappa > 0.0))
    fail(errc::invariant_violation, "kappa-nonpositive",
         "eval_phase: heat capacity -theta psi'' must be positive at theta = " +
             std::to_string(theta));
  return out;
}

// Jumps across the interface. The latent heat is evaluated both as
// theta [[psi']] and as -theta [[eta]]; the two must agree to roundoff,
// which cross-checks derivative callbacks of custom materials.
inline JumpEval eval_jumps(const Medium& med, double theta) {
  const ThermoEval e1 = eval_phase(med.phase1, theta);
  const ThermoEval e2 = eval_phase(med.phase2, theta);
  JumpEval out;
  out.psi_jump = e2.psi - e1.psi;
  out.eta_jump = e2.eta - e1.eta;
  out.eps_jump = e2.eps - e1.eps;
  const double l_dpsi =
      theta * (detail::dpsi_value(med.phase2, theta) - detail::dpsi_value(med.phase1, theta));
  const double l_eta = -theta * out.eta_jump;
  const double scale = std::max({1.0, std::fabs(l_dpsi), std::fabs(l_eta)});
  if (std::fabs(l_dpsi - l_eta) > 1e-12 * scale)
    fail(errc::invariant_violation, "latent-inconsistent",
         "eval_jumps: theta[[psi']] and -theta[[eta]] disagree at theta = " +
             std::to_string(theta));
  out.latent = l_eta;
  return out;
}

// Structural checks on the constants; per-theta checks live in eval_phase.
inline void validate(const Medium& med) {
  if (!(med.sigma > 0.0))
    fail(errc::invariant_violation, "sigma-nonpositive",
         "medium: surface tension must be positive");
  if (!(med.mu1 > 0.0) || !(med.mu2 > 0.0))
    fail(errc::invariant_violation, "viscosity-nonpositive",
         "medium: viscosities must be positive");
  if (!(med.dcond1 > 0.0) || !(med.dcond2 > 0.0))
    fail(errc::invariant_violation, "conductivity-nonpositive",
         "medium: heat conductivities must be positive");
  if (!med.phase1.custom() && !(med.phase1.c > 0.0))
    fail(errc::invariant_violation, "kappa-nonpositive",
         "medium: phase1 heat capacity must be positive");
  if (!med.phase2.custom() && !(med.phase2.c > 0.0))
    fail(errc::invariant_violation, "kappa-nonpositive",
         "medium: phase2 heat capacity must be positive");
}

} // namespace phasebench
