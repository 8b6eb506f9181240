#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <phasebench/thermo.hpp>

#include "reference_medium.hpp"

using phasebench::eval_jumps;
using phasebench::eval_phase;
using phasebench::Medium;
using phasebench::PhaseMaterial;
using phasebench::ThermoEval;

namespace {

PhaseMaterial builtin_material(double c, double d, double e) {
  PhaseMaterial m;
  m.c = c;
  m.d = d;
  m.e = e;
  return m;
}

// Same free energy as builtin_material but routed through the callback path.
PhaseMaterial callback_material(double c, double d, double e) {
  PhaseMaterial m;
  m.psi_fn = [=](double t) { return -c * t * std::log(t) + d * t + e; };
  m.dpsi_fn = [=](double t) { return -c * (std::log(t) + 1.0) + d; };
  m.d2psi_fn = [=](double t) { return -c / t; };
  return m;
}

} // namespace

TEST_CASE("builtin phase values at theta = 1") {
  const auto ev = eval_phase(builtin_material(1.0, 0.0, 1.0), 1.0);
  REQUIRE(ev.psi == 1.0);
  REQUIRE(ev.eta == 1.0);
  REQUIRE(ev.eps == 2.0);
  REQUIRE(ev.kappa == 1.0);
}

TEST_CASE("builtin phase values at theta = e") {
  const double te = std::exp(1.0);
  const auto ev = eval_phase(builtin_material(1.0, 0.0, 1.0), te);
  REQUIRE(std::fabs(ev.psi - (1.0 - te)) < 1e-15 * te);
  REQUIRE(std::fabs(ev.eta - 2.0) < 1e-15);
  REQUIRE(std::fabs(ev.eps - (te + 1.0)) < 1e-15 * te);
}

TEST_CASE("eps equals psi + theta eta across random materials") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coef(0.1, 5.0);
  std::uniform_real_distribution<double> off(-3.0, 3.0);
  std::uniform_real_distribution<double> logt(std::log(1e-3), std::log(1e3));
  for (int k = 0; k < 2000; ++k) {
    const auto m = builtin_material(coef(rng), off(rng), off(rng));
    const double theta = std::exp(logt(rng));
    const auto ev = eval_phase(m, theta);
    const double recomb = ev.psi + theta * ev.eta;
    const double scale = std::max({1.0, std::fabs(ev.eps), std::fabs(recomb)});
    REQUIRE(std::fabs(ev.eps - recomb) <= 1e-12 * scale);
  }
}

TEST_CASE("eta and kappa match finite differences of psi") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> coef(0.2, 4.0);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  std::uniform_real_distribution<double> theta_d(0.2, 50.0);
  for (int k = 0; k < 500; ++k) {
    const auto m = builtin_material(coef(rng), off(rng), off(rng));
    const double theta = theta_d(rng);
    const double h = 1e-5 * theta;
    const auto ev = eval_phase(m, theta);
    const double psi_p = eval_phase(m, theta + h).psi;
    const double psi_m = eval_phase(m, theta - h).psi;
    const double dpsi_fd = (psi_p - psi_m) / (2.0 * h);
    const double d2psi_fd = (psi_p - 2.0 * ev.psi + psi_m) / (h * h);
    REQUIRE(std::fabs(-dpsi_fd - ev.eta) < 1e-7 * std::max(1.0, std::fabs(ev.eta)));
    REQUIRE(std::fabs(-theta * d2psi_fd - ev.kappa) < 1e-4 * ev.kappa);
  }
}

TEST_CASE("callback path reproduces the builtin family") {
  const auto mb = builtin_material(1.5, -0.7, 0.3);
  const auto mc = callback_material(1.5, -0.7, 0.3);
  for (double theta : {0.1, 0.5, 1.0, 2.0, 7.7, 300.0}) {
    const auto eb = eval_phase(mb, theta);
    const auto ec = eval_phase(mc, theta);
    const double s = std::max(1.0, std::fabs(eb.psi));
    REQUIRE(std::fabs(eb.psi - ec.psi) < 1e-12 * s);
    REQUIRE(std::fabs(eb.eta - ec.eta) < 1e-12 * std::max(1.0, std::fabs(eb.eta)));
    REQUIRE(std::fabs(eb.eps - ec.eps) < 1e-12 * std::max(1.0, std::fabs(eb.eps)));
    REQUIRE(std::fabs(eb.kappa - ec.kappa) < 1e-12 * eb.kappa);
  }
}

TEST_CASE("reference medium jumps at theta = 2 and theta = 1") {
  const Medium med = reference_medium();
  const auto j2 = eval_jumps(med, 2.0);
  REQUIRE(std::fabs(j2.psi_jump - 1.0) < 1e-14);
  REQUIRE(std::fabs(j2.latent - 2.0) < 1e-14);
  REQUIRE(std::fabs(j2.eps_jump - (-1.0)) < 1e-14);
  REQUIRE(std::fabs(j2.eta_jump - (-1.0)) < 1e-14);
  const auto j1 = eval_jumps(med, 1.0);
  REQUIRE(std::fabs(j1.psi_jump) < 1e-15);
  REQUIRE(std::fabs(j1.latent - 1.0) < 1e-14);
}

TEST_CASE("latent heat both ways stays consistent across temperatures") {
  const Medium med = reference_medium();
  for (double theta = 0.05; theta < 900.0; theta *= 1.7) {
    const auto j = eval_jumps(med, theta);  // throws if the two routes split
    REQUIRE(std::fabs(j.latent - theta) < 1e-12 * std::max(1.0, theta));
  }
}

TEST_CASE("nonpositive theta is rejected") {
  bool threw = false;
  try {
    eval_phase(builtin_material(1.0, 0.0, 0.0), 0.0);
  } catch (const phasebench::error& e) {
    threw = true;
    REQUIRE(e.code() == phasebench::errc::invariant_violation);
    REQUIRE(e.slug() == "theta-domain");
  }
  REQUIRE(threw);
}

TEST_CASE("convex free energy (negative heat capacity) is rejected") {
  PhaseMaterial bad;
  bad.psi_fn = [](double t) { return t * t; };
  bad.dpsi_fn = [](double t) { return 2.0 * t; };
  bad.d2psi_fn = [](double) { return 2.0; };
  bool threw = false;
  try {
    eval_phase(bad, 1.0);
  } catch (const phasebench::error& e) {
    threw = true;
    REQUIRE(e.slug() == "kappa-nonpositive");
  }
  REQUIRE(threw);
}

TEST_CASE("medium validation rejects nonpositive sigma") {
  Medium med = reference_medium();
  med.sigma = -1.0;
  bool threw = false;
  try {
    phasebench::validate(med);
  } catch (const phasebench::error& e) {
    threw = true;
    REQUIRE(e.code() == phasebench::errc::invariant_violation);
    REQUIRE(e.slug() == "sigma-nonpositive");
  }
  REQUIRE(threw);
}
