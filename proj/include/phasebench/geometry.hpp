#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace phasebench {

// Chart for surfaces written as normal graphs over a sphere of radius
// R_sigma: points x + chi(d/a) h(P(x)) nu(P(x)) inside a tube of half-width
// a. For n = 2 the height is sampled at grid_n equispaced angles; for n >= 3
// only rotationally invariant (constant) heights are supported, sampled
// along a meridian circle.
struct SphereChart {
  int n = 2;
  double R_sigma = 1.0;
  double a = 0.5;      // tube half-width, 0 < a <= R_sigma / 2
  int grid_n = 256;    // even, >= 16
};

inline void validate_chart(const SphereChart& c) {
  if (c.n < 2)
    fail(errc::invariant_violation, "dimension", "chart: need n >= 2");
  if (!(c.R_sigma > 0.0))
    fail(errc::invariant_violation, "radius", "chart: R_sigma must be positive");
  if (!(c.a > 0.0) || !(c.a <= 0.5 * c.R_sigma))
    fail(errc::invariant_violation, "tube-width",
         "chart: need 0 < a <= R_sigma/2 so the tube avoids origin and cut locus");
  if (c.grid_n < 16 || c.grid_n % 2 != 0)
    fail(errc::invariant_violation, "grid-size",
         "chart: grid_n must be even and >= 16");
}

// Cutoff profile: 1 on [0,1/3], 0 on [2/3,inf), quintic smoothstep between;
// C^2 with |chi'|_inf = 45/8.
inline double chi(double t) {
  const double s = std::fabs(t);
  if (s <= 1.0 / 3.0) return 1.0;
  if (s >= 2.0 / 3.0) return 0.0;
  const double u = 3.0 * (s - 1.0 / 3.0);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double chi_prime(double t) {
  const double s = std::fabs(t);
  if (s <= 1.0 / 3.0 || s >= 2.0 / 3.0) return 0.0;
  const double u = 3.0 * (s - 1.0 / 3.0);
  const double d = -3.0 * 30.0 * u * u * (1.0 - u) * (1.0 - u);
  return t < 0.0 ? -d : d;
}

constexpr double chi_prime_max() { return 45.0 / 8.0; }

struct HeightField {
  std::vector<double> values;  // h(phi_i), phi_i = 2 pi i / grid_n

  static HeightField constant(int grid_n, double value) {
    HeightField h;
    h.values.assign(static_cast<std::size_t>(grid_n), value);
    return h;
  }
  bool is_constant() const {
    for (double v : values)
      if (v != values.front()) return false;
    return true;
  }
};

namespace detail {

// 4th order centered first derivative, periodic.
inline std::vector<double> fd1_periodic(const std::vector<double>& f, double dx) {
  const std::size_t N = f.size();
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double fm2 = f[(i + N - 2) % N], fm1 = f[(i + N - 1) % N];
    const double fp1 = f[(i + 1) % N], fp2 = f[(i + 2) % N];
    out[i] = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * dx);
  }
  return out;
}

// 4th order centered second derivative, periodic.
inline std::vector<double> fd2_periodic(const std::vector<double>& f, double dx) {
  const std::size_t N = f.size();
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double fm2 = f[(i + N - 2) % N], fm1 = f[(i + N - 1) % N];
    const double fp1 = f[(i + 1) % N], fp2 = f[(i + 2) % N];
    out[i] = (-fm2 + 16.0 * fm1 - 30.0 * f[i] + 16.0 * fp1 - fp2) / (12.0 * dx * dx);
  }
  return out;
}

inline void check_field(const SphereChart& c, const HeightField& h) {
  validate_chart(c);
  if (h.values.size() != static_cast<std::size_t>(c.grid_n))
    fail(errc::invariant_violation, "size-mismatch",
         "height field has " + std::to_string(h.values.size()) +
             " samples, chart expects " + std::to_string(c.grid_n));
  if (c.n >= 3 && !h.is_constant())
    fail(errc::invariant_violation, "unsupported-configuration",
         "n >= 3 supports rotationally invariant (constant) heights only");
}

} // namespace detail

inline double sup_abs(const HeightField& h) {
  double m = 0.0;
  for (double v : h.values) m = std::max(m, std::fabs(v));
  return m;
}

// sup |grad_Sigma h|; on the circle this is |h'(phi)| / R_sigma.
inline double sup_grad(const SphereChart& c, const HeightField& h) {
  detail::check_field(c, h);
  if (h.is_constant()) return 0.0;
  const double dphi = 2.0 * std::numbers::pi / c.grid_n;
  const auto hp = detail::fd1_periodic(h.values, dphi);
  double m = 0.0;
  for (double v : hp) m = std::max(m, std::fabs(v));
  return m / c.R_sigma;
}

// Weak admissibility: 1 + h/R stays positive, so the graph calculus
// (surface quantities, curvature) is defined.
inline bool graph_admissible(const SphereChart& c, const HeightField& h) {
  detail::check_field(c, h);
  return sup_abs(h) < c.R_sigma;
}

// Strict smallness needed by the tube map: heights below
// (1/3) min{a/|chi'|_inf, R_sigma} and slopes below 1/3 keep the map a
// diffeomorphism.
inline double mapping_bound(const SphereChart& c) {
  return std::min(c.a / chi_prime_max(), c.R_sigma) / 3.0;
}

inline bool mapping_admissible(const SphereChart& c, const HeightField& h) {
  detail::check_field(c, h);
  return sup_abs(h) < mapping_bound(c) && sup_grad(c, h) < 1.0 / 3.0;
}

namespace detail {

inline void require_graph(const SphereChart& c, const HeightField& h,
                          const char* who) {
  if (!graph_admissible(c, h))
    fail(errc::invariant_violation, "height-exceeds-radius",
         std::string(who) + ": sup|h| = " + std::to_string(sup_abs(h)) +
             " must stay below R_sigma = " + std::to_string(c.R_sigma));
}

inline void require_mapping(const SphereChart& c, const HeightField& h,
                            const char* who) {
  detail::check_field(c, h);
  const double sh = sup_abs(h);
  const double bound = mapping_bound(c);
  if (!(sh < bound))
    fail(errc::invariant_violation, "mapping-height-bound",
         std::string(who) + ": sup|h| = " + std::to_string(sh) +
             " violates (1/3) min{a/|chi'|, R_sigma} = " + std::to_string(bound));
  const double sg = sup_grad(c, h);
  if (!(sg < 1.0 / 3.0))
    fail(errc::invariant_violation, "mapping-gradient-bound",
         std::string(who) + ": sup|grad h| = " + std::to_string(sg) +
             " violates the bound 1/3");
}

} // namespace detail

// Pointwise data of the perturbed surface: tangential slope
// alpha = (1+h/R)^{-1} grad_Sigma h, normal tilt beta = (1+|alpha|^2)^{-1/2},
// shrink factor m0 = (1+h/R)^{-1}, and the unit normal
// nu = beta (nu_Sigma - alpha), stored row-major grid_n x n.
struct SurfaceQuantities {
  std::vector<double> alpha_t;  // signed tangential component (n = 2)
  std::vector<double> beta;
  std::vector<double> m0;
  std::vector<double> nu;
};

inline SurfaceQuantities surface_quantities(const SphereChart& c,
                                            const HeightField& h) {
  detail::check_field(c, h);
  detail::require_graph(c, h, "surface_quantities");
  const std::size_t N = h.values.size();
  SurfaceQuantities q;
  q.alpha_t.assign(N, 0.0);
  q.beta.assign(N, 1.0);
  q.m0.assign(N, 0.0);
  q.nu.assign(N * c.n, 0.0);
  const double dphi = 2.0 * std::numbers::pi / c.grid_n;
  std::vector<double> hp;
  if (!h.is_constant()) hp = detail::fd1_periodic(h.values, dphi);
  for (std::size_t i = 0; i < N; ++i) {
    const double m0 = 1.0 / (1.0 + h.values[i] / c.R_sigma);
    q.m0[i] = m0;
    const double g = hp.empty() ? 0.0 : hp[i] / c.R_sigma;
    const double al = m0 * g;
    q.alpha_t[i] = al;
    q.beta[i] = 1.0 / std::sqrt(1.0 + al * al);
    const double phi = dphi * static_cast<double>(i);
    const double cp = std::cos(phi), sp = std::sin(phi);
    // meridian plane: nu_Sigma = (cos, sin, 0, ...), tau = (-sin, cos, 0, ...)
    q.nu[i * c.n + 0] = q.beta[i] * (cp + al * sp);
    q.nu[i * c.n + 1] = q.beta[i] * (sp - al * cp);
  }
  return q;
}

// Mean curvature (sum of principal curvatures) of the graph surface, with
// the convention H = -(n-1)/R on the sphere of radius R.
inline std::vector<double> curvature(const SphereChart& c, const HeightField& h) {
  detail::check_field(c, h);
  detail::require_graph(c, h, "curvature");
  const std::size_t N = h.values.size();
  std::vector<double> H(N);
  if (h.is_constant()) {
    const double v = -(c.n - 1) / (c.R_sigma + h.values.front());
    std::fill(H.begin(), H.end(), v);
    return H;
  }
  const double R = c.R_sigma;
  const double dphi = 2.0 * std::numbers::pi / c.grid_n;
  const auto hp = detail::fd1_periodic(h.values, dphi);
  std::vector<double> al(N);
  for (std::size_t i = 0; i < N; ++i)
    al[i] = (hp[i] / R) / (1.0 + h.values[i] / R);
  const auto alp = detail::fd1_periodic(al, dphi);
  for (std::size_t i = 0; i < N; ++i) {
    const double m0 = 1.0 / (1.0 + h.values[i] / R);
    const double b2 = 1.0 / (1.0 + al[i] * al[i]);
    const double b = std::sqrt(b2);
    // beta { tr[M0 (L + grad alpha)] - beta^2 M0 alpha . (grad alpha) alpha }
    H[i] = b * (m0 / R) * ((alp[i] - 1.0) - b2 * al[i] * al[i] * alp[i]);
  }
  return H;
}

// First variation of the curvature at h = 0: (tr L^2 + Laplace-Beltrami) h.
inline std::vector<double> curvature_linearized(const SphereChart& c,
                                                const HeightField& h) {
  detail::check_field(c, h);
  const std::size_t N = h.values.size();
  const double R2 = c.R_sigma * c.R_sigma;
  std::vector<double> out(N);
  if (h.is_constant()) {
    const double v = (c.n - 1) * h.values.front() / R2;
    std::fill(out.begin(), out.end(), v);
    return out;
  }
  const double dphi = 2.0 * std::numbers::pi / c.grid_n;
  const auto hpp = detail::fd2_periodic(h.values, dphi);
  for (std::size_t i = 0; i < N; ++i) out[i] = (h.values[i] + hpp[i]) / R2;
  return out;
}

namespace detail {

// Trigonometric interpolation of periodic samples (exact for band-limited
// data, spectrally accurate for smooth h); needed because the tube map is
// evaluated off the sample grid.
struct TrigInterp {
  std::vector<double> ca, sb;
  int N = 0;

  explicit TrigInterp(const std::vector<double>& f) {
    N = static_cast<int>(f.size());
    const int M = N / 2;
    ca.assign(M + 1, 0.0);
    sb.assign(M + 1, 0.0);
    for (int k = 0; k <= M; ++k) {
      double a = 0.0, b = 0.0;
      for (int i = 0; i < N; ++i) {
        const double ang = 2.0 * std::numbers::pi * k * i / N;
        a += f[i] * std::cos(ang);
        b += f[i] * std::sin(ang);
      }
      ca[k] = 2.0 * a / N;
      sb[k] = 2.0 * b / N;
    }
  }

  double operator()(double phi) const {
    const int M = N / 2;
    double s = 0.5 * ca[0];
    for (int k = 1; k < M; ++k)
      s += ca[k] * std::cos(k * phi) + sb[k] * std::sin(k * phi);
    s += 0.5 * ca[M] * std::cos(M * phi);
    return s;
  }
};

// n x n helpers, row-major.
inline std::vector<double> mat_identity(int n) {
  std::vector<double> I(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) I[i * n + i] = 1.0;
  return I;
}

inline std::vector<double> mat_inverse(std::vector<double> A, int n,
                                       const char* who) {
  auto I = mat_identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
    if (A[piv * n + col] == 0.0)
      fail(errc::invariant_violation, "singular-matrix",
           std::string(who) + ": singular system");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(A[piv * n + j], A[col * n + j]);
        std::swap(I[piv * n + j], I[col * n + j]);
      }
    const double d = A[col * n + col];
    for (int j = 0; j < n; ++j) {
      A[col * n + j] /= d;
      I[col * n + j] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = A[r * n + col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        A[r * n + j] -= f * A[col * n + j];
        I[r * n + j] -= f * I[col * n + j];
      }
    }
  }
  return I;
}

inline double mat_norm1(const std::vector<double>& A, int n) {
  double m = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::fabs(A[i * n + j]);
    m = std::max(m, s);
  }
  return m;
}

} // namespace detail

// The tube map x -> x + chi(d/a) h(P(x)) nu(P(x)). Identity outside the
// tube; requires strict admissibility.
inline std::vector<double> hanzawa_map(const SphereChart& c, const HeightField& h,
                                       const std::vector<double>& x) {
  detail::require_mapping(c, h, "hanzawa_map");
  if (x.size() != static_cast<std::size_t>(c.n))
    fail(errc::invariant_violation, "size-mismatch",
         "hanzawa_map: point dimension does not match the chart");
  double rho2 = 0.0;
  for (double v : x) rho2 += v * v;
  const double rho = std::sqrt(rho2);
  const double cut = chi((rho - c.R_sigma) / c.a);
  if (cut == 0.0) return x;
  // inside the tube: rho >= R - 2a/3 > 0, the projection is safe
  double hval;
  if (h.is_constant()) {
    hval = h.values.front();
  } else {
    const detail::TrigInterp interp(h.values);
    hval = interp(std::atan2(x[1], x[0]));
  }
  std::vector<double> out(x);
  const double f = cut * hval / rho;
  for (int i = 0; i < c.n; ++i) out[i] += f * x[i];
  return out;
}

// M1 with M1^T = (I + Dxi)^{-1} Dxi, Dxi the displacement gradient of the
// tube map, taken by centered differences. Rejects badly conditioned
// I + Dxi (cannot happen under the admissibility bounds).
inline std::vector<double> jacobian_m1(const SphereChart& c, const HeightField& h,
                                       const std::vector<double>& x) {
  detail::require_mapping(c, h, "jacobian_m1");
  if (x.size() != static_cast<std::size_t>(c.n))
    fail(errc::invariant_violation, "size-mismatch",
         "jacobian_m1: point dimension does not match the chart");
  const int n = c.n;
  const double delta = 1e-6 * c.a;

  // one interpolant reused by all 2n map evaluations
  const bool constant = h.is_constant();
  std::optional<detail::TrigInterp> interp;
  if (!constant) interp.emplace(h.values);
  auto map_at = [&](const std::vector<double>& p) {
    double rho2 = 0.0;
    for (double v : p) rho2 += v * v;
    const double rho = std::sqrt(rho2);
    const double cut = chi((rho - c.R_sigma) / c.a);
    std::vector<double> out(p);
    if (cut == 0.0) return out;
    const double hval = constant ? h.values.front() : (*interp)(std::atan2(p[1], p[0]));
    const double f = cut * hval / rho;
    for (int i = 0; i < n; ++i) out[i] += f * p[i];
    return out;
  };

  std::vector<double> dxi(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> xp(x), xm(x);
  for (int j = 0; j < n; ++j) {
    xp[j] = x[j] + delta;
    xm[j] = x[j] - delta;
    const auto fp = map_at(xp);
    const auto fm = map_at(xm);
    for (int i = 0; i < n; ++i) {
      double d = (fp[i] - fm[i]) / (2.0 * delta);
      if (i == j) d -= 1.0;
      dxi[i * n + j] = d;
    }
    xp[j] = x[j];
    xm[j] = x[j];
  }

  auto A = dxi;
  for (int i = 0; i < n; ++i) A[i * n + i] += 1.0;  // I + Dxi
  const auto Ainv = detail::mat_inverse(A, n, "jacobian_m1");
  const double cond = detail::mat_norm1(A, n) * detail::mat_norm1(Ainv, n);
  if (cond > 1e3)
    fail(errc::invariant_violation, "ill-conditioned",
         "jacobian_m1: cond(I + Dxi) = " + std::to_string(cond) + " exceeds 1e3");

  // M1^T = Ainv * Dxi; return its transpose
  std::vector<double> m1(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += Ainv[i * n + k] * dxi[k * n + j];
      m1[j * n + i] = s;
    }
  return m1;
}

// Independent curvature reference for closed planar curves r(phi) > 0:
// H = -(r^2 + 2 r'^2 - r r'') / (r^2 + r'^2)^{3/2}.
inline std::vector<double> curvature_oracle(const std::vector<double>& r) {
  if (r.size() < 16)
    fail(errc::invariant_violation, "grid-size",
         "curvature_oracle: need at least 16 samples");
  for (double v : r)
    if (!(v > 0.0))
      fail(errc::invariant_violation, "curve-positivity",
           "curvature_oracle: polar radius must stay positive");
  const std::size_t N = r.size();
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(N);
  const auto rp = detail::fd1_periodic(r, dphi);
  const auto rpp = detail::fd2_periodic(r, dphi);
  std::vector<double> H(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double num = r[i] * r[i] + 2.0 * rp[i] * rp[i] - r[i] * rpp[i];
    const double den = std::pow(r[i] * r[i] + rp[i] * rp[i], 1.5);
    H[i] = -num / den;
  }
  return H;
}

// Normal velocity of the moving graph: V = beta dh/dt, pointwise.
inline std::vector<double> normal_velocity(const std::vector<double>& beta,
                                           const std::vector<double>& dh_dt) {
  if (beta.size() != dh_dt.size())
    fail(errc::invariant_violation, "size-mismatch",
         "normal_velocity: beta and dh/dt sample counts differ");
  std::vector<double> v(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) v[i] = beta[i] * dh_dt[i];
  return v;
}

} // namespace phasebench
