#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "equilibria.hpp"
#include "error.hpp"
#include "thermo.hpp"

namespace phasebench {

// Everything the CLI can be told, all sections merged. Each subcommand reads
// the slice it needs; required-key checks happen at dispatch time. `present`
// records which section.key entries the file actually set.
struct RunConfig {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

  Medium medium;

  // [domain]
  int n = 3;
  double R_out = 3.0;
  double volume = unset;  // alternative to R_out; exclusive
  double R_star = unset;  // default: R_out
  int m = 1;

  // [equilibria]
  double E0 = unset;
  double eq_theta_min = 1e-6;
  double eq_theta_max = 1e3;

  // [sim]
  double R0 = unset;
  double theta_init = unset;   // sets both phases unless overridden
  double theta_init1 = unset;
  double theta_init2 = unset;
  double t_end = unset;
  double dt = unset;
  int N1 = 256, N2 = 256;
  int output_every = 100;
  double delta_R = unset;      // default: 1e-3 * R_out
  double l_min = 1e-6;
  double theta_cap = 1e3;
  double budget_after = 0.0;
  std::string resume;
  long long max_steps = 200000000;

  // [geometry]
  double R_sigma = 1.0;
  double tube_a = unset;       // default: R_sigma / 2
  int grid_N = 256;

  // [thermo]
  double tab_theta_min = 0.5;
  double tab_theta_max = 4.0;
  int tab_samples = 8;

  std::set<std::string> present;

  bool has(const std::string& key) const { return present.count(key) != 0; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_num(const std::string& v, int lineno, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    fail(errc::parse_error, "bad-number",
         "config line " + std::to_string(lineno) + ": value '" + v + "' for " +
             key + " is not a number");
  if (!std::isfinite(x))
    fail(errc::parse_error, "bad-number",
         "config line " + std::to_string(lineno) + ": value for " + key +
             " must be finite");
  return x;
}

inline long long parse_int(const std::string& v, int lineno, const std::string& key) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty())
    fail(errc::parse_error, "bad-number",
         "config line " + std::to_string(lineno) + ": value '" + v + "' for " +
             key + " is not an integer");
  return x;
}

} // namespace detail

// Strict line-based parser: `[section]` headers, `key = value` entries,
// `#` comment lines, blank lines. Unknown sections or keys are rejected;
// duplicate keys warn on stderr and the last value wins.
inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    fail(errc::missing_file, "config-missing", "cannot open config file " + path);

  RunConfig cfg;
  std::map<std::string, int> seen_at;
  std::string line, section;
  int lineno = 0;

  auto apply = [&](const std::string& full, const std::string& val) {
    using detail::parse_int;
    using detail::parse_num;
    const int ln = lineno;
    if (full == "medium.c1") cfg.medium.phase1.c = parse_num(val, ln, full);
    else if (full == "medium.d1") cfg.medium.phase1.d = parse_num(val, ln, full);
    else if (full == "medium.e1") cfg.medium.phase1.e = parse_num(val, ln, full);
    else if (full == "medium.c2") cfg.medium.phase2.c = parse_num(val, ln, full);
    else if (full == "medium.d2") cfg.medium.phase2.d = parse_num(val, ln, full);
    else if (full == "medium.e2") cfg.medium.phase2.e = parse_num(val, ln, full);
    else if (full == "medium.mu1") cfg.medium.mu1 = parse_num(val, ln, full);
    else if (full == "medium.mu2") cfg.medium.mu2 = parse_num(val, ln, full);
    else if (full == "medium.dcond1") cfg.medium.dcond1 = parse_num(val, ln, full);
    else if (full == "medium.dcond2") cfg.medium.dcond2 = parse_num(val, ln, full);
    else if (full == "medium.sigma") cfg.medium.sigma = parse_num(val, ln, full);
    else if (full == "domain.n") cfg.n = static_cast<int>(parse_int(val, ln, full));
    else if (full == "domain.R_out") cfg.R_out = parse_num(val, ln, full);
    else if (full == "domain.volume") cfg.volume = parse_num(val, ln, full);
    else if (full == "domain.R_star") cfg.R_star = parse_num(val, ln, full);
    else if (full == "domain.m") cfg.m = static_cast<int>(parse_int(val, ln, full));
    else if (full == "equilibria.E0") cfg.E0 = parse_num(val, ln, full);
    else if (full == "equilibria.theta_min") cfg.eq_theta_min = parse_num(val, ln, full);
    else if (full == "equilibria.theta_max") cfg.eq_theta_max = parse_num(val, ln, full);
    else if (full == "sim.R0") cfg.R0 = parse_num(val, ln, full);
    else if (full == "sim.theta_init") cfg.theta_init = parse_num(val, ln, full);
    else if (full == "sim.theta_init1") cfg.theta_init1 = parse_num(val, ln, full);
    else if (full == "sim.theta_init2") cfg.theta_init2 = parse_num(val, ln, full);
    else if (full == "sim.t_end") cfg.t_end = parse_num(val, ln, full);
    else if (full == "sim.dt") cfg.dt = parse_num(val, ln, full);
    else if (full == "sim.N1") cfg.N1 = static_cast<int>(parse_int(val, ln, full));
    else if (full == "sim.N2") cfg.N2 = static_cast<int>(parse_int(val, ln, full));
    else if (full == "sim.output_every") cfg.output_every = static_cast<int>(parse_int(val, ln, full));
    else if (full == "sim.delta_R") cfg.delta_R = parse_num(val, ln, full);
    else if (full == "sim.l_min") cfg.l_min = parse_num(val, ln, full);
    else if (full == "sim.theta_cap") cfg.theta_cap = parse_num(val, ln, full);
    else if (full == "sim.budget_after") cfg.budget_after = parse_num(val, ln, full);
    else if (full == "sim.resume") cfg.resume = val;
    else if (full == "sim.max_steps") cfg.max_steps = parse_int(val, ln, full);
    else if (full == "geometry.R_sigma") cfg.R_sigma = parse_num(val, ln, full);
    else if (full == "geometry.a") cfg.tube_a = parse_num(val, ln, full);
    else if (full == "geometry.grid_N") cfg.grid_N = static_cast<int>(parse_int(val, ln, full));
    else if (full == "thermo.theta_min") cfg.tab_theta_min = parse_num(val, ln, full);
    else if (full == "thermo.theta_max") cfg.tab_theta_max = parse_num(val, ln, full);
    else if (full == "thermo.samples") cfg.tab_samples = static_cast<int>(parse_int(val, ln, full));
    else
      fail(errc::unknown_key, "unknown-key",
           "config line " + std::to_string(ln) + ": unknown key '" + full + "'");
  };

  static const std::set<std::string> known_sections = {
      "medium", "domain", "equilibria", "sim", "geometry", "thermo"};

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '[') {
      if (t.back() != ']')
        fail(errc::parse_error, "config-syntax",
             "config line " + std::to_string(lineno) + ": unterminated section header");
      section = detail::trim(t.substr(1, t.size() - 2));
      if (!known_sections.count(section))
        fail(errc::unknown_key, "unknown-section",
             "config line " + std::to_string(lineno) + ": unknown section [" +
                 section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(errc::parse_error, "config-syntax",
           "config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (key.empty())
      fail(errc::parse_error, "config-syntax",
           "config line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      fail(errc::parse_error, "config-syntax",
           "config line " + std::to_string(lineno) + ": key '" + key +
               "' outside any [section]");
    const std::string full = section + "." + key;
    if (auto it = seen_at.find(full); it != seen_at.end())
      std::fprintf(stderr, "warning: duplicate key '%s' at line %d overrides line %d\n",
                   full.c_str(), lineno, it->second);
    seen_at[full] = lineno;
    apply(full, val);
    cfg.present.insert(full);
  }

  // resolve derived defaults and cross-field rules
  if (cfg.n < 2)
    fail(errc::invariant_violation, "dimension", "config: domain.n must be >= 2");
  if (cfg.has("domain.volume")) {
    if (cfg.has("domain.R_out"))
      fail(errc::invariant_violation, "domain-overdetermined",
           "config: give either domain.R_out or domain.volume, not both");
    if (!(cfg.volume > 0.0))
      fail(errc::invariant_violation, "domain-size",
           "config: domain.volume must be positive");
    cfg.R_out = std::pow(cfg.n * cfg.volume / unit_sphere_area(cfg.n), 1.0 / cfg.n);
  }
  if (!(cfg.R_out > 0.0))
    fail(errc::invariant_violation, "domain-size",
         "config: domain.R_out must be positive");
  if (std::isnan(cfg.R_star)) cfg.R_star = cfg.R_out;
  if (!(cfg.R_star > 0.0))
    fail(errc::invariant_violation, "domain-size",
         "config: domain.R_star must be positive");
  if (cfg.m < 1)
    fail(errc::invariant_violation, "ball-count", "config: domain.m must be >= 1");
  if (std::isnan(cfg.delta_R)) cfg.delta_R = 1e-3 * cfg.R_out;
  if (std::isnan(cfg.tube_a)) cfg.tube_a = 0.5 * cfg.R_sigma;
  if (std::isnan(cfg.theta_init1)) cfg.theta_init1 = cfg.theta_init;
  if (std::isnan(cfg.theta_init2)) cfg.theta_init2 = cfg.theta_init;
  validate(cfg.medium);
  return cfg;
}

// Deterministic dump of the effective configuration, one section per block.
inline void echo_config(std::FILE* out, const RunConfig& c) {
  auto num = [&](const char* k, double v) { std::fprintf(out, "%s = %.17g\n", k, v); };
  auto inum = [&](const char* k, long long v) { std::fprintf(out, "%s = %lld\n", k, v); };
  std::fprintf(out, "# effective config\n[medium]\n");
  num("c1", c.medium.phase1.c); num("d1", c.medium.phase1.d); num("e1", c.medium.phase1.e);
  num("c2", c.medium.phase2.c); num("d2", c.medium.phase2.d); num("e2", c.medium.phase2.e);
  num("mu1", c.medium.mu1); num("mu2", c.medium.mu2);
  num("dcond1", c.medium.dcond1); num("dcond2", c.medium.dcond2);
  num("sigma", c.medium.sigma);
  std::fprintf(out, "[domain]\n");
  inum("n", c.n); num("R_out", c.R_out); num("R_star", c.R_star); inum("m", c.m);
  std::fprintf(out, "[equilibria]\n");
  if (!std::isnan(c.E0)) num("E0", c.E0);
  num("theta_min", c.eq_theta_min); num("theta_max", c.eq_theta_max);
  std::fprintf(out, "[sim]\n");
  if (!std::isnan(c.R0)) num("R0", c.R0);
  if (!std::isnan(c.theta_init1)) num("theta_init1", c.theta_init1);
  if (!std::isnan(c.theta_init2)) num("theta_init2", c.theta_init2);
  if (!std::isnan(c.t_end)) num("t_end", c.t_end);
  if (!std::isnan(c.dt)) num("dt", c.dt);
  inum("N1", c.N1); inum("N2", c.N2); inum("output_every", c.output_every);
  num("delta_R", c.delta_R); num("l_min", c.l_min); num("theta_cap", c.theta_cap);
  num("budget_after", c.budget_after);
  if (!c.resume.empty()) std::fprintf(out, "resume = %s\n", c.resume.c_str());
  inum("max_steps", c.max_steps);
  std::fprintf(out, "[geometry]\n");
  num("R_sigma", c.R_sigma); num("a", c.tube_a); inum("grid_N", c.grid_N);
  std::fprintf(out, "[thermo]\n");
  num("theta_min", c.tab_theta_min); num("theta_max", c.tab_theta_max);
  inum("samples", c.tab_samples);
}

} // namespace phasebench
