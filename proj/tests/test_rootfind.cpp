#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <phasebench/rootfind.hpp>

using phasebench::bisect;
using phasebench::newton_bisect;

TEST_CASE("bisect finds cos root to requested width") {
  auto r = bisect([](double x) { return std::cos(x); }, 0.0, 3.0, 1e-12);
  REQUIRE(r.converged);
  REQUIRE(std::fabs(r.x - std::acos(-1.0) / 2.0) < 1e-11);
}

TEST_CASE("bisect returns exact endpoint zeros without iterating") {
  auto r = bisect([](double x) { return x - 2.0; }, 2.0, 5.0, 1e-12);
  REQUIRE(r.converged);
  REQUIRE(r.x == 2.0);
  REQUIRE(r.iterations == 0);
}

TEST_CASE("bisect rejects a non-bracketing interval") {
  bool threw = false;
  try {
    bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12);
  } catch (const phasebench::error& e) {
    threw = true;
    REQUIRE(e.code() == phasebench::errc::invariant_violation);
    REQUIRE(e.slug() == "no-bracket");
  }
  REQUIRE(threw);
}

TEST_CASE("newton_bisect converges fast on a smooth cubic") {
  auto f = [](double x) { return x * x * x - 8.0; };
  auto df = [](double x) { return 3.0 * x * x; };
  auto r = newton_bisect(f, df, 0.5, 5.0, 1e-14);
  REQUIRE(r.converged);
  REQUIRE(std::fabs(r.x - 2.0) < 1e-12);
  REQUIRE(r.iterations < 30);
}

TEST_CASE("newton_bisect survives a vanishing derivative at the root") {
  auto f = [](double x) { return x * x * x; };
  auto df = [](double x) { return 3.0 * x * x; };
  auto r = newton_bisect(f, df, -1.0, 2.0, 1e-12);
  REQUIRE(r.converged);
  REQUIRE(std::fabs(r.x) < 1e-10);
}

TEST_CASE("newton_bisect agrees with bisect") {
  auto f = [](double x) { return std::exp(x) - 3.0 * x; };  // root near 0.619
  auto df = [](double x) { return std::exp(x) - 3.0; };
  auto a = bisect(f, 0.0, 1.0, 1e-13);
  auto b = newton_bisect(f, df, 0.0, 1.0, 1e-13);
  REQUIRE(std::fabs(a.x - b.x) < 1e-12);
}
