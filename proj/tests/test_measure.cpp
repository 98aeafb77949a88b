#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "openkpz/measure.hpp"
#include "openkpz/specfun.hpp"

using namespace openkpz;
using namespace openkpz::measure;
using Catch::Approx;

namespace {

MixedMeasure uniform01() {
  MixedMeasure mu;
  mu.support_lo = 0.0;
  mu.support_hi = 1.0;
  mu.log_density = [](double) { return 0.0; };
  mu.is_probability = true;
  return mu;
}

MixedMeasure pure_atoms() {
  MixedMeasure mu;
  mu.atoms = {{2.0, std::log(0.3)}, {5.0, std::log(0.7)}};
  mu.is_probability = true;
  return mu;
}

MixedMeasure half_gaussian() {  // density 2/sqrt(2 pi) e^{-r^2/2} on (0, inf)
  MixedMeasure mu;
  mu.support_lo = 0.0;
  mu.support_hi = pos_inf;
  mu.log_density = [](double r) { return std::log(2.0 / std::sqrt(2.0 * pi)) - 0.5 * r * r; };
  mu.is_probability = true;
  return mu;
}

}  // namespace

TEST_CASE("integrate basics") {
  QuadratureSpec spec;
  CHECK(total_mass(uniform01(), spec) == Approx(1.0).epsilon(1e-12));
  CHECK(integrate(pure_atoms(), [](double x) { return x; }, spec) == Approx(4.1).epsilon(1e-14));
  CHECK(integrate(uniform01(), [](double x) { return x * x; }, spec) ==
        Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("integrate is linear and atom-additive") {
  QuadratureSpec spec;
  auto mu = pure_atoms();
  auto f = [](double x) { return std::sin(x); };
  auto g = [](double x) { return x * x - 1.0; };
  double a = 0.7, b = -2.3;
  double lhs = integrate(mu, [&](double x) { return a * f(x) + b * g(x); }, spec);
  double rhs = a * integrate(mu, f, spec) + b * integrate(mu, g, spec);
  CHECK(lhs == Approx(rhs).margin(1e-14));
  MixedMeasure m1, m2;
  m1.atoms = {mu.atoms[0]};
  m2.atoms = {mu.atoms[1]};
  CHECK(integrate(m1, f, spec) + integrate(m2, f, spec) ==
        Approx(integrate(mu, f, spec)).margin(1e-15));
}

TEST_CASE("semi-infinite support with sqrt substitution") {
  QuadratureSpec spec;
  spec.cutoff = 80.0;
  MixedMeasure mu;  // density r^{-1/2} e^{-r} on (0, inf): mass Gamma(1/2)
  mu.support_lo = 0.0;
  mu.support_hi = pos_inf;
  mu.transform = AxisTransform::sqrt_r;
  mu.log_density = [](double r) { return -0.5 * std::log(r) - r; };
  CHECK(total_mass(mu, spec) == Approx(std::sqrt(pi)).epsilon(1e-8));
  CHECK(integrate(mu, [](double r) { return r; }, spec) ==
        Approx(0.5 * std::sqrt(pi)).epsilon(1e-8));
}

TEST_CASE("arccos substitution on (-1,1)") {
  QuadratureSpec spec;
  MixedMeasure mu;  // arcsine law
  mu.support_lo = -1.0;
  mu.support_hi = 1.0;
  mu.transform = AxisTransform::arccos_x;
  mu.log_density = [](double x) { return -std::log(pi * std::sqrt(1.0 - x * x)); };
  mu.is_probability = true;
  CHECK(total_mass(mu, spec) == Approx(1.0).epsilon(1e-12));
  CHECK(integrate(mu, [](double x) { return x * x; }, spec) == Approx(0.5).epsilon(1e-10));
}

TEST_CASE("integrate_log agrees with integrate") {
  QuadratureSpec spec;
  auto mu = half_gaussian();
  double direct = integrate(mu, [](double r) { return std::exp(-r); }, spec);
  double logged = integrate_log(mu, [](double r) { return -r; }, spec);
  CHECK(std::exp(logged) == Approx(direct).epsilon(1e-11));
}

TEST_CASE("self-convergence under panel doubling") {
  QuadratureSpec coarse;
  coarse.panels = 20;
  coarse.cutoff = 40.0;
  QuadratureSpec fine = coarse;
  fine.panels = 40;
  auto mu = half_gaussian();
  auto f = [](double r) { return std::cos(3.0 * r); };
  double a = integrate(mu, f, coarse), b = integrate(mu, f, fine);
  CHECK(std::abs(a - b) < coarse.rel_tol * std::max(1.0, std::abs(b)));
}

TEST_CASE("non-finite integrand reports the abscissa") {
  QuadratureSpec spec;
  CHECK_THROWS_AS(integrate(uniform01(), [](double x) { return 1.0 / (x - x); }, spec),
                  std::runtime_error);
}

TEST_CASE("chain with identity kernel reproduces the source at node level") {
  QuadratureSpec spec;
  auto mu = uniform01();
  auto kernel = [](double x) {
    MixedMeasure nu;
    nu.atoms = {{x, 0.0}};
    nu.is_probability = true;
    return nu;
  };
  auto nu = chain(mu, kernel, spec);
  auto f = [](double x) { return x * x * x - 0.2 * x; };
  CHECK(integrate(nu, f, spec) == Approx(integrate(mu, f, spec)).margin(1e-12));
}

TEST_CASE("chain with constant kernel scales by total mass") {
  QuadratureSpec spec;
  MixedMeasure mu;
  mu.support_lo = 0.0;
  mu.support_hi = 1.0;
  mu.log_density = [](double) { return std::log(2.0); };  // total mass 2
  auto kernel = [](double) { return pure_atoms(); };
  auto nu = chain(mu, kernel, spec);
  REQUIRE(nu.atoms.size() == 2);
  CHECK(std::exp(nu.atoms[0].log_mass) == Approx(2.0 * 0.3).epsilon(1e-12));
  CHECK(std::exp(nu.atoms[1].log_mass) == Approx(2.0 * 0.7).epsilon(1e-12));
}

TEST_CASE("chain then integrate equals the iterated double integral") {
  QuadratureSpec spec;
  auto mu = uniform01();
  auto kernel = [](double x) {  // exponential with rate x+1
    MixedMeasure nu;
    nu.support_lo = 0.0;
    nu.support_hi = pos_inf;
    nu.log_density = [x](double y) { return std::log(x + 1.0) - (x + 1.0) * y; };
    nu.is_probability = true;
    return nu;
  };
  auto nu = chain(mu, kernel, spec);
  double lhs = integrate(nu, [](double y) { return y; }, spec);
  CHECK(lhs == Approx(std::log(2.0)).epsilon(1e-10));  // int_0^1 dx/(x+1)
  auto bad = [](double x) {
    MixedMeasure nu;
    nu.support_lo = 0.0;
    nu.support_hi = (x < 0.5) ? 1.0 : 2.0;
    nu.log_density = [](double) { return 0.0; };
    return nu;
  };
  CHECK_THROWS_AS(chain(mu, bad, spec), std::runtime_error);
}
