#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "openkpz/askey_wilson.hpp"
#include "openkpz/cdh.hpp"
#include "openkpz/kpz.hpp"

using namespace openkpz;
using namespace openkpz::askey_wilson;
using Catch::Approx;

namespace {

QuadratureSpec aw_spec() {
  QuadratureSpec spec;
  spec.panels = 48;
  spec.nodes_per_panel = 24;
  spec.cutoff = 600.0;
  spec.rel_tol = 1e-10;
  return spec;
}

// density-or-mass lookup on a mixed measure
double value_at(const measure::MixedMeasure& mu, double x) {
  if (x > -1.0 && x < 1.0) return std::exp(mu.log_density(x));
  for (const auto& a : mu.atoms)
    if (std::abs(a.location - x) < 1e-9) return std::exp(a.log_mass);
  return 0.0;
}

}  // namespace

TEST_CASE("Askey-Wilson measure") {
  auto spec = aw_spec();
  SECTION("all parameters inside the unit disk: no atoms, mass 1") {
    auto aw = aw_measure({cplx(0.5), cplx(-0.3), cplx(0.4), cplx(-0.2), 0.5});
    CHECK(aw.atoms().empty());
    CHECK(total_mass(aw.to_mixed_measure(), spec) == Approx(1.0).epsilon(1e-6));
  }
  SECTION("atomic case a = 1.4") {
    auto aw = aw_measure({cplx(1.4), cplx(-0.3), cplx(0.4), cplx(-0.2), 0.5});
    REQUIRE(aw.atoms().size() == 1);
    CHECK(aw.atoms()[0].location == Approx(0.5 * (1.4 + 1.0 / 1.4)).epsilon(1e-14));
    CHECK(std::exp(aw.atoms()[0].log_mass) > 0.0);
    CHECK(total_mass(aw.to_mixed_measure(), spec) == Approx(1.0).epsilon(1e-6));
  }
  SECTION("two atoms when a q is still above 1") {
    auto aw = aw_measure({cplx(1.6), cplx(-0.3), cplx(0.4), cplx(-0.2), 0.7});
    REQUIRE(aw.atoms().size() == 2);  // 1.6 and 1.12
    CHECK(total_mass(aw.to_mixed_measure(), spec) == Approx(1.0).epsilon(1e-6));
  }
  SECTION("conjugate-pair parameters") {
    auto aw = aw_measure({cplx(0.4, 0.6), cplx(0.4, -0.6), cplx(0.3), cplx(-0.5), 0.4});
    CHECK(total_mass(aw.to_mixed_measure(), spec) == Approx(1.0).epsilon(1e-6));
  }
  SECTION("unpaired complex parameter is rejected") {
    CHECK_THROWS_AS(aw_measure({cplx(0.4, 0.6), cplx(0.4, 0.6), cplx(0.3), cplx(-0.5), 0.4}),
                    std::domain_error);
  }
}

TEST_CASE("Askey-Wilson process marginal") {
  auto spec = aw_spec();
  auto model = asep::model_from_uv(16, {1.0, 0.5});
  auto pp = AwProcessParams::from_model(model);
  SECTION("s = 1 is the plain parameter set") {
    auto m = aw_marginal(pp, 1.0);
    CHECK(m.params().a.real() == Approx(pp.A));
    CHECK(m.params().c.real() == Approx(pp.C));
    CHECK(total_mass(m.to_mixed_measure(), spec) == Approx(1.0).epsilon(1e-6));
  }
  SECTION("atoms appear exactly when A sqrt(s) > 1 or C / sqrt(s) > 1") {
    CHECK(aw_marginal(pp, 0.9).atoms().empty());
    // C / sqrt(s) = q / sqrt(s) > 1 for very small s
    double s_small = 0.25 * pp.C * pp.C;
    CHECK_FALSE(aw_marginal(pp, s_small).atoms().empty());
    // negative-v chart has A > 1: atoms at s = 1
    auto m2 = asep::model_from_uv(8, {1.5, -0.3});
    auto pp2 = AwProcessParams::from_model(m2);
    CHECK_FALSE(aw_marginal(pp2, 1.0).atoms().empty());
    CHECK(total_mass(aw_marginal(pp2, 1.0).to_mixed_measure(), spec) == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("Askey-Wilson transitions") {
  auto spec = aw_spec();
  auto model = asep::model_from_uv(16, {1.0, 0.5});
  auto pp = AwProcessParams::from_model(model);
  SECTION("probability measure from a continuous point") {
    auto tr = aw_transition(pp, 0.5, 1.0, 0.2);
    CHECK(total_mass(tr.to_mixed_measure(), spec) == Approx(1.0).epsilon(1e-6));
  }
  SECTION("probability measure from an atom source") {
    auto m2 = asep::model_from_uv(8, {1.5, -0.3});
    auto pp2 = AwProcessParams::from_model(m2);
    auto marg = aw_marginal(pp2, 0.7);
    REQUIRE_FALSE(marg.atoms().empty());
    auto tr = aw_transition_from_atom(pp2, 0.7, 1.0, marg.atoms()[0].w);
    CHECK(tr.density_zero());  // transitions out of atoms are purely atomic
    double mass = 0.0;
    for (const auto& a : tr.atoms()) mass += std::exp(a.log_mass);
    CHECK(mass == Approx(1.0).epsilon(1e-9));
  }
  SECTION("Chapman-Kolmogorov through measure::chain") {
    double s = 0.5, t = 1.0;
    auto mu_s = aw_marginal(pp, s).to_mixed_measure();
    auto kernel = [&](double x) { return aw_transition(pp, s, t, x).to_mixed_measure(); };
    auto chained = measure::chain(mu_s, kernel, spec);
    auto mu_t = aw_marginal(pp, t).to_mixed_measure();
    for (double x : {-0.7, -0.2, 0.1, 0.5, 0.9})
      CHECK(value_at(chained, x) == Approx(value_at(mu_t, x)).epsilon(1e-6));
  }
  SECTION("Chapman-Kolmogorov with atoms") {
    auto m2 = asep::model_from_uv(8, {1.5, -0.3});
    auto pp2 = AwProcessParams::from_model(m2);
    double s = 0.6, t = 1.0;
    auto marg_s = aw_marginal(pp2, s);
    auto kernel = [&](double x) {
      for (const auto& a : marg_s.atoms())
        if (std::abs(a.location - x) < 1e-9) return aw_transition_from_atom(pp2, s, t, a.w).to_mixed_measure();
      return aw_transition(pp2, s, t, x).to_mixed_measure();
    };
    auto chained = measure::chain(marg_s.to_mixed_measure(), kernel, spec);
    auto mu_t = aw_marginal(pp2, t).to_mixed_measure();
    REQUIRE(mu_t.atoms.size() == 1);
    for (double x : {-0.5, 0.3, 0.8, mu_t.atoms[0].location})
      CHECK(value_at(chained, x) == Approx(value_at(mu_t, x)).epsilon(1e-6));
  }
}

TEST_CASE("finite-N Laplace transform phi_n") {
  auto spec = aw_spec();
  SECTION("zero Laplace variables give exactly 1") {
    CHECK(phi_n({1.0, 0.5}, 4, LaplaceQuery{{0.5}, {0.0}}, spec) == 1.0);
  }
  SECTION("matches the exact CTMC Laplace transform, d = 1") {
    asep::BoundaryParams bp{1.0, 0.5};
    const int N = 4;
    LaplaceQuery query{{0.5}, {0.3}};
    auto dist = asep::stationary_exact(asep::model_from_uv(N, bp));
    double exact = asep::laplace_exact(dist, query);
    double aw = phi_n(bp, N, query, spec);
    CHECK(aw == Approx(exact).margin(1e-6));
  }
  SECTION("matches the exact CTMC Laplace transform with atoms, d = 1") {
    asep::BoundaryParams bp{1.5, -0.3};
    const int N = 8;
    LaplaceQuery query{{0.5}, {0.4}};
    auto dist = asep::stationary_exact(asep::model_from_uv(N, bp));
    double exact = asep::laplace_exact(dist, query);
    double aw = phi_n(bp, N, query, spec);
    CHECK(aw == Approx(exact).margin(1e-6));
  }
  SECTION("matches the exact CTMC Laplace transform, d = 2") {
    asep::BoundaryParams bp{0.8, 0.8};
    const int N = 6;
    LaplaceQuery query{{1.0 / 3.0, 2.0 / 3.0}, {0.25, 0.4}};
    auto dist = asep::stationary_exact(asep::model_from_uv(N, bp));
    double exact = asep::laplace_exact(dist, query);
    double aw = phi_n(bp, N, query, spec);
    CHECK(aw == Approx(exact).margin(1e-6));
  }
  SECTION("decreasing in c below the turning point, log-convex throughout") {
    asep::BoundaryParams bp{1.0, 0.5};
    double prev = 1.0;
    for (double c : {0.1, 0.2, 0.3, 0.4}) {
      double v = phi_n(bp, 8, LaplaceQuery{{0.5}, {c}}, spec);
      CHECK(v < prev);
      prev = v;
    }
    // log-convexity on an equispaced grid (Laplace transform of a real functional)
    std::vector<double> lv;
    for (double c = 0.1; c <= 1.51; c += 0.2)
      lv.push_back(std::log(phi_n(bp, 8, LaplaceQuery{{0.5}, {c}}, spec)));
    for (std::size_t i = 1; i + 1 < lv.size(); ++i) CHECK(lv[i] <= 0.5 * (lv[i - 1] + lv[i + 1]) + 1e-12);
  }
  SECTION("nesting guard") {
    CHECK_THROWS_AS(phi_n({1.0, 0.5}, 8, LaplaceQuery{{0.2, 0.4, 0.6}, {0.1, 0.1, 0.1}}, spec),
                    std::domain_error);
  }
}

TEST_CASE("pointwise power bound on the integrand") {
  // ((cosh(s/sqrt N) + 1 - r/2N)/2)^n <= e^{n sinh^2(s/(2 sqrt N))} e^{-(n/N) r/4 + |r|/(2N)}
  for (double s : {0.1, 0.5, 1.0})
    for (int N : {8, 64, 512})
      for (double frac : {0.25, 0.5, 1.0}) {
        int n = static_cast<int>(frac * N);
        for (double r = 0.0; r <= 4.0 * N; r += 0.21 * N) {
          double y = 1.0 - r / (2.0 * N);
          double lhs = n * std::log((std::cosh(s / std::sqrt(N)) + y) / 2.0);
          double sh = std::sinh(s / (2.0 * std::sqrt(N)));
          double rhs = n * sh * sh - (static_cast<double>(n) / N) * r / 4.0 + std::abs(r) / (2.0 * N);
          CHECK(lhs <= rhs + 1e-12);
        }
      }
}

TEST_CASE("rescaled marginal diagnostics") {
  SECTION("density converges to the continuous dual Hahn marginal") {
    asep::BoundaryParams bp{1.0, 0.5};
    cdh::CdhProcessParams pp{1.0, 0.5};
    double t = 0.5;
    for (double r : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      double target = cdh::marginal_density(pp, t, r);
      double prev_err = measure::pos_inf;
      for (int N : {100, 1000, 10000}) {
        double err = std::abs(scaled_marginal_density(bp, N, t, r) - target);
        CHECK(err < prev_err);
        prev_err = err;
      }
      CHECK(prev_err < 1e-2 * std::max(1.0, target));
    }
  }
  SECTION("r = 0 boundary is finite") {
    CHECK(scaled_marginal_density({1.0, 0.5}, 100, 0.5, 0.0) == 0.0);
    CHECK(std::isfinite(scaled_marginal_density({1.0, 0.5}, 100, 0.5, 1e-8)));
  }
  SECTION("scaled atom locations and masses converge") {
    asep::BoundaryParams bp{2.0, -0.6};
    cdh::CdhProcessParams pp{2.0, -0.6};
    double t = 0.5;
    auto grid = cdh::marginal_atoms(pp, t);
    REQUIRE(grid.flavor == cdh::AtomFlavor::v_atoms);
    REQUIRE(grid.count() == 1);
    double prev_loc = measure::pos_inf, prev_mass = measure::pos_inf;
    for (int N : {100, 1000, 10000}) {
      auto scaled = scaled_marginal_atoms(bp, N, t);
      REQUIRE(scaled.locations.size() == 1);
      double loc_err = std::abs(scaled.locations[0] - grid.locations[0]);
      double mass_err = std::abs(scaled.masses[0] - std::exp(grid.log_masses[0]));
      CHECK(loc_err < prev_loc);
      CHECK(mass_err < prev_mass);
      prev_loc = loc_err;
      prev_mass = mass_err;
    }
    CHECK(prev_loc / std::abs(grid.locations[0]) < 1e-2);
    CHECK(prev_mass / std::exp(grid.log_masses[0]) < 1e-2);
  }
}
