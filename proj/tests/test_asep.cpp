#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "openkpz/asep.hpp"
#include "openkpz/kpz.hpp"

using namespace openkpz;
using namespace openkpz::asep;
using Catch::Approx;

TEST_CASE("kappa_pm") {
  CHECK(kappa_pm(0.25, 0.8, 0.05, true) == Approx(0.25).epsilon(1e-14));
  // y = 0 collapses the square root
  CHECK(kappa_pm(0.3, 0.4, 0.0, true) == Approx((1.0 - 0.3 - 0.4) / 0.4).epsilon(1e-14));
  // Vieta: kappa_plus * kappa_minus = -y/x
  double kp = kappa_pm(0.25, 0.8, 0.05, true), km = kappa_pm(0.25, 0.8, 0.05, false);
  CHECK(kp * km == Approx(-0.05 / 0.8).epsilon(1e-13));
  CHECK_THROWS_AS(kappa_pm(0.0, 1.0, -0.5, true), std::domain_error);
}

TEST_CASE("weak-asymmetry chart") {
  auto m = model_from_uv(16, {1.0, 0.5});
  CHECK(m.q == Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(m.alpha == Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-14));
  // u = 0 gives the half rates
  auto m0 = model_from_uv(9, {0.0, 0.7});
  CHECK(m0.alpha == Approx(0.5).epsilon(1e-14));
  CHECK(m0.gamma == Approx(m0.q / 2.0).epsilon(1e-14));
  // chart round trip: A = q^v, C = q^u
  CHECK(m.A == Approx(std::pow(m.q, 0.5)).epsilon(1e-12));
  CHECK(m.C == Approx(m.q).epsilon(1e-12));
  CHECK(m.B == Approx(-m.q).margin(1e-12));
  CHECK(m.D == Approx(-m.q).margin(1e-12));
}

TEST_CASE("generator structure") {
  SECTION("N = 1 rates") {
    auto m = model_from_rates(1, 0.3, 0.7, 0.6, 0.2, 0.1);
    auto L = build_generator(m);
    CHECK(L(0, 1) == Approx(m.alpha + m.delta));
    CHECK(L(1, 0) == Approx(m.beta + m.gamma));
  }
  SECTION("TASEP bulk clause") {
    auto m = model_from_rates(2, 0.0, 0.5, 0.5, 0.0, 0.0);
    auto L = build_generator(m);
    // state 0b01 = particle at site 1; 0b10 = particle at site 2
    CHECK(L(1, 2) == Approx(1.0));  // 10 -> 01 in site order
    CHECK(L(2, 1) == Approx(0.0).margin(1e-15));
  }
  SECTION("rows sum to zero") {
    auto m = model_from_uv(5, {0.8, -0.2});
    auto L = build_generator(m);
    for (int s = 0; s < 32; ++s) CHECK(std::abs(L.row(s).sum()) < 1e-13);
  }
  CHECK_THROWS_AS(build_generator(model_from_uv(15, {1.0, 1.0})), std::invalid_argument);
}

TEST_CASE("exact stationary measure") {
  SECTION("two-state balance at N = 1") {
    auto m = model_from_rates(1, 0.2, 0.9, 0.8, 0.3, 0.4);
    auto dist = stationary_exact(m);
    CHECK(dist.probs[1] ==
          Approx((m.alpha + m.delta) / (m.alpha + m.beta + m.gamma + m.delta)).epsilon(1e-13));
  }
  SECTION("u + v = 0 gives a product Bernoulli measure") {
    for (int N : {4, 6, 8, 10, 12}) {
      auto m = model_from_uv(N, {1.0, -1.0});
      double rho = 1.0 / (1.0 + std::pow(m.q, 1.0));
      auto prod = bernoulli_product(m, rho);
      CHECK(prod.residual < 1e-12);
    }
  }
  SECTION("solver residual below 1e-10 across sizes") {
    for (int N : {2, 4, 6, 8, 10}) {
      auto dist = stationary_exact(model_from_uv(N, {0.7, 0.4}));
      CHECK(dist.residual <= 1e-10);
      double sum = std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
      CHECK(sum == Approx(1.0).epsilon(1e-12));
    }
  }
  SECTION("particle-hole duality: pi_{u,v} equals hole-reversed pi_{v,u}") {
    const int N = 5;
    auto du = stationary_exact(model_from_uv(N, {0.9, 0.2}));
    auto dv = stationary_exact(model_from_uv(N, {0.2, 0.9}));
    for (std::size_t s = 0; s < du.probs.size(); ++s) {
      // reverse and complement the bits of s
      std::size_t t = 0;
      for (int x = 0; x < N; ++x)
        if (!((s >> x) & 1u)) t |= (std::size_t(1) << (N - 1 - x));
      CHECK(du.probs[s] == Approx(dv.probs[t]).epsilon(1e-10));
    }
  }
}

TEST_CASE("height functional Laplace transforms") {
  SECTION("zero variables give 1") {
    auto dist = stationary_exact(model_from_uv(4, {1.0, 0.5}));
    LaplaceQuery zero{{0.5}, {0.0}};
    CHECK(laplace_exact(dist, zero) == Approx(1.0).epsilon(1e-14));
  }
  SECTION("locations below the lattice spacing round to height zero") {
    auto dist = stationary_exact(model_from_uv(6, {1.0, 0.5}));
    double with_tiny = laplace_exact(dist, LaplaceQuery{{0.05, 0.5}, {0.7, 0.3}});
    double without = laplace_exact(dist, LaplaceQuery{{0.5}, {0.3}});
    CHECK(with_tiny == Approx(without).epsilon(1e-14));
  }
  SECTION("u + v = 0 matches the binomial closed form") {
    const int N = 6;
    auto m = model_from_uv(N, {1.0, -1.0});
    double rho = 1.0 / (1.0 + std::pow(m.q, 1.0));
    auto dist = bernoulli_product(m, rho);
    LaplaceQuery query{{0.5, 1.0}, {0.4, 0.25}};
    double exact = laplace_exact(dist, query);
    double closed = kpz::brownian_case(1.0, N, query);
    CHECK(exact == Approx(closed).epsilon(1e-12));
  }
  SECTION("duality of the increment law") {
    const int N = 6;
    auto duv = stationary_exact(model_from_uv(N, {0.9, 0.3}));
    auto dvu = stationary_exact(model_from_uv(N, {0.3, 0.9}));
    // E[e^{-c H_{u,v}(X)}] = E[e^{-c (H_{v,u}(1-X) - H_{v,u}(1))}] at lattice X
    double X = 2.0 / 6.0, c = 0.7;
    double lhs = laplace_exact(duv, LaplaceQuery{{X}, {c}});
    // right side: increments of the reversed walk
    double sqrtN = std::sqrt(static_cast<double>(N));
    double rhs = 0.0;
    int n1mX = static_cast<int>(std::floor(N * (1.0 - X) + 1e-12));
    for (std::size_t s = 0; s < dvu.probs.size(); ++s) {
      int h1mX = 0, h1 = 0;
      for (int x = 0; x < N; ++x) {
        int inc = ((s >> x) & 1u) ? 1 : -1;
        h1 += inc;
        if (x < n1mX) h1mX += inc;
      }
      rhs += dvu.probs[s] * std::exp(-c * (h1mX - h1) / sqrtN);
    }
    CHECK(lhs == Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("stationary current") {
  SECTION("N = 1 closed form") {
    auto m = model_from_rates(1, 0.2, 0.9, 0.8, 0.3, 0.4);
    auto dist = stationary_exact(m);
    double pi1 = dist.probs[1];
    CHECK(current_exact(dist) ==
          Approx((m.alpha - (m.alpha + m.gamma) * pi1) / (1.0 - m.q)).epsilon(1e-13));
  }
  SECTION("u + v = 0 current is rho(1-rho) for every N") {
    for (int N : {2, 5, 9}) {
      auto m = model_from_uv(N, {0.6, -0.6});
      double rho = 1.0 / (1.0 + std::pow(m.q, 0.6));
      auto dist = bernoulli_product(m, rho);
      CHECK(current_exact(dist) == Approx(rho * (1.0 - rho)).epsilon(1e-12));
    }
  }
  SECTION("symmetric point gives exactly 1/4") {
    for (int N : {2, 4, 8, 12}) {
      auto m = model_from_uv(N, {0.0, 0.0});
      auto dist = stationary_exact(m);
      CHECK(current_exact(dist) == Approx(0.25).epsilon(1e-10));
    }
  }
}

TEST_CASE("Gillespie simulation") {
  SECTION("first event from the empty configuration is a boundary insertion") {
    auto m = model_from_rates(4, 0.0, 0.6, 0.5, 0.0, 0.3);  // gamma = 0, all bulk disabled
    auto out = simulate(m, 1e9, 42, Configuration(4, 0), 0.0, 1);
    int occupied = 0;
    for (auto t : out.final_config) occupied += t;
    CHECK(occupied == 1);
    CHECK((out.final_config[0] == 1 || out.final_config[3] == 1));
  }
  SECTION("reproducible per seed") {
    auto m = model_from_uv(6, {0.5, 0.2});
    auto a = simulate(m, 100.0, 7, Configuration(6, 0));
    auto b = simulate(m, 100.0, 7, Configuration(6, 0));
    CHECK(a.events == b.events);
    CHECK(a.avg_current == b.avg_current);
    CHECK(a.final_config == b.final_config);
  }
  SECTION("long-run empirical distribution matches the exact solver") {
    const int N = 6;
    auto m = model_from_uv(N, {1.0, 0.5});
    auto dist = stationary_exact(m);
    std::vector<double> exact_occ(N, 0.0);
    for (std::size_t s = 0; s < dist.probs.size(); ++s)
      for (int x = 0; x < N; ++x)
        if ((s >> x) & 1u) exact_occ[x] += dist.probs[s];
    auto out = simulate(m, 1e5, 11, Configuration(N, 0), 1e4);
    for (int x = 0; x < N; ++x) CHECK(std::abs(out.avg_occupation[x] - exact_occ[x]) < 0.02);
    CHECK(std::abs(out.avg_current - current_exact(dist)) < 0.02);
    REQUIRE(out.state_occupancy.size() == dist.probs.size());
    double tv = 0.0;
    for (std::size_t s = 0; s < dist.probs.size(); ++s)
      tv += std::abs(out.state_occupancy[s] - dist.probs[s]);
    CHECK(0.5 * tv < 0.02);
  }
}

TEST_CASE("multi-species coupling") {
  SECTION("M = 1 reduces to the single-species law") {
    auto m = model_from_uv(5, {0.8, 0.1});
    auto single = simulate(m, 50.0, 3, Configuration(5, 0));
    auto coupled = simulate_coupled({m}, 50.0, 3, {Configuration(5, 0)});
    CHECK(coupled.final_configs[0] == single.final_config);
    CHECK(coupled.events == single.events);
  }
  SECTION("ordering preserved over a long run") {
    const int N = 20;
    double u = 0.8, v = 0.5;
    std::vector<AsepModel> models = {model_from_uv(N, {-v, v}), model_from_uv(N, {u, v}),
                                     model_from_uv(N, {u, -u})};
    std::vector<Configuration> init(3, Configuration(N, 0));
    auto out = simulate_coupled(models, 500.0, 99, init);
    CHECK(out.ordering_ok);
    for (int x = 0; x < N; ++x) {
      CHECK(out.final_configs[0][x] <= out.final_configs[1][x]);
      CHECK(out.final_configs[1][x] <= out.final_configs[2][x]);
    }
  }
  SECTION("rate monotonicity is enforced") {
    auto a = model_from_uv(4, {0.9, 0.1});
    auto b = model_from_uv(4, {0.1, 0.9});  // alpha decreases: invalid order
    CHECK_THROWS_AS(simulate_coupled({a, b}, 1.0, 1, {Configuration(4, 0), Configuration(4, 0)}),
                    std::invalid_argument);
  }
  SECTION("projected marginal generator matches the single-species generator") {
    const int N = 2;
    double u = 0.8, v = 0.5;
    std::vector<AsepModel> models = {model_from_uv(N, {-v, v}), model_from_uv(N, {u, v})};
    auto Lm = build_multispecies_generator(models);
    // project sigma in {1,2,3}^2 onto tau^1 = (sigma <= 1) occupancy
    const int M = 2;
    auto project = [&](std::size_t s, int level) {
      std::size_t t = 0, ss = s;
      for (int x = 0; x < N; ++x) {
        int sig = static_cast<int>(ss % (M + 1)) + 1;
        ss /= (M + 1);
        if (sig <= level) t |= (std::size_t(1) << x);
      }
      return t;
    };
    for (int level = 1; level <= 2; ++level) {
      auto L1 = build_generator(models[level - 1]);
      // lumped rates: for every multi-species state, the summed rate into each
      // projected target must equal the single-species rate
      for (std::size_t s = 0; s < static_cast<std::size_t>(Lm.rows()); ++s) {
        std::vector<double> lumped(4, 0.0);
        for (std::size_t t = 0; t < static_cast<std::size_t>(Lm.cols()); ++t) {
          if (t == s) continue;
          if (project(t, level) != project(s, level)) lumped[project(t, level)] += Lm(s, t);
        }
        for (std::size_t pt = 0; pt < 4; ++pt) {
          if (pt == project(s, level)) continue;
          CHECK(lumped[pt] == Approx(L1(project(s, level), pt)).margin(1e-12));
        }
      }
    }
  }
}

TEST_CASE("Monte Carlo current converges at 1/sqrt(samples) scale") {
  const int N = 8;
  auto m = model_from_uv(N, {0.5, 0.3});
  auto dist = stationary_exact(m);
  double exact = current_exact(dist);
  // batch the estimate over seeds; 3 sigma gate from the seed spread
  std::vector<double> vals;
  for (std::uint64_t seed = 1; seed <= 8; ++seed)
    vals.push_back(simulate(m, 4e4, seed, Configuration(N, 0), 4e3).avg_current);
  double mean = 0.0;
  for (double x : vals) mean += x;
  mean /= vals.size();
  double var = 0.0;
  for (double x : vals) var += (x - mean) * (x - mean);
  var /= (vals.size() - 1);
  double se = std::sqrt(var / vals.size());
  CHECK(std::abs(mean - exact) < 3.0 * se + 1e-4);
}

TEST_CASE("phase classification") {
  auto mc = phase_point(0.7, 0.3);
  CHECK(mc.phase == Phase::MaximalCurrent);
  CHECK(mc.J == Approx(0.25));
  CHECK(mc.fan);
  auto ld = phase_point(0.2, 0.3);
  CHECK(ld.phase == Phase::LowDensity);
  CHECK(ld.J == Approx(0.16));
  auto hd = phase_point(0.6, 0.7);
  CHECK(hd.phase == Phase::HighDensity);
  CHECK(hd.J == Approx(0.21));
  CHECK_FALSE(hd.fan);
  CHECK_THROWS_AS(phase_point(0.5, 0.3), std::domain_error);
  CHECK_THROWS_AS(phase_point(0.4, 0.6), std::domain_error);
}

TEST_CASE("height profile increments") {
  Configuration tau{1, 0, 0, 1, 1};
  auto h = height_profile(tau);
  REQUIRE(h.values.size() == 6);
  CHECK(h.values[0] == 0);
  for (std::size_t x = 1; x < h.values.size(); ++x)
    CHECK(std::abs(h.values[x] - h.values[x - 1]) == 1);
  CHECK(h.values[5] == 1);
}
