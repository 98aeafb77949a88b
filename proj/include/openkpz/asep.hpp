// Open ASEP on N sites: parameter charts, exact stationary measure by
// generator solve, height-function Laplace functionals, event-driven
// (Gillespie) simulation, the attractive multi-species coupling, and the
// phase-diagram current.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "openkpz/query.hpp"
#include "openkpz/rng.hpp"

namespace openkpz {
namespace asep {

struct BoundaryParams {
  double u = 0.0;
  double v = 0.0;
};

// kappa_{+-}(q, x, y) = (1 - q - x + y +- sqrt((1-q-x+y)^2 + 4xy)) / (2x)
inline double kappa_pm(double q, double x, double y, bool plus) {
  if (!(x > 0.0)) throw std::domain_error("kappa_pm: need x > 0");
  double b = 1.0 - q - x + y;
  double disc = b * b + 4.0 * x * y;
  if (disc < 0.0) throw std::domain_error("kappa_pm: negative discriminant");
  double root = std::sqrt(disc);
  return (b + (plus ? root : -root)) / (2.0 * x);
}

struct AsepModel {
  int n_sites = 1;
  double q = 0.0;
  double alpha = 0.5, beta = 0.5, gamma = 0.0, delta = 0.0;
  // Derived chart
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  double rho_left = 0.5, rho_right = 0.5;

  std::size_t n_states() const { return std::size_t(1) << n_sites; }
};

inline AsepModel model_from_rates(int N, double q, double alpha, double beta, double gamma,
                                  double delta) {
  if (N < 1) throw std::invalid_argument("model_from_rates: need N >= 1");
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("model_from_rates: need q in [0,1)");
  if (!(alpha > 0.0 && beta > 0.0) || gamma < 0.0 || delta < 0.0)
    throw std::invalid_argument("model_from_rates: need alpha, beta > 0 and gamma, delta >= 0");
  AsepModel m;
  m.n_sites = N;
  m.q = q;
  m.alpha = alpha;
  m.beta = beta;
  m.gamma = gamma;
  m.delta = delta;
  m.A = kappa_pm(q, beta, delta, true);
  m.B = kappa_pm(q, beta, delta, false);
  m.C = kappa_pm(q, alpha, gamma, true);
  m.D = kappa_pm(q, alpha, gamma, false);
  m.rho_left = 1.0 / (1.0 + m.C);
  m.rho_right = m.A / (1.0 + m.A);
  return m;
}

// Weak-asymmetry chart: q = exp(-2/sqrt(N)), alpha = 1/(1+q^u),
// beta = 1/(1+q^v), gamma = q^{u+1}/(1+q^u), delta = q^{v+1}/(1+q^v),
// which makes A = q^v, B = D = -q, C = q^u.
inline AsepModel model_from_uv(int N, BoundaryParams bp) {
  if (N < 1) throw std::invalid_argument("model_from_uv: need N >= 1");
  double q = std::exp(-2.0 / std::sqrt(static_cast<double>(N)));
  double qu = std::pow(q, bp.u), qv = std::pow(q, bp.v);
  AsepModel m = model_from_rates(N, q, 1.0 / (1.0 + qu), 1.0 / (1.0 + qv),
                                 q * qu / (1.0 + qu), q * qv / (1.0 + qv));
  if (std::abs(m.A - qv) > 1e-10 * std::max(1.0, qv) || std::abs(m.C - qu) > 1e-10 * std::max(1.0, qu))
    throw std::runtime_error("model_from_uv: chart round-trip failed");
  return m;
}

using Configuration = std::vector<std::uint8_t>;  // tau_1..tau_N as 0/1

inline Configuration config_from_state(std::size_t state, int N) {
  Configuration tau(N);
  for (int x = 0; x < N; ++x) tau[x] = static_cast<std::uint8_t>((state >> x) & 1u);
  return tau;
}

inline std::size_t state_from_config(const Configuration& tau) {
  std::size_t s = 0;
  for (std::size_t x = 0; x < tau.size(); ++x)
    if (tau[x]) s |= (std::size_t(1) << x);
  return s;
}

// h(x) = sum_{i<=x} (2 tau_i - 1), anchored at h(0) = 0.
struct HeightProfile {
  std::vector<int> values;  // h(0) .. h(N)
};

inline HeightProfile height_profile(const Configuration& tau) {
  HeightProfile h;
  h.values.resize(tau.size() + 1);
  h.values[0] = 0;
  for (std::size_t x = 0; x < tau.size(); ++x)
    h.values[x + 1] = h.values[x] + (tau[x] ? 1 : -1);
  return h;
}

// Dense generator over {0,1}^N; row = source state, rows sum to zero.
inline Eigen::MatrixXd build_generator(const AsepModel& m) {
  if (m.n_sites > 14) throw std::invalid_argument("build_generator: state-space guard N <= 14");
  const int N = m.n_sites;
  const std::size_t S = m.n_states();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(S, S);
  for (std::size_t s = 0; s < S; ++s) {
    auto occupied = [&](int x) { return ((s >> x) & 1u) != 0; };  // x in [0, N)
    // left boundary, site 1
    {
      double rate = occupied(0) ? m.gamma : m.alpha;
      if (rate > 0.0) L(s, s ^ 1u) += rate;
    }
    // bulk bonds
    for (int x = 0; x + 1 < N; ++x) {
      bool a = occupied(x), b = occupied(x + 1);
      if (a == b) continue;
      double rate = (a && !b) ? 1.0 : m.q;
      if (rate > 0.0) L(s, s ^ ((std::size_t(1) << x) | (std::size_t(1) << (x + 1)))) += rate;
    }
    // right boundary, site N
    {
      double rate = occupied(N - 1) ? m.beta : m.delta;
      if (rate > 0.0) L(s, s ^ (std::size_t(1) << (N - 1))) += rate;
    }
    L(s, s) = -L.row(s).sum();
  }
  return L;
}

struct StationaryDistribution {
  std::vector<double> probs;  // indexed by state
  AsepModel model;
  double residual = 0.0;  // max |pi L|
};

inline double generator_residual(const Eigen::MatrixXd& L, const std::vector<double>& pi) {
  Eigen::Map<const Eigen::VectorXd> p(pi.data(), pi.size());
  Eigen::VectorXd r = L.transpose() * p;
  return r.cwiseAbs().maxCoeff();
}

inline StationaryDistribution stationary_exact(const AsepModel& m) {
  if (m.n_sites > 14) throw std::invalid_argument("stationary_exact: state-space guard N <= 14");
  const std::size_t S = m.n_states();
  Eigen::MatrixXd L = build_generator(m);
  // Solve pi L = 0 with sum(pi) = 1: transpose system, replace last row.
  Eigen::MatrixXd A = L.transpose();
  A.row(S - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(S);
  b(S - 1) = 1.0;
  Eigen::VectorXd pi = A.partialPivLu().solve(b);
  if (!pi.allFinite()) throw std::runtime_error("stationary_exact: singular system");
  StationaryDistribution dist;
  dist.model = m;
  dist.probs.assign(pi.data(), pi.data() + S);
  dist.residual = generator_residual(L, dist.probs);
  if (dist.residual > 1e-10)
    throw std::runtime_error("stationary_exact: residual " + std::to_string(dist.residual) +
                             " exceeds 1e-10");
  return dist;
}

// Product Bernoulli(rho) distribution over states (stationary when AC = 1).
inline StationaryDistribution bernoulli_product(const AsepModel& m, double rho) {
  StationaryDistribution dist;
  dist.model = m;
  const std::size_t S = m.n_states();
  dist.probs.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    double p = 1.0;
    for (int x = 0; x < m.n_sites; ++x) p *= ((s >> x) & 1u) ? rho : (1.0 - rho);
    dist.probs[s] = p;
  }
  dist.residual = generator_residual(build_generator(m), dist.probs);
  return dist;
}

// E[exp(-sum_k c_k H^{(N)}(X_k^{(N)}))] with X^{(N)} = floor(N X)/N and
// H^{(N)}(X) = N^{-1/2} sum_{i <= N X} (2 tau_i - 1).
inline double laplace_exact(const StationaryDistribution& dist, const LaplaceQuery& query) {
  query.validate();
  const AsepModel& m = dist.model;
  const int N = m.n_sites;
  const double sqrtN = std::sqrt(static_cast<double>(N));
  std::vector<int> n_k(query.d());
  for (int k = 0; k < query.d(); ++k) n_k[k] = static_cast<int>(std::floor(N * query.X[k] + 1e-12));
  int k0 = 0;
  while (k0 < query.d() && n_k[k0] == 0) ++k0;  // X_k < 1/N rounds to 0, H = 0
  double acc = 0.0;
  const std::size_t S = m.n_states();
  for (std::size_t s = 0; s < S; ++s) {
    int h = 0, kidx = k0;
    double expo = 0.0;
    for (int x = 0; x < N && kidx < query.d(); ++x) {
      h += ((s >> x) & 1u) ? 1 : -1;
      while (kidx < query.d() && n_k[kidx] == x + 1) {
        expo -= query.c[kidx] * h / sqrtN;
        ++kidx;
      }
    }
    acc += dist.probs[s] * std::exp(expo);
  }
  return acc;
}

// E[exp(-c (H(X') - H(X)))] of the exact stationary measure.
inline double laplace_increment_exact(const StationaryDistribution& dist, double X, double Xp,
                                      double c) {
  const AsepModel& m = dist.model;
  const int N = m.n_sites;
  const double sqrtN = std::sqrt(static_cast<double>(N));
  int n0 = static_cast<int>(std::floor(N * X + 1e-12));
  int n1 = static_cast<int>(std::floor(N * Xp + 1e-12));
  if (n1 < n0) throw std::invalid_argument("laplace_increment_exact: need X <= X'");
  double acc = 0.0;
  const std::size_t S = m.n_states();
  for (std::size_t s = 0; s < S; ++s) {
    int h = 0;
    for (int x = n0; x < n1; ++x) h += ((s >> x) & 1u) ? 1 : -1;
    acc += dist.probs[s] * std::exp(-c * h / sqrtN);
  }
  return acc;
}

// J_N = < alpha (1 - tau_1) - gamma tau_1 > / (1 - q)
inline double current_exact(const StationaryDistribution& dist) {
  const AsepModel& m = dist.model;
  if (!(m.q < 1.0)) throw std::domain_error("current_exact: need q < 1");
  double occ1 = 0.0;
  for (std::size_t s = 0; s < dist.probs.size(); ++s)
    if (s & 1u) occ1 += dist.probs[s];
  return (m.alpha * (1.0 - occ1) - m.gamma * occ1) / (1.0 - m.q);
}

struct TrajectorySummary {
  Configuration final_config;
  std::uint64_t events = 0;
  double t_final = 0.0;
  std::vector<double> avg_occupation;  // time-averaged after burn-in
  double avg_current = 0.0;            // net injected current / (T (1-q))
  std::vector<double> state_occupancy; // dwell-time distribution, N <= 12 only
  std::uint64_t seed = 0;
  std::string rng_name;
};

// Exact event-driven simulation. Stops at t_max or after max_events events
// (0 = no event cap). Time averages exclude [0, burn_in).
inline TrajectorySummary simulate(const AsepModel& m, double t_max, std::uint64_t seed,
                                  Configuration init, double burn_in = 0.0,
                                  std::uint64_t max_events = 0) {
  if (!(t_max > 0.0)) throw std::invalid_argument("simulate: need t_max > 0");
  const int N = m.n_sites;
  if (static_cast<int>(init.size()) != N) throw std::invalid_argument("simulate: init size mismatch");
  SplitMix64 rng(seed);
  Configuration tau = std::move(init);
  std::vector<double> rates(N + 1);
  std::vector<double> occ_time(N, 0.0);
  std::vector<double> state_time;
  if (N <= 12) state_time.assign(std::size_t(1) << N, 0.0);
  std::size_t state = state_from_config(tau);
  double t = 0.0, t_avg0 = burn_in;
  long long net_in = 0;  // net entries at site 1 after burn-in
  std::uint64_t events = 0;
  while (t < t_max && (max_events == 0 || events < max_events)) {
    double total = 0.0;
    rates[0] = tau[0] ? m.gamma : m.alpha;
    total += rates[0];
    for (int x = 0; x + 1 < N; ++x) {
      double r = 0.0;
      if (tau[x] && !tau[x + 1]) r = 1.0;
      else if (!tau[x] && tau[x + 1]) r = m.q;
      rates[x + 1] = r;
      total += r;
    }
    rates[N] = tau[N - 1] ? m.beta : m.delta;
    total += rates[N];
    // alpha, beta > 0 keep at least one boundary move enabled
    double dt = -std::log(rng.next_uniform()) / total;
    double t_next = t + dt;
    double lo = std::max(t, t_avg0), hi = std::min(t_next, t_max);
    if (hi > lo) {
      for (int x = 0; x < N; ++x)
        if (tau[x]) occ_time[x] += hi - lo;
      if (!state_time.empty()) state_time[state] += hi - lo;
    }
    if (t_next >= t_max) {
      t = t_max;
      break;
    }
    t = t_next;
    double pick = rng.next_uniform() * total, cum = 0.0;
    int mv = N;
    for (int i = 0; i <= N; ++i) {
      cum += rates[i];
      if (pick <= cum) {
        mv = i;
        break;
      }
    }
    if (mv == 0) {
      bool was = tau[0];
      tau[0] ^= 1u;
      state ^= 1u;
      if (t >= t_avg0) net_in += was ? -1 : 1;
    } else if (mv == N) {
      tau[N - 1] ^= 1u;
      state ^= (std::size_t(1) << (N - 1));
    } else {
      std::swap(tau[mv - 1], tau[mv]);
      state ^= (std::size_t(1) << (mv - 1)) | (std::size_t(1) << mv);
    }
    ++events;
  }
  TrajectorySummary out;
  out.final_config = tau;
  out.events = events;
  out.t_final = t;
  double span = std::max(t, t_avg0) - t_avg0;
  out.avg_occupation.resize(N, 0.0);
  if (span > 0.0) {
    for (int x = 0; x < N; ++x) out.avg_occupation[x] = occ_time[x] / span;
    if (!state_time.empty()) {
      out.state_occupancy.resize(state_time.size());
      for (std::size_t s = 0; s < state_time.size(); ++s)
        out.state_occupancy[s] = state_time[s] / span;
    }
  }
  out.avg_current = (span > 0.0) ? net_in / (span * (1.0 - m.q)) : 0.0;
  out.seed = seed;
  out.rng_name = SplitMix64::name();
  return out;
}

// ---- Multi-species attractive coupling ----------------------------------

// Species state: sigma_x in {1, ..., M+1}; type i occupies x iff sigma_x = i,
// and the coupled marginals are tau^i_x = 1{sigma_x <= i}.
struct CoupledSummary {
  std::vector<Configuration> final_configs;  // tau^1 .. tau^M
  std::uint64_t events = 0;
  double t_final = 0.0;
  bool ordering_ok = true;
  std::vector<std::vector<double>> avg_occupation;  // per model
};

inline void check_coupling_rates(const std::vector<AsepModel>& models) {
  if (models.size() < 1) throw std::invalid_argument("coupling: need at least one model");
  for (std::size_t i = 0; i + 1 < models.size(); ++i) {
    const auto& a = models[i];
    const auto& b = models[i + 1];
    if (a.n_sites != b.n_sites || std::abs(a.q - b.q) > 1e-14)
      throw std::invalid_argument("coupling: models must share N and q");
    if (!(a.alpha <= b.alpha + 1e-14 && a.beta >= b.beta - 1e-14 && a.gamma >= b.gamma - 1e-14 &&
          a.delta <= b.delta + 1e-14))
      throw std::invalid_argument("coupling: rate monotonicity violated");
  }
}

inline std::vector<int> species_from_taus(const std::vector<Configuration>& taus, int N) {
  const int M = static_cast<int>(taus.size());
  for (int i = 0; i + 1 < M; ++i)
    for (int x = 0; x < N; ++x)
      if (taus[i][x] > taus[i + 1][x])
        throw std::invalid_argument("coupling: initial configurations not ordered");
  std::vector<int> sigma(N, M + 1);
  for (int x = 0; x < N; ++x)
    for (int i = 0; i < M; ++i)
      if (taus[i][x]) {
        sigma[x] = i + 1;
        break;
      }
  return sigma;
}

// Boundary species rates with conventions alpha^0 = beta^{M+1} = gamma^{M+1} = delta^0 = 0.
struct SpeciesRates {
  std::vector<double> alpha, beta, gamma, delta;  // index 0..M+1
  int M;
  double q;

  explicit SpeciesRates(const std::vector<AsepModel>& models) {
    M = static_cast<int>(models.size());
    q = models[0].q;
    alpha.assign(M + 2, 0.0);
    beta.assign(M + 2, 0.0);
    gamma.assign(M + 2, 0.0);
    delta.assign(M + 2, 0.0);
    for (int i = 1; i <= M; ++i) {
      alpha[i] = models[i - 1].alpha;
      beta[i] = models[i - 1].beta;
      gamma[i] = models[i - 1].gamma;
      delta[i] = models[i - 1].delta;
    }
  }
  // Boundary-change rates. The target-B rates telescope so that the type-i
  // marginal sees exactly alpha^i, beta^i, gamma^i, delta^i:
  //   left:  A -> B at alpha^B - alpha^{B-1} (B < A), gamma^{B-1} - gamma^B (B > A)
  //   right: A -> B at beta^{B-1} - beta^B   (B > A), delta^B - delta^{B-1} (B < A)
  double left_rate(int A, int B) const {
    if (B < A) return alpha[B] - alpha[B - 1];
    if (B > A) return gamma[B - 1] - (B <= M ? gamma[B] : 0.0);
    return 0.0;
  }
  double right_rate(int A, int B) const {
    if (B > A) return beta[B - 1] - (B <= M ? beta[B] : 0.0);
    if (B < A) return delta[B] - delta[B - 1];
    return 0.0;
  }
  double bulk_rate(int A, int B) const {
    if (A < B) return 1.0;
    if (A > B) return q;
    return 0.0;
  }
};

inline CoupledSummary simulate_coupled(const std::vector<AsepModel>& models, double t_max,
                                       std::uint64_t seed, std::vector<Configuration> init,
                                       double burn_in = 0.0, std::uint64_t max_events = 0) {
  check_coupling_rates(models);
  const int M = static_cast<int>(models.size());
  const int N = models[0].n_sites;
  if (static_cast<int>(init.size()) != M) throw std::invalid_argument("simulate_coupled: init count");
  std::vector<int> sigma = species_from_taus(init, N);
  SpeciesRates sr(models);
  SplitMix64 rng(seed);

  struct Move {
    int kind;  // 0 = left, 1 = bond x, 2 = right
    int x;     // bond index for kind 1
    int target;
    double rate;
  };
  std::vector<Move> moves;
  std::vector<std::vector<double>> occ_time(M, std::vector<double>(N, 0.0));
  double t = 0.0;
  std::uint64_t events = 0;
  CoupledSummary out;
  while (t < t_max && (max_events == 0 || events < max_events)) {
    moves.clear();
    double total = 0.0;
    for (int B = 1; B <= M + 1; ++B) {
      double r = sr.left_rate(sigma[0], B);
      if (r > 1e-300) {
        moves.push_back({0, 0, B, r});
        total += r;
      }
    }
    for (int x = 0; x + 1 < N; ++x) {
      double r = sr.bulk_rate(sigma[x], sigma[x + 1]);
      if (r > 1e-300) {
        moves.push_back({1, x, 0, r});
        total += r;
      }
    }
    for (int B = 1; B <= M + 1; ++B) {
      double r = sr.right_rate(sigma[N - 1], B);
      if (r > 1e-300) {
        moves.push_back({2, 0, B, r});
        total += r;
      }
    }
    if (total <= 0.0) break;
    double dt = -std::log(rng.next_uniform()) / total;
    double t_next = t + dt;
    double lo = std::max(t, burn_in), hi = std::min(t_next, t_max);
    if (hi > lo)
      for (int x = 0; x < N; ++x)
        for (int i = 0; i < M; ++i)
          if (sigma[x] <= i + 1) occ_time[i][x] += hi - lo;
    if (t_next >= t_max) {
      t = t_max;
      break;
    }
    t = t_next;
    double pick = rng.next_uniform() * total, cum = 0.0;
    const Move* chosen = &moves.back();
    for (const auto& mv : moves) {
      cum += mv.rate;
      if (pick <= cum) {
        chosen = &mv;
        break;
      }
    }
    if (chosen->kind == 0)
      sigma[0] = chosen->target;
    else if (chosen->kind == 2)
      sigma[N - 1] = chosen->target;
    else
      std::swap(sigma[chosen->x], sigma[chosen->x + 1]);
    ++events;
    // per-event ordering assertion on the coupled marginals
    for (int x = 0; x < N && out.ordering_ok; ++x)
      for (int i = 0; i + 1 < M; ++i)
        if ((sigma[x] <= i + 1 ? 1 : 0) > (sigma[x] <= i + 2 ? 1 : 0)) out.ordering_ok = false;
  }
  out.events = events;
  out.t_final = t;
  out.final_configs.resize(M);
  for (int i = 0; i < M; ++i) {
    out.final_configs[i].resize(N);
    for (int x = 0; x < N; ++x) out.final_configs[i][x] = sigma[x] <= i + 1 ? 1 : 0;
  }
  double span = std::max(t, burn_in) - burn_in;
  out.avg_occupation.assign(M, std::vector<double>(N, 0.0));
  if (span > 0.0)
    for (int i = 0; i < M; ++i)
      for (int x = 0; x < N; ++x) out.avg_occupation[i][x] = occ_time[i][x] / span;
  return out;
}

// Generator of the (M+1)-species process over states {1..M+1}^N (tiny N only).
inline Eigen::MatrixXd build_multispecies_generator(const std::vector<AsepModel>& models) {
  check_coupling_rates(models);
  const int M = static_cast<int>(models.size());
  const int N = models[0].n_sites;
  std::size_t S = 1;
  for (int x = 0; x < N; ++x) S *= static_cast<std::size_t>(M + 1);
  if (S > 4096) throw std::invalid_argument("build_multispecies_generator: state space too large");
  SpeciesRates sr(models);
  auto decode = [&](std::size_t s) {
    std::vector<int> sig(N);
    for (int x = 0; x < N; ++x) {
      sig[x] = static_cast<int>(s % (M + 1)) + 1;
      s /= (M + 1);
    }
    return sig;
  };
  auto encode = [&](const std::vector<int>& sig) {
    std::size_t s = 0;
    for (int x = N - 1; x >= 0; --x) s = s * (M + 1) + static_cast<std::size_t>(sig[x] - 1);
    return s;
  };
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(S, S);
  for (std::size_t s = 0; s < S; ++s) {
    auto sig = decode(s);
    for (int B = 1; B <= M + 1; ++B) {
      double r = sr.left_rate(sig[0], B);
      if (r > 0.0) {
        auto sig2 = sig;
        sig2[0] = B;
        L(s, encode(sig2)) += r;
      }
      r = sr.right_rate(sig[N - 1], B);
      if (r > 0.0) {
        auto sig2 = sig;
        sig2[N - 1] = B;
        L(s, encode(sig2)) += r;
      }
    }
    for (int x = 0; x + 1 < N; ++x) {
      double r = sr.bulk_rate(sig[x], sig[x + 1]);
      if (r > 0.0) {
        auto sig2 = sig;
        std::swap(sig2[x], sig2[x + 1]);
        L(s, encode(sig2)) += r;
      }
    }
    L(s, s) = -L.row(s).sum();
  }
  return L;
}

// ---- Phase diagram -------------------------------------------------------

enum class Phase { MaximalCurrent, LowDensity, HighDensity };

struct PhasePoint {
  Phase phase;
  double J;
  bool fan;  // rho_l > rho_r
};

inline PhasePoint phase_point(double rho_l, double rho_r, double tol = 1e-12) {
  if (!(rho_l > 0.0 && rho_l < 1.0 && rho_r > 0.0 && rho_r < 1.0))
    throw std::domain_error("phase_point: need rho_l, rho_r in (0,1)");
  bool on_mc_l = std::abs(rho_l - 0.5) <= tol;
  bool on_mc_r = std::abs(rho_r - 0.5) <= tol;
  bool on_diag = std::abs(rho_l + rho_r - 1.0) <= tol;
  if ((on_mc_l && rho_r <= 0.5 + tol) || (on_mc_r && rho_l >= 0.5 - tol) ||
      (on_diag && rho_l <= 0.5 + tol))
    throw std::domain_error("phase_point: on a phase boundary");
  PhasePoint out;
  out.fan = rho_l > rho_r;
  if (rho_l > 0.5 && rho_r < 0.5) {
    out.phase = Phase::MaximalCurrent;
    out.J = 0.25;
  } else if (rho_l < 0.5 && rho_l + rho_r < 1.0) {
    out.phase = Phase::LowDensity;
    out.J = rho_l * (1.0 - rho_l);
  } else {
    out.phase = Phase::HighDensity;
    out.J = rho_r * (1.0 - rho_r);
  }
  return out;
}

}  // namespace asep
}  // namespace openkpz
