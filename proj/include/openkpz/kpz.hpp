// Limiting multipoint Laplace transform of the open KPZ stationary measure
// via the continuous dual Hahn process, the closed single-point formula for
// u, v > 0, the Brownian u + v = 0 case, and exact-solver sandwich checks.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "openkpz/asep.hpp"
#include "openkpz/cdh.hpp"
#include "openkpz/measure.hpp"
#include "openkpz/query.hpp"
#include "openkpz/specfun.hpp"

namespace openkpz {
namespace kpz {

using cdh::CdhProcessParams;
using measure::MixedMeasure;
using measure::QuadratureSpec;

// G(r; c; X) = exp( (1/4) sum_{k=1}^{d+1} (s_k^2 - r_k)(X_k - X_{k-1}) )
inline double g_value(const LaplaceQuery& query, const std::vector<double>& r) {
  query.validate();
  auto s = query.s();
  auto xf = query.x_full();
  if (r.size() != s.size()) throw std::invalid_argument("g_value: need d+1 entries in r");
  double expo = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    expo += 0.25 * (s[k] * s[k] - r[k]) * (xf[k + 1] - xf[k]);
  return std::exp(expo);
}

namespace detail {

struct NodeSet {
  std::vector<double> r;
  std::vector<double> log_w;  // log(GL weight * dr/drho)
};

inline NodeSet sqrt_nodes(const QuadratureSpec& spec) {
  NodeSet ns;
  const auto& gl = measure::detail::gauss_legendre(spec.nodes_per_panel);
  double rho_max = std::sqrt(spec.cutoff);
  double width = rho_max / spec.panels;
  for (int p = 0; p < spec.panels; ++p) {
    double mid = (p + 0.5) * width, half = 0.5 * width;
    for (int i = 0; i < spec.nodes_per_panel; ++i) {
      double rho = mid + half * gl.x[i];
      ns.r.push_back(rho * rho);
      ns.log_w.push_back(std::log(gl.w[i] * half) + std::log(2.0 * rho));
    }
  }
  return ns;
}

inline int match_location(const std::vector<double>& locs, double x) {
  for (std::size_t i = 0; i < locs.size(); ++i)
    if (std::abs(locs[i] - x) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

// Laplace-variable range classification. The limit formula needs
// s_1 < C_uv; the finite-N convergence guarantee additionally restricts
// each c_k below C_uv / d. Values computed in the gap are tagged rather
// than rejected.
enum class RangeTag { convergence_range, formula_range, out_of_range };

inline RangeTag range_tag(const CdhProcessParams& pp, const LaplaceQuery& query) {
  query.validate();
  auto s = query.s();
  if (!(s[0] < pp.c_uv())) return RangeTag::out_of_range;
  double per_point = pp.c_uv() / std::max(1, query.d());
  for (double ck : query.c)
    if (ck >= per_point) return RangeTag::formula_range;
  return RangeTag::convergence_range;
}

inline const char* range_tag_name(RangeTag tag) {
  switch (tag) {
    case RangeTag::convergence_range: return "convergence-range";
    case RangeTag::formula_range: return "formula-range, outside convergence-range";
    case RangeTag::out_of_range: return "out-of-range";
  }
  return "";
}

// phi_{u,v}(c, X): ratio of the G-weighted chained integral over the
// continuous dual Hahn process to the e^{-r/4}-weighted time-zero marginal.
// The chain runs in the time-reversed order r_{d+1} -> r_1 with kernels from
// s_{i+1} to s_i; when X_d = 1 the last variable is integrated out exactly.
inline double phi_limit(const CdhProcessParams& pp, const LaplaceQuery& query,
                        const QuadratureSpec& spec) {
  query.validate();
  pp.validate();
  LaplaceQuery eff;
  for (int k = 0; k < query.d(); ++k)
    if (query.c[k] > 0.0) {
      eff.X.push_back(query.X[k]);
      eff.c.push_back(query.c[k]);
    }
  if (eff.X.empty()) return 1.0;
  const int d = eff.d();
  if (d > 2) throw std::domain_error("phi_limit: nesting guard d <= 2");
  auto s = eff.s();       // s_1..s_{d+1}, s_{d+1} = 0
  auto xf = eff.x_full();  // X_0..X_{d+1}
  if (!(s[0] < pp.c_uv())) throw std::domain_error("phi_limit: need s_1 < C_uv");

  bool collapse = std::abs(eff.X[d - 1] - 1.0) < 1e-12;
  const int L = collapse ? d : d + 1;  // number of chained variables

  auto weight_log = [&](int k, double r) {  // k in 1..d+1
    return 0.25 * (s[k - 1] * s[k - 1] - r) * (xf[k] - xf[k - 1]);
  };

  auto nodes = detail::sqrt_nodes(spec);
  const int G = static_cast<int>(nodes.r.size());

  // Backward recursion: H_0 = 0; H_j(source at level j+1) integrates the
  // kernel s_{j+1} -> s_j against W_j * exp(H_{j-1}).
  std::vector<double> h_nodes(G, 0.0), h_atoms;
  {
    auto grid1 = cdh::marginal_atoms(pp, s[0]);
    h_atoms.assign(grid1.count(), 0.0);
  }
  for (int j = 1; j < L; ++j) {
    auto grid_lo = cdh::marginal_atoms(pp, s[j - 1]);  // level j support (time s_j)
    auto grid_hi = cdh::marginal_atoms(pp, s[j]);      // level j+1 support (time s_{j+1})
    std::vector<double> nh_nodes(G, measure::neg_inf), nh_atoms(grid_hi.count(), measure::neg_inf);
    auto integrate_from = [&](const MixedMeasure& tr) {
      std::vector<double> terms;
      terms.reserve(G + tr.atoms.size());
      if (tr.has_density())
        for (int i = 0; i < G; ++i) {
          double ld = tr.log_density(nodes.r[i]);
          if (ld != measure::neg_inf && h_nodes[i] != measure::neg_inf)
            terms.push_back(nodes.log_w[i] + ld + weight_log(j, nodes.r[i]) + h_nodes[i]);
        }
      for (const auto& at : tr.atoms) {
        int idx = detail::match_location(grid_lo.locations, at.location);
        if (idx < 0) throw std::runtime_error("phi_limit: unmatched transition atom");
        if (h_atoms[idx] != measure::neg_inf)
          terms.push_back(at.log_mass + weight_log(j, at.location) + h_atoms[idx]);
      }
      return measure::detail::log_sum_exp(terms);
    };
    for (int i = 0; i < G; ++i)
      nh_nodes[i] = integrate_from(cdh::transition_from_continuous(pp, s[j], s[j - 1], nodes.r[i]));
    for (int i = 0; i < grid_hi.count(); ++i)
      nh_atoms[i] = integrate_from(cdh::transition_from_atom(pp, s[j], s[j - 1], grid_hi.flavor, i));
    h_nodes = std::move(nh_nodes);
    h_atoms = std::move(nh_atoms);
  }

  // Outer integral against the marginal at time s_L.
  double log_num;
  {
    double s_outer = s[L - 1];
    auto mu = cdh::marginal_measure(pp, s_outer);
    auto grid = cdh::marginal_atoms(pp, s_outer);
    std::vector<double> terms;
    for (int i = 0; i < G; ++i) {
      double ld = mu.log_density(nodes.r[i]);
      if (ld != measure::neg_inf && h_nodes[i] != measure::neg_inf)
        terms.push_back(nodes.log_w[i] + ld + weight_log(L, nodes.r[i]) + h_nodes[i]);
    }
    for (int i = 0; i < grid.count(); ++i)
      if (h_atoms[i] != measure::neg_inf)
        terms.push_back(grid.log_masses[i] + weight_log(L, grid.locations[i]) + h_atoms[i]);
    log_num = measure::detail::log_sum_exp(terms);
  }

  double log_den = measure::integrate_log(
      cdh::marginal_measure(pp, 0.0), [](double r) { return -r / 4.0; }, spec);
  double phi = std::exp(log_num - log_den);
  if (!(phi > 0.0) || !std::isfinite(phi))
    throw std::runtime_error("phi_limit: nonpositive or non-finite value (quadrature failure)");
  return phi;
}

// E[e^{-c H_{u,v}(1)}] for u, v > 0 and c in (0, 2u): e^{c^2/4} times the
// ratio of two |Gamma|^2-weighted integrals with weight e^{-r/4}.
inline double single_point_formula(double u, double v, double c, const QuadratureSpec& spec) {
  if (!(u > 0.0 && v > 0.0)) throw std::domain_error("single_point_formula: need u, v > 0");
  if (!(c > 0.0 && c < 2.0 * u)) throw std::domain_error("single_point_formula: need c in (0, 2u)");
  auto make = [&](double shift) {
    MixedMeasure mu;
    mu.support_lo = 0.0;
    mu.support_hi = measure::pos_inf;
    mu.transform = measure::AxisTransform::sqrt_r;
    mu.log_density = [u, v, shift](double r) {
      if (!(r > 0.0)) return measure::neg_inf;
      double h = 0.5 * std::sqrt(r);
      cplx ih(0.0, h);
      return 2.0 * (specfun::log_gamma(0.5 * shift + v + ih) +
                    specfun::log_gamma(-0.5 * shift + u + ih))
                       .real() -
             0.5 * std::log(r) - 2.0 * specfun::log_gamma(cplx(0.0, std::sqrt(r))).real();
    };
    return mu;
  };
  auto decay = [](double r) { return -r / 4.0; };
  double log_num = measure::integrate_log(make(c), decay, spec);
  double log_den = measure::integrate_log(make(0.0), decay, spec);
  return std::exp(c * c / 4.0 + log_num - log_den);
}

// Exact prelimit Laplace transform of the scaled +-1 random walk height with
// up-probability rho(u) = (1 + q^u)^{-1}; the stationary law when v = -u.
inline double brownian_case(double u, int N, const LaplaceQuery& query) {
  query.validate();
  double q = std::exp(-2.0 / std::sqrt(static_cast<double>(N)));
  double rho = 1.0 / (1.0 + std::pow(q, u));
  auto s = query.s();
  double sqrtN = std::sqrt(static_cast<double>(N));
  std::vector<long long> n(query.d() + 2);
  n[0] = 0;
  for (int k = 1; k <= query.d(); ++k)
    n[k] = static_cast<long long>(std::floor(N * query.X[k - 1] + 1e-12));
  n[query.d() + 1] = N;
  double log_phi = 0.0;
  for (int k = 1; k <= query.d() + 1; ++k) {
    double site = rho * std::exp(-s[k - 1] / sqrtN) + (1.0 - rho) * std::exp(s[k - 1] / sqrtN);
    log_phi += (n[k] - n[k - 1]) * std::log(site);
  }
  return std::exp(log_phi);
}

// N -> infinity limit: prod_k exp( (X_k - X_{k-1}) (s_k^2/2 - u s_k) ).
inline double brownian_limit(double u, const LaplaceQuery& query) {
  query.validate();
  auto s = query.s();
  auto xf = query.x_full();
  double expo = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k)
    expo += (xf[k + 1] - xf[k]) * (0.5 * s[k] * s[k] - u * s[k]);
  return std::exp(expo);
}

// Exact stationary expectations of e^{-c (H(X') - H(X))} for the three
// coupled models (-v, v), (u, v), (u, -u); for u+v >= 0 and c > 0 the values
// decrease in that order.
struct SandwichResult {
  double low_drift;   // model (-v, v)
  double middle;      // model (u, v)
  double high_drift;  // model (u, -u)
};

inline SandwichResult sandwich_check(double u, double v, int N, double X, double Xp, double c) {
  if (!(u + v >= 0.0)) throw std::domain_error("sandwich_check: need u + v >= 0");
  if (N > 12) throw std::domain_error("sandwich_check: exact-solver guard N <= 12");
  auto value = [&](double uu, double vv) {
    auto dist = asep::stationary_exact(asep::model_from_uv(N, {uu, vv}));
    return asep::laplace_increment_exact(dist, X, Xp, c);
  };
  return {value(-v, v), value(u, v), value(u, -u)};
}

}  // namespace kpz
}  // namespace openkpz
