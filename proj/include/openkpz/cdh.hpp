// Continuous dual Hahn and Wilson orthogonality measures with their P/N1/N2
// (and Wilson P1/P2) parameter cases, the continuous dual Hahn process
// marginal (infinite mass) and transition kernels including atoms, and
// numeric Chapman-Kolmogorov checks.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "openkpz/measure.hpp"
#include "openkpz/specfun.hpp"

namespace openkpz {
namespace cdh {

using measure::MixedMeasure;
using measure::QuadratureSpec;
using specfun::log_gamma;
using specfun::pochhammer_rising;

enum class CdhTag { P, N1, N2 };

// Parameters (a; b, c) with an atom frame. In case P the frame is empty; in
// N1 it has floor(-a)+1 locations; in N2 masses sit on the first k+1 frame
// locations where a + b = -k.
struct CdhCase {
  CdhTag tag = CdhTag::P;
  double a = 0.0;
  cplx b, c;
  std::vector<double> frame;
  int n2_k = -1;
};

namespace detail {

inline bool conj_pair(cplx b, cplx c, double tol = 1e-12) {
  return std::abs(b.imag()) > tol && std::abs(b - std::conj(c)) < tol * (1.0 + std::abs(b));
}

// Integer snap with the ambiguity guard: values within 1e-9 of an integer
// are snapped; values between 1e-9 and 1e-6 away are rejected as ambiguous.
inline bool snap_nonneg_integer(double x, int& k) {
  double r = std::round(x);
  double d = std::abs(x - r);
  if (d < 1e-9) {
    if (r < -0.5) return false;
    k = static_cast<int>(r);
    return true;
  }
  if (d < 1e-6)
    throw std::domain_error("cdh: parameter within [1e-9,1e-6) of the N2 integer condition; ambiguous");
  return false;
}

}  // namespace detail

inline CdhCase make_cdh_case(double a, cplx b, cplx c, std::vector<double> frame) {
  CdhCase cs;
  cs.a = a;
  cs.b = b;
  cs.c = c;
  cs.frame = std::move(frame);
  if (detail::conj_pair(b, c)) {
    if (!(b.real() > 0.0)) throw std::domain_error("cdh: conjugate pair needs Re(b) = Re(c) > 0");
    if (a >= 0.0) {
      cs.tag = CdhTag::P;
      if (!cs.frame.empty()) throw std::domain_error("cdh: case P takes an empty frame");
    } else {
      cs.tag = CdhTag::N1;
      if (static_cast<int>(cs.frame.size()) != static_cast<int>(std::floor(-a)) + 1)
        throw std::domain_error("cdh: case N1 frame size must be floor(-a)+1");
    }
    return cs;
  }
  if (std::abs(b.imag()) > 1e-12 || std::abs(c.imag()) > 1e-12)
    throw std::domain_error("cdh: b, c must be real or a conjugate pair");
  double br = b.real(), cr = c.real();
  int k = -1;
  if (a < 0.0 && detail::snap_nonneg_integer(-(a + br), k)) {
    if (!(br > 0.0 && br + cr > 0.0 && cr - a > 0.0))
      throw std::domain_error("cdh: case N2 needs b, b+c, c-a > 0");
    cs.tag = CdhTag::N2;
    cs.n2_k = k;
    if (static_cast<int>(cs.frame.size()) < k + 1)
      throw std::domain_error("cdh: case N2 frame too small");
    return cs;
  }
  if (a >= 0.0) {
    if (!(br > 0.0 && cr > 0.0)) throw std::domain_error("cdh: case P needs b, c > 0");
    cs.tag = CdhTag::P;
    if (!cs.frame.empty()) throw std::domain_error("cdh: case P takes an empty frame");
    return cs;
  }
  if (!(a + br > 0.0 && a + cr > 0.0))
    throw std::domain_error("cdh: case N1 needs a+b, a+c > 0");
  cs.tag = CdhTag::N1;
  if (static_cast<int>(cs.frame.size()) != static_cast<int>(std::floor(-a)) + 1)
    throw std::domain_error("cdh: case N1 frame size must be floor(-a)+1");
  return cs;
}

// log CDH^c(x; a, b, c) for x > 0.
inline double cdh_log_density(double a, cplx b, cplx c, double x) {
  if (!(x > 0.0)) return measure::neg_inf;
  double h = 0.5 * std::sqrt(x);
  cplx ih(0.0, h);
  double num = 2.0 * (log_gamma(a + ih) + log_gamma(b + ih) + log_gamma(c + ih)).real();
  double den = (log_gamma(a + b) + log_gamma(a + c) + log_gamma(b + c)).real() + 0.5 * std::log(x) +
               2.0 * log_gamma(cplx(0.0, std::sqrt(x))).real();
  return -std::log(8.0 * pi) + num - den;
}

// CDH^d mass at frame index j.
inline double cdh_atom_mass(double a, cplx b, cplx c, int j) {
  cplx num = pochhammer_rising(cplx(2.0 * a), j) * pochhammer_rising(a + b, j) *
             pochhammer_rising(a + c, j) * (a + static_cast<double>(j)) *
             std::exp(log_gamma(b - a) + log_gamma(c - a));
  if (j % 2 == 1) num = -num;
  cplx den = pochhammer_rising(cplx(1.0), j) * pochhammer_rising(a - b + 1.0, j) *
             pochhammer_rising(a - c + 1.0, j) * a * std::exp(log_gamma(cplx(-2.0 * a)) + log_gamma(b + c));
  cplx mass = num / den;
  if (std::abs(mass.imag()) > 1e-9 * std::max(1.0, std::abs(mass)))
    throw std::runtime_error("cdh_atom_mass: non-real mass");
  if (!(mass.real() > 0.0)) throw std::runtime_error("cdh_atom_mass: nonpositive mass");
  return mass.real();
}

inline MixedMeasure cdh_measure(const CdhCase& cs) {
  MixedMeasure mu;
  mu.is_probability = true;
  if (cs.tag != CdhTag::N2) {
    mu.support_lo = 0.0;
    mu.support_hi = measure::pos_inf;
    mu.transform = measure::AxisTransform::sqrt_r;
    double a = cs.a;
    cplx b = cs.b, c = cs.c;
    mu.log_density = [a, b, c](double x) { return cdh_log_density(a, b, c, x); };
  }
  if (cs.tag == CdhTag::N1) {
    for (std::size_t j = 0; j < cs.frame.size(); ++j)
      mu.atoms.push_back({cs.frame[j], std::log(cdh_atom_mass(cs.a, cs.b, cs.c, static_cast<int>(j)))});
  } else if (cs.tag == CdhTag::N2) {
    for (int j = 0; j <= cs.n2_k; ++j)
      mu.atoms.push_back({cs.frame[j], std::log(cdh_atom_mass(cs.a, cs.b, cs.c, j))});
  }
  return mu;
}

// ---- Wilson measure ------------------------------------------------------

enum class WilsonTag { P1, P2, N1, N2 };

struct WilsonCase {
  WilsonTag tag = WilsonTag::P1;
  cplx a, b, c, d;
  std::vector<double> frame;
  int n2_k = -1;
};

inline WilsonCase make_wilson_case(cplx a, cplx b, cplx c, cplx d, std::vector<double> frame) {
  WilsonCase w;
  w.a = a;
  w.b = b;
  w.c = c;
  w.d = d;
  w.frame = std::move(frame);
  bool cd_ok = detail::conj_pair(c, d) ? (c.real() > 0.0)
                                       : (std::abs(c.imag()) < 1e-12 && std::abs(d.imag()) < 1e-12);
  if (!cd_ok) throw std::domain_error("wilson: c, d must be a conjugate pair or real");
  if (detail::conj_pair(a, b)) {
    if (!(a.real() > 0.0)) throw std::domain_error("wilson: case P2 needs Re(a) > 0");
    bool cd_pos = detail::conj_pair(c, d) ? true : (c.real() > 0.0 && d.real() > 0.0);
    if (!cd_pos) throw std::domain_error("wilson: case P2 needs c, d > 0 when real");
    w.tag = WilsonTag::P2;
    if (!w.frame.empty()) throw std::domain_error("wilson: case P2 takes an empty frame");
    return w;
  }
  if (std::abs(a.imag()) > 1e-12 || std::abs(b.imag()) > 1e-12)
    throw std::domain_error("wilson: a, b must be real or a conjugate pair");
  double ar = a.real(), br = b.real();
  if (!(br > 0.0)) throw std::domain_error("wilson: need b > 0");
  if (ar >= 0.0) {
    bool cd_pos = detail::conj_pair(c, d) ? true : (c.real() > 0.0 && d.real() > 0.0);
    if (!cd_pos) throw std::domain_error("wilson: case P1 needs c, d > 0 when real");
    w.tag = WilsonTag::P1;
    if (!w.frame.empty()) throw std::domain_error("wilson: case P1 takes an empty frame");
    return w;
  }
  int k = -1;
  if (detail::snap_nonneg_integer(-(ar + br), k)) {
    if (detail::conj_pair(c, d)) {
      if (!((b + c).real() > 0.0 && (c - a).real() > 0.0))
        throw std::domain_error("wilson: case N2 positivity");
    } else if (!((b + c).real() > 0.0 && (b + d).real() > 0.0 && (c - a).real() > 0.0 &&
                 (d - a).real() > 0.0)) {
      throw std::domain_error("wilson: case N2 needs b+c, b+d, c-a, d-a > 0");
    }
    w.tag = WilsonTag::N2;
    w.n2_k = k;
    if (static_cast<int>(w.frame.size()) < k + 1)
      throw std::domain_error("wilson: case N2 frame too small");
    return w;
  }
  bool cd_n1 = detail::conj_pair(c, d)
                   ? (c.real() > 0.0)
                   : ((a + c).real() > 0.0 && (a + d).real() > 0.0);
  if (!cd_n1) throw std::domain_error("wilson: case N1 needs a+c, a+d > 0 (or conj pair)");
  w.tag = WilsonTag::N1;
  if (static_cast<int>(w.frame.size()) != static_cast<int>(std::floor(-ar)) + 1)
    throw std::domain_error("wilson: case N1 frame size must be floor(-a)+1");
  return w;
}

inline double wilson_log_density(cplx a, cplx b, cplx c, cplx d, double x) {
  if (!(x > 0.0)) return measure::neg_inf;
  double h = 0.5 * std::sqrt(x);
  cplx ih(0.0, h);
  double logK = log_gamma(a + b + c + d).real() - std::log(8.0 * pi) -
                (log_gamma(a + b) + log_gamma(a + c) + log_gamma(b + c) + log_gamma(a + d) +
                 log_gamma(b + d) + log_gamma(c + d))
                    .real();
  double num =
      2.0 * (log_gamma(a + ih) + log_gamma(b + ih) + log_gamma(c + ih) + log_gamma(d + ih)).real();
  double den = 0.5 * std::log(x) + 2.0 * log_gamma(cplx(0.0, std::sqrt(x))).real();
  return logK + num - den;
}

inline double wilson_atom_mass(cplx a, cplx b, cplx c, cplx d, int j) {
  cplx num = pochhammer_rising(2.0 * a, j) * pochhammer_rising(a + b, j) *
             pochhammer_rising(a + c, j) * pochhammer_rising(a + d, j) *
             (a + static_cast<double>(j)) *
             std::exp(log_gamma(a + b + c + d) + log_gamma(b - a) + log_gamma(c - a) + log_gamma(d - a));
  cplx den = pochhammer_rising(cplx(1.0), j) * pochhammer_rising(a - b + 1.0, j) *
             pochhammer_rising(a - c + 1.0, j) * pochhammer_rising(a - d + 1.0, j) * a *
             std::exp(log_gamma(-2.0 * a) + log_gamma(b + c) + log_gamma(c + d) + log_gamma(b + d));
  cplx mass = num / den;
  if (std::abs(mass.imag()) > 1e-9 * std::max(1.0, std::abs(mass)))
    throw std::runtime_error("wilson_atom_mass: non-real mass");
  if (!(mass.real() > 0.0)) throw std::runtime_error("wilson_atom_mass: nonpositive mass");
  return mass.real();
}

inline MixedMeasure wilson_measure(const WilsonCase& w) {
  MixedMeasure mu;
  mu.is_probability = true;
  if (w.tag != WilsonTag::N2) {
    mu.support_lo = 0.0;
    mu.support_hi = measure::pos_inf;
    mu.transform = measure::AxisTransform::sqrt_r;
    cplx a = w.a, b = w.b, c = w.c, d = w.d;
    mu.log_density = [a, b, c, d](double x) { return wilson_log_density(a, b, c, d, x); };
  }
  if (w.tag == WilsonTag::N1) {
    for (std::size_t j = 0; j < w.frame.size(); ++j)
      mu.atoms.push_back({w.frame[j], std::log(wilson_atom_mass(w.a, w.b, w.c, w.d, static_cast<int>(j)))});
  } else if (w.tag == WilsonTag::N2) {
    for (int j = 0; j <= w.n2_k; ++j)
      mu.atoms.push_back({w.frame[j], std::log(wilson_atom_mass(w.a, w.b, w.c, w.d, j))});
  }
  return mu;
}

// ---- Continuous dual Hahn process ----------------------------------------

struct CdhProcessParams {
  double u = 1.0;
  double v = 1.0;

  double c_uv() const { return (u <= 0.0 || u >= 1.0) ? 2.0 : 2.0 * u; }

  void validate() const {
    if (!(u + v > 0.0)) throw std::domain_error("cdh process: need u + v > 0");
  }
};

enum class AtomFlavor { none, u_atoms, v_atoms };

struct CdhAtomGrid {
  AtomFlavor flavor = AtomFlavor::none;
  std::vector<double> locations;  // increasing (index j = 0, 1, ...)
  std::vector<double> log_masses;

  int count() const { return static_cast<int>(locations.size()); }
};

inline double atom_location_u(double u, double s, int j) {
  double w = u + j - 0.5 * s;
  return -4.0 * w * w;
}

inline double atom_location_v(double v, double s, int j) {
  double w = v + j + 0.5 * s;
  return -4.0 * w * w;
}

// Atom grid of the marginal at time s (locations and log masses).
inline CdhAtomGrid marginal_atoms(const CdhProcessParams& pp, double s) {
  pp.validate();
  if (!(s >= 0.0 && s < pp.c_uv())) throw std::domain_error("cdh marginal: s outside [0, C_uv)");
  CdhAtomGrid grid;
  const double u = pp.u, v = pp.v;
  if (u - 0.5 * s < 0.0) {
    grid.flavor = AtomFlavor::u_atoms;
    int jmax = static_cast<int>(std::floor(-u + 0.5 * s));
    double log_pref = (log_gamma(cplx(v - u + s)) + log_gamma(cplx(v + u + 2.0)) -
                       log_gamma(cplx(-2.0 * u + s)))
                          .real();
    for (int j = 0; j <= jmax; ++j) {
      grid.locations.push_back(atom_location_u(u, s, j));
      double ratio = (u + j - 0.5 * s) * pochhammer_rising(2.0 * u - s, j) *
                     pochhammer_rising(v + u, j) /
                     ((u - 0.5 * s) * pochhammer_rising(1.0, j) *
                      pochhammer_rising(1.0 - v + u - s, j));
      if (!(ratio > 0.0)) throw std::runtime_error("cdh marginal: nonpositive u-atom mass");
      grid.log_masses.push_back(log_pref + std::log(ratio));
    }
  } else if (v + 0.5 * s < 0.0) {
    grid.flavor = AtomFlavor::v_atoms;
    int jmax = static_cast<int>(std::floor(-v - 0.5 * s));
    double log_pref = (log_gamma(cplx(u - v - s)) + log_gamma(cplx(v + u + 2.0)) -
                       log_gamma(cplx(-2.0 * v - s)))
                          .real();
    for (int j = 0; j <= jmax; ++j) {
      grid.locations.push_back(atom_location_v(v, s, j));
      double ratio = (v + j + 0.5 * s) * pochhammer_rising(2.0 * v + s, j) *
                     pochhammer_rising(v + u, j) /
                     ((v + 0.5 * s) * pochhammer_rising(1.0, j) *
                      pochhammer_rising(1.0 - u + v + s, j));
      if (!(ratio > 0.0)) throw std::runtime_error("cdh marginal: nonpositive v-atom mass");
      grid.log_masses.push_back(log_pref + std::log(ratio));
    }
  }
  return grid;
}

// Density of the (infinite mass) marginal at time s.
inline double marginal_log_density(const CdhProcessParams& pp, double s, double r) {
  if (!(r > 0.0)) return measure::neg_inf;
  const double u = pp.u, v = pp.v;
  double h = 0.5 * std::sqrt(r);
  cplx ih(0.0, h);
  return std::log((v + u) * (v + u + 1.0) / (8.0 * pi)) +
         2.0 * (log_gamma(0.5 * s + v + ih) + log_gamma(-0.5 * s + u + ih)).real() -
         0.5 * std::log(r) - 2.0 * log_gamma(cplx(0.0, std::sqrt(r))).real();
}

inline double marginal_density(const CdhProcessParams& pp, double s, double r) {
  pp.validate();
  if (!(s >= 0.0 && s < pp.c_uv())) throw std::domain_error("cdh marginal: s outside [0, C_uv)");
  return std::exp(marginal_log_density(pp, s, r));
}

// The marginal as a MixedMeasure (infinite mass, is_probability = false).
inline MixedMeasure marginal_measure(const CdhProcessParams& pp, double s) {
  pp.validate();
  if (!(s >= 0.0 && s < pp.c_uv())) throw std::domain_error("cdh marginal: s outside [0, C_uv)");
  MixedMeasure mu;
  mu.support_lo = 0.0;
  mu.support_hi = measure::pos_inf;
  mu.transform = measure::AxisTransform::sqrt_r;
  mu.is_probability = false;
  CdhProcessParams p = pp;
  mu.log_density = [p, s](double r) { return marginal_log_density(p, s, r); };
  auto grid = marginal_atoms(pp, s);
  for (int j = 0; j < grid.count(); ++j) mu.atoms.push_back({grid.locations[j], grid.log_masses[j]});
  return mu;
}

namespace detail {

inline void check_times(const CdhProcessParams& pp, double s, double t) {
  pp.validate();
  if (!(0.0 <= s && s < t && t < pp.c_uv()))
    throw std::domain_error("cdh transition: need 0 <= s < t < C_uv");
}

}  // namespace detail

// Transition measure from a continuous source point m > 0.
inline MixedMeasure transition_from_continuous(const CdhProcessParams& pp, double s, double t,
                                               double m) {
  detail::check_times(pp, s, t);
  if (!(m > 0.0)) throw std::domain_error("cdh transition: continuous source needs m > 0");
  auto grid = marginal_atoms(pp, t);
  std::vector<double> frame;
  if (grid.flavor == AtomFlavor::u_atoms) frame = grid.locations;
  cplx b(0.5 * (t - s), 0.5 * std::sqrt(m));
  return cdh_measure(make_cdh_case(pp.u - 0.5 * t, b, std::conj(b), std::move(frame)));
}

// Transition measure from the atom x^u_j(s) or x^v_j(s).
inline MixedMeasure transition_from_atom(const CdhProcessParams& pp, double s, double t,
                                         AtomFlavor flavor, int j) {
  detail::check_times(pp, s, t);
  auto src = marginal_atoms(pp, s);
  if (src.flavor != flavor || j < 0 || j >= src.count())
    throw std::domain_error("cdh transition: source atom not in the time-s support");
  auto tgt = marginal_atoms(pp, t);
  const double u = pp.u, v = pp.v;
  if (flavor == AtomFlavor::u_atoms) {
    // purely atomic: targets x^u_k(t) with k <= j
    std::vector<double> frame = tgt.locations;  // u-flavor persists for t > s
    return cdh_measure(make_cdh_case(u - 0.5 * t, cplx(-u + 0.5 * t - j),
                                     cplx(u + 0.5 * t - s + j), std::move(frame)));
  }
  // v-atom source: density plus the v-atoms x^v_k(t) with k >= j (if any)
  double a = v + j + 0.5 * t;
  std::vector<double> frame;
  if (a < -1e-9 && tgt.flavor == AtomFlavor::v_atoms) {
    for (int k = j; k < tgt.count(); ++k) frame.push_back(tgt.locations[k]);
  }
  if (a >= -1e-9 && a < 0.0) a = 0.0;  // closed-case convention at the boundary
  return cdh_measure(make_cdh_case(a, cplx(0.5 * t - s - v - j), cplx(u - 0.5 * t), std::move(frame)));
}

// Dispatch on a point of the time-s support: m > 0 is continuous, m < 0 is
// matched against the atom grid.
inline MixedMeasure transition(const CdhProcessParams& pp, double s, double t, double point) {
  if (point > 0.0) return transition_from_continuous(pp, s, t, point);
  auto grid = marginal_atoms(pp, s);
  for (int j = 0; j < grid.count(); ++j)
    if (std::abs(grid.locations[j] - point) <= 1e-9 * std::max(1.0, std::abs(point)))
      return transition_from_atom(pp, s, t, grid.flavor, j);
  throw std::domain_error("cdh transition: source point not in the time-s support");
}

namespace detail {

inline double density_or_mass_at(const MixedMeasure& mu, double x) {
  if (x > 0.0) return mu.has_density() ? std::exp(mu.log_density(x)) : 0.0;
  for (const auto& a : mu.atoms)
    if (std::abs(a.location - x) <= 1e-9 * std::max(1.0, std::abs(x))) return std::exp(a.log_mass);
  return 0.0;
}

}  // namespace detail

// Max residual of the two consistency identities over probe points.
// Probes may be continuous (> 0) or atom locations (< 0) of the relevant
// target supports. The marginal identity additionally checks the
// e^{-r/4}-weighted functional to tame the infinite-mass marginal.
inline double check_consistency(const CdhProcessParams& pp, double s, double t, double w,
                                const std::vector<double>& probes, const QuadratureSpec& spec) {
  pp.validate();
  if (!(0.0 <= s && s < t && t < w && w < pp.c_uv()))
    throw std::domain_error("check_consistency: need 0 <= s < t < w < C_uv");
  auto mu_s = marginal_measure(pp, s);
  auto mu_t = marginal_measure(pp, t);
  double max_resid = 0.0;
  // Identity 1: int p_s(dm) p_{s,t}(m, .) = p_t(.)
  for (double r : probes) {
    double lhs = measure::integrate(
        mu_s, [&](double m) { return detail::density_or_mass_at(transition(pp, s, t, m), r); }, spec);
    double rhs = detail::density_or_mass_at(mu_t, r);
    max_resid = std::max(max_resid, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  {
    auto decay = [](double r) { return std::exp(-r / 4.0); };
    double lhs = measure::integrate(
        mu_s,
        [&](double m) { return measure::integrate(transition(pp, s, t, m), decay, spec); }, spec);
    double rhs = measure::integrate(mu_t, decay, spec);
    max_resid = std::max(max_resid, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  // Identity 2: int p_{s,t}(m, dr) p_{t,w}(r, .) = p_{s,w}(m, .)
  std::vector<double> sources;
  sources.push_back(1.7);  // generic continuous source
  auto src_grid = marginal_atoms(pp, s);
  for (int j = 0; j < src_grid.count(); ++j) sources.push_back(src_grid.locations[j]);
  for (double m0 : sources) {
    auto direct = transition(pp, s, w, m0);
    auto mid = transition(pp, s, t, m0);
    for (double x : probes) {
      double lhs = measure::integrate(
          mid, [&](double r) { return detail::density_or_mass_at(transition(pp, t, w, r), x); },
          spec);
      double rhs = detail::density_or_mass_at(direct, x);
      max_resid = std::max(max_resid, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  return max_resid;
}

}  // namespace cdh
}  // namespace openkpz
