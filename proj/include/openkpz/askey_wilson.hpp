// Askey-Wilson distribution (continuous density on (-1,1) plus finitely many
// atoms), the Askey-Wilson Markov process marginals and transitions, the
// finite-N height-function Laplace transform of the open ASEP stationary
// measure, and the rescaled small-(1-y) diagnostics that connect to the
// continuous dual Hahn limit.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "openkpz/asep.hpp"
#include "openkpz/measure.hpp"
#include "openkpz/query.hpp"
#include "openkpz/specfun.hpp"

namespace openkpz {
namespace askey_wilson {

using measure::MixedMeasure;
using measure::QuadratureSpec;
using specfun::log_qpoch_inf;
using specfun::qpoch_finite;
using specfun::qpoch_inf_signed;

struct AwParams {
  cplx a, b, c, d;
  double q = 0.0;
};

struct AwAtom {
  double location;  // (w + 1/w) / 2
  double log_mass;
  double w;  // generating value chi q^j, |w| > 1
};

namespace detail {

inline bool is_real(cplx z, double tol = 1e-12) { return std::abs(z.imag()) <= tol * (1.0 + std::abs(z)); }

// log (x; q)_inf with sign for real x, complex log for complex x.
struct PrefTerm {
  double log_abs;
  int sign;  // 0 flags an exactly vanishing factor
};

inline PrefTerm qpoch_term(cplx x, double q) {
  if (is_real(x)) {
    auto sl = qpoch_inf_signed(x.real(), q);
    return {sl.log_abs, sl.sign};
  }
  return {log_qpoch_inf(x, q).real(), 1};
}

}  // namespace detail

// Askey-Wilson measure: validates the parameter structure, assembles the
// continuous-part prefactor in log-space (a vanishing factor flags a purely
// atomic measure; a negative prefactor is an admissibility failure), and
// generates the atoms of every real parameter of modulus above one.
class AwMeasure {
 public:
  explicit AwMeasure(const AwParams& p) : p_(p) {
    if (!(std::abs(p.q) < 1.0)) throw std::domain_error("aw_measure: need |q| < 1");
    validate_structure();
    build_prefactor();
    build_atoms();
  }

  const AwParams& params() const { return p_; }
  bool density_zero() const { return density_zero_; }
  double log_pref() const { return log_pref_; }
  const std::vector<AwAtom>& atoms() const { return atoms_; }

  // log density against d(theta) at x = cos(theta); the 1/sqrt(1-x^2) of the
  // x-space density cancels against the Jacobian.
  double log_density_theta(double theta) const {
    if (density_zero_) return measure::neg_inf;
    cplx eit(std::cos(theta), std::sin(theta));
    cplx e2it = eit * eit;
    double num = 2.0 * log_qpoch_inf(e2it, p_.q).real();
    double den = 2.0 * (log_qpoch_inf(p_.a * eit, p_.q) + log_qpoch_inf(p_.b * eit, p_.q) +
                        log_qpoch_inf(p_.c * eit, p_.q) + log_qpoch_inf(p_.d * eit, p_.q))
                           .real();
    return log_pref_ + num - den;
  }

  // log of the x-space density at x in (-1, 1).
  double log_density_x(double x) const {
    if (!(x > -1.0 && x < 1.0)) return measure::neg_inf;
    double theta = std::acos(x);
    double s = std::sin(theta);
    return log_density_theta(theta) - std::log(s);
  }

  MixedMeasure to_mixed_measure() const {
    MixedMeasure mu;
    mu.support_lo = -1.0;
    mu.support_hi = 1.0;
    mu.transform = measure::AxisTransform::arccos_x;
    mu.is_probability = true;
    AwMeasure self = *this;
    mu.log_density = [self](double x) { return self.log_density_x(x); };
    for (const auto& a : atoms_) mu.atoms.push_back({a.location, a.log_mass});
    return mu;
  }

 private:
  void validate_structure() {
    const cplx ps[4] = {p_.a, p_.b, p_.c, p_.d};
    std::vector<int> complex_idx;
    for (int i = 0; i < 4; ++i)
      if (!detail::is_real(ps[i])) complex_idx.push_back(i);
    if (complex_idx.size() % 2 != 0)
      throw std::domain_error("aw_measure: complex parameters must come in conjugate pairs");
    std::vector<bool> used(complex_idx.size(), false);
    for (std::size_t i = 0; i < complex_idx.size(); ++i) {
      if (used[i]) continue;
      bool matched = false;
      for (std::size_t j = i + 1; j < complex_idx.size(); ++j) {
        if (used[j]) continue;
        cplx zi = ps[complex_idx[i]], zj = ps[complex_idx[j]];
        if (std::abs(zi - std::conj(zj)) <= 1e-10 * (1.0 + std::abs(zi))) {
          used[i] = used[j] = true;
          matched = true;
          break;
        }
      }
      if (!matched) throw std::domain_error("aw_measure: complex parameters must come in conjugate pairs");
    }
  }

  void build_prefactor() {
    const cplx a = p_.a, b = p_.b, c = p_.c, d = p_.d;
    const double q = p_.q;
    cplx prods[6] = {a * b, a * c, a * d, b * c, b * d, c * d};
    double log_abs = 0.0;
    int sign = 1;
    {
      auto t = qpoch_inf_signed(q, q);
      log_abs += t.log_abs;
      sign *= t.sign;
    }
    for (const auto& pr : prods) {
      auto t = detail::qpoch_term(pr, q);
      if (t.sign == 0) {
        density_zero_ = true;
        return;
      }
      log_abs += t.log_abs;
      sign *= t.sign;
    }
    cplx abcd = a * b * c * d;
    if (!detail::is_real(abcd)) throw std::domain_error("aw_measure: abcd must be real");
    auto t = qpoch_inf_signed(abcd.real(), q);
    if (t.sign == 0) throw std::domain_error("aw_measure: (abcd; q)_inf vanishes");
    log_abs -= t.log_abs;
    sign *= t.sign;
    if (sign < 0)
      throw std::domain_error("aw_measure: inadmissible parameters (negative continuous density)");
    log_pref_ = log_abs - std::log(2.0 * pi);
  }

  void build_atoms() {
    const cplx ps[4] = {p_.a, p_.b, p_.c, p_.d};
    for (int i = 0; i < 4; ++i) {
      if (!detail::is_real(ps[i])) continue;
      double chi = ps[i].real();
      if (std::abs(chi) <= 1.0 + 1e-12) continue;
      cplx others[3];
      int m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) others[m++] = ps[j];
      add_atom_family(chi, others);
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const AwAtom& x, const AwAtom& y) { return x.location < y.location; });
  }

  void add_atom_family(double chi, const cplx others[3]) {
    const double q = p_.q;
    const cplx o1 = others[0], o2 = others[1], o3 = others[2];
    cplx abcd = chi * o1 * o2 * o3;
    // mass at j = 0
    double log0 = 0.0;
    int sign0 = 1;
    auto absorb = [&](cplx x, bool denom) {
      auto t = detail::qpoch_term(x, q);
      if (t.sign == 0) {
        if (denom) throw std::domain_error("aw_measure: confluent atom (vanishing denominator factor)");
        sign0 = 0;
        return;
      }
      log0 += denom ? -t.log_abs : t.log_abs;
      sign0 *= t.sign;
    };
    absorb(cplx(1.0 / (chi * chi)), false);
    absorb(o1 * o2, false);
    absorb(o1 * o3, false);
    absorb(o2 * o3, false);
    if (sign0 != 0) {
      absorb(o1 / chi, true);
      absorb(o2 / chi, true);
      absorb(o3 / chi, true);
      absorb(abcd, true);
    }
    for (int j = 0;; ++j) {
      double w = chi * std::pow(q, j);
      if (!(std::abs(w) > 1.0 + 1e-12)) break;
      if (sign0 == 0) continue;  // boundary atom with vanishing mass
      double loc = 0.5 * (w + 1.0 / w);
      cplx ratio = 1.0;
      if (j > 0) {
        ratio = qpoch_finite(cplx(chi * chi), q, j) * qpoch_finite(chi * o1, q, j) *
                qpoch_finite(chi * o2, q, j) * qpoch_finite(chi * o3, q, j) *
                (1.0 - chi * chi * std::pow(q, 2 * j)) /
                (qpoch_finite(cplx(q), q, j) * qpoch_finite(q * chi / o1, q, j) *
                 qpoch_finite(q * chi / o2, q, j) * qpoch_finite(q * chi / o3, q, j) *
                 (1.0 - chi * chi));
        ratio *= std::pow(q / abcd, j);
      }
      if (!detail::is_real(ratio, 1e-9)) throw std::runtime_error("aw_measure: non-real atom mass");
      if (!(sign0 * ratio.real() > 0.0))
        throw std::domain_error("aw_measure: nonpositive atom mass (parameter-regime failure)");
      atoms_.push_back({loc, log0 + std::log(std::abs(ratio.real())), w});
    }
  }

  AwParams p_;
  bool density_zero_ = false;
  double log_pref_ = measure::neg_inf;
  std::vector<AwAtom> atoms_;
};

inline AwMeasure aw_measure(const AwParams& p) { return AwMeasure(p); }

struct AwProcessParams {
  double A = 1.0, B = 0.0, C = 1.0, D = 0.0;
  double q = 0.0;

  void validate() const {
    if (!(A > 0.0 && C > 0.0) || !(B > -1.0 && B <= 0.0) || !(D > -1.0 && D <= 0.0))
      throw std::domain_error("aw process: need A, C > 0 and B, D in (-1, 0]");
    if (!(A * C < 1.0)) throw std::domain_error("aw process: need A C < 1 (fan region)");
    if (!(std::abs(q) < 1.0)) throw std::domain_error("aw process: need |q| < 1");
  }

  static AwProcessParams from_model(const asep::AsepModel& m) {
    AwProcessParams pp{m.A, m.B, m.C, m.D, m.q};
    pp.validate();
    return pp;
  }
};

inline AwMeasure aw_marginal(const AwProcessParams& pp, double s) {
  pp.validate();
  if (!(s > 0.0)) throw std::domain_error("aw_marginal: need s > 0");
  double rs = std::sqrt(s);
  return aw_measure({cplx(pp.A * rs), cplx(pp.B * rs), cplx(pp.C / rs), cplx(pp.D / rs), pp.q});
}

// Transition from a continuous point x = cos(theta) in (-1, 1).
inline AwMeasure aw_transition(const AwProcessParams& pp, double s, double t, double x) {
  pp.validate();
  if (!(0.0 < s && s < t)) throw std::domain_error("aw_transition: need 0 < s < t");
  if (!(x > -1.0 && x < 1.0)) throw std::domain_error("aw_transition: x outside (-1, 1)");
  double rt = std::sqrt(t), rst = std::sqrt(s / t);
  double theta = std::acos(x);
  cplx w(std::cos(theta), std::sin(theta));
  return aw_measure({cplx(pp.A * rt), cplx(pp.B * rt), rst * w, rst * std::conj(w), pp.q});
}

// Transition from an atom with generating value w (|w| > 1).
inline AwMeasure aw_transition_from_atom(const AwProcessParams& pp, double s, double t, double w) {
  pp.validate();
  if (!(0.0 < s && s < t)) throw std::domain_error("aw_transition: need 0 < s < t");
  if (!(std::abs(w) > 1.0)) throw std::domain_error("aw_transition: atom generator must have |w| > 1");
  double rt = std::sqrt(t), rst = std::sqrt(s / t);
  return aw_measure({cplx(pp.A * rt), cplx(pp.B * rt), cplx(rst * w), cplx(rst / w), pp.q});
}

// ---- Finite-N Laplace transform of the stationary height functional ------

namespace detail {

// Quadrature grid in rho with r = rho^2 = 2N(1 - cos theta); nodes carry the
// theta value and log(weight * dtheta/drho).
struct ThetaGrid {
  std::vector<double> theta;
  std::vector<double> log_w;
};

inline ThetaGrid make_theta_grid(double N, const QuadratureSpec& spec) {
  ThetaGrid g;
  double rho_max = std::min(2.0 * std::sqrt(N), std::sqrt(spec.cutoff));
  const auto& gl = measure::detail::gauss_legendre(spec.nodes_per_panel);
  double width = rho_max / spec.panels;
  for (int p = 0; p < spec.panels; ++p) {
    double ua = p * width, mid = ua + 0.5 * width, half = 0.5 * width;
    for (int i = 0; i < spec.nodes_per_panel; ++i) {
      double rho = mid + half * gl.x[i];
      double ratio = rho / (2.0 * std::sqrt(N));
      if (ratio >= 1.0) continue;
      double theta = 2.0 * std::asin(ratio);
      double dtheta_drho = 1.0 / (std::sqrt(N) * std::sqrt(1.0 - ratio * ratio));
      g.theta.push_back(theta);
      g.log_w.push_back(std::log(gl.w[i] * half) + std::log(dtheta_drho));
    }
  }
  return g;
}

struct LevelState {
  // continuous nodes come from the shared grid; atoms are tracked separately
  std::vector<AwAtom> atoms;          // union of atoms reachable at this level
  std::vector<double> log_f_nodes;    // log F at grid nodes
  std::vector<double> log_f_atoms;    // log F at atoms
};

inline int find_atom(const std::vector<AwAtom>& atoms, double w) {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (std::abs(atoms[i].w - w) <= 1e-9 * std::max(1.0, std::abs(w))) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

// phi^{(N)}(c, X) = E[ prod_k (cosh(s_k/sqrt(N)) + Y_{q^{s_k}})^{n_k - n_{k-1}} ]
//                   / E[ (1 + Y_1)^N ]
// over the Askey-Wilson process with the weak-asymmetry chart parameters.
inline double phi_n(const asep::BoundaryParams& bp, int N, const LaplaceQuery& query,
                    const QuadratureSpec& spec) {
  query.validate();
  if (!(bp.u + bp.v > 0.0)) throw std::domain_error("phi_n: need u + v > 0");
  // zero Laplace variables only lower the effective number of points
  LaplaceQuery eff;
  for (int k = 0; k < query.d(); ++k)
    if (query.c[k] > 0.0) {
      eff.X.push_back(query.X[k]);
      eff.c.push_back(query.c[k]);
    }
  if (eff.X.empty()) return 1.0;
  const int d = eff.d();
  if (d > 2) throw std::domain_error("phi_n: nesting guard d <= 2");

  auto model = asep::model_from_uv(N, bp);
  auto pp = AwProcessParams::from_model(model);
  const double sqrtN = std::sqrt(static_cast<double>(N));
  std::vector<double> s = eff.s();  // s_1 .. s_{d+1}, s_{d+1} = 0
  std::vector<double> times(d + 1);
  for (int k = 0; k <= d; ++k) times[k] = std::exp(-2.0 * s[k] / sqrtN);  // = q^{s_k}
  std::vector<int> n(d + 2);
  n[0] = 0;
  for (int k = 1; k <= d; ++k) n[k] = static_cast<int>(std::floor(N * eff.X[k - 1] + 1e-12));
  n[d + 1] = N;

  auto grid = detail::make_theta_grid(static_cast<double>(N), spec);
  const int G = static_cast<int>(grid.theta.size());

  // Forward pass: reachable atom sets per level.
  std::vector<detail::LevelState> levels(d + 1);
  {
    auto m1 = aw_marginal(pp, times[0]);
    levels[0].atoms = m1.atoms();
  }
  for (int k = 1; k <= d; ++k) {
    // atoms of transitions from any continuous source (shared locations)
    auto from_cont = aw_transition(pp, times[k - 1], times[k], 0.0);
    levels[k].atoms = from_cont.atoms();
    for (const auto& src : levels[k - 1].atoms) {
      auto tr = aw_transition_from_atom(pp, times[k - 1], times[k], src.w);
      for (const auto& at : tr.atoms())
        if (detail::find_atom(levels[k].atoms, at.w) < 0) levels[k].atoms.push_back(at);
    }
  }

  // Backward pass.
  auto weight_log = [&](int k, double y) {
    // (cosh(s_k / sqrt N) + y)^{n_k - n_{k-1}}, k in 1..d+1
    double ch = std::cosh(s[k - 1] / sqrtN);
    double base = ch + y;
    int pw = n[k] - n[k - 1];
    if (pw == 0) return 0.0;
    if (base <= 0.0) return measure::neg_inf;
    return pw * std::log(base);
  };

  // level index in 0..d corresponds to the AW time times[level] and the
  // weight factor weight_log(level+1, y).
  std::vector<double> f_nodes(G), f_atoms;
  // Start at the last level (time 1): F = weight only.
  for (int i = 0; i < G; ++i) f_nodes[i] = weight_log(d + 1, std::cos(grid.theta[i]));
  f_atoms.resize(levels[d].atoms.size());
  for (std::size_t i = 0; i < levels[d].atoms.size(); ++i)
    f_atoms[i] = weight_log(d + 1, levels[d].atoms[i].location);

  std::vector<double> cos_t(G), sin_t(G);
  for (int i = 0; i < G; ++i) {
    cos_t[i] = std::cos(grid.theta[i]);
    sin_t[i] = std::sin(grid.theta[i]);
  }

  for (int k = d - 1; k >= 0; --k) {
    std::vector<double> nf_nodes(G, measure::neg_inf), nf_atoms(levels[k].atoms.size(), measure::neg_inf);
    double t_src = times[k], t_dst = times[k + 1];
    double rho = std::sqrt(t_src / t_dst);
    double a2 = pp.A * std::sqrt(t_dst), b2 = pp.B * std::sqrt(t_dst);
    const double q = pp.q;
    // z-dependent factors shared by every continuous source point
    std::vector<double> shared_z(G);
    for (int i = 0; i < G; ++i) {
      shared_z[i] = specfun::log_abs_sq_qpoch(1.0, q, std::cos(2.0 * grid.theta[i])) -
                    specfun::log_abs_sq_qpoch(a2, q, cos_t[i]) -
                    specfun::log_abs_sq_qpoch(b2, q, cos_t[i]);
    }
    // slower generic integral for atom sources
    auto integrate_from_measure = [&](const AwMeasure& tr) {
      std::vector<double> terms;
      terms.reserve(G + tr.atoms().size());
      if (!tr.density_zero())
        for (int i = 0; i < G; ++i) {
          double ld = tr.log_density_theta(grid.theta[i]);
          if (ld != measure::neg_inf && f_nodes[i] != measure::neg_inf)
            terms.push_back(grid.log_w[i] + ld + f_nodes[i]);
        }
      for (const auto& at : tr.atoms()) {
        int idx = detail::find_atom(levels[k + 1].atoms, at.w);
        if (idx < 0) throw std::runtime_error("phi_n: unmatched transition atom");
        if (f_atoms[idx] != measure::neg_inf) terms.push_back(at.log_mass + f_atoms[idx]);
      }
      return measure::detail::log_sum_exp(terms);
    };
    std::vector<double> terms(G);
    for (int i = 0; i < G; ++i) {
      double x = cos_t[i];
      AwMeasure tr = aw_transition(pp, t_src, t_dst, x);
      double m = measure::neg_inf;
      if (!tr.density_zero()) {
        double lp = tr.log_pref();
        for (int z = 0; z < G; ++z) {
          if (f_nodes[z] == measure::neg_inf) {
            terms[z] = measure::neg_inf;
            continue;
          }
          double cos_sum = cos_t[z] * cos_t[i] - sin_t[z] * sin_t[i];
          double cos_dif = cos_t[z] * cos_t[i] + sin_t[z] * sin_t[i];
          double ld = lp + shared_z[z] - specfun::log_abs_sq_qpoch(rho, q, cos_sum) -
                      specfun::log_abs_sq_qpoch(rho, q, cos_dif);
          terms[z] = grid.log_w[z] + ld + f_nodes[z];
          m = std::max(m, terms[z]);
        }
      }
      double extra = measure::neg_inf;
      std::vector<double> atom_terms;
      for (const auto& at : tr.atoms()) {
        int idx = detail::find_atom(levels[k + 1].atoms, at.w);
        if (idx < 0) throw std::runtime_error("phi_n: unmatched transition atom");
        if (f_atoms[idx] != measure::neg_inf) {
          atom_terms.push_back(at.log_mass + f_atoms[idx]);
          extra = std::max(extra, atom_terms.back());
        }
      }
      double mm = std::max(m, extra);
      double acc = 0.0;
      if (mm != measure::neg_inf) {
        if (m != measure::neg_inf)
          for (int z = 0; z < G; ++z)
            if (terms[z] != measure::neg_inf) acc += std::exp(terms[z] - mm);
        for (double t : atom_terms) acc += std::exp(t - mm);
      }
      double integral = (mm == measure::neg_inf) ? measure::neg_inf : mm + std::log(acc);
      nf_nodes[i] = weight_log(k + 1, x) + integral;
    }
    for (std::size_t i = 0; i < levels[k].atoms.size(); ++i) {
      const auto& src = levels[k].atoms[i];
      nf_atoms[i] = weight_log(k + 1, src.location) +
                    integrate_from_measure(aw_transition_from_atom(pp, t_src, t_dst, src.w));
    }
    f_nodes = std::move(nf_nodes);
    f_atoms = std::move(nf_atoms);
  }

  // Outer integral against the time-t_1 marginal.
  double log_num;
  {
    auto m1 = aw_marginal(pp, times[0]);
    std::vector<double> terms;
    if (!m1.density_zero())
      for (int i = 0; i < G; ++i) {
        double ld = m1.log_density_theta(grid.theta[i]);
        if (ld != measure::neg_inf && f_nodes[i] != measure::neg_inf)
          terms.push_back(grid.log_w[i] + ld + f_nodes[i]);
      }
    for (std::size_t i = 0; i < m1.atoms().size(); ++i) {
      int idx = detail::find_atom(levels[0].atoms, m1.atoms()[i].w);
      if (idx < 0) throw std::runtime_error("phi_n: unmatched marginal atom");
      if (f_atoms[idx] != measure::neg_inf)
        terms.push_back(m1.atoms()[i].log_mass + f_atoms[idx]);
    }
    log_num = measure::detail::log_sum_exp(terms);
  }

  // Denominator: E[(1 + Y_1)^N].
  double log_den;
  {
    auto m1 = aw_marginal(pp, 1.0);
    std::vector<double> terms;
    for (int i = 0; i < G; ++i) {
      double y = std::cos(grid.theta[i]);
      double ld = m1.log_density_theta(grid.theta[i]);
      if (ld != measure::neg_inf && 1.0 + y > 0.0)
        terms.push_back(grid.log_w[i] + ld + N * std::log1p(y));
    }
    for (const auto& at : m1.atoms())
      terms.push_back(at.log_mass + N * std::log1p(at.location));
    log_den = measure::detail::log_sum_exp(terms);
  }
  return std::exp(log_num - log_den);
}

// N^{u+v} * (1/2N) * pi^{(N),c}_{q^t}(1 - r/(2N)): the rescaled marginal
// density in the r = 2N(1-y) coordinate, evaluated through the
// substitution-stable theta = 2 asin(sqrt(r/4N)).
inline double scaled_marginal_density(const asep::BoundaryParams& bp, int N, double t, double r) {
  if (!(r >= 0.0 && r <= 4.0 * N)) throw std::domain_error("scaled_marginal_density: r outside [0, 4N]");
  if (!(t > -2.0 && t < 2.0)) throw std::domain_error("scaled_marginal_density: t outside (-2, 2)");
  auto model = asep::model_from_uv(N, bp);
  auto pp = AwProcessParams::from_model(model);
  double time = std::pow(model.q, t);
  auto m = aw_marginal(pp, time);
  if (r == 0.0) return 0.0;
  double ratio = std::sqrt(r / (4.0 * N));
  if (ratio >= 1.0) return 0.0;
  double theta = 2.0 * std::asin(ratio);
  // x-space density = theta-space density / sin(theta); d y = d r / (2N)
  double ld = m.log_density_theta(theta) - std::log(std::sin(theta));
  return std::exp((bp.u + bp.v) * std::log(static_cast<double>(N)) -
                  std::log(2.0 * static_cast<double>(N)) + ld);
}

// Rescaled atoms of the time-q^t marginal: locations -2N(y - 1) and masses
// N^{u+v} * mass.
struct ScaledAtoms {
  std::vector<double> locations;
  std::vector<double> masses;
};

inline ScaledAtoms scaled_marginal_atoms(const asep::BoundaryParams& bp, int N, double t) {
  if (!(t > -2.0 && t < 2.0)) throw std::domain_error("scaled_marginal_atoms: t outside (-2, 2)");
  auto model = asep::model_from_uv(N, bp);
  auto pp = AwProcessParams::from_model(model);
  auto m = aw_marginal(pp, std::pow(model.q, t));
  ScaledAtoms out;
  double luv = (bp.u + bp.v) * std::log(static_cast<double>(N));
  for (const auto& at : m.atoms()) {
    out.locations.push_back(-2.0 * N * (at.location - 1.0));
    out.masses.push_back(std::exp(luv + at.log_mass));
  }
  return out;
}

}  // namespace askey_wilson
}  // namespace openkpz
