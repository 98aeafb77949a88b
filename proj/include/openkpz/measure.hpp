// Mixed (continuous + atomic) measures and the panel quadrature engine used
// to integrate functionals against them and to chain Markov kernels.
//
// Continuous parts may live on a transformed axis:
//   sqrt_r    integrates in rho with r = rho^2 (tames 1/sqrt(r) endpoints)
//   arccos_x  integrates in theta with x = cos(theta) (tames 1/sqrt(1-x^2))
// Densities are always expressed in the original coordinate; the Jacobian is
// applied internally. Integrals over semi-infinite supports run block by
// block and stop once a block contributes less than rel_tol of the running
// total, capped at `cutoff`.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace openkpz {
namespace measure {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

struct Atom {
  double location;
  double log_mass;
};

enum class AxisTransform { none, sqrt_r, arccos_x };

struct MixedMeasure {
  double support_lo = 0.0;
  double support_hi = 0.0;  // may be +inf
  std::function<double(double)> log_density;  // log f(x), -inf allowed; empty = no continuous part
  std::vector<Atom> atoms;
  bool is_probability = false;
  AxisTransform transform = AxisTransform::none;

  bool has_density() const { return static_cast<bool>(log_density); }
};

struct QuadratureSpec {
  int panels = 40;
  int nodes_per_panel = 32;
  double cutoff = 600.0;  // upper truncation for semi-infinite supports
  double rel_tol = 1e-9;

  void validate() const {
    if (panels < 1 || nodes_per_panel < 2 || !(rel_tol > 0.0))
      throw std::invalid_argument("QuadratureSpec: panels >= 1, nodes_per_panel >= 2, rel_tol > 0");
  }
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration, cached per order.
struct GaussLegendre {
  std::vector<double> x, w;
};

inline const GaussLegendre& gauss_legendre(int n) {
  static std::vector<std::unique_ptr<GaussLegendre>> cache(128);
  if (n < 2 || n >= 128) throw std::invalid_argument("gauss_legendre: order out of range");
  if (!cache[n]) {
    auto gl = std::make_unique<GaussLegendre>();
    gl->x.resize(n);
    gl->w.resize(n);
    constexpr double pi_ = 3.14159265358979323846264338327950288;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(pi_ * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      gl->x[i] = -x;
      gl->x[n - 1 - i] = x;
      double w = 2.0 / ((1.0 - x * x) * pp * pp);
      gl->w[i] = w;
      gl->w[n - 1 - i] = w;
    }
    cache[n] = std::move(gl);
  }
  return *cache[n];
}

// Integration nodes in the transformed coordinate plus the log of
// (GL weight * Jacobian * density) at the corresponding original point.
struct WeightedNode {
  double x;          // original coordinate
  double log_weight; // log(w * jac * density(x))
};

inline double to_axis(double x, AxisTransform t) {
  switch (t) {
    case AxisTransform::none: return x;
    case AxisTransform::sqrt_r: return std::sqrt(x);
    case AxisTransform::arccos_x: return std::acos(std::clamp(x, -1.0, 1.0));
  }
  return x;
}

inline double from_axis(double u, AxisTransform t) {
  switch (t) {
    case AxisTransform::none: return u;
    case AxisTransform::sqrt_r: return u * u;
    case AxisTransform::arccos_x: return std::cos(u);
  }
  return u;
}

inline double log_jacobian(double u, AxisTransform t) {
  switch (t) {
    case AxisTransform::none: return 0.0;
    case AxisTransform::sqrt_r: return std::log(2.0 * std::abs(u));
    case AxisTransform::arccos_x: return std::log(std::max(std::sin(u), 0.0));
  }
  return 0.0;
}

// Panel nodes for one block [ua, ub] of the transformed axis.
inline void block_nodes(const MixedMeasure& mu, double ua, double ub, int order,
                        std::vector<WeightedNode>& out) {
  const auto& gl = gauss_legendre(order);
  double mid = 0.5 * (ua + ub), half = 0.5 * (ub - ua);
  for (int i = 0; i < order; ++i) {
    double u = mid + half * gl.x[i];
    double x = from_axis(u, mu.transform);
    double ld = mu.log_density(x);
    if (ld == neg_inf) continue;
    out.push_back({x, std::log(gl.w[i] * half) + log_jacobian(u, mu.transform) + ld});
  }
}

inline double log_sum_exp(const std::vector<double>& terms) {
  double m = neg_inf;
  for (double t : terms) m = std::max(m, t);
  if (m == neg_inf) return neg_inf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

}  // namespace detail

// Integral of f against mu. f may change sign; the integrand must be finite
// at every quadrature abscissa and atom.
inline double integrate(const MixedMeasure& mu, const std::function<double(double)>& f,
                        const QuadratureSpec& spec) {
  spec.validate();
  double acc = 0.0;
  if (mu.has_density() && mu.support_hi > mu.support_lo) {
    bool semi_infinite = std::isinf(mu.support_hi);
    double hi = semi_infinite ? std::max(spec.cutoff, mu.support_lo + 1.0) : mu.support_hi;
    double ua = detail::to_axis(mu.support_lo, mu.transform);
    double ub = detail::to_axis(hi, mu.transform);
    if (mu.transform == AxisTransform::arccos_x) std::swap(ua, ub);
    double width = (ub - ua) / spec.panels;
    std::vector<detail::WeightedNode> nodes;
    for (int p = 0; p < spec.panels; ++p) {
      nodes.clear();
      detail::block_nodes(mu, ua + p * width, ua + (p + 1) * width, spec.nodes_per_panel, nodes);
      double block = 0.0;
      for (const auto& nd : nodes) {
        double fx = f(nd.x);
        if (!std::isfinite(fx))
          throw std::runtime_error("integrate: non-finite integrand at x = " + std::to_string(nd.x));
        block += std::exp(nd.log_weight) * fx;
      }
      acc += block;
      if (semi_infinite && p >= 1 && std::abs(block) < spec.rel_tol * std::abs(acc)) break;
    }
  }
  for (const auto& a : mu.atoms) {
    double fx = f(a.location);
    if (!std::isfinite(fx))
      throw std::runtime_error("integrate: non-finite integrand at atom x = " + std::to_string(a.location));
    acc += std::exp(a.log_mass) * fx;
  }
  return acc;
}

// log of the integral of exp(log_f) against mu, for nonnegative integrands
// that may over/underflow in linear space.
inline double integrate_log(const MixedMeasure& mu, const std::function<double(double)>& log_f,
                            const QuadratureSpec& spec) {
  spec.validate();
  std::vector<double> terms;
  if (mu.has_density() && mu.support_hi > mu.support_lo) {
    bool semi_infinite = std::isinf(mu.support_hi);
    double hi = semi_infinite ? std::max(spec.cutoff, mu.support_lo + 1.0) : mu.support_hi;
    double ua = detail::to_axis(mu.support_lo, mu.transform);
    double ub = detail::to_axis(hi, mu.transform);
    if (mu.transform == AxisTransform::arccos_x) std::swap(ua, ub);
    double width = (ub - ua) / spec.panels;
    std::vector<detail::WeightedNode> nodes;
    double running_max = neg_inf;
    for (int p = 0; p < spec.panels; ++p) {
      nodes.clear();
      detail::block_nodes(mu, ua + p * width, ua + (p + 1) * width, spec.nodes_per_panel, nodes);
      double block_max = neg_inf;
      for (const auto& nd : nodes) {
        double t = nd.log_weight + log_f(nd.x);
        terms.push_back(t);
        block_max = std::max(block_max, t);
      }
      running_max = std::max(running_max, block_max);
      if (semi_infinite && p >= 1 && block_max < running_max + std::log(spec.rel_tol)) break;
    }
  }
  for (const auto& a : mu.atoms) terms.push_back(a.log_mass + log_f(a.location));
  return detail::log_sum_exp(terms);
}

inline double total_mass(const MixedMeasure& mu, const QuadratureSpec& spec) {
  return integrate(mu, [](double) { return 1.0; }, spec);
}

// nu(f) = int mu(dx) int kernel(x)(dy) f(y), realized by pushing the
// quadrature nodes and atoms of mu through the kernel. The density of the
// result is evaluated lazily; atom lists from different sources are merged
// by location.
inline MixedMeasure chain(const MixedMeasure& mu,
                          const std::function<MixedMeasure(double)>& kernel,
                          const QuadratureSpec& spec) {
  spec.validate();
  // Source nodes with log weights (quadrature nodes plus atoms).
  std::vector<detail::WeightedNode> sources;
  if (mu.has_density() && mu.support_hi > mu.support_lo) {
    bool semi_infinite = std::isinf(mu.support_hi);
    double hi = semi_infinite ? std::max(spec.cutoff, mu.support_lo + 1.0) : mu.support_hi;
    double ua = detail::to_axis(mu.support_lo, mu.transform);
    double ub = detail::to_axis(hi, mu.transform);
    if (mu.transform == AxisTransform::arccos_x) std::swap(ua, ub);
    double width = (ub - ua) / spec.panels;
    for (int p = 0; p < spec.panels; ++p)
      detail::block_nodes(mu, ua + p * width, ua + (p + 1) * width, spec.nodes_per_panel, sources);
  }
  for (const auto& a : mu.atoms) sources.push_back({a.location, a.log_mass});

  auto targets = std::make_shared<std::vector<MixedMeasure>>();
  auto weights = std::make_shared<std::vector<double>>();
  targets->reserve(sources.size());
  for (const auto& s : sources) {
    targets->push_back(kernel(s.x));
    weights->push_back(s.log_weight);
  }

  MixedMeasure out;
  out.is_probability = mu.is_probability;
  bool have_cont = false;
  for (std::size_t i = 0; i < targets->size(); ++i) {
    const auto& t = (*targets)[i];
    if (!t.is_probability) out.is_probability = false;
    if (!t.has_density()) continue;
    if (!have_cont) {
      out.support_lo = t.support_lo;
      out.support_hi = t.support_hi;
      out.transform = t.transform;
      have_cont = true;
    } else if (std::abs(t.support_lo - out.support_lo) > 1e-9 ||
               (std::isfinite(out.support_hi) != std::isfinite(t.support_hi)) ||
               (std::isfinite(out.support_hi) && std::abs(t.support_hi - out.support_hi) > 1e-9) ||
               t.transform != out.transform) {
      throw std::runtime_error("chain: kernels disagree on target continuous support");
    }
  }
  if (have_cont) {
    out.log_density = [targets, weights](double y) {
      std::vector<double> terms;
      terms.reserve(targets->size());
      for (std::size_t i = 0; i < targets->size(); ++i) {
        const auto& t = (*targets)[i];
        if (!t.has_density()) continue;
        double ld = t.log_density(y);
        if (ld != neg_inf) terms.push_back((*weights)[i] + ld);
      }
      return detail::log_sum_exp(terms);
    };
  }
  // Merge atoms by location.
  struct Acc {
    double location;
    std::vector<double> log_terms;
  };
  std::vector<Acc> merged;
  for (std::size_t i = 0; i < targets->size(); ++i) {
    for (const auto& a : (*targets)[i].atoms) {
      double term = (*weights)[i] + a.log_mass;
      bool found = false;
      for (auto& m : merged) {
        if (std::abs(m.location - a.location) <= 1e-9 * std::max(1.0, std::abs(a.location))) {
          m.log_terms.push_back(term);
          found = true;
          break;
        }
      }
      if (!found) merged.push_back({a.location, {term}});
    }
  }
  std::sort(merged.begin(), merged.end(), [](const Acc& a, const Acc& b) { return a.location < b.location; });
  for (const auto& m : merged) out.atoms.push_back({m.location, detail::log_sum_exp(m.log_terms)});
  return out;
}

}  // namespace measure
}  // namespace openkpz
