// Special-function kernel: complex log-gamma, Bernoulli polynomials,
// Hurwitz zeta (series regime + negative-integer values), q-Pochhammer
// symbols, Jacobi theta series, and the small-kappa expansions of
// log(+-q^z; q)_inf used by the q->1 diagnostics.
//
// All gamma / q-Pochhammer products elsewhere in the library are assembled
// in log-space on top of these routines.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace openkpz {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

namespace specfun {

namespace detail {

// Lanczos rational approximation, g = 607/128, 15 coefficients.
inline constexpr double lanczos_g = 607.0 / 128.0;
inline constexpr double lanczos_c[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

inline bool near_nonpositive_integer(cplx z, double tol = 1e-12) {
  if (z.real() > 0.5) return false;
  double r = std::round(z.real());
  return r <= 0.0 && std::abs(z.real() - r) < tol && std::abs(z.imag()) < tol;
}

}  // namespace detail

// Principal-branch log Gamma via Lanczos; reflection for Re(z) < 1/2.
inline cplx log_gamma(cplx z) {
  if (detail::near_nonpositive_integer(z))
    throw std::domain_error("log_gamma: pole at nonpositive integer z");
  if (z.real() < 0.5) {
    // log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
    return std::log(cplx(pi)) - std::log(std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  cplx sum = detail::lanczos_c[0];
  for (int k = 1; k < 15; ++k) sum += detail::lanczos_c[k] / (z - 1.0 + static_cast<double>(k));
  cplx t = z + (detail::lanczos_g - 0.5);
  return 0.5 * std::log(2.0 * pi) + (z - 0.5) * std::log(t) - t + std::log(sum);
}

// |Gamma(z)|^2 evaluated in log-space.
inline double abs_gamma_sq(cplx z) {
  double lg2 = 2.0 * log_gamma(z).real();
  if (lg2 > 700.0) throw std::overflow_error("abs_gamma_sq: log value exceeds representable range");
  return std::exp(lg2);
}

inline double log_abs_gamma_sq(cplx z) { return 2.0 * log_gamma(z).real(); }

namespace detail {

inline const std::vector<double>& bernoulli_numbers(int n_max) {
  static std::vector<double> cache{1.0, -0.5};
  while (static_cast<int>(cache.size()) <= n_max) {
    int m = static_cast<int>(cache.size());
    // sum_{k=0}^{m} C(m+1,k) B_k = 0
    double acc = 0.0, binom = 1.0;  // C(m+1, 0)
    for (int k = 0; k < m; ++k) {
      acc += binom * cache[k];
      binom *= static_cast<double>(m + 1 - k) / static_cast<double>(k + 1);
    }
    cache.push_back(-acc / binom);  // binom = C(m+1, m)
  }
  return cache;
}

}  // namespace detail

inline double bernoulli_number(int n) {
  if (n < 0) throw std::domain_error("bernoulli_number: n must be >= 0");
  return detail::bernoulli_numbers(n)[n];
}

template <typename T>
inline T bernoulli_poly_t(int n, T x) {
  if (n < 0) throw std::domain_error("bernoulli_poly: n must be >= 0");
  const auto& B = detail::bernoulli_numbers(n);
  // B_n(x) = sum_k C(n,k) B_k x^{n-k}, Horner in x
  T acc = T(B[0]);
  double binom = 1.0;
  std::vector<double> coeff(n + 1);
  for (int k = 0; k <= n; ++k) {
    coeff[k] = binom * B[k];
    binom *= static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  acc = T(coeff[0]);
  for (int k = 1; k <= n; ++k) acc = acc * x + T(coeff[k]);
  return acc;
}

inline double bernoulli_poly(int n, double x) { return bernoulli_poly_t<double>(n, x); }

// Hurwitz zeta. Supported regimes: Re(s) > 1 with Re(z) > 0
// (Euler-Maclaurin accelerated series) and s a nonpositive integer
// (Bernoulli-polynomial value). Everything else is out of scope.
inline cplx hurwitz_zeta(cplx s, cplx z) {
  double sr = std::round(s.real());
  if (sr <= 0.0 && std::abs(s.real() - sr) < 1e-12 && std::abs(s.imag()) < 1e-12) {
    int n = static_cast<int>(-sr);
    return -bernoulli_poly_t<cplx>(n + 1, z) / static_cast<double>(n + 1);
  }
  if (!(s.real() > 1.0) || !(z.real() > 0.0))
    throw std::domain_error("hurwitz_zeta: need Re(s) > 1 and Re(z) > 0, or s a nonpositive integer");

  const int M = 24, J = 8;
  cplx acc = 0.0;
  for (int n = 0; n < M; ++n) acc += std::exp(-s * std::log(z + static_cast<double>(n)));
  cplx w = z + static_cast<double>(M);
  cplx logw = std::log(w);
  acc += std::exp((1.0 - s) * logw) / (s - 1.0);
  acc += 0.5 * std::exp(-s * logw);
  cplx rising = s;  // [s]_{2j-1}
  double fact = 2.0; // (2j)!
  for (int j = 1; j <= J; ++j) {
    acc += bernoulli_number(2 * j) / fact * rising * std::exp(-(s + static_cast<double>(2 * j - 1)) * logw);
    rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    fact *= static_cast<double>(2 * j + 1) * static_cast<double>(2 * j + 2);
  }
  return acc;
}

// (a; q)_j, finite product.
inline cplx qpoch_finite(cplx a, double q, int j) {
  if (j < 0) throw std::domain_error("qpoch_finite: j must be >= 0");
  if (!(std::abs(q) < 1.0)) throw std::domain_error("qpoch_finite: need |q| < 1");
  cplx prod = 1.0, aq = a;
  for (int k = 0; k < j; ++k) {
    prod *= (1.0 - aq);
    aq *= q;
  }
  return prod;
}

// log (a; q)_inf, truncated when |a q^k| < 1e-18.
inline cplx log_qpoch_inf(cplx a, double q) {
  if (!(std::abs(q) < 1.0)) throw std::domain_error("log_qpoch_inf: need |q| < 1");
  cplx acc = 0.0, aq = a;
  while (std::abs(aq) >= 1e-18) {
    cplx one_minus = 1.0 - aq;
    if (std::abs(one_minus) < 1e-300)
      throw std::domain_error("log_qpoch_inf: vanishing factor 1 - a q^k");
    if (std::abs(aq) < 1e-4) {
      // log(1 - w) = -w - w^2/2 - w^3/3 - w^4/4 + O(w^5)
      cplx w = aq;
      acc += -w * (1.0 + w * (0.5 + w * (1.0 / 3.0 + w * 0.25)));
    } else {
      acc += std::log(one_minus);
    }
    aq *= q;
  }
  return acc;
}

// (a; q)_inf for real a of arbitrary size, returned as log|value| and sign.
// sign == 0 flags an exactly vanishing factor (a = q^{-k}).
struct SignedLog {
  double log_abs;
  int sign;
};

inline SignedLog qpoch_inf_signed(double a, double q, double zero_tol = 1e-11) {
  if (!(std::abs(q) < 1.0)) throw std::domain_error("qpoch_inf_signed: need |q| < 1");
  double acc = 0.0, aq = a;
  int sign = 1;
  while (std::abs(aq) >= 1e-18) {
    double f = 1.0 - aq;
    if (std::abs(f) < zero_tol) return {-std::numeric_limits<double>::infinity(), 0};
    if (f < 0.0) sign = -sign;
    acc += (std::abs(aq) < 1e-4) ? std::log1p(-aq) : std::log(std::abs(f));
    aq *= q;
  }
  return {acc, sign};
}

// log |(w e^{i theta}; q)_inf|^2 for real w, via the real product
// prod_k (1 - 2 w q^k cos(theta) + w^2 q^{2k}).
inline double log_abs_sq_qpoch(double w, double q, double cos_theta) {
  if (!(std::abs(q) < 1.0)) throw std::domain_error("log_abs_sq_qpoch: need |q| < 1");
  double acc = 0.0, prod = 1.0, r = w;
  int cnt = 0;
  while (std::abs(r) >= 1e-18) {
    double f = 1.0 - 2.0 * r * cos_theta + r * r;
    if (f < 1e-300) throw std::domain_error("log_abs_sq_qpoch: vanishing factor");
    prod *= f;
    if (++cnt == 8) {
      acc += std::log(prod);
      prod = 1.0;
      cnt = 0;
    }
    r *= q;
  }
  acc += std::log(prod);
  return acc;
}

// [x]_j = x (x+1) ... (x+j-1)
inline double pochhammer_rising(double x, int j) {
  if (j < 0) throw std::domain_error("pochhammer_rising: j must be >= 0");
  double prod = 1.0;
  for (int k = 0; k < j; ++k) prod *= (x + static_cast<double>(k));
  return prod;
}

inline cplx pochhammer_rising(cplx x, int j) {
  if (j < 0) throw std::domain_error("pochhammer_rising: j must be >= 0");
  cplx prod = 1.0;
  for (int k = 0; k < j; ++k) prod *= (x + static_cast<double>(k));
  return prod;
}

// theta_1(nu | i rho_im) = 2 sum_{k>=0} (-1)^k e^{-pi rho_im (k+1/2)^2} sin((2k+1) pi nu)
inline cplx theta1(cplx nu, double rho_im) {
  if (!(rho_im > 0.0)) throw std::domain_error("theta1: need rho_im > 0");
  cplx acc = 0.0;
  double im = std::abs(nu.imag());
  for (int k = 0;; ++k) {
    double nome = std::exp(-pi * rho_im * (k + 0.5) * (k + 0.5));
    double bound = nome * std::exp((2 * k + 1) * pi * im);
    cplx term = nome * std::sin((2.0 * k + 1.0) * pi * nu);
    if (k % 2 == 1) term = -term;
    acc += 2.0 * term;
    if (bound < 1e-18 && k >= 1) break;
  }
  return acc;
}

// theta_4(nu | i rho_im) = 1 + 2 sum_{k>=1} (-1)^k e^{-pi rho_im k^2} cos(2 k pi nu)
inline cplx theta4(cplx nu, double rho_im) {
  if (!(rho_im > 0.0)) throw std::domain_error("theta4: need rho_im > 0");
  cplx acc = 1.0;
  double im = std::abs(nu.imag());
  for (int k = 1;; ++k) {
    double nome = std::exp(-pi * rho_im * static_cast<double>(k) * k);
    double bound = nome * std::exp(2.0 * k * pi * im);
    cplx term = nome * std::cos(2.0 * k * pi * nu);
    if (k % 2 == 1) term = -term;
    acc += 2.0 * term;
    if (bound < 1e-18) break;
  }
  return acc;
}

// Leading terms of log(q^z; q)_inf and log(-q^z; q)_inf as q = e^{-kappa} -> 1.
inline cplx a_plus(double kappa, cplx z) {
  if (!(kappa > 0.0)) throw std::domain_error("a_plus: need kappa > 0");
  return -pi * pi / (6.0 * kappa) - (z - 0.5) * std::log(kappa) -
         (log_gamma(z) - 0.5 * std::log(2.0 * pi));
}

inline cplx a_minus(double kappa, cplx z) {
  if (!(kappa > 0.0)) throw std::domain_error("a_minus: need kappa > 0");
  return pi * pi / (12.0 * kappa) - (z - 0.5) * std::log(2.0);
}

enum class ExpansionSign { plus, minus };

struct QExpansionResult {
  cplx value;       // log(+-q^z; q)_inf, computed from the product
  cplx leading;     // closed-form leading part
  cplx correction;  // Bernoulli correction sum (empty for m = 1)
  double error_measured;
};

inline QExpansionResult qpoch_asymptotic(double kappa, cplx z, ExpansionSign sign, int m) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::domain_error("qpoch_asymptotic: need kappa in (0,1)");
  if (m < 1) throw std::domain_error("qpoch_asymptotic: need m >= 1");
  if (!(std::abs(z.imag()) < 5.0 / kappa))
    throw std::domain_error("qpoch_asymptotic: need |Im z| < 5/kappa");
  double q = std::exp(-kappa);
  cplx a = std::exp(-kappa * z);
  if (sign == ExpansionSign::minus) a = -a;
  QExpansionResult res;
  res.value = log_qpoch_inf(a, q);
  res.leading = (sign == ExpansionSign::plus) ? a_plus(kappa, z) : a_minus(kappa, z);
  cplx corr = 0.0;
  double kap_pow = kappa;
  double fact = 2.0;  // (n+1)!
  for (int n = 1; n <= m - 1; ++n) {
    double coef = (sign == ExpansionSign::minus) ? (std::pow(2.0, n) - 1.0) : 1.0;
    corr -= coef * bernoulli_poly_t<cplx>(n + 1, z) * bernoulli_number(n) /
            (static_cast<double>(n) * fact) * kap_pow;
    kap_pow *= kappa;
    fact *= static_cast<double>(n + 2);
  }
  res.correction = corr;
  res.error_measured = std::abs(res.value - res.leading - res.correction);
  return res;
}

}  // namespace specfun
}  // namespace openkpz
