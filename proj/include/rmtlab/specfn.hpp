#pragma once
// Special-function backbone: Airy, parabolic cylinder D_nu, orthogonal
// polynomials, erf/Gamma, and the root solver for the boundary quantization
// condition D_{2eps}(-W) = 0.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/airy.hpp>

namespace rmtlab {

inline double airy_ai(double x) { return boost::math::airy_ai(x); }
inline double airy_ai_prime(double x) { return boost::math::airy_ai_prime(x); }

struct AiryZeroTable {
  std::vector<double> zeros;  // a_k < 0, strictly decreasing
  int count = 0;
};

// First k_max zeros of Ai, polished by Newton to |Ai| < 1e-12.
inline AiryZeroTable airy_zeros(int k_max) {
  if (k_max < 1) throw std::invalid_argument("airy_zeros: k_max >= 1 required");
  AiryZeroTable tab;
  tab.count = k_max;
  for (int k = 1; k <= k_max; ++k) {
    double z = boost::math::airy_ai_zero<double>(k);
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      double f = airy_ai(z);
      if (std::abs(f) < 1e-12) { ok = true; break; }
      z -= f / airy_ai_prime(z);
    }
    if (!ok) throw std::runtime_error("airy_zeros: Newton did not converge");
    tab.zeros.push_back(z);
  }
  return tab;
}

inline double erf_fn(double x) { return std::erf(x); }

inline double gamma_fn(double x) {
  if (x <= 0.0 && x == std::floor(x))
    throw std::domain_error("gamma_fn: pole at non-positive integer " + std::to_string(x));
  return std::tgamma(x);
}

// Monic Hermite polynomials for the weight e^{-x^2/2}:
// He_{n+1} = x He_n - n He_{n-1}; orthogonality integral i! sqrt(2 pi).
inline double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite: n >= 0");
  double hm = 0.0, h = 1.0;
  for (int k = 0; k < n; ++k) {
    double hp = x * h - k * hm;
    hm = h;
    h = hp;
  }
  return h;
}

// Generalized Laguerre L_n^{(alpha)}, standard normalization
// (leading coefficient (-1)^n / n!), real alpha allowed.
inline double laguerre(int n, double alpha, double x) {
  if (n < 0) throw std::invalid_argument("laguerre: n >= 0");
  if (n == 0) return 1.0;
  double lm = 1.0, l = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    double lp = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm) / (k + 1.0);
    lm = l;
    l = lp;
  }
  return l;
}

// ------------------------------------------------------------------------
// Parabolic cylinder function D_nu(x), Weber's equation
//   D'' + (nu + 1/2 - x^2/4) D = 0,   D_nu(x) ~ x^nu e^{-x^2/4}, x -> +inf.
//
// Worked in the scaled variable y = e^{x^2/4} D, which obeys
//   y'' - x y' + nu y = 0
// and whose wanted branch (~x^nu) is *dominant* for decreasing x, so
// downward integration from large positive x is the stable direction.
// Local Taylor stepping with the exact recurrence
//   c_{n+2} = [x0 (n+1) c_{n+1} + (n - nu) c_n] / ((n+1)(n+2)).
// Magnitudes tracked as (value, log-scale) to survive |x| up to 60.

struct PCFEvaluation {
  double nu = 0.0;
  double x = 0.0;
  double value = 0.0;        // D_nu(x) when representable
  double est_abs_err = 0.0;
  int sign = 0;              // sign of D_nu(x)
  double log_abs = -std::numeric_limits<double>::infinity();  // log |D_nu(x)|
  bool overflow = false;     // true when |D| is outside double range
};

namespace detail {

// Asymptotic series S(x) = sum_s (-nu)_{2s} (-1)^s / (s! (2x^2)^s) and its
// x-derivative, valid for large x > 0; y = x^nu S.
inline void pcf_asymptotic(double nu, double x, double& S, double& Sp) {
  S = 1.0;
  Sp = 0.0;
  double term = 1.0;  // (-nu)_{2s} (-1)^s / (s! (2x^2)^s)
  double poch = 1.0;
  for (int s = 1; s <= 400; ++s) {
    poch = (-nu + 2.0 * s - 2.0) * (-nu + 2.0 * s - 1.0);
    term *= -poch / (s * 2.0 * x * x);
    if (std::abs(term) < 1e-19 * std::abs(S)) break;
    S += term;
    Sp += term * (-2.0 * s / x);
  }
}

}  // namespace detail

inline PCFEvaluation parabolic_cylinder_D(double nu, double x) {
  if (!(std::abs(x) <= 60.0)) throw std::invalid_argument("parabolic_cylinder_D: |x| <= 60");
  PCFEvaluation out;
  out.nu = nu;
  out.x = x;

  // Exact reduction at integer nu: D_n = e^{-x^2/4} He_n(x). This is also a
  // stability fix: the integer-index solution is subdominant as x -> -inf
  // (its e^{+x^2/4} admixture vanishes), so the ODE route loses it there.
  if (nu >= 0.0 && nu == std::floor(nu) && nu < 400.0) {
    int n = (int)nu;
    double he = hermite(n, x);
    out.sign = (he > 0.0) - (he < 0.0);
    out.log_abs = std::log(std::abs(he)) - 0.25 * x * x;
    out.value = he * std::exp(-0.25 * x * x);
    out.est_abs_err = std::abs(out.value) * 1e-12;
    return out;
  }

  const double xs = std::max(40.0, x);
  double S, Sp;
  detail::pcf_asymptotic(nu, xs, S, Sp);
  // y = xs^nu S  -> keep y/scale with logscale = nu log xs
  double logscale = nu * std::log(xs);
  double y = S;
  double yp = nu * S / xs + Sp;  // y' / xs^nu

  double xc = xs;
  while (xc > x + 1e-14) {
    double h = -std::min({0.5, 8.0 / (1.0 + std::abs(xc)), xc - x});
    // Taylor coefficients around xc
    double c0 = y, c1 = yp;
    double acc = c0 + c1 * h, accp = c1;
    double hn = h;
    double cprev = c0, ccur = c1;
    for (int n = 0; n + 2 <= 46; ++n) {
      double cnext = (xc * (n + 1.0) * ccur + (n - nu) * cprev) / ((n + 1.0) * (n + 2.0));
      accp += (n + 2.0) * cnext * hn;
      hn *= h;
      acc += cnext * hn;
      cprev = ccur;
      ccur = cnext;
    }
    y = acc;
    yp = accp;
    xc += h;
    double m = std::max(std::abs(y), std::abs(yp));
    if (m > 1e200 || (m > 0.0 && m < 1e-200)) {
      y /= m;
      yp /= m;
      logscale += std::log(m);
    }
  }

  out.sign = (y > 0.0) - (y < 0.0);
  out.log_abs = std::log(std::abs(y)) + logscale - 0.25 * x * x;
  if (out.log_abs < 700.0 && out.log_abs > -700.0) {
    out.value = out.sign * std::exp(out.log_abs);
    out.est_abs_err = std::abs(out.value) * 1e-10 + 1e-300;
  } else {
    out.overflow = true;
    out.value = out.sign * (out.log_abs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.est_abs_err = std::numeric_limits<double>::infinity();
  }
  return out;
}

// ------------------------------------------------------------------------
// Quantization condition of the harmonic half-trap with a hard wall at W:
// the admissible levels eps solve D_{2 eps}(-W) = 0. Scan on a grid of step
// 0.05 and bisect each bracket. The scan starts at 0 for W > 0 (the
// asymptotic lower bound W^2/8 - 2|W|^{2/3} only applies on the W < 0 side,
// where the ground level is pushed up against the wall).
inline std::vector<double> boundary_levels(double W, int n_levels) {
  if (n_levels < 1) throw std::invalid_argument("boundary_levels: n_levels >= 1");
  auto f = [&](double eps) {
    PCFEvaluation e = parabolic_cylinder_D(2.0 * eps, -W);
    return e;
  };
  double eps0 = (W <= 0.0) ? std::max(0.0, W * W / 8.0 - 2.0 * std::pow(std::abs(W), 2.0 / 3.0)) : 0.0;
  const double step = 0.05;
  std::vector<double> roots;
  double cap = eps0 + 40.0;
  double a = eps0;
  PCFEvaluation fa = f(a);
  while ((int)roots.size() < n_levels) {
    double b = a + step;
    if (b > cap) throw std::runtime_error("boundary_levels: scan cap reached");
    PCFEvaluation fb = f(b);
    if (fa.sign != 0 && fb.sign != 0 && fa.sign != fb.sign) {
      double lo = a, hi = b;
      int slo = fa.sign;
      while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        int sm = f(mid).sign;
        if (sm == slo)
          lo = mid;
        else
          hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace rmtlab
