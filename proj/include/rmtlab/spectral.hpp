#pragma once
// Closed-form reference laws (semicircle, Marchenko-Pastur, inverse-MP,
// quarter-circle, Wigner surmise, inverse-gamma, Ferrari-Spohn), empirical
// spectral statistics, Stieltjes transforms and Sokhotski-Plemelj inversion,
// plus the L1/KS distances used throughout the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/specfn.hpp"

namespace rmtlab {

struct AnalyticLaw {
  enum class Kind {
    Semicircle,     // sigma
    MarcenkoPastur, // q, sigma
    InverseMP,      // q, sigma
    QuarterCircle,  // sigma
    Surmise,        // beta
    InverseGamma,   // m, sigma  (stationary scalar Kesten)
    FerrariSpohn,   // W, T
  };
  Kind kind = Kind::Semicircle;
  double sigma = 1.0;
  double q = 0.5;
  double beta = 1.0;
  double m = -1.0;
  double W = 1.0;
  double T = 1.0;

  static AnalyticLaw semicircle(double sigma) { return {Kind::Semicircle, sigma}; }
  static AnalyticLaw mp(double q, double sigma) {
    AnalyticLaw l; l.kind = Kind::MarcenkoPastur; l.q = q; l.sigma = sigma; return l;
  }
  static AnalyticLaw imp(double q, double sigma) {
    AnalyticLaw l; l.kind = Kind::InverseMP; l.q = q; l.sigma = sigma; return l;
  }
  static AnalyticLaw imp_kappa(double kappa, double sigma) {
    // kappa = (1-q)/(2q)  <=>  q = 1/(1+2 kappa)
    return imp(1.0 / (1.0 + 2.0 * kappa), sigma);
  }
  static AnalyticLaw quarter_circle(double sigma) { return {Kind::QuarterCircle, sigma}; }
  static AnalyticLaw surmise(double beta) {
    AnalyticLaw l; l.kind = Kind::Surmise; l.beta = beta; return l;
  }
  static AnalyticLaw inverse_gamma(double m, double sigma) {
    AnalyticLaw l; l.kind = Kind::InverseGamma; l.m = m; l.sigma = sigma; return l;
  }
  static AnalyticLaw ferrari_spohn(double W, double T) {
    AnalyticLaw l; l.kind = Kind::FerrariSpohn; l.W = W; l.T = T; return l;
  }
};

inline void surmise_coeffs(double beta, double& a, double& b) {
  if (beta == 1.0) { a = M_PI / 2.0; b = M_PI / 4.0; }
  else if (beta == 2.0) { a = 32.0 / (M_PI * M_PI); b = 4.0 / M_PI; }
  else if (beta == 4.0) { a = 262144.0 / (729.0 * M_PI * M_PI * M_PI); b = 64.0 / (9.0 * M_PI); }
  else throw std::invalid_argument("surmise defined for beta in {1,2,4}");
}

// support endpoints [lo, hi] (hi may be +inf)
inline std::pair<double, double> law_support(const AnalyticLaw& l) {
  const double s2 = l.sigma * l.sigma;
  switch (l.kind) {
    case AnalyticLaw::Kind::Semicircle:
      return {-2.0 * l.sigma, 2.0 * l.sigma};
    case AnalyticLaw::Kind::MarcenkoPastur: {
      double r = std::sqrt(l.q);
      return {s2 * (1.0 - r) * (1.0 - r), s2 * (1.0 + r) * (1.0 + r)};
    }
    case AnalyticLaw::Kind::InverseMP: {
      if (l.q >= 1.0) throw std::invalid_argument("inverse-MP undefined for q >= 1");
      double k = (1.0 - l.q) / (2.0 * l.q);
      return {(k + 1.0 - std::sqrt(2.0 * k + 1.0)) / (k * s2),
              (k + 1.0 + std::sqrt(2.0 * k + 1.0)) / (k * s2)};
    }
    case AnalyticLaw::Kind::QuarterCircle:
      return {0.0, 2.0 * l.sigma};
    case AnalyticLaw::Kind::Surmise:
    case AnalyticLaw::Kind::InverseGamma:
    case AnalyticLaw::Kind::FerrariSpohn:
      return {0.0, std::numeric_limits<double>::infinity()};
  }
  throw std::logic_error("unreachable");
}

inline double density(const AnalyticLaw& l, double x) {
  const double s2 = l.sigma * l.sigma;
  switch (l.kind) {
    case AnalyticLaw::Kind::Semicircle: {
      double d = 4.0 * s2 - x * x;
      return d > 0.0 ? std::sqrt(d) / (2.0 * M_PI * s2) : 0.0;
    }
    case AnalyticLaw::Kind::MarcenkoPastur: {
      if (!(l.q > 0.0 && l.q <= 1.0)) throw std::invalid_argument("MP needs 0 < q <= 1");
      auto [lo, hi] = law_support(l);
      if (x <= lo || x >= hi) return 0.0;
      return std::sqrt((hi - x) * (x - lo)) / (2.0 * l.q * M_PI * s2 * x);
    }
    case AnalyticLaw::Kind::InverseMP: {
      auto [lo, hi] = law_support(l);
      if (x <= lo || x >= hi) return 0.0;
      double k = (1.0 - l.q) / (2.0 * l.q);
      return k * std::sqrt((hi - x) * (x - lo)) / (M_PI * s2 * x * x);
    }
    case AnalyticLaw::Kind::QuarterCircle: {
      if (x < 0.0) return 0.0;
      double d = 4.0 * s2 - x * x;
      return d > 0.0 ? std::sqrt(d) / (M_PI * s2) : 0.0;
    }
    case AnalyticLaw::Kind::Surmise: {
      if (x < 0.0) return 0.0;
      double a, b;
      surmise_coeffs(l.beta, a, b);
      return a * std::pow(x, l.beta) * std::exp(-b * x * x);
    }
    case AnalyticLaw::Kind::InverseGamma: {
      // stationary law of dU = (1+mU)dt + sqrt(2) sigma U dB, m < sigma^2:
      // 1/U ~ Gamma(1 - m/sigma^2, sigma^2)
      if (x <= 0.0) return 0.0;
      if (!(l.m < s2)) throw std::invalid_argument("inverse-gamma needs m < sigma^2");
      double sh = 1.0 - l.m / s2;
      double lx = -(sh + 1.0) * std::log(x) - 1.0 / (s2 * x) - sh * std::log(s2) - std::lgamma(sh);
      return std::exp(lx);
    }
    case AnalyticLaw::Kind::FerrariSpohn: {
      if (x < 0.0) return 0.0;
      if (!(l.W > 0.0)) throw std::invalid_argument("Ferrari-Spohn needs W > 0");
      static const double a1 = airy_zeros(1).zeros[0];
      double f = std::cbrt(4.0 * l.W);
      double ap = airy_ai_prime(a1);
      double A = airy_ai(a1 + f * x / std::sqrt(l.T));
      return f / (std::sqrt(l.T) * ap * ap) * A * A;
    }
  }
  throw std::logic_error("unreachable");
}

// ----------------------------------------------------------- histograms

struct EmpiricalDensity {
  std::vector<double> bin_edges;  // size B+1
  std::vector<double> masses;     // size B, sums to 1
  std::size_t n_samples = 0;

  double density_at(double x) const {
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), x);
    if (it == bin_edges.begin() || it == bin_edges.end()) return 0.0;
    std::size_t b = (std::size_t)(it - bin_edges.begin()) - 1;
    double w = bin_edges[b + 1] - bin_edges[b];
    return masses[b] / w;
  }
};

inline EmpiricalDensity histogram(std::vector<double> xs, int n_bins = 0) {
  if (xs.empty()) throw std::invalid_argument("histogram: empty sample");
  std::sort(xs.begin(), xs.end());
  double lo = xs.front(), hi = xs.back();
  if (n_bins <= 0) {
    // Freedman-Diaconis
    std::size_t n = xs.size();
    double q1 = xs[n / 4], q3 = xs[(3 * n) / 4];
    double h = 2.0 * (q3 - q1) / std::cbrt((double)n);
    n_bins = (h > 0.0) ? std::max(1, (int)std::ceil((hi - lo) / h)) : 1;
    n_bins = std::min(n_bins, 2000);
  }
  if (hi == lo) hi = lo + 1e-12;
  EmpiricalDensity ed;
  ed.n_samples = xs.size();
  ed.bin_edges.resize(n_bins + 1);
  for (int b = 0; b <= n_bins; ++b) ed.bin_edges[b] = lo + (hi - lo) * b / n_bins;
  ed.masses.assign(n_bins, 0.0);
  double w = 1.0 / (double)xs.size();
  for (double x : xs) {
    int b = (int)((x - lo) / (hi - lo) * n_bins);
    b = std::clamp(b, 0, n_bins - 1);
    ed.masses[b] += w;
  }
  return ed;
}

inline EmpiricalDensity esd(const std::vector<Spectrum>& samples, double rescale, int n_bins = 0) {
  if (samples.empty() || rescale <= 0.0) throw std::invalid_argument("esd: bad input");
  std::vector<double> xs;
  for (const auto& s : samples)
    for (double v : s.values) xs.push_back(v * rescale);
  return histogram(std::move(xs), n_bins);
}

// Consecutive spacings; when normalize, each spacing index i is divided by
// the empirical mean of that index across samples (unit-mean relative
// spacings s_i = S_i / E[S_i]).
inline std::vector<double> spacing_samples(const std::vector<Spectrum>& samples, bool normalize) {
  if (samples.empty() || samples[0].values.size() < 2)
    throw std::invalid_argument("spacing_samples: need N >= 2");
  std::size_t ns = samples[0].values.size() - 1;
  std::vector<double> mean(ns, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < ns; ++i) mean[i] += s.values[i + 1] - s.values[i];
  for (auto& m : mean) m /= (double)samples.size();
  std::vector<double> out;
  out.reserve(samples.size() * ns);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < ns; ++i) {
      double sp = s.values[i + 1] - s.values[i];
      out.push_back(normalize ? sp / mean[i] : sp);
    }
  return out;
}

inline EmpiricalDensity spacing_stats(const std::vector<Spectrum>& samples, bool normalize,
                                      int n_bins = 0) {
  return histogram(spacing_samples(samples, normalize), n_bins);
}

// ------------------------------------------------------------- transforms

using cplx = std::complex<double>;

// sqrt((z-lo)(z-hi)) with the branch that behaves like +z at infinity
inline cplx edge_sqrt(cplx z, double lo, double hi) {
  return std::sqrt(z - lo) * std::sqrt(z - hi);
}

inline cplx stieltjes(const AnalyticLaw& l, cplx z) {
  const double s2 = l.sigma * l.sigma;
  switch (l.kind) {
    case AnalyticLaw::Kind::Semicircle:
      return (z - edge_sqrt(z, -2.0 * l.sigma, 2.0 * l.sigma)) / (2.0 * s2);
    case AnalyticLaw::Kind::MarcenkoPastur: {
      auto [lo, hi] = law_support(l);
      return (z + s2 * (l.q - 1.0) - edge_sqrt(z, lo, hi)) / (2.0 * l.q * s2 * z);
    }
    case AnalyticLaw::Kind::InverseMP: {
      auto [lo, hi] = law_support(l);
      double k = (1.0 - l.q) / (2.0 * l.q);
      return (z * (k + 1.0) - k / s2 - k * edge_sqrt(z, lo, hi)) / (z * z);
    }
    default:
      throw std::invalid_argument("stieltjes closed form: semicircle/MP/IMP only");
  }
}

inline cplx stieltjes_esd(const std::vector<double>& eigs, cplx z) {
  cplx acc = 0.0;
  for (double x : eigs) {
    if (z == cplx(x, 0.0)) throw std::domain_error("stieltjes_esd: z hits an eigenvalue");
    acc += 1.0 / (z - x);
  }
  return acc / (double)eigs.size();
}

inline double plemelj_density(const std::function<cplx(cplx)>& g, double x, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("plemelj: eta > 0");
  return g(cplx(x, -eta)).imag() / M_PI;
}

// ------------------------------------------------------------- distances

// L1 distance between a histogram and a law, computed per bin against the
// law integrated over that bin (16-point Gauss-Legendre), plus the law mass
// lying outside the histogram range.
inline double l1_distance(const EmpiricalDensity& ed, const std::function<double(double)>& pdf,
                          double law_lo, double law_hi) {
  static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                               0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                               0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  auto mass = [&](double a, double b2) {
    double c = 0.5 * (a + b2), h = 0.5 * (b2 - a), acc = 0.0;
    for (int i = 0; i < 8; ++i) acc += gw[i] * (pdf(c - h * gx[i]) + pdf(c + h * gx[i]));
    return acc * h;
  };
  double d = 0.0;
  for (std::size_t b = 0; b + 1 < ed.bin_edges.size(); ++b)
    d += std::abs(ed.masses[b] - mass(ed.bin_edges[b], ed.bin_edges[b + 1]));
  // law mass outside the histogram window
  double lo = std::max(law_lo, ed.bin_edges.front());
  double hi = std::min(law_hi, ed.bin_edges.back());
  if (law_lo < lo) d += mass(law_lo, lo);
  if (hi < law_hi) {
    // chunked to keep the 16-point rule accurate on wide tails
    double a = hi;
    while (a < law_hi) {
      double b2 = std::min(a + std::max(1.0, 0.1 * std::abs(a)), law_hi);
      d += mass(a, b2);
      a = b2;
    }
  }
  return d;
}

inline double l1_distance(const EmpiricalDensity& ed, const AnalyticLaw& law) {
  auto [lo, hi] = law_support(law);
  if (!std::isfinite(hi)) hi = ed.bin_edges.back() + 50.0;
  return l1_distance(ed, [&](double x) { return density(law, x); }, lo, hi);
}

// Kolmogorov-Smirnov distance of a sample against a law, with the law CDF
// built by cumulative Simpson on a dense grid.
inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& pdf,
                          double lo, double hi, int grid = 20000) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> gx(grid + 1), cdf(grid + 1, 0.0);
  for (int i = 0; i <= grid; ++i) gx[i] = lo + (hi - lo) * i / grid;
  for (int i = 0; i < grid; ++i) {
    double a = gx[i], b = gx[i + 1], m = 0.5 * (a + b);
    cdf[i + 1] = cdf[i] + (b - a) / 6.0 * (pdf(a) + 4.0 * pdf(m) + pdf(b));
  }
  double total = cdf[grid];  // ~1; normalize to be binning-robust
  auto cdf_at = [&](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    std::size_t i = (std::size_t)((x - lo) / (hi - lo) * grid);
    i = std::min(i, (std::size_t)grid - 1);
    double f = (x - gx[i]) / (gx[i + 1] - gx[i]);
    return (cdf[i] + f * (cdf[i + 1] - cdf[i])) / total;
  };
  double d = 0.0;
  std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    double c = cdf_at(xs[i]);
    d = std::max(d, std::abs(c - (double)i / n));
    d = std::max(d, std::abs(c - (double)(i + 1) / n));
  }
  return d;
}

inline double ks_distance(std::vector<double> xs, const AnalyticLaw& law) {
  auto [lo, hi] = law_support(law);
  if (!std::isfinite(hi)) {
    double mx = *std::max_element(xs.begin(), xs.end());
    hi = mx * 1.5 + 10.0;
  }
  return ks_distance(std::move(xs), [&](double x) { return density(law, x); }, lo, hi);
}

}  // namespace rmtlab
