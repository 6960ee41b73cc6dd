#pragma once
// Determinantal kernels and fermionic densities: finite-N
// orthogonal-polynomial kernels (Hermite, Morse, linear wall, biorthogonal
// Laguerre), the universal sine/Airy/Bessel/hard-wall kernels, Morse
// bound states with bulk/edge/far-right density approximations, the
// Ferrari-Spohn density and its N-particle generalization, and
// Fredholm-determinant gap probabilities via Nystrom quadrature.

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rmtlab/specfn.hpp"

namespace rmtlab {

// F1(z) = Ai'(z)^2 - z Ai(z)^2, the Airy-kernel diagonal.
inline double airy_f1(double z) {
  const double a = airy_ai(z);
  const double ap = airy_ai_prime(z);
  return ap * ap - z * a * a;
}

// ---------------------------------------------------------------------------
// Kernel descriptor
// ---------------------------------------------------------------------------

struct Kernel {
  enum class Kind {
    HermiteN,        // (1/sigma) sum_k phi_k(x/s) phi_k(y/s), Gaussian weight
    Sine,            // sin(pi(x-y)) / (pi(x-y)), unit mean density
    Airy,            // (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x-y)
    Bessel,          // hard-edge kernel with parameter alpha, x,y >= 0
    HardWall,        // sin(x-y)/pi(x-y) - sin(x+y)/pi(x+y), x,y >= 0
    MorseN,          // sum of the first N Morse bound states (beta = 2)
    LinearWallN,     // first N Airy eigenfunctions over a wall at 0
    BiorthLaguerre,  // biorthogonal Laguerre (theta = 1/2) exact kernel
  };

  Kind kind = Kind::Sine;
  int N = 0;            // finite-rank kinds
  double sigma = 1.0;   // HermiteN scale / MorseN noise strength
  double m = 0.0;       // MorseN drift
  double alpha = 0.0;   // Bessel order
  double W = 0.0;       // LinearWallN slope parameter
  double T = 1.0;       // LinearWallN horizon

  static Kernel hermite(int N, double sigma = 1.0) {
    Kernel k;
    k.kind = Kind::HermiteN;
    k.N = N;
    k.sigma = sigma;
    return k;
  }
  static Kernel sine() { return Kernel{}; }
  static Kernel airy() {
    Kernel k;
    k.kind = Kind::Airy;
    return k;
  }
  static Kernel bessel(double alpha) {
    Kernel k;
    k.kind = Kind::Bessel;
    k.alpha = alpha;
    return k;
  }
  static Kernel hard_wall() {
    Kernel k;
    k.kind = Kind::HardWall;
    return k;
  }
  static Kernel morse(int N, double m, double sigma) {
    Kernel k;
    k.kind = Kind::MorseN;
    k.N = N;
    k.m = m;
    k.sigma = sigma;
    return k;
  }
  static Kernel linear_wall(int N, double W, double T) {
    Kernel k;
    k.kind = Kind::LinearWallN;
    k.N = N;
    k.W = W;
    k.T = T;
    return k;
  }
  static Kernel biorth_laguerre(int N) {
    Kernel k;
    k.kind = Kind::BiorthLaguerre;
    k.N = N;
    return k;
  }

  bool finite_rank() const {
    return kind == Kind::HermiteN || kind == Kind::MorseN ||
           kind == Kind::LinearWallN || kind == Kind::BiorthLaguerre;
  }
};

namespace detail {

// Normalized Hermite (harmonic-oscillator) functions
// phi_k(u) = He_k(u) e^{-u^2/4} / sqrt(k! sqrt(2 pi)), k = 0..n-1,
// evaluated by the stable normalized three-term recurrence.
inline void hermite_phi(int n, double u, std::vector<double>& out) {
  out.resize(n);
  if (n == 0) return;
  const double phi0 = std::exp(-0.25 * u * u) / std::pow(2.0 * M_PI, 0.25);
  out[0] = phi0;
  if (n == 1) return;
  out[1] = u * phi0;
  for (int k = 1; k + 1 < n; ++k)
    out[k + 1] = (u * out[k] - std::sqrt((double)k) * out[k - 1]) /
                 std::sqrt((double)k + 1.0);
}

inline double sinc(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

inline double bessel_jp(double nu, double u) {
  return 0.5 * (boost::math::cyl_bessel_j(nu - 1.0, u) -
                boost::math::cyl_bessel_j(nu + 1.0, u));
}

// Bessel-kernel diagonal: K_alpha(x,x) = [J_a(s)^2 - J_{a+1}(s)J_{a-1}(s)]/4
// with s = sqrt(x).
inline double bessel_kernel_diag(double alpha, double x) {
  const double s = std::sqrt(x);
  const double j = boost::math::cyl_bessel_j(alpha, s);
  if (x == 0.0) return alpha == 0.0 ? 0.25 : 0.0;
  const double jp1 = boost::math::cyl_bessel_j(alpha + 1.0, s);
  const double jm1 = boost::math::cyl_bessel_j(alpha - 1.0, s);
  return 0.25 * (j * j - jp1 * jm1);
}

inline double bessel_kernel(double alpha, double x, double y) {
  if (x < 0.0 || y < 0.0)
    throw std::domain_error("bessel kernel: arguments must be >= 0");
  if (std::abs(x - y) < 1e-8 * std::max(1.0, std::abs(x)))
    return bessel_kernel_diag(alpha, 0.5 * (x + y));
  // sqrt(x) J'_a(sqrt(x)) -> 0 as x -> 0 for a >= 0
  auto half = [alpha](double v) {
    if (v == 0.0) return 0.0;
    const double s = std::sqrt(v);
    return s * bessel_jp(alpha, s);
  };
  const double jx = boost::math::cyl_bessel_j(alpha, std::sqrt(x));
  const double jy = boost::math::cyl_bessel_j(alpha, std::sqrt(y));
  return (half(y) * jx - half(x) * jy) / (2.0 * (x - y));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Morse bound states (general beta parameters, full solution at beta = 2)
// ---------------------------------------------------------------------------

struct MorseStates {
  int N = 0;
  double beta = 2.0;
  double m = 0.0;
  double sigma = 1.0;
  double g = 0.0;       // potential strength: V = g^2(e^{-2(x-x0)} - 2e^{-(x-x0)})
  double x0 = 0.0;      // potential minimum
  int n_max = 0;        // number of admissible bound states
  std::vector<double> levels;  // eps_k = -(g - 1/2 - k)^2, k = 0..N-1
  double ground_energy = 0.0;  // sum of the first N levels

  // psi_k(x) = N_k z^{g-k-1/2} e^{-z/2} L_k^{(2g-2k-1)}(z), z = 2g e^{-(x-x0)},
  // evaluated in log-space to avoid Gamma overflow at large N.
  double psi(int k, double x) const {
    if (k < 0 || k >= N) throw std::invalid_argument("MorseStates::psi: bad k");
    const double a = g - k - 0.5;
    const double z = 2.0 * g * std::exp(-(x - x0));
    const double lag = laguerre(k, 2.0 * g - 2.0 * k - 1.0, z);
    if (lag == 0.0) return 0.0;
    const double log_nk = 0.5 * (std::lgamma(k + 1.0) +
                                 std::log(2.0 * g - 2.0 * k - 1.0) -
                                 std::lgamma(2.0 * g - k));
    const double log_mag = log_nk + a * std::log(z) - 0.5 * z +
                           std::log(std::abs(lag));
    return (lag > 0.0 ? 1.0 : -1.0) * std::exp(log_mag);
  }
};

inline MorseStates morse_bound_states(int N, double m, double sigma,
                                      double beta = 2.0) {
  if (N < 1) throw std::invalid_argument("morse_bound_states: need N >= 1");
  if (sigma <= 0.0) throw std::invalid_argument("morse_bound_states: sigma > 0");
  MorseStates st;
  st.N = N;
  st.beta = beta;
  st.m = m;
  st.sigma = sigma;
  const double ms2 = m / (sigma * sigma);
  st.g = 0.5 * beta * (N - ms2 - 1.0) + 1.0;
  st.x0 = -std::log(sigma * sigma * (N - ms2 - 1.0 + 2.0 / beta));
  const double K = st.g - 0.5;
  // bound state k exists iff k < K (strict), so n_max = #{k >= 0 : k < K}
  st.n_max = K <= 0.0 ? 0 : (int)std::ceil(K);
  if (beta == 2.0 && m >= 0.5 * sigma * sigma)
    throw std::invalid_argument("morse_bound_states: need m < sigma^2/2");
  if (N > st.n_max)
    throw std::invalid_argument("morse_bound_states: N exceeds bound-state count");
  st.levels.resize(N);
  for (int k = 0; k < N; ++k) {
    st.levels[k] = -(K - k) * (K - k);
    st.ground_energy += st.levels[k];
  }
  return st;
}

// ---------------------------------------------------------------------------
// Linear-wall (Ferrari-Spohn) eigenfunctions
// ---------------------------------------------------------------------------

namespace detail {

// psi_k(x) = (4W)^{1/6} / (T^{1/4} |Ai'(a_{k+1})|) Ai(a_{k+1} + (4W)^{1/3} x / sqrt(T))
inline void linear_wall_psi(int N, double W, double T, double x,
                            std::vector<double>& out) {
  const AiryZeroTable tab = airy_zeros(N);
  const double c = std::cbrt(4.0 * W) / std::sqrt(T);
  const double pref = std::pow(4.0 * W, 1.0 / 6.0) / std::pow(T, 0.25);
  out.resize(N);
  for (int k = 0; k < N; ++k) {
    const double ak = tab.zeros[k];
    out[k] = pref / std::abs(airy_ai_prime(ak)) * airy_ai(ak + c * x);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Biorthogonal Laguerre kernel (theta = 1/2, weight e^{-z})
// ---------------------------------------------------------------------------

namespace detail {

using mp_float = boost::multiprecision::cpp_bin_float_50;

// Coefficients of the double-sum form of the exact kernel
//   K_N(z,z') = (1/2) e^{-(z+z')/2} sum_{k,i} C(k,i) z^{k/2} z'^i e_{N-1-i}(z')
// obtained from the triple sum by absorbing the r-sum into the partial
// exponential e_n(z) = sum_{s<=n} z^s/s!.
struct BiorthCoeffs {
  int N = 0;
  std::vector<mp_float> c;  // c[k * N + i]
};

inline const BiorthCoeffs& biorth_coeffs(int N) {
  static std::map<int, BiorthCoeffs> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  BiorthCoeffs bc;
  bc.N = N;
  bc.c.resize((size_t)N * N);
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < N; ++i) {
      mp_float v = boost::math::tgamma(mp_float(N + 2 * i + 2)) /
                   (boost::math::tgamma(mp_float(0.5 * k + 1.0)) *
                    boost::math::tgamma(mp_float(2 * i + 2)));
      v /= boost::math::tgamma(mp_float(k + 1)) *
           boost::math::tgamma(mp_float(N - k)) *
           boost::math::tgamma(mp_float(i + 1));
      v /= mp_float(0.5 * k + i + 1.0);
      if ((i + k) % 2 != 0) v = -v;
      bc.c[(size_t)k * N + i] = v;
    }
  }
  return cache.emplace(N, std::move(bc)).first->second;
}

inline double biorth_kernel(int N, double z, double zp) {
  if (z < 0.0 || zp < 0.0)
    throw std::domain_error("biorth kernel: arguments must be >= 0");
  if (N > 40) throw std::invalid_argument("biorth kernel: N <= 40");
  const BiorthCoeffs& bc = biorth_coeffs(N);
  const mp_float mz = z, mzp = zp;
  const mp_float sz = sqrt(mz);
  // partial exponentials e_n(z'), n = 0..N-1
  std::vector<mp_float> epart(N);
  mp_float term = 1, acc = 1;
  epart[0] = 1;
  for (int n = 1; n < N; ++n) {
    term *= mzp / n;
    acc += term;
    epart[n] = acc;
  }
  std::vector<mp_float> zp_pow(N), z_half(N);
  zp_pow[0] = 1;
  z_half[0] = 1;
  for (int i = 1; i < N; ++i) zp_pow[i] = zp_pow[i - 1] * mzp;
  for (int k = 1; k < N; ++k) z_half[k] = z_half[k - 1] * sz;
  mp_float sum = 0;
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      sum += bc.c[(size_t)k * N + i] * z_half[k] * zp_pow[i] * epart[N - 1 - i];
  sum *= mp_float(0.5) * exp(-(mz + mzp) / 2);
  return (double)sum;
}

}  // namespace detail

// Density rho_z(z) = K_N(z,z)/N of the biorthogonal Laguerre z-process
// (surviving DBM-2 particles over a fixed wall, z = lambda^2/2t).
inline double biorth_laguerre_density(int N, double z) {
  if (N < 1 || N > 40)
    throw std::invalid_argument("biorth_laguerre_density: need 1 <= N <= 40");
  return detail::biorth_kernel(N, z, z) / N;
}

// Large-N bulk scaling function r_bulk on [0, L], L = (3/2)^{3/2}:
// rho(lambda) = r_bulk(lambda / sqrt(2Nt)) / sqrt(2Nt).
inline double biorth_bulk_scaling(double u) {
  const double L = std::pow(1.5, 1.5);
  if (u <= 0.0 || u >= L) return 0.0;
  const double r = L / u;
  const double s = std::sqrt(r * r - 1.0);
  const double gm = std::cbrt(r - s);  // minus branch
  const double gp = std::cbrt(r + s);
  const double root = std::sqrt(1.0 - u * u / (L * L));
  return (gm - gp + 3.0 * root * (gm + gp)) / (2.0 * M_PI * std::sqrt(2.0));
}

// Hard-edge limiting kernel of the biorthogonal Laguerre ensemble,
// diagonal density rho_edge,z(zt) = K_edge(zt, zt); the finite-N link is
// K_edge(zt, zt') = lim (1/N^2) K_N(zt/N^2, zt'/N^2).
inline double biorth_hard_edge_kernel(double zt, double ztp) {
  if (zt < 0.0 || ztp < 0.0)
    throw std::domain_error("biorth_hard_edge_kernel: arguments must be >= 0");
  const double s = std::sqrt(ztp);
  double sum = 0.0;
  for (int k = 0;; ++k) {
    // a_k = (-zt)^k / (k! Gamma(2k+2))
    const double la = k * std::log(std::max(zt, 1e-300)) -
                      std::lgamma(k + 1.0) - std::lgamma(2.0 * k + 2.0);
    const double ak = (zt == 0.0 && k > 0) ? 0.0
                      : (k % 2 ? -1.0 : 1.0) * std::exp(la);
    if (k > 3 && std::abs(ak) < 1e-20) break;
    double inner = 0.0;
    for (int j = 0;; ++j) {
      const double lb = j * std::log(std::max(s, 1e-300)) -
                        std::lgamma(j + 1.0) - std::lgamma(1.0 + 0.5 * j);
      const double bj = (s == 0.0 && j > 0) ? 0.0
                        : (j % 2 ? -1.0 : 1.0) * std::exp(lb);
      const double t = bj / (2.0 * (k + 1.0) + j);
      inner += t;
      if (j > 3 && std::abs(bj) < 1e-20) break;
    }
    sum += ak * inner;
    if (zt == 0.0) break;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Kernel evaluation and densities
// ---------------------------------------------------------------------------

inline double kernel_eval(const Kernel& k, double x, double y) {
  switch (k.kind) {
    case Kernel::Kind::Sine:
      return detail::sinc(M_PI * (x - y)) ;
    case Kernel::Kind::Airy: {
      if (std::abs(x - y) < 1e-7) return airy_f1(0.5 * (x + y));
      return (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) /
             (x - y);
    }
    case Kernel::Kind::Bessel:
      return detail::bessel_kernel(k.alpha, x, y);
    case Kernel::Kind::HardWall: {
      if (x < 0.0 || y < 0.0)
        throw std::domain_error("hard-wall kernel: arguments must be >= 0");
      return (detail::sinc(x - y) - detail::sinc(x + y)) / M_PI;
    }
    case Kernel::Kind::HermiteN: {
      if (k.N < 1) throw std::invalid_argument("hermite kernel: need N >= 1");
      std::vector<double> px, py;
      detail::hermite_phi(k.N, x / k.sigma, px);
      detail::hermite_phi(k.N, y / k.sigma, py);
      double s = 0.0;
      for (int j = 0; j < k.N; ++j) s += px[j] * py[j];
      return s / k.sigma;
    }
    case Kernel::Kind::MorseN: {
      const MorseStates st = morse_bound_states(k.N, k.m, k.sigma, 2.0);
      double s = 0.0;
      for (int j = 0; j < k.N; ++j) s += st.psi(j, x) * st.psi(j, y);
      return s;
    }
    case Kernel::Kind::LinearWallN: {
      if (x < 0.0 || y < 0.0)
        throw std::domain_error("linear-wall kernel: arguments must be >= 0");
      std::vector<double> px, py;
      detail::linear_wall_psi(k.N, k.W, k.T, x, px);
      detail::linear_wall_psi(k.N, k.W, k.T, y, py);
      double s = 0.0;
      for (int j = 0; j < k.N; ++j) s += px[j] * py[j];
      return s;
    }
    case Kernel::Kind::BiorthLaguerre:
      return detail::biorth_kernel(k.N, x, y);
  }
  throw std::logic_error("kernel_eval: unknown kind");
}

// rho(x) = (1/N) K(x,x) for finite-rank kernels.
inline double density_from_kernel(const Kernel& k, double x) {
  if (!k.finite_rank())
    throw std::invalid_argument("density_from_kernel: finite-N kernels only");
  return kernel_eval(k, x, x) / k.N;
}

// ---------------------------------------------------------------------------
// Morse density approximations (beta = 2)
// ---------------------------------------------------------------------------

enum class MorseRegime { Bulk, LeftEdgeAiry, FarRightBessel };

namespace detail {

struct MorseEdges {
  double x0, xm, xp;  // potential minimum, left and right bulk edges
};

inline MorseEdges morse_edges(int N, double m, double sigma) {
  const double s2 = sigma * sigma;
  const double x0 = -std::log(s2 * (N - m / s2));
  const double r = 1.0 / (1.0 - m / (N * s2));
  const double d = std::sqrt(r) * std::sqrt(2.0 - r);
  return MorseEdges{x0, x0 - std::log(1.0 + d), x0 - std::log(1.0 - d)};
}

// V_M'(x) with g, x0 at beta = 2
inline double morse_vprime(int N, double m, double sigma, double x) {
  const double s2 = sigma * sigma;
  const double g = N - m / s2;
  const double x0 = -std::log(s2 * g);
  const double e = std::exp(-(x - x0));
  return 2.0 * g * g * (e - e * e);
}

}  // namespace detail

inline double morse_density_approximations(int N, double m, double sigma,
                                           MorseRegime regime, double x) {
  const double s2 = sigma * sigma;
  const detail::MorseEdges ed = detail::morse_edges(N, m, sigma);
  switch (regime) {
    case MorseRegime::Bulk: {
      // note edges are swapped in the exponentials: e^{-x} decreases in x
      if (x <= ed.xm || x >= ed.xp) return 0.0;
      const double prod = (std::exp(-x) - std::exp(-ed.xp)) *
                          (std::exp(-ed.xm) - std::exp(-x));
      return std::sqrt(std::max(prod, 0.0)) / (s2 * M_PI * N);
    }
    case MorseRegime::LeftEdgeAiry: {
      const double w = std::cbrt(1.0 / detail::morse_vprime(N, m, sigma, ed.xm));
      return airy_f1((x - ed.xm) / w) / (N * std::abs(w));
    }
    case MorseRegime::FarRightBessel: {
      const double z = 8.0 * N / s2 * std::exp(-x);
      return 8.0 / s2 * std::exp(-x) *
             detail::bessel_kernel_diag(-2.0 * m / s2, z);
    }
  }
  throw std::logic_error("morse_density_approximations: unknown regime");
}

// ---------------------------------------------------------------------------
// Ferrari-Spohn densities
// ---------------------------------------------------------------------------

// P_FS(x) = ((4W)^{1/3} / (sqrt(T) Ai'(a_1)^2)) Ai(a_1 + (4W)^{1/3} x / sqrt(T))^2
inline double ferrari_spohn_density(double W, double T, double x) {
  if (W <= 0.0 || T <= 0.0)
    throw std::invalid_argument("ferrari_spohn_density: need W, T > 0");
  if (x < 0.0) return 0.0;
  const double a1 = airy_zeros(1).zeros[0];
  const double c = std::cbrt(4.0 * W) / std::sqrt(T);
  const double ai = airy_ai(a1 + c * x);
  const double ap = airy_ai_prime(a1);
  return c / (ap * ap) * ai * ai;
}

// R(x, W) = C_{N,W} [det Ai(a_i + (4W)^{1/3} x_j / sqrt(T))]^2 with
// C_{N,W} = (4W)^{N/3} / (N! T^{N/2} prod_k Ai'(a_k)^2).
inline double generalized_fs_jpdf(int N, double W, double T,
                                  const std::vector<double>& x) {
  if (W <= 0.0 || T <= 0.0)
    throw std::invalid_argument("generalized_fs_jpdf: need W, T > 0");
  if ((int)x.size() != N)
    throw std::invalid_argument("generalized_fs_jpdf: x size mismatch");
  for (double xi : x)
    if (xi < 0.0) return 0.0;
  const AiryZeroTable tab = airy_zeros(N);
  const double c = std::cbrt(4.0 * W) / std::sqrt(T);
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      M(i, j) = airy_ai(tab.zeros[i] + c * x[j]);
  const double det = M.determinant();
  double log_c = (N / 3.0) * std::log(4.0 * W) - std::lgamma(N + 1.0) -
                 0.5 * N * std::log(T);
  for (int k = 0; k < N; ++k)
    log_c -= 2.0 * std::log(std::abs(airy_ai_prime(tab.zeros[k])));
  return std::exp(log_c) * det * det;
}

enum class FsRegime { Bulk, SoftEdge, Hard };

inline double fs_density_approximations(int N, double W, double T,
                                        FsRegime regime, double x) {
  const double mu = std::pow(3.0 * M_PI * W * N, 2.0 / 3.0) /
                    (std::cbrt(2.0) * T);
  const double x_edge = std::pow(3.0 * M_PI * N, 2.0 / 3.0) * std::sqrt(T) /
                        (std::pow(2.0, 4.0 / 3.0) * std::cbrt(W));
  switch (regime) {
    case FsRegime::Bulk: {
      if (x < 0.0 || x > x_edge) return 0.0;
      return std::sqrt(2.0) / (M_PI * N) *
             std::sqrt(std::max(mu - 2.0 * W * x / std::pow(T, 1.5), 0.0));
    }
    case FsRegime::SoftEdge: {
      const double w = std::sqrt(T) / std::cbrt(4.0 * W);
      return airy_f1((x - x_edge) / w) / (N * w);
    }
    case FsRegime::Hard: {
      if (x < 0.0) return 0.0;
      const double kn = std::cbrt(6.0 * M_PI * W * N) / std::sqrt(T);
      const double z = kn * x;
      const double f = (1.0 - detail::sinc(2.0 * z)) / M_PI;
      return kn / N * f;
    }
  }
  throw std::logic_error("fs_density_approximations: unknown regime");
}

// ---------------------------------------------------------------------------
// Fredholm gap probability
// ---------------------------------------------------------------------------

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = p0 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * pp * pp);
  }
}

}  // namespace detail

// det(I - K|_[a,b]) by Nystrom quadrature: det(I - sqrt(w) K sqrt(w)) on
// Gauss-Legendre nodes, with order doubling 20 -> 40 -> 80 and a
// convergence check.  Infinite endpoints are truncated at distance 40.
inline double gap_probability(const Kernel& k, double a, double b,
                              double tol = 1e-8) {
  if (std::isinf(a) && std::isinf(b))
    throw std::invalid_argument("gap_probability: doubly infinite interval");
  if (std::isinf(a)) a = b - 40.0;
  if (std::isinf(b)) b = a + 40.0;
  if (!(a < b)) throw std::invalid_argument("gap_probability: need a < b");
  double prev = std::numeric_limits<double>::quiet_NaN();
  double cur = 1.0;
  for (int order : {20, 40, 80}) {
    std::vector<double> t, w;
    detail::gauss_legendre(order, t, w);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(order, order);
    std::vector<double> xs(order), sw(order);
    for (int i = 0; i < order; ++i) {
      xs[i] = 0.5 * (a + b) + 0.5 * (b - a) * t[i];
      sw[i] = std::sqrt(0.5 * (b - a) * w[i]);
    }
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j)
        M(i, j) -= sw[i] * kernel_eval(k, xs[i], xs[j]) * sw[j];
    cur = M.determinant();
    if (!std::isnan(prev) && std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  if (std::abs(cur - prev) > std::max(100.0 * tol, 1e-6))
    throw std::runtime_error("gap_probability: quadrature did not converge");
  return cur;
}

}  // namespace rmtlab
