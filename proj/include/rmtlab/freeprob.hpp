#pragma once
// Free-probability calculus: set/non-crossing partitions, moment <->
// cumulant conversion (free and classical), truncated-series R/S algebra,
// closed-form transforms of the table laws, the Kesten S-transform
// recursion and Stieltjes PDE, and the exact beta=2 HCIZ determinant.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

using Partition = std::vector<std::vector<int>>;

// enumerate all set partitions of {0..n-1} via restricted growth strings
inline void enumerate_partitions(int n, const std::function<void(const Partition&)>& cb) {
  if (n < 1) throw std::invalid_argument("enumerate_partitions: n >= 1");
  std::vector<int> a(n, 0);
  Partition blocks;
  auto emit = [&] {
    int nb = *std::max_element(a.begin(), a.end()) + 1;
    blocks.assign(nb, {});
    for (int i = 0; i < n; ++i) blocks[a[i]].push_back(i);
    cb(blocks);
  };
  // iterate restricted growth strings in lexicographic order:
  // a[i] may range over 0..b[i]+1 where b[i] = max(a[0..i-1])
  std::vector<int> b(n, 0);
  emit();
  while (true) {
    int i = n - 1;
    while (i > 0 && a[i] > b[i]) --i;  // a[i] == b[i]+1 cannot grow further
    if (i == 0) return;
    ++a[i];
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      b[j] = std::max(b[j - 1], a[j - 1]);
    }
    emit();
  }
}

inline bool is_noncrossing(const Partition& p) {
  // crossing iff some pair of blocks interleaves as 1212 in position order
  int n = 0;
  for (const auto& b : p) n += (int)b.size();
  std::vector<int> who(n);
  for (int b = 0; b < (int)p.size(); ++b)
    for (int x : p[b]) who[x] = b;
  for (int b1 = 0; b1 < (int)p.size(); ++b1)
    for (int b2 = b1 + 1; b2 < (int)p.size(); ++b2) {
      int state = -1, flips = 0;
      for (int x = 0; x < n; ++x) {
        if (who[x] != b1 && who[x] != b2) continue;
        if (who[x] != state) { state = who[x]; ++flips; }
      }
      if (flips >= 4) return false;
    }
  return true;
}

inline std::vector<Partition> noncrossing_partitions(int n) {
  if (n < 1 || n > 12) throw std::invalid_argument("noncrossing_partitions: 1 <= n <= 12");
  std::vector<Partition> out;
  enumerate_partitions(n, [&](const Partition& p) {
    if (is_noncrossing(p)) out.push_back(p);
  });
  return out;
}

inline double catalan_number(int n) {
  double c = 1.0;
  for (int k = 2; k <= n; ++k) c *= (double)(n + k) / k;  // C_n = prod (n+k)/k
  return std::round(c);
}

// --------------------------------------- moment <-> cumulant conversion

// kappa indexed kappa[j] = kappa_{j+1}; returns m with m[j] = m_{j+1}
inline std::vector<double> moments_from_cumulants(const std::vector<double>& kappa,
                                                  bool free_cumulants = true) {
  int n_max = (int)kappa.size();
  std::vector<double> m(n_max, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    enumerate_partitions(n, [&](const Partition& p) {
      if (free_cumulants && !is_noncrossing(p)) return;
      double prod = 1.0;
      for (const auto& b : p) prod *= kappa[b.size() - 1];
      acc += prod;
    });
    m[n - 1] = acc;
  }
  return m;
}

inline std::vector<double> cumulants_from_moments(const std::vector<double>& m,
                                                  bool free_cumulants = true) {
  int n_max = (int)m.size();
  std::vector<double> kappa(n_max, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    // kappa_n = m_n - sum over partitions with >= 2 blocks (known kappas)
    double rest = 0.0;
    enumerate_partitions(n, [&](const Partition& p) {
      if (p.size() < 2) return;
      if (free_cumulants && !is_noncrossing(p)) return;
      double prod = 1.0;
      for (const auto& b : p) prod *= kappa[b.size() - 1];
      rest += prod;
    });
    kappa[n - 1] = m[n - 1] - rest;
  }
  return kappa;
}

// --------------------------------------------- truncated power series

namespace series {

using Vec = std::vector<double>;  // c[j] = coefficient of w^j

inline Vec mul(const Vec& a, const Vec& b, int K) {
  Vec c(K + 1, 0.0);
  for (int i = 0; i <= K && i < (int)a.size(); ++i)
    for (int j = 0; i + j <= K && j < (int)b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Vec reciprocal(const Vec& a, int K) {
  if (a.empty() || a[0] == 0.0) throw std::invalid_argument("series reciprocal: zero constant term");
  Vec r(K + 1, 0.0);
  r[0] = 1.0 / a[0];
  for (int n = 1; n <= K; ++n) {
    double s = 0.0;
    for (int j = 1; j <= n && j < (int)a.size(); ++j) s += a[j] * r[n - j];
    r[n] = -s / a[0];
  }
  return r;
}

// a(u(w)) with u(0) = 0
inline Vec compose(const Vec& a, const Vec& u, int K) {
  if (!u.empty() && u[0] != 0.0) throw std::invalid_argument("series compose: u(0) != 0");
  Vec out(K + 1, 0.0), upow(K + 1, 0.0);
  upow[0] = 1.0;
  for (int i = 0; i <= K; ++i) {
    if (i < (int)a.size()) {
      for (int j = 0; j <= K; ++j) out[j] += a[i] * upow[j];
    }
    upow = mul(upow, u, K);
  }
  return out;
}

// compositional inverse of t(u) = t1 u + t2 u^2 + ... (t[0]=0, t[1]!=0)
inline Vec revert(const Vec& t, int K) {
  if (t.size() < 2 || t[0] != 0.0 || t[1] == 0.0)
    throw std::invalid_argument("series revert: need t(0)=0, t'(0)!=0");
  Vec v(K + 1, 0.0);
  v[1] = 1.0 / t[1];
  for (int it = 0; it < K; ++it) {
    // v <- (w - (t(v) - t1 v)) / t1  : contraction order by order
    Vec tv = compose(t, v, K);
    Vec nv(K + 1, 0.0);
    nv[1] = 1.0;
    for (int j = 0; j <= K; ++j) nv[j] -= tv[j];
    for (int j = 0; j <= K; ++j) nv[j] = (nv[j] + t[1] * v[j]) / t[1];
    v = nv;
  }
  return v;
}

}  // namespace series

// R(w) = sum_{j>=1} kappa_j w^{j-1}; coefficient vector r[j] = kappa_{j+1}
inline series::Vec r_series_from_moments(const std::vector<double>& m, int K) {
  auto kap = cumulants_from_moments(m, true);
  series::Vec r(K + 1, 0.0);
  for (int j = 0; j <= K && j < (int)kap.size(); ++j) r[j] = kap[j];
  return r;
}

// S from R by solving S(w) = 1/R(w S(w)) order by order
inline series::Vec s_series_from_r(const series::Vec& r, int K) {
  if (r.empty() || r[0] == 0.0)
    throw std::invalid_argument("S-transform ill-defined for centered law (kappa_1 = 0)");
  series::Vec s(K + 1, 0.0);
  s[0] = 1.0 / r[0];
  for (int it = 0; it < 4 * (K + 1); ++it) {
    series::Vec ws(K + 1, 0.0);  // w S(w): shift up
    for (int j = 0; j < K; ++j) ws[j + 1] = s[j];
    s = series::reciprocal(series::compose(r, ws, K), K);
  }
  return s;
}

inline series::Vec s_series_from_moments(const std::vector<double>& m, int K) {
  return s_series_from_r(r_series_from_moments(m, K), K);
}

// moments back from an S series: v(w) = w S(w)/(1+w) is the compositional
// inverse of t(u) = sum m_n u^n
inline std::vector<double> moments_from_s_series(const series::Vec& s, int n_max) {
  int K = n_max;
  series::Vec one_plus_w(K + 1, 0.0);
  one_plus_w[0] = 1.0; one_plus_w[1] = 1.0;
  series::Vec sw = series::mul(s, series::reciprocal(one_plus_w, K), K);
  series::Vec v(K + 1, 0.0);
  for (int j = 0; j < K; ++j) v[j + 1] = sw[j];  // v = w * (S/(1+w))
  series::Vec t = series::revert(v, K);
  std::vector<double> m(n_max);
  for (int n = 1; n <= n_max; ++n) m[n - 1] = t[n];
  return m;
}

inline std::vector<double> free_add(const std::vector<double>& mA, const std::vector<double>& mB,
                                    int order) {
  auto kA = cumulants_from_moments(mA, true), kB = cumulants_from_moments(mB, true);
  std::vector<double> k(order, 0.0);
  for (int j = 0; j < order; ++j) {
    if (j < (int)kA.size()) k[j] += kA[j];
    if (j < (int)kB.size()) k[j] += kB[j];
  }
  return moments_from_cumulants(k, true);
}

inline std::vector<double> free_mul(const std::vector<double>& mA, const std::vector<double>& mB,
                                    int order) {
  auto sA = s_series_from_moments(mA, order), sB = s_series_from_moments(mB, order);
  return moments_from_s_series(series::mul(sA, sB, order), order);
}

// ----------------------------------- closed-form transforms (table laws)

inline cplx r_transform(const AnalyticLaw& l, cplx w) {
  const double s2 = l.sigma * l.sigma;
  switch (l.kind) {
    case AnalyticLaw::Kind::Semicircle:
      return s2 * w;
    case AnalyticLaw::Kind::MarcenkoPastur:
      return 1.0 / (1.0 / s2 - l.q * w);
    case AnalyticLaw::Kind::InverseMP: {
      double k = (1.0 - l.q) / (2.0 * l.q);
      if (std::abs(w) < 1e-12) return cplx(1.0 / s2, 0.0);
      return (k - std::sqrt(k * (k - (2.0 / s2) * w))) / w;
    }
    default:
      throw std::invalid_argument("r_transform closed form: semicircle/MP/IMP only");
  }
}

inline cplx s_transform(const AnalyticLaw& l, cplx w) {
  const double s2 = l.sigma * l.sigma;
  switch (l.kind) {
    case AnalyticLaw::Kind::MarcenkoPastur:
      return (1.0 / s2) / (1.0 + l.q * w);
    case AnalyticLaw::Kind::InverseMP: {
      double k = (1.0 - l.q) / (2.0 * l.q);
      return s2 * (1.0 - w / (2.0 * k));
    }
    default:
      throw std::invalid_argument("s_transform: ill-defined or not tabulated for this law");
  }
}

// ----------------------------------------- Kesten transform dynamics

// S series of xi_n = (1+m eps) + sigma_tilde sqrt(eps) * (unit semicircle)
inline series::Vec kesten_xi_s_series(double m, double sigma_tilde, double eps, int K) {
  series::Vec r(K + 1, 0.0);
  r[0] = 1.0 + m * eps;
  if (K >= 1) r[1] = sigma_tilde * sigma_tilde * eps;
  return s_series_from_r(r, K);
}

// one step of the functional recursion
// S_xi / S_{n+1} = 1 / S_n( w (1 - eps S_{n+1}/S_xi) ) + eps
inline series::Vec kesten_s_step(const series::Vec& s_n, const series::Vec& s_xi, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("kesten_s_step: eps > 0");
  int K = (int)s_n.size() - 1;
  series::Vec x = s_n;  // unknown S_{n+1}
  series::Vec sxi_inv = series::reciprocal(s_xi, K);
  for (int it = 0; it < 200; ++it) {
    series::Vec ratio = series::mul(x, sxi_inv, K);  // S_{n+1}/S_xi
    series::Vec u(K + 1, 0.0);                       // w (1 - eps ratio)
    for (int j = 0; j < K; ++j) u[j + 1] = (j == 0 ? 1.0 : 0.0) - eps * ratio[j];
    series::Vec denom = series::reciprocal(series::compose(s_n, u, K), K);
    denom[0] += eps;
    series::Vec next = series::mul(s_xi, series::reciprocal(denom, K), K);
    double delta = 0.0;
    for (int j = 0; j <= K; ++j) delta = std::max(delta, std::abs(next[j] - x[j]));
    x = next;
    if (delta < 1e-14) return x;
  }
  throw std::runtime_error("kesten_s_step: coefficient fixed point did not converge");
}

// continuum PDE right-hand side: dS/dt = -S (m + st^2 w + S + w S')
inline series::Vec kesten_s_pde_rhs(const series::Vec& s, double m, double sigma_tilde) {
  int K = (int)s.size() - 1;
  series::Vec inner(K + 1, 0.0);
  inner[0] = m;
  if (K >= 1) inner[1] = sigma_tilde * sigma_tilde;
  for (int j = 0; j <= K; ++j) inner[j] += s[j] + j * s[j];  // S + w S'
  auto rhs = series::mul(s, inner, K);
  for (auto& c : rhs) c = -c;
  return rhs;
}

// explicit step of d_t g = d_z( -g + (st^2 - m) z g - (st^2/2) (z g)^2 )
// along a fixed-Im(z) horizontal grid; one-sided differences at the ends
inline void kesten_stieltjes_pde_step(const std::vector<cplx>& z, std::vector<cplx>& g, double dt,
                                      double m, double sigma_tilde) {
  if (z.size() != g.size() || z.size() < 3)
    throw std::invalid_argument("kesten_stieltjes_pde_step: bad grid");
  const double st2 = sigma_tilde * sigma_tilde;
  std::size_t n = z.size();
  std::vector<cplx> F(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx zg = z[i] * g[i];
    F[i] = -g[i] + (st2 - m) * zg - 0.5 * st2 * zg * zg;
  }
  std::vector<cplx> gn(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx dF;
    if (i == 0) dF = (F[1] - F[0]) / (z[1] - z[0]);
    else if (i == n - 1) dF = (F[n - 1] - F[n - 2]) / (z[n - 1] - z[n - 2]);
    else dF = (F[i + 1] - F[i - 1]) / (z[i + 1] - z[i - 1]);
    gn[i] = g[i] + dt * dF;
    if (!std::isfinite(gn[i].real()) || std::abs(gn[i]) > 1e6)
      throw std::runtime_error("kesten_stieltjes_pde_step: blow-up (reduce dt)");
  }
  g = std::move(gn);
}

// ----------------------------------------------------- HCIZ (beta = 2)

inline Eigen::MatrixXcd haar_unitary(int N, Rng& rng) {
  Eigen::MatrixXcd G(N, N);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) G(i, j) = cplx(rng.normal() * s, rng.normal() * s);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) {
    cplx d = R(j, j);
    Q.col(j) *= (std::abs(d) > 0.0) ? d / std::abs(d) : cplx(1.0, 0.0);
  }
  return Q;
}

namespace detail {

// exp of a small upper-triangular matrix by scaling and squaring + Taylor
inline Eigen::MatrixXd expm_upper(Eigen::MatrixXd A) {
  double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (nrm > 0.5) { nrm *= 0.5; ++s; }
  A /= std::pow(2.0, s);
  int n = (int)A.rows();
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n, n), term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = (term * A / (double)k).eval();
    E += term;
  }
  for (int i = 0; i < s; ++i) E = (E * E).eval();
  return E;
}

// divided differences of x -> e^{x b} over nodes a_0..a_{n-1} (all prefixes):
// row vector d[i] = dd over a_0..a_i, read off exp(b J) with J the
// bidiagonal matrix diag(a) + superdiag(1) (Opitz formula)
inline Eigen::VectorXd exp_divided_differences(const std::vector<double>& a, double b) {
  int n = (int)a.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = a[i] * b;
    if (i + 1 < n) J(i, i + 1) = b;
  }
  // Opitz formula: dd over a_0..a_i of f equals [f(J0)]_{0,i} with J0 =
  // diag(a) + superdiag(1); here f(x) = e^{xb} so f(J0) = exp(b J0) = exp(J)
  Eigen::MatrixXd E = expm_upper(J);
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = E(0, i);
  return d;
}

inline double min_spacing(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) s = std::min(s, v[i] - v[i - 1]);
  return s;
}

inline double log_abs_det_scaled(Eigen::MatrixXd M, double& sign) {
  int n = (int)M.rows();
  double logscale = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = M.row(i).cwiseAbs().maxCoeff();
    if (r == 0.0) { sign = 0.0; return -std::numeric_limits<double>::infinity(); }
    M.row(i) /= r;
    logscale += std::log(r);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  double det = lu.determinant();
  sign = (det > 0) - (det < 0);
  return logscale + std::log(std::abs(det));
}

}  // namespace detail

// I_N^{(2)}(A,B) = (prod_{p=1}^{N-1} p!) det[e^{a_i b_j}] / (Delta(a) Delta(b))
inline double hciz_exact(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("hciz_exact: size mismatch");
  int N = (int)a.size();
  if (N == 1) return std::exp(a[0] * b[0]);
  double sp_a = detail::min_spacing(a), sp_b = detail::min_spacing(b);
  if (sp_a < 1e-4 && sp_b < 1e-4)
    throw std::invalid_argument("hciz_exact: both spectra (near-)degenerate");
  if (sp_b < 1e-4) std::swap(a, b), std::swap(sp_a, sp_b);

  double lpref = 0.0;
  for (int p = 1; p <= N - 1; ++p) lpref += std::lgamma(p + 1.0);

  Eigen::MatrixXd M(N, N);
  double llog, sign;
  if (sp_a < 1e-4) {
    // confluent-safe path: divided differences along a absorb Delta(a)
    std::sort(a.begin(), a.end());
    for (int j = 0; j < N; ++j) M.col(j) = detail::exp_divided_differences(a, b[j]);
    llog = detail::log_abs_det_scaled(M, sign);
    // divide by Delta(b) only
    std::sort(b.begin(), b.end());
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) llog -= std::log(b[j] - b[i]);
  } else {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) M(i, j) = std::exp(a[i] * b[j]);
    llog = detail::log_abs_det_scaled(M, sign);
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        llog -= std::log(a[j] - a[i]) + std::log(b[j] - b[i]);
  }
  return sign * std::exp(lpref + llog);
}

// rank-one asymptotic rate: integral_0^t R(2u/beta) du by Gauss-Legendre
inline double hciz_lowrank_rate(const std::function<double(double)>& R, double t,
                                double beta = 2.0) {
  static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                               0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                               0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  double c = 0.5 * t, acc = 0.0;
  for (int i = 0; i < 8; ++i)
    acc += gw[i] * (R(2.0 * (c - c * gx[i]) / beta) + R(2.0 * (c + c * gx[i]) / beta));
  return acc * c;
}

inline double hciz_lowrank_rate(const AnalyticLaw& law, double t, double beta = 2.0) {
  return hciz_lowrank_rate([&](double u) { return r_transform(law, cplx(u, 0.0)).real(); }, t,
                           beta);
}

}  // namespace rmtlab
