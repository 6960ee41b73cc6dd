#pragma once
// Non-crossing Brownian walkers: Karlin-McGregor propagators, Pfaffians,
// Monte Carlo survival under fixed and moving boundaries, the beta(N,W)
// exponent pipeline, the semiclassical scaling function, the small-W
// perturbative expansion, the partial-non-crossing interpolating JPDF and
// the Pandey-Mehta map, Brownian bridges, and the Ferrari-Spohn sampler.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/rng.hpp"
#include "rmtlab/specfn.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

// ------------------------------------------------------------- boundaries

struct Boundary {
  enum class Kind { None, Fixed, SqrtW, SemicircleW };
  Kind kind = Kind::None;
  double g = 0.0;  // Fixed
  double W = 0.0;  // SqrtW / SemicircleW
  double T = 0.0;  // SemicircleW

  static Boundary none() { return {}; }
  static Boundary fixed(double g) { return {Kind::Fixed, g, 0.0, 0.0}; }
  static Boundary sqrt_w(double W) { return {Kind::SqrtW, 0.0, W, 0.0}; }
  static Boundary semicircle_w(double W, double T) { return {Kind::SemicircleW, 0.0, W, T}; }

  double at(double t) const {
    switch (kind) {
      case Kind::None:
        return std::numeric_limits<double>::infinity();
      case Kind::Fixed:
        return g;
      case Kind::SqrtW:
        return W * std::sqrt(std::max(0.0, t));
      case Kind::SemicircleW:
        return W * std::sqrt(std::max(0.0, t * (T - t) / T));
    }
    return 0.0;
  }
};

struct WalkerConfig {
  int N = 1;
  std::vector<double> x0;  // strictly ordered, below the boundary
  double t0 = 0.0;
  double t_end = 1.0;
  Boundary boundary;
  double dt = 0.01;
};

// ------------------------------------------------------ KM and Pfaffians

// det of Gaussian single-particle propagators (1/sqrt(2 pi t)) e^{-(y-x)^2/2t}
inline double km_propagator(const std::vector<double>& x, const std::vector<double>& y, double t) {
  int N = (int)x.size();
  if ((int)y.size() != N || N < 1) throw std::invalid_argument("km_propagator: size mismatch");
  if (!(t > 0.0)) throw std::invalid_argument("km_propagator: t > 0 required");
  for (int i = 1; i < N; ++i)
    if (!(x[i] > x[i - 1]) || !(y[i] > y[i - 1]))
      throw std::invalid_argument("km_propagator: inputs must be strictly ordered");
  const double c = 1.0 / std::sqrt(2.0 * M_PI * t);
  Eigen::MatrixXd P(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double d = y[i] - x[j];
      P(i, j) = c * std::exp(-d * d / (2.0 * t));
    }
  return P.determinant();
}

struct SkewMatrix {
  Eigen::MatrixXd a;
  explicit SkewMatrix(Eigen::MatrixXd m) : a(std::move(m)) {
    if (a.rows() != a.cols() || (a + a.transpose()).norm() > 1e-12 * (1.0 + a.norm()))
      throw std::invalid_argument("SkewMatrix: input is not antisymmetric");
  }
};

// Pfaffian via Householder skew-tridiagonalization. Odd sizes give 0 by
// convention; with odd_bordering, the de Bruijn bordered matrix (extra
// row/column of ones) is used instead.
inline double pfaffian(const SkewMatrix& S, bool odd_bordering = false) {
  Eigen::MatrixXd A = S.a;
  int n = (int)A.rows();
  if (n % 2 == 1) {
    if (!odd_bordering) return 0.0;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
    B.topLeftCorner(n, n) = A;
    for (int i = 0; i < n; ++i) {
      B(i, n) = 1.0;
      B(n, i) = -1.0;
    }
    A = B;
    ++n;
  }
  if (n == 0) return 1.0;
  double sign = 1.0;
  for (int k = 0; k < n - 2; ++k) {
    // reflect column k below the first subdiagonal entry onto e_1
    Eigen::VectorXd v = A.col(k).segment(k + 1, n - k - 1);
    double alpha = v.norm();
    if (alpha == 0.0) continue;
    if (v(0) > 0) alpha = -alpha;
    v(0) -= alpha;
    double vn = v.norm();
    if (vn < 1e-300) continue;
    v /= vn;
    Eigen::VectorXd w = A.block(k + 1, 0, n - k - 1, n).transpose() * v;  // row part
    // apply H = I - 2vv^T on the left and right of the trailing matrix
    A.block(k + 1, 0, n - k - 1, n) -= 2.0 * v * w.transpose();
    Eigen::VectorXd u = A.block(0, k + 1, n, n - k - 1) * v;
    A.block(0, k + 1, n, n - k - 1) -= 2.0 * u * v.transpose();
    sign = -sign;  // det(H) = -1
  }
  double pf = sign;
  for (int i = 0; i + 1 < n; i += 2) pf *= A(i, i + 1);
  return pf;
}

// ------------------------------------------------------------ survival MC

struct SurvivalPoint {
  double t = 0.0;
  double s = 0.0;
  double stderr_ = 0.0;
};

namespace detail {

// survive-probability of a single walker step against the boundary and of
// adjacent pairs against each other, with Brownian-bridge corrections for
// in-step touches
inline bool step_survives(const std::vector<double>& a, const std::vector<double>& b, double ga,
                          double gb, double h, Rng& rng) {
  int N = (int)a.size();
  double logp = 0.0;
  for (int i = 1; i < N; ++i) {
    double d1 = a[i] - a[i - 1], d2 = b[i] - b[i - 1];
    if (!(d2 > 0.0)) return false;
    // difference of two walkers diffuses with variance 2h
    logp += std::log1p(-std::exp(-d1 * d2 / h));
  }
  if (std::isfinite(ga)) {
    for (int i = 0; i < N; ++i) {
      double d1 = ga - a[i], d2 = gb - b[i];
      if (!(d2 > 0.0)) return false;
      logp += std::log1p(-std::exp(-2.0 * d1 * d2 / h));
    }
  }
  if (logp == 0.0) return true;
  return std::log(rng.uniform()) < logp;
}

}  // namespace detail

// Survival curve at log-spaced checkpoints; per-path streams keyed off the
// base seed, so results do not depend on scheduling.
inline std::vector<SurvivalPoint> survival_mc(const WalkerConfig& cfg, long n_paths,
                                              std::uint64_t seed, int n_checkpoints = 60) {
  if (n_paths < 1) throw std::invalid_argument("survival_mc: n_paths >= 1");
  const int N = cfg.N;
  if ((int)cfg.x0.size() != N) throw std::invalid_argument("survival_mc: x0 size != N");
  for (int i = 1; i < N; ++i)
    if (!(cfg.x0[i] > cfg.x0[i - 1])) throw std::invalid_argument("survival_mc: x0 not ordered");
  if (std::isfinite(cfg.boundary.at(cfg.t0)) && !(cfg.x0.back() < cfg.boundary.at(cfg.t0)))
    throw std::invalid_argument("survival_mc: x0 not strictly below the boundary at t0");

  const double t_lo = std::max(cfg.t0 + cfg.dt, cfg.t0 * 1.0001 + 1e-12);
  std::vector<double> cps(n_checkpoints);
  for (int c = 0; c < n_checkpoints; ++c)
    cps[c] = t_lo * std::pow(cfg.t_end / t_lo, (double)c / (n_checkpoints - 1));
  cps.back() = cfg.t_end;

  std::vector<long> alive(n_checkpoints, 0);
  std::vector<double> x(N), y(N);
  for (long p = 0; p < n_paths; ++p) {
    Rng rng(seed, (std::uint64_t)p);
    x = cfg.x0;
    double t = cfg.t0;
    int c = 0;
    bool ok = true;
    while (c < n_checkpoints) {
      double h = cfg.dt * std::max(1.0, t);
      if (t + h > cps[c]) h = cps[c] - t;
      double sq = std::sqrt(h);
      for (int i = 0; i < N; ++i) y[i] = x[i] + sq * rng.normal();
      if (!detail::step_survives(x, y, cfg.boundary.at(t), cfg.boundary.at(t + h), h, rng)) {
        ok = false;
        break;
      }
      x = y;
      t += h;
      while (c < n_checkpoints && t >= cps[c] - 1e-12) {
        ++alive[c];
        ++c;
      }
    }
    (void)ok;
  }
  std::vector<SurvivalPoint> out(n_checkpoints);
  for (int c = 0; c < n_checkpoints; ++c) {
    double s = (double)alive[c] / (double)n_paths;
    out[c] = {cps[c], s, std::sqrt(std::max(0.0, s * (1.0 - s) / (double)n_paths))};
  }
  return out;
}

// log-log regression over the last decade whose points all carry a relative
// stderr below 10%; the transient from x0 pollutes earlier decades
inline double fit_survival_exponent(const std::vector<SurvivalPoint>& curve) {
  double t_hi = 0.0;
  for (const auto& p : curve)
    if (p.s > 0.0 && p.stderr_ / p.s < 0.1) t_hi = p.t;
  if (t_hi == 0.0) throw std::runtime_error("fit_survival_exponent: no usable points");
  double t_lo = t_hi / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : curve) {
    if (p.t < t_lo || p.t > t_hi || !(p.s > 0.0) || p.stderr_ / p.s >= 0.1) continue;
    double lx = std::log(p.t), ly = std::log(p.s);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 3) throw std::runtime_error("fit_survival_exponent: window too small");
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

// -------------------------------------------------- beta(N, W) pipeline

// beta(N, W) = sum of the first N single-particle levels under the wall
inline double survival_exponent(int N, double W) {
  if (N < 1) throw std::invalid_argument("survival_exponent: N >= 1");
  auto lv = boundary_levels(W, N);
  double acc = 0.0;
  for (double e : lv) acc += e;
  return acc;
}

// semiclassical scaling function b(y) with beta(N, W) ~ (N^2/4) b(W/sqrt(4N))
inline double semiclassical_b(double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("semiclassical_b: y finite");
  if (y >= 1.0) return 1.0;
  if (y == 0.0) {
    // W = 0: beta = N^2/2, so b(0) = 2
    return 2.0;
  }
  auto F = [&](double u) {
    return 1.0 / (2.0 * u * u) + std::sqrt(1.0 - u * u) / (M_PI * u) +
           std::asin(u) / (M_PI * u * u) - 1.0 / (y * y);
  };
  double lo, hi;
  if (y > 0.0) {
    lo = 1e-14;
    hi = 1.0 - 1e-15;
  } else {
    lo = -1.0 + 1e-15;
    hi = -1e-14;
  }
  double flo = F(lo), fhi = F(hi);
  if (flo * fhi > 0.0) throw std::runtime_error("semiclassical_b: bracketing failed");
  for (int it = 0; it < 300; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = F(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    (flo * fm <= 0.0 ? hi : lo) = mid;
    (flo * fm <= 0.0 ? fhi : flo) = fm;
  }
  double u = 0.5 * (lo + hi);
  return y * y / (u * u) -
         (2.0 / (3.0 * M_PI)) * y * y * y * y * std::pow(1.0 - u * u, 1.5) / (u * u * u);
}

// Taylor coefficients of beta(N, W) = c0 + c1 W + c2 W^2 + O(W^3)
inline std::array<double, 3> small_w_expansion(int N) {
  if (N < 1 || N > 20) throw std::invalid_argument("small_w_expansion: 1 <= N <= 20");
  double c0 = 0.5 * N * N;
  // c1 = -(sqrt(2)/(3 sqrt(pi))) 2^{-2N} N (2N+1)! / (N!)^2
  double lc1 = std::lgamma(2.0 * N + 2.0) - 2.0 * std::lgamma(N + 1.0) - 2.0 * N * std::log(2.0);
  double c1 = -(std::sqrt(2.0) / (3.0 * std::sqrt(M_PI))) * N * std::exp(lc1);
  // c2 = sum_{k<N} DeltaE2(k) + N/8 with
  // DeltaE2(k) = pref(k) sum_{k' != k} w(k') / [(k-k') (4(k-k')^2-1)^2],
  // pref(k) = (2k+1)!/(pi 2^{2k+1} (k!)^2), w(k') = (2k'+1)!/(2^{2k'} (k'!)^2);
  // terms fall off ~ k'^{-9/2}, so k' <= 2000 leaves a negligible tail
  auto wgt = [](long k) {
    return std::exp(std::lgamma(2.0 * k + 2.0) - 2.0 * k * std::log(2.0) -
                    2.0 * std::lgamma(k + 1.0));
  };
  double c2 = N / 8.0;
  for (int k = 0; k < N; ++k) {
    double pref = wgt(k) / (2.0 * M_PI);
    double acc = 0.0;
    for (long kp = 0; kp <= 2000; ++kp) {
      if (kp == k) continue;
      double d = (double)(k - kp);
      acc += wgt(kp) / (d * std::pow(4.0 * d * d - 1.0, 2));
    }
    c2 += pref * acc;
  }
  return {c0, c1, c2};
}

// ------------------------------------ interpolating ensemble and PM map

// unnormalized P(y) = Delta(y) e^{-sum y^2/2t} Pf erf((y_j-y_i)/(2 sqrt(T-t)))
inline double interpolating_jpdf(const std::vector<double>& y, double t, double T) {
  int N = (int)y.size();
  if (!(t > 0.0) || !(t < T)) throw std::invalid_argument("interpolating_jpdf: need 0 < t < T");
  for (int i = 1; i < N; ++i)
    if (!(y[i] > y[i - 1])) throw std::invalid_argument("interpolating_jpdf: y not ordered");
  double vdm = 1.0, expo = 0.0;
  for (int i = 0; i < N; ++i) {
    expo -= y[i] * y[i] / (2.0 * t);
    for (int j = i + 1; j < N; ++j) vdm *= y[j] - y[i];
  }
  double s = 2.0 * std::sqrt(T - t);
  double umax = (y.back() - y.front()) / s;
  if (umax < 1.5e-2 && N > 2) {
    // deep T -> infinity regime: Pf[erf] ~ const(N) s^{-N(N-1)/2} Delta(y),
    // giving the GUE form up to an N-dependent constant. The erf matrix is
    // nearly rank-2 skew there, so direct evaluation cancels catastrophically
    // (the true Pfaffian is ~umax^{N(N-1)/2-1} of the naive term size).
    return vdm * vdm * std::exp(expo) * std::pow(s, -0.5 * N * (N - 1));
  }
  Eigen::MatrixXd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) A(i, j) = std::erf((y[j] - y[i]) / s);
  double pf = pfaffian(SkewMatrix(A), /*odd_bordering=*/true);
  return vdm * std::exp(expo) * pf;
}

// alpha^2 = 1 - t/T, gamma^2 = t (1 + alpha^2): inverse of the paper's map
// t = gamma^2/(1+alpha^2), T = gamma^2/(1-alpha^4)
inline std::pair<double, double> pandey_mehta_params(double t, double T) {
  if (!(t > 0.0) || !(t <= T)) throw std::invalid_argument("pandey_mehta_params: 0 < t <= T");
  double a2 = 1.0 - t / T;
  return {std::sqrt(a2), std::sqrt(t * (1.0 + a2))};
}

// ------------------------------------------------------------- bridges

// SDE construction dA = (z - A)/(T - t) dt + dB on a uniform grid
inline std::vector<double> bridge_sampler(double y, double z, double T, int n_steps, Rng& rng) {
  if (n_steps < 1 || !(T > 0.0)) throw std::invalid_argument("bridge_sampler: bad grid");
  std::vector<double> path(n_steps + 1);
  path[0] = y;
  double dt = T / n_steps;
  for (int k = 0; k < n_steps; ++k) {
    double t = k * dt;
    double a = path[k];
    path[k + 1] = (k == n_steps - 1)
                      ? z
                      : a + (z - a) / (T - t) * dt + std::sqrt(dt) * rng.normal();
  }
  return path;
}

// time-change construction A_t = ((T-t)/T) B_{T t/(T-t)} plus the mean line
inline std::vector<double> bridge_map(double y, double z, double T,
                                      const std::vector<double>& t_grid, Rng& rng) {
  std::vector<double> out(t_grid.size());
  double u_prev = 0.0, b = 0.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    double t = t_grid[k];
    if (t < 0.0 || t > T) throw std::invalid_argument("bridge_map: t outside [0, T]");
    if (t >= T) {
      out[k] = z;
      continue;
    }
    double u = T * t / (T - t);
    if (u < u_prev) throw std::invalid_argument("bridge_map: t_grid must be nondecreasing");
    b += std::sqrt(u - u_prev) * rng.normal();
    u_prev = u;
    out[k] = (T - t) / T * b + y + (t / T) * (z - y);
  }
  return out;
}

// ------------------------------------------- never-crossing conditioning

// Endpoint samples of walkers conditioned on never crossing: killed paths
// to time t, reweighted by the exact Doob factor Delta(y)/Delta(x). This is
// the h-transform identity, so no long conditioning horizon is simulated.
struct WeightedEndpoints {
  std::vector<std::vector<double>> y;  // survivors
  std::vector<double> w;               // Delta(y)/Delta(x)
};

inline WeightedEndpoints never_crossing_endpoint_mc(const std::vector<double>& x0, double t,
                                                    long n_paths, std::uint64_t seed,
                                                    double dt = 1e-3) {
  int N = (int)x0.size();
  double vdm0 = 1.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) vdm0 *= x0[j] - x0[i];
  WeightedEndpoints out;
  std::vector<double> x(N), y(N);
  for (long p = 0; p < n_paths; ++p) {
    Rng rng(seed, (std::uint64_t)p);
    x = x0;
    double tc = 0.0;
    bool ok = true;
    while (tc < t - 1e-12) {
      double h = std::min(dt, t - tc);
      double sq = std::sqrt(h);
      for (int i = 0; i < N; ++i) y[i] = x[i] + sq * rng.normal();
      if (!detail::step_survives(x, y, std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity(), h, rng)) {
        ok = false;
        break;
      }
      x = y;
      tc += h;
    }
    if (!ok) continue;
    double vdm = 1.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) vdm *= x[j] - x[i];
    out.y.push_back(x);
    out.w.push_back(vdm / vdm0);
  }
  return out;
}

// ------------------------------------------------- Ferrari-Spohn sampler

struct FerrariSpohnMc {
  std::vector<std::vector<double>> samples;  // [particle][replica] wall distances at T/2
  EmpiricalDensity density;                  // pooled
  long survivors = 0;
};

// Mid-time wall distances of N non-crossing Brownian bridges conditioned to
// stay above the semicircle boundary g(t) = W sqrt(t(T-t)/T). Start/end are
// regularized as s_k = g(t0) S_k with S_k > 1.
//
// Only the first half [t0, T/2] is simulated. The boundary and the endpoints
// are symmetric about T/2, so the survival probability S(x) of the second
// half given the mid position x equals that of the first half, and the
// conditioned mid-time density is pi(x) = n(x) S(x)^2 up to normalization,
// with n the unconstrained Gaussian bridge marginal. Given the mid value, the
// first-half path law does not depend on where the bridge is pinned after
// T/2; so the simulation pins the proposal bridge at an elevated point z (the
// mid marginal then lands near the expected conditioned positions) and kills
// it on the boundary, producing snapshot density f(x) = n_z(x) S(x) / Z.
// Rare survival is handled by population splitting (dead replicas are
// replaced by clones of uniformly chosen alive ones, which keeps the killed
// law invariant). The target pi = f^2 n / n_z^2 x const is then reached by
// reweighting against a kernel density estimate of f and resampling. Because
// the killing tilts f away from the pin target, the pin is tuned on cheap
// pilot stages: shift it by the gap between the weighted (target) and raw
// (proposal) snapshot means, which is a contraction on the gap.
inline FerrariSpohnMc ferrari_spohn_mc(int N, double W, double T, long n_paths,
                                       std::uint64_t seed, double t0_frac = 0.01,
                                       int n_steps = 4000) {
  if (N < 1 || !(W > 0.0) || !(T > 0.0)) throw std::invalid_argument("ferrari_spohn_mc: bad args");
  Boundary bd = Boundary::semicircle_w(W, T);
  const double t0 = t0_frac * T, t1 = T - t0;
  std::vector<double> s(N);
  for (int i = 0; i < N; ++i) s[i] = bd.at(t0) * (1.1 + 0.4 * i);
  const double frac = (0.5 * T - t0) / (t1 - t0);
  // bridge marginal variance at T/2 (independent Gaussians before killing)
  const double var_br = (0.5 * T - t0) * (t1 - 0.5 * T) / (t1 - t0);
  const int steps1 = std::max(n_steps / 2, 2);
  const double dt = (0.5 * T - t0) / steps1;
  const int resample_every = 20;

  struct Stage {
    std::vector<std::vector<double>> pos;  // snapshot at T/2
    std::vector<double> w;                 // self-normalized weights (may be 0)
    double wsum = 0.0, w2sum = 0.0;
  };

  auto run_stage = [&](long K, const std::vector<double>& mu_q, std::uint64_t stream) {
    std::vector<double> z_pin(N);
    for (int i = 0; i < N; ++i) z_pin[i] = s[i] + (mu_q[i] - s[i]) / frac;
    Stage st;
    st.pos.assign(K, s);
    std::vector<bool> alive(K, true);
    Rng rng(seed, stream);
    std::vector<double> y(N), xm(N), ym(N);

    for (int step = 0; step < steps1; ++step) {
      double ta = t0 + step * dt, tb = ta + dt;
      // walkers are above the wall here: flip signs so step_survives (which
      // keeps walkers below) applies
      double ga = -bd.at(ta), gb = -bd.at(tb);
      double sq = std::sqrt(dt);
      for (long p = 0; p < K; ++p) {
        if (!alive[p]) continue;
        auto& x = st.pos[p];
        for (int i = 0; i < N; ++i) {
          double drift = (z_pin[i] - x[i]) / (t1 - ta);
          y[i] = x[i] + drift * dt + sq * rng.normal();
        }
        for (int i = 0; i < N; ++i) {
          xm[i] = -x[N - 1 - i];
          ym[i] = -y[N - 1 - i];
        }
        if (!detail::step_survives(xm, ym, ga, gb, dt, rng)) {
          alive[p] = false;
          continue;
        }
        x = y;
      }
      if ((step + 1) % resample_every == 0 || step + 1 == steps1) {
        std::vector<long> live;
        for (long p = 0; p < K; ++p)
          if (alive[p]) live.push_back(p);
        if (live.empty()) throw std::runtime_error("ferrari_spohn_mc: no surviving paths");
        for (long p = 0; p < K; ++p) {
          if (alive[p]) continue;
          long src = live[(long)(rng.uniform() * live.size()) % live.size()];
          st.pos[p] = st.pos[src];
          alive[p] = true;
        }
      }
    }

    // kernel density estimate of f on a reference subsample (product Gaussian
    // kernel, Scott bandwidth per coordinate)
    const long M = std::min<long>(K, 4000);
    const long stride = std::max<long>(1, K / M);
    std::vector<long> ref;
    for (long p = 0; p < K; p += stride) ref.push_back(p);
    std::vector<double> mean(N, 0.0), sd(N, 0.0), bw(N);
    for (long p = 0; p < K; ++p)
      for (int i = 0; i < N; ++i) mean[i] += st.pos[p][i];
    for (int i = 0; i < N; ++i) mean[i] /= K;
    for (long p = 0; p < K; ++p)
      for (int i = 0; i < N; ++i) sd[i] += (st.pos[p][i] - mean[i]) * (st.pos[p][i] - mean[i]);
    for (int i = 0; i < N; ++i) {
      sd[i] = std::sqrt(sd[i] / (K - 1));
      bw[i] = 0.8 * sd[i] * std::pow((double)ref.size(), -1.0 / (N + 4));
      if (!(bw[i] > 0)) throw std::runtime_error("ferrari_spohn_mc: degenerate population");
    }

    std::vector<double> logw(K);
    double logw_max = -INFINITY;
    for (long p = 0; p < K; ++p) {
      double fhat = 0.0;
      for (long r : ref) {
        double q = 0.0;
        for (int i = 0; i < N; ++i) {
          double u = (st.pos[p][i] - st.pos[r][i]) / bw[i];
          q += 0.5 * u * u;
        }
        if (q < 40.0) fhat += std::exp(-q);
      }
      // the true importance ratio vanishes in both tails of f, which is
      // exactly where the kernel estimate bottoms out at a floor; drop such
      // samples instead of letting a floored f-hat divided by a tiny
      // Gaussian explode
      if (fhat < 25.0 * (double)ref.size() / 4000.0) {
        logw[p] = -INFINITY;
        continue;
      }
      double lf = std::log(fhat);  // constant factors drop out of the weights
      double ln_n = 0.0, ln_q = 0.0;
      for (int i = 0; i < N; ++i) {
        ln_n += -(st.pos[p][i] - s[i]) * (st.pos[p][i] - s[i]) / (2 * var_br);
        ln_q += -(st.pos[p][i] - mu_q[i]) * (st.pos[p][i] - mu_q[i]) / (2 * var_br);
      }
      logw[p] = lf + ln_n - 2.0 * ln_q;
      logw_max = std::max(logw_max, logw[p]);
    }
    st.w.resize(K);
    for (long p = 0; p < K; ++p) {
      st.w[p] = std::exp(logw[p] - logw_max);
      st.wsum += st.w[p];
      st.w2sum += st.w[p] * st.w[p];
    }
    if (!(st.wsum > 0.0)) throw std::runtime_error("ferrari_spohn_mc: degenerate weights");
    return st;
  };

  // initial pin guess: one Airy length per zero above the wall top
  const double ell = std::sqrt(T) / std::cbrt(4.0 * W);
  auto az = airy_zeros(N);
  std::vector<double> mu_q(N);
  for (int i = 0; i < N; ++i) mu_q[i] = bd.at(0.5 * T) + ell * std::abs(az.zeros[i]);

  const long K = n_paths;
  const long K_pilot = std::max<long>(std::min<long>(K, 4000), K / 10);
  for (int it = 0; it < 2; ++it) {
    Stage st = run_stage(K_pilot, mu_q, 0xfe11aa + (std::uint64_t)it);
    for (int i = 0; i < N; ++i) {
      double m_f = 0.0, m_pi = 0.0;
      for (long p = 0; p < K_pilot; ++p) {
        m_f += st.pos[p][i];
        m_pi += st.w[p] * st.pos[p][i];
      }
      mu_q[i] += m_pi / st.wsum - m_f / K_pilot;
    }
  }
  Stage st = run_stage(K, mu_q, 0xfe11aa + 100);
  Rng rng(seed, 0xfe11aa + 200);

  // systematic resampling by weight
  FerrariSpohnMc out;
  out.survivors = (long)std::llround(st.wsum * st.wsum / st.w2sum);  // effective sample size
  out.samples.assign(N, {});
  std::vector<double> pooled;
  const double g_mid = bd.at(0.5 * T);
  double step_w = st.wsum / K, u = rng.uniform() * step_w, acc = 0.0;
  long p = 0;
  for (long k = 0; k < K; ++k) {
    double target = u + k * step_w;
    while (acc + st.w[p] < target && p + 1 < K) acc += st.w[p++];
    for (int i = 0; i < N; ++i) {
      out.samples[i].push_back(st.pos[p][i] - g_mid);
      pooled.push_back(st.pos[p][i] - g_mid);
    }
  }
  out.density = histogram(std::move(pooled), 60);
  return out;
}

}  // namespace rmtlab
