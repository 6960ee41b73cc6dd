#pragma once
// Stochastic process integrators: Dyson Brownian motion (free and
// Ornstein-Uhlenbeck confined), the matrix Kesten recursion (discrete
// matrix form and continuous eigenvalue SDE), the generalized
// multiplicative-noise eigenvalue processes, Ito/Stratonovich drift
// corrections, and the unnormalized stationary JPDFs.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/rng.hpp"

namespace rmtlab {

enum class ProcessKind {
  DBM,           // dl = -ou*l dt + sum 1/(l-l') dt + sqrt(2/beta) dB
  Kesten,        // dl = (1+ml) dt + s^2 sum ll'/(l-l') dt + sqrt(2/beta) s l dB
  GenKesten,     // beta=1 generalized Kesten with extra p_k l^k drift
  GTRVAsym,      // asymmetric-noise generalization
  GTRVSym,       // symmetric-noise generalization
  SqrtNoise,     // sqrt-multiplicative noise model
  SquaredNoise,  // squared-multiplicative noise model
};

struct ProcessSpec {
  ProcessKind kind = ProcessKind::DBM;
  double beta = 2.0;
  int N = 1;
  double m = 0.0;
  double sigma = 1.0;
  double ou = 0.0;             // DBM confinement: V(l) = ou l^2 / 2
  std::map<int, double> p;     // generalized drift coefficients p_k
};

struct ProcessState {
  double t = 0.0;
  std::vector<double> lam;  // strictly ordered
};

struct SdeConfig {
  double dt = 1e-3;
  enum class Crossing { RejectResample, AdaptiveHalving };
  Crossing crossing = Crossing::RejectResample;
  double positivity_floor = 1e-12;
  double t_end = 1.0;
};

namespace detail {

inline bool positive_constrained(ProcessKind k) { return k != ProcessKind::DBM; }

inline void drift_diffusion(const ProcessSpec& sp, const std::vector<double>& lam,
                            std::vector<double>& drift, std::vector<double>& diff) {
  int N = (int)lam.size();
  drift.assign(N, 0.0);
  diff.assign(N, 0.0);
  const double s = sp.sigma, s2 = s * s;
  auto poly = [&](double l, int skip) {
    double acc = 0.0;
    for (auto [k, pk] : sp.p)
      if (k != skip) acc += pk * std::pow(l, k);
    return acc;
  };
  for (int i = 0; i < N; ++i) {
    double l = lam[i], inter = 0.0;
    switch (sp.kind) {
      case ProcessKind::DBM:
        for (int j = 0; j < N; ++j)
          if (j != i) inter += 1.0 / (l - lam[j]);
        drift[i] = -sp.ou * l + inter;
        diff[i] = std::sqrt(2.0 / sp.beta);
        break;
      case ProcessKind::Kesten:
        for (int j = 0; j < N; ++j)
          if (j != i) inter += l * lam[j] / (l - lam[j]);
        drift[i] = 1.0 + sp.m * l + s2 * inter;
        diff[i] = std::sqrt(2.0 / sp.beta) * s * l;
        break;
      case ProcessKind::GenKesten:
        for (int j = 0; j < N; ++j)
          if (j != i) inter += l * lam[j] / (l - lam[j]);
        drift[i] = sp.m * l + poly(l, 1) + s2 * inter;
        diff[i] = std::sqrt(2.0) * s * l;
        break;
      case ProcessKind::GTRVAsym:
        for (int j = 0; j < N; ++j)
          if (j != i) inter += l * lam[j] / (l - lam[j]);
        drift[i] = (sp.m + s2 * (N + 1) / 2.0) * l + poly(l, 1) + s2 * inter;
        diff[i] = std::sqrt(2.0) * s * l;
        break;
      case ProcessKind::GTRVSym:
        for (int j = 0; j < N; ++j)
          if (j != i) inter += l * lam[j] / (l - lam[j]);
        drift[i] = (sp.m + s2 * (N + 1)) * l + poly(l, 1) + 2.0 * s2 * inter;
        diff[i] = 2.0 * s * l;
        break;
      case ProcessKind::SqrtNoise:
        for (int j = 0; j < N; ++j)
          if (j != i) inter += (l + lam[j]) / (l - lam[j]);
        drift[i] = sp.m + poly(l, 0) + 0.5 * s2 * inter;
        diff[i] = s * std::sqrt(2.0 * l);
        break;
      case ProcessKind::SquaredNoise:
        for (int j = 0; j < N; ++j)
          if (j != i) inter += l * lam[j] / (l - lam[j]);
        drift[i] = (sp.m + 2.0 * s2) * l * l * l + poly(l, 3) + s2 * l * l * inter;
        diff[i] = std::sqrt(2.0) * s * l * l;
        break;
    }
  }
}

inline std::string state_dump(const ProcessState& st) {
  std::ostringstream os;
  os << "t=" << st.t << " lam=[";
  for (std::size_t i = 0; i < st.lam.size(); ++i) os << (i ? "," : "") << st.lam[i];
  os << "]";
  return os.str();
}

// one Euler-Maruyama attempt over dt; returns false on ordering violation
inline bool em_attempt(const ProcessSpec& sp, const SdeConfig& cfg, const std::vector<double>& lam,
                       double dt, Rng& rng, std::vector<double>& out) {
  int N = (int)lam.size();
  std::vector<double> drift, diff;
  drift_diffusion(sp, lam, drift, diff);
  double sq = std::sqrt(dt);
  out.resize(N);
  for (int i = 0; i < N; ++i) {
    double x = lam[i] + drift[i] * dt + diff[i] * sq * rng.normal();
    if (positive_constrained(sp.kind) && x < cfg.positivity_floor)
      x = 2.0 * cfg.positivity_floor - x;  // reflect at the floor
    out[i] = x;
  }
  for (int i = 1; i < N; ++i)
    if (!(out[i] > out[i - 1])) return false;
  return true;
}

inline void em_step_recursive(const ProcessSpec& sp, const SdeConfig& cfg, ProcessState& st,
                              double dt, Rng& rng) {
  if (dt < 1e-12)
    throw std::runtime_error("sde step: dt floor reached; " + state_dump(st));
  std::vector<double> out;
  int retries = (cfg.crossing == SdeConfig::Crossing::RejectResample) ? 50 : 1;
  for (int r = 0; r < retries; ++r) {
    if (em_attempt(sp, cfg, st.lam, dt, rng, out)) {
      st.lam = std::move(out);
      st.t += dt;
      return;
    }
  }
  em_step_recursive(sp, cfg, st, 0.5 * dt, rng);
  em_step_recursive(sp, cfg, st, 0.5 * dt, rng);
}

}  // namespace detail

inline void sde_step(const ProcessSpec& sp, const SdeConfig& cfg, ProcessState& st, Rng& rng) {
  if ((int)st.lam.size() != sp.N) throw std::invalid_argument("sde_step: state size != N");
  for (int i = 1; i < sp.N; ++i)
    if (!(st.lam[i] > st.lam[i - 1])) throw std::invalid_argument("sde_step: state not ordered");
  detail::em_step_recursive(sp, cfg, st, cfg.dt, rng);
}

inline void dbm_eigen_step(const ProcessSpec& sp, const SdeConfig& cfg, ProcessState& st,
                           Rng& rng) {
  if (sp.kind != ProcessKind::DBM) throw std::invalid_argument("dbm_eigen_step: kind != DBM");
  sde_step(sp, cfg, st, rng);
}

inline void kesten_eigen_step(const ProcessSpec& sp, const SdeConfig& cfg, ProcessState& st,
                              Rng& rng) {
  if (sp.kind != ProcessKind::Kesten)
    throw std::invalid_argument("kesten_eigen_step: kind != Kesten");
  sde_step(sp, cfg, st, rng);
}

inline void generalized_eigen_step(const ProcessSpec& sp, const SdeConfig& cfg, ProcessState& st,
                                   Rng& rng) {
  switch (sp.kind) {
    case ProcessKind::GenKesten:
    case ProcessKind::GTRVAsym:
    case ProcessKind::GTRVSym:
    case ProcessKind::SqrtNoise:
    case ProcessKind::SquaredNoise:
      break;
    default:
      throw std::invalid_argument("generalized_eigen_step: not a generalized model");
  }
  sde_step(sp, cfg, st, rng);
}

// ------------------------------------------ discrete matrix Kesten map

// Z' = sqrt(eps I + Z) xi sqrt(eps I + Z), xi = (1+m eps) I + sigma sqrt(eps) H
inline Eigen::MatrixXd kesten_discrete_step(const Eigen::MatrixXd& Z, double m, double sigma,
                                            double eps, Rng& rng) {
  int N = (int)Z.rows();
  Eigen::MatrixXd X(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) X(i, j) = rng.normal();
  Eigen::MatrixXd H = (X + X.transpose()) / std::sqrt(2.0);
  Eigen::MatrixXd xi =
      (1.0 + m * eps) * Eigen::MatrixXd::Identity(N, N) + sigma * std::sqrt(eps) * H;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xi);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    // rare for small eps: fall back to a manifestly positive-definite draw
    // with the same first-order statistics, xi = exp(log(1+m eps) I + s H)
    Eigen::MatrixXd A = std::log(1.0 + m * eps) * Eigen::MatrixXd::Identity(N, N) +
                        sigma * std::sqrt(eps) / (1.0 + m * eps) * H;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A);
    xi = ea.eigenvectors() * ea.eigenvalues().array().exp().matrix().asDiagonal() *
         ea.eigenvectors().transpose();
  }
  Eigen::MatrixXd S = detail::mat_sqrt(
      Eigen::MatrixXd(eps * Eigen::MatrixXd::Identity(N, N) + Z));
  return S * xi * S;
}

inline Eigen::MatrixXcd kesten_discrete_step(const Eigen::MatrixXcd& Z, double m, double sigma,
                                             double eps, Rng& rng) {
  int N = (int)Z.rows();
  Eigen::MatrixXcd X(N, N);
  const double c = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) X(i, j) = std::complex<double>(rng.normal() * c, rng.normal() * c);
  Eigen::MatrixXcd H = (X + X.adjoint()) / std::sqrt(2.0);
  Eigen::MatrixXcd xi =
      (1.0 + m * eps) * Eigen::MatrixXcd::Identity(N, N) + sigma * std::sqrt(eps) * H;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(xi);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    Eigen::MatrixXcd A = std::log(1.0 + m * eps) * Eigen::MatrixXcd::Identity(N, N) +
                         sigma * std::sqrt(eps) / (1.0 + m * eps) * H;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(A);
    Eigen::VectorXcd ev = ea.eigenvalues().array().exp().matrix().cast<std::complex<double>>();
    xi = ea.eigenvectors() * ev.asDiagonal() * ea.eigenvectors().adjoint();
  }
  Eigen::MatrixXcd S = detail::mat_sqrt(
      Eigen::MatrixXcd(eps * Eigen::MatrixXcd::Identity(N, N) + Z));
  return S * xi * S;
}

// ------------------------------------- Ito <-> Stratonovich corrections

struct DriftDescriptor {
  std::string formula;
  std::function<double(double)> scalar;                            // N=1 reduction
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> matrix;   // sigma^2-scaled
};

inline DriftDescriptor ito_stratonovich_drift(ProcessKind kind, double sigma) {
  const double s2 = sigma * sigma;
  DriftDescriptor d;
  switch (kind) {
    case ProcessKind::Kesten:
    case ProcessKind::GenKesten:
    case ProcessKind::SqrtNoise:
      // defined directly in the Ito prescription: no correction
      d.formula = "0";
      d.scalar = [](double) { return 0.0; };
      d.matrix = [](const Eigen::MatrixXd& V) {
        return Eigen::MatrixXd::Zero(V.rows(), V.cols()).eval();
      };
      break;
    case ProcessKind::GTRVAsym:
      d.formula = "s^2 (V/2 + Tr(V)/2 I)";
      d.scalar = [s2](double x) { return s2 * x; };  // 1/2 g g' with g = sqrt(2) s x
      d.matrix = [s2](const Eigen::MatrixXd& V) {
        return (s2 * (0.5 * V +
                      0.5 * V.trace() * Eigen::MatrixXd::Identity(V.rows(), V.cols())))
            .eval();
      };
      break;
    case ProcessKind::GTRVSym:
      d.formula = "s^2 ((1 + N/2) V + Tr(V)/2 I)";
      d.matrix = [s2](const Eigen::MatrixXd& V) {
        double N = (double)V.rows();
        return (s2 * ((1.0 + 0.5 * N) * V +
                      0.5 * V.trace() * Eigen::MatrixXd::Identity(V.rows(), V.cols())))
            .eval();
      };
      break;
    case ProcessKind::SquaredNoise:
      d.formula = "s^2 (V^3 + Tr(V) V^2)";
      d.matrix = [s2](const Eigen::MatrixXd& V) {
        return (s2 * (V * V * V + V.trace() * V * V)).eval();
      };
      break;
    default:
      throw std::invalid_argument("ito_stratonovich_drift: unsupported noise structure");
  }
  return d;
}

// --------------------------------------- stationary laws (unnormalized)

inline double stationary_log_jpdf(const ProcessSpec& sp, const std::vector<double>& lam) {
  constexpr double NEG_INF = -std::numeric_limits<double>::infinity();
  int N = (int)lam.size();
  const double s2 = sp.sigma * sp.sigma;
  double lv = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      if (lam[i] == lam[j]) return NEG_INF;
      lv += std::log(std::abs(lam[j] - lam[i]));
    }
  auto expsum = [&](int skip, double scale, int shift) {
    // (scale) sum_{k != skip} p_k / (k - shift) l^{k - shift}
    double acc = 0.0;
    for (auto [k, pk] : sp.p) {
      if (k == skip) continue;
      for (double l : lam) acc += scale * pk / (double)(k - shift) * std::pow(l, k - shift);
    }
    return acc;
  };
  double lp;
  switch (sp.kind) {
    case ProcessKind::DBM: {
      if (!(sp.ou > 0.0))
        throw std::invalid_argument("stationary_log_jpdf: free DBM has no stationary law");
      lp = sp.beta * lv;
      for (double l : lam) lp -= sp.beta * sp.ou * l * l / 2.0;
      return lp;
    }
    case ProcessKind::Kesten: {
      if (!(sp.m < s2 / sp.beta))
        throw std::invalid_argument("stationary_log_jpdf: non-normalizable (m >= sigma^2/beta)");
      // inverse-Wishart with T = N - 2m/s^2 + 2/beta - 1, sigma_W = s/sqrt(2)
      double T = N - 2.0 * sp.m / s2 + 2.0 / sp.beta - 1.0;
      lp = sp.beta * lv;
      for (double l : lam) {
        if (l <= 0.0) return NEG_INF;
        lp += (-sp.beta * (T + N - 1) / 2.0 - 1.0) * std::log(l) - sp.beta / (s2 * l);
      }
      return lp;
    }
    case ProcessKind::GenKesten:
    case ProcessKind::GTRVAsym:
    case ProcessKind::GTRVSym:
    case ProcessKind::SqrtNoise:
    case ProcessKind::SquaredNoise:
      break;
    default:
      throw std::invalid_argument("stationary_log_jpdf: unsupported model");
  }
  for (double l : lam)
    if (l <= 0.0) return NEG_INF;
  double a, ex;
  switch (sp.kind) {
    case ProcessKind::GenKesten:
      a = sp.m / s2 - (N + 1);
      ex = expsum(1, 1.0 / s2, 1);
      break;
    case ProcessKind::GTRVAsym:
      a = sp.m / s2 - (N + 1) / 2.0;
      ex = expsum(1, 1.0 / s2, 1);
      break;
    case ProcessKind::GTRVSym:
      a = sp.m / (2.0 * s2) - (N + 1) / 2.0;
      ex = expsum(1, 1.0 / (2.0 * s2), 1);
      break;
    case ProcessKind::SqrtNoise:
      a = sp.m / s2 - (N + 1) / 2.0;
      ex = expsum(0, 1.0 / s2, 0);
      break;
    case ProcessKind::SquaredNoise:
      a = sp.m / s2 - (N + 1);
      ex = expsum(3, 1.0 / s2, 3);
      break;
    default:
      return NEG_INF;  // unreachable
  }
  lp = lv + ex;
  for (double l : lam) lp += a * std::log(l);
  return lp;
}

}  // namespace rmtlab
