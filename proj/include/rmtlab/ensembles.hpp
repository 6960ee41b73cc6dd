#pragma once
// Static matrix ensembles: dense Gaussian/Wishart/inverse-Wishart/Jacobi
// sampling (beta = 1,2), Dumitriu-Edelman tridiagonal samplers for any
// beta > 0, eigenvalue JPDFs with exact normalization constants.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "rmtlab/rng.hpp"

namespace rmtlab {

enum class EnsembleClass {
  Gaussian,
  Wishart,
  InverseWishart,
  Jacobi,
  BetaHermiteTridiag,
  BetaLaguerreTridiag,
};

struct EnsembleSpec {
  EnsembleClass cls = EnsembleClass::Gaussian;
  double beta = 2.0;
  int N = 1;
  double sigma = 1.0;
  double T = 0.0;   // Wishart / inverse-Wishart trials (also beta-Laguerre)
  double T1 = 0.0;  // Jacobi
  double T2 = 0.0;
};

struct Spectrum {
  std::vector<double> values;  // sorted ascending
  EnsembleSpec spec;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_dense_beta(const EnsembleSpec& s) {
  if (s.beta != 1.0 && s.beta != 2.0)
    throw std::invalid_argument("dense sampling requires beta in {1,2}");
}

inline std::vector<double> sym_eigs(const Eigen::MatrixXd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed (real symmetric)");
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + H.rows());
  return v;
}

inline std::vector<double> herm_eigs(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed (hermitian)");
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + H.rows());
  return v;
}

// Wishart matrix draw W = X^dag X with entry variance sigma^2 (complex: the
// full squared norm). Returns a real symmetric (beta=1) or the Hermitian
// matrix folded into real storage via its eigenvalue problem.
inline Eigen::MatrixXd wishart_real(Rng& rng, int N, int T, double sigma) {
  Eigen::MatrixXd X(T, N);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < N; ++j) X(t, j) = sigma * rng.normal();
  return X.transpose() * X;
}

inline Eigen::MatrixXcd wishart_cplx(Rng& rng, int N, int T, double sigma) {
  const double s = sigma / std::sqrt(2.0);
  Eigen::MatrixXcd X(T, N);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < N; ++j) X(t, j) = std::complex<double>(s * rng.normal(), s * rng.normal());
  return X.adjoint() * X;
}

template <class Mat>
inline Mat mat_sqrt(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success) throw std::runtime_error("matrix sqrt: eigensolver failed");
  auto d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i)
    if (d(i) < -1e-10) throw std::runtime_error("matrix sqrt: input not PSD");
  Mat S = es.eigenvectors() *
          d.cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  return S;
}

}  // namespace detail

// One matrix draw of a dense-class ensemble; returns sorted eigenvalues.
inline Spectrum sample_dense(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t stream = 0) {
  detail::check_dense_beta(spec);
  Rng rng(seed, stream);
  const int N = spec.N;
  std::vector<double> lam;

  switch (spec.cls) {
    case EnsembleClass::Gaussian: {
      if (spec.beta == 1.0) {
        Eigen::MatrixXd X(N, N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) X(i, j) = rng.normal();
        Eigen::MatrixXd H = spec.sigma * (X + X.transpose()) / std::sqrt(2.0);
        lam = detail::sym_eigs(H);
      } else {
        const double s = 1.0 / std::sqrt(2.0);
        Eigen::MatrixXcd X(N, N);
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j)
            X(i, j) = std::complex<double>(s * rng.normal(), s * rng.normal());
        Eigen::MatrixXcd H = spec.sigma * (X + X.adjoint()) / std::sqrt(2.0);
        lam = detail::herm_eigs(H);
      }
      break;
    }
    case EnsembleClass::Wishart:
    case EnsembleClass::InverseWishart: {
      int T = (int)spec.T;
      if (T < N || spec.T != std::floor(spec.T))
        throw std::invalid_argument("dense Wishart needs integer T >= N");
      if (spec.beta == 1.0)
        lam = detail::sym_eigs(detail::wishart_real(rng, N, T, spec.sigma));
      else
        lam = detail::herm_eigs(detail::wishart_cplx(rng, N, T, spec.sigma));
      if (spec.cls == EnsembleClass::InverseWishart) {
        for (auto& x : lam) x = 1.0 / x;
        std::reverse(lam.begin(), lam.end());
      }
      break;
    }
    case EnsembleClass::Jacobi: {
      int T1 = (int)spec.T1, T2 = (int)spec.T2;
      if (T1 < N || T2 < N) throw std::invalid_argument("Jacobi needs T1,T2 >= N");
      // J = (I + B2^{1/2} B1^{-1} B2^{1/2})^{-1}: scalar case reduces to
      // B1/(B1+B2) ~ Beta, pairing the lambda exponent with T1 as in the JPDF
      if (spec.beta == 1.0) {
        Eigen::MatrixXd B1 = detail::wishart_real(rng, N, T1, 1.0);
        Eigen::MatrixXd B2 = detail::wishart_real(rng, N, T2, 1.0);
        Eigen::MatrixXd S = detail::mat_sqrt(B2);
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) + S * B1.inverse() * S;
        lam = detail::sym_eigs(Eigen::MatrixXd(M.inverse()));
      } else {
        Eigen::MatrixXcd B1 = detail::wishart_cplx(rng, N, T1, 1.0);
        Eigen::MatrixXcd B2 = detail::wishart_cplx(rng, N, T2, 1.0);
        Eigen::MatrixXcd S = detail::mat_sqrt(B2);
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(N, N) + S * B1.inverse() * S;
        lam = detail::herm_eigs(Eigen::MatrixXcd(M.inverse()));
      }
      break;
    }
    default:
      throw std::invalid_argument("sample_dense: tridiagonal class passed; use sample_tridiagonal");
  }

  std::sort(lam.begin(), lam.end());
  Spectrum out;
  out.values = std::move(lam);
  out.spec = spec;
  out.seed = seed;
  return out;
}

// Dumitriu-Edelman tridiagonal models, any beta > 0.
// Hermite: H = sigma sqrt(2/beta) * tridiag(N(0,1); chi_{beta(N-i)}/sqrt(2)).
// Laguerre: bidiagonal B with diag chi_{beta T - beta(i-1)}, subdiag
// chi_{beta(N-i)}; eigenvalues of B B^T scaled by sigma^2/beta.
inline Spectrum sample_tridiagonal(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t stream = 0) {
  if (spec.beta <= 0.0) throw std::invalid_argument("beta > 0 required");
  Rng rng(seed, stream);
  const int N = spec.N;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);

  if (spec.cls == EnsembleClass::BetaHermiteTridiag) {
    const double c = spec.sigma * std::sqrt(2.0 / spec.beta);
    for (int i = 0; i < N; ++i) H(i, i) = c * rng.normal();
    for (int i = 0; i < N - 1; ++i) {
      double o = c * rng.chi(spec.beta * (N - 1 - i)) / std::sqrt(2.0);
      H(i, i + 1) = H(i + 1, i) = o;
    }
  } else if (spec.cls == EnsembleClass::BetaLaguerreTridiag) {
    if (!(spec.T > spec.N - 1)) throw std::invalid_argument("beta-Laguerre needs T > N-1");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) B(i, i) = rng.chi(spec.beta * (spec.T - i));
    for (int i = 0; i < N - 1; ++i) B(i + 1, i) = rng.chi(spec.beta * (N - 1 - i));
    H = (spec.sigma * spec.sigma / spec.beta) * (B * B.transpose());
  } else {
    throw std::invalid_argument("sample_tridiagonal: dense class passed");
  }

  auto lam = detail::sym_eigs(H);
  std::sort(lam.begin(), lam.end());
  Spectrum out;
  out.values = std::move(lam);
  out.spec = spec;
  out.seed = seed;
  return out;
}

// -------------------------------------------------------------- JPDFs

struct NormalizationInfo {
  double log_eig_constant = 0.0;     // log C^N (R^N convention)
  double log_matrix_constant = 0.0;  // log C (matrix PDF)
  double log_xi = 0.0;               // log Xi = log(C^N / C)
  bool normalized = true;            // false for Jacobi (constant unknown)
};

inline double log_group_volume(double beta, int N) {
  // Vol(G_beta(N)) = 2^N pi^{beta N(N+1)/4} / prod_{k=1}^N Gamma(beta k / 2)
  double lg = N * std::log(2.0) + beta * N * (N + 1) / 4.0 * std::log(M_PI);
  for (int k = 1; k <= N; ++k) lg -= std::lgamma(beta * k / 2.0);
  return lg;
}

inline NormalizationInfo normalization_constant(const EnsembleSpec& spec, bool ordered = false) {
  NormalizationInfo info;
  const double b = spec.beta;
  const int N = spec.N;
  // Xi = pi^{(b/2) N(N-1)/2} prod_j Gamma(1+b/2)/Gamma(1+b j/2)
  double lxi = (b / 2.0) * N * (N - 1) / 2.0 * std::log(M_PI);
  for (int j = 1; j <= N; ++j)
    lxi += std::lgamma(1.0 + b / 2.0) - std::lgamma(1.0 + b * j / 2.0);
  info.log_xi = lxi;

  switch (spec.cls) {
    case EnsembleClass::Gaussian:
    case EnsembleClass::BetaHermiteTridiag: {
      double lc = (N / 2.0) * (1.0 + b / 2.0 * (N - 1)) * std::log(b / (2.0 * spec.sigma * spec.sigma)) -
                  (N / 2.0) * std::log(2.0 * M_PI);
      for (int j = 1; j <= N; ++j)
        lc += std::lgamma(1.0 + b / 2.0) - std::lgamma(1.0 + b * j / 2.0);
      info.log_eig_constant = lc;
      info.log_matrix_constant = lc - lxi;
      break;
    }
    case EnsembleClass::Wishart:
    case EnsembleClass::InverseWishart:
    case EnsembleClass::BetaLaguerreTridiag: {
      double lc = (b / 2.0) * N * spec.T * std::log(b / (2.0 * spec.sigma * spec.sigma));
      for (int j = 1; j <= N; ++j)
        lc += std::lgamma(1.0 + b / 2.0) - std::lgamma(1.0 + b * j / 2.0) -
              std::lgamma(b / 2.0 * (spec.T - N + j));
      info.log_eig_constant = lc;
      info.log_matrix_constant = lc - lxi;
      break;
    }
    case EnsembleClass::Jacobi:
      info.normalized = false;
      break;
  }
  if (ordered) info.log_eig_constant += std::lgamma(N + 1.0);
  return info;
}

// log eigenvalue JPDF (R^N convention, i.e. unordered support), including
// the exact constant where known; -inf outside the support.
inline double log_jpdf(const EnsembleSpec& spec, const std::vector<double>& lam) {
  const double b = spec.beta;
  const int N = spec.N;
  if ((int)lam.size() != N) throw std::invalid_argument("log_jpdf: wrong dimension");
  const double NEG_INF = -std::numeric_limits<double>::infinity();

  double lv = 0.0;  // log |Vandermonde|^beta
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      double d = std::abs(lam[j] - lam[i]);
      if (d == 0.0) return NEG_INF;
      lv += b * std::log(d);
    }

  auto info = normalization_constant(spec);
  double lp = info.log_eig_constant + lv;
  const double s2 = spec.sigma * spec.sigma;

  switch (spec.cls) {
    case EnsembleClass::Gaussian:
    case EnsembleClass::BetaHermiteTridiag:
      for (double x : lam) lp -= b / (4.0 * s2) * x * x;
      break;
    case EnsembleClass::Wishart:
    case EnsembleClass::BetaLaguerreTridiag:
      for (double x : lam) {
        if (x <= 0.0) return NEG_INF;
        lp += (b / 2.0 * (spec.T - N + 1) - 1.0) * std::log(x) - b / (2.0 * s2) * x;
      }
      break;
    case EnsembleClass::InverseWishart:
      for (double x : lam) {
        if (x <= 0.0) return NEG_INF;
        lp += (-b / 2.0 * (spec.T + N - 1) - 1.0) * std::log(x) - b / (2.0 * s2) / x;
      }
      break;
    case EnsembleClass::Jacobi:
      // unnormalized: the constant is not given in closed form here
      for (double x : lam) {
        if (x <= 0.0 || x >= 1.0) return NEG_INF;
        lp += (b / 2.0 * (spec.T1 - N + 1) - 1.0) * std::log(x) +
              (b / 2.0 * (spec.T2 - N + 1) - 1.0) * std::log1p(-x);
      }
      break;
  }
  return lp;
}

// ------------------------------------------------- serialization helpers

inline std::string spec_to_json(const EnsembleSpec& s) {
  const char* names[] = {"gaussian", "wishart", "inverse_wishart", "jacobi",
                         "beta_hermite_tridiag", "beta_laguerre_tridiag"};
  std::ostringstream os;
  os << "{\"class\":\"" << names[(int)s.cls] << "\",\"beta\":" << s.beta << ",\"N\":" << s.N
     << ",\"sigma\":" << s.sigma << ",\"T\":" << s.T << ",\"T1\":" << s.T1 << ",\"T2\":" << s.T2
     << "}";
  return os.str();
}

inline std::string spectrum_to_csv(const Spectrum& s) {
  std::ostringstream os;
  os.precision(17);
  os << "# spec " << spec_to_json(s.spec) << " seed " << s.seed << "\n";
  for (size_t i = 0; i < s.values.size(); ++i) os << (i ? "," : "") << s.values[i];
  os << "\n";
  return os.str();
}

}  // namespace rmtlab
