// Acceptance gate: twelve end-to-end criteria, one per invocation
// (`acceptance <n>`), each printing a single PASS/FAIL line and exiting
// nonzero on failure. Running with no argument executes all twelve.
//
// These are deliberately coarser and more expensive than the unit tests:
// they reproduce headline numbers (spacing laws, global densities, decay
// exponents, stationary laws, fermionic kernels, Fredholm gaps) from
// scratch at fixed seeds.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/fermion_dpp.hpp"
#include "rmtlab/freeprob.hpp"
#include "rmtlab/processes.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/specfn.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/walkers.hpp"

using namespace rmtlab;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  return {m, std::sqrt(s2 / (v.size() * (v.size() - 1.0)))};
}

void run_to(const ProcessSpec& sp, SdeConfig cfg, ProcessState& st, double t_end, Rng& rng) {
  while (st.t < t_end - 1e-12) {
    if (st.t + cfg.dt > t_end) cfg.dt = t_end - st.t;
    sde_step(sp, cfg, st, rng);
  }
}

double gamma_draw(Rng& rng, double k, double theta) {
  double c = rng.chi(2.0 * k);
  return 0.5 * theta * c * c;
}

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n = 400) {
  std::vector<double> x, w;
  detail::gauss_legendre(n, x, w);
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += w[i] * f(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
  return 0.5 * (b - a) * s;
}

// ---------------------------------------------------------------- criteria

// 1. N=2 spacing distribution equals the Wigner surmise for beta in {1,2,4}
Check crit1() {
  Check c;
  for (double beta : {1.0, 2.0, 4.0}) {
    EnsembleSpec spec;
    spec.cls = EnsembleClass::BetaHermiteTridiag;
    spec.beta = beta;
    spec.N = 2;
    const long n = 1000000;
    std::vector<Spectrum> sams(n);
    for (long i = 0; i < n; ++i) sams[i] = sample_tridiagonal(spec, 101, i);
    double ks = ks_distance(spacing_samples(sams, true), AnalyticLaw::surmise(beta));
    c.require(ks < 0.01, "beta=" + fmt(beta) + " KS=" + fmt(ks));
  }
  return c;
}

// 2. Global laws: semicircle, Marchenko-Pastur (incl. hard edge), inverse MP
Check crit2() {
  Check c;
  const int n = 500, reps = 60;
  for (double beta : {1.0, 2.0}) {
    EnsembleSpec s;
    s.cls = EnsembleClass::Gaussian;
    s.beta = beta;
    s.N = n;
    std::vector<Spectrum> sams(reps);
    for (int r = 0; r < reps; ++r) sams[r] = sample_dense(s, 202, r);
    double l1 = l1_distance(esd(sams, 1.0 / std::sqrt((double)n), 80),
                            AnalyticLaw::semicircle(1.0));
    c.require(l1 < 0.05, "semicircle beta=" + fmt(beta) + " L1=" + fmt(l1));
  }
  for (double q : {0.25, 1.0}) {
    EnsembleSpec s;
    s.cls = EnsembleClass::Wishart;
    s.beta = 2.0;
    s.N = n;
    s.T = std::round(n / q);
    std::vector<Spectrum> sams(reps);
    for (int r = 0; r < reps; ++r) sams[r] = sample_dense(s, 203, r);
    const AnalyticLaw law = AnalyticLaw::mp(n / s.T, 1.0);
    const EmpiricalDensity ed = esd(sams, 1.0 / s.T, 80);
    // q=1 has a 1/sqrt(x) hard edge at zero: compare away from the
    // divergence on [0.05, 4]
    double l1 = (q == 1.0)
                    ? l1_distance(ed, [&](double x) { return density(law, x); }, 0.05, 4.0)
                    : l1_distance(ed, law);
    c.require(l1 < 0.05, "mp q=" + fmt(q) + " L1=" + fmt(l1));
  }
  {
    EnsembleSpec s;
    s.cls = EnsembleClass::InverseWishart;
    s.beta = 2.0;
    s.N = n;
    s.T = 4 * n;  // q = 1/4
    std::vector<Spectrum> sams(reps);
    for (int r = 0; r < reps; ++r) sams[r] = sample_dense(s, 204, r);
    const double q = n / s.T;
    // inverse MP is normalized to unit mean: rescale by T (1 - q)
    double l1 = l1_distance(esd(sams, s.T * (1.0 - q), 80), AnalyticLaw::imp(q, 1.0));
    c.require(l1 < 0.05, "imp L1=" + fmt(l1));
  }
  return c;
}

// 3. DBM endpoint moments vs direct GUE sampling; Burgers characteristics
Check crit3() {
  Check c;
  {
    const int n = 10, n_mom = 4;
    const long paths = 400;
    const double t = 1.0, s0 = 0.05;
    ProcessSpec sp;
    sp.kind = ProcessKind::DBM;
    sp.beta = 2.0;
    sp.N = n;
    EnsembleSpec g0;
    g0.cls = EnsembleClass::Gaussian;
    g0.beta = 2.0;
    g0.N = n;
    g0.sigma = s0;
    EnsembleSpec gt = g0;
    gt.sigma = std::sqrt(s0 * s0 + t);
    std::vector<std::vector<double>> md(paths), mg(paths);
    for (long p = 0; p < paths; ++p) {
      Rng rng(301, p);
      ProcessState st;
      st.lam = sample_dense(g0, 302, p).values;
      SdeConfig cfg;
      cfg.dt = 1e-3;
      run_to(sp, cfg, st, t, rng);
      md[p].resize(n_mom);
      mg[p].resize(n_mom);
      const auto gv = sample_dense(gt, 303, p).values;
      for (int k = 1; k <= n_mom; ++k) {
        double a = 0, b = 0;
        for (double l : st.lam) a += std::pow(l, k);
        for (double l : gv) b += std::pow(l, k);
        md[p][k - 1] = a;
        mg[p][k - 1] = b;
      }
    }
    for (int k = 0; k < n_mom; ++k) {
      std::vector<double> diff(paths);
      for (long p = 0; p < paths; ++p) diff[p] = md[p][k] - mg[p][k];
      auto [m, se] = mean_stderr(diff);
      c.require(std::abs(m) < 3.0 * se,
                "moment " + std::to_string(k + 1) + " z=" + fmt(m / se));
    }
  }
  {
    // free DBM from a near-zero start: g(z, tau) = (z - sqrt(z^2-4tau))/(2tau)
    const int n = 500;
    const double t0 = 1e-3;
    ProcessSpec sp;
    sp.kind = ProcessKind::DBM;
    sp.beta = 2.0;
    sp.N = n;
    EnsembleSpec init;
    init.cls = EnsembleClass::Gaussian;
    init.beta = 2.0;
    init.N = n;
    init.sigma = std::sqrt(t0);
    Rng rng(304, 0);
    ProcessState st;
    st.lam = sample_dense(init, 305).values;
    SdeConfig cfg;
    cfg.dt = 1e-5;
    run_to(sp, cfg, st, 0.02, rng);
    cfg.dt = 1e-4;
    run_to(sp, cfg, st, 0.2, rng);
    cfg.dt = 5e-4;
    run_to(sp, cfg, st, 1.0 - t0, rng);
    const double tau = 1.0;
    std::vector<double> x = st.lam;
    for (double& v : x) v /= std::sqrt((double)n);
    double worst = 0.0;
    for (cplx z : {cplx(0.0, 0.8), cplx(0.7, 0.8), cplx(-1.2, 0.9), cplx(1.8, 1.0)}) {
      cplx g_th = (z - edge_sqrt(z, -2.0 * std::sqrt(tau), 2.0 * std::sqrt(tau))) / (2.0 * tau);
      worst = std::max(worst, std::abs(stieltjes_esd(x, z) - g_th));
    }
    c.require(worst < 2e-2, "burgers err=" + fmt(worst));
  }
  return c;
}

// 4. Survival exponents from Monte Carlo vs analytic values
Check crit4() {
  Check c;
  {
    WalkerConfig cfg;  // N=1, fixed wall: 1/2
    cfg.N = 1;
    cfg.x0 = {0.0};
    cfg.boundary = Boundary::fixed(1.0);
    cfg.t_end = 1000.0;
    cfg.dt = 0.01;
    double b = fit_survival_exponent(survival_mc(cfg, 300000, 401));
    c.require(std::abs(b - 0.5) < 0.03, "fixed-wall b=" + fmt(b));
  }
  {
    WalkerConfig cfg;  // N=3, free: Fisher N(N-1)/4 = 3/2
    cfg.N = 3;
    cfg.x0 = {-1.0, 0.0, 1.0};
    cfg.t_end = 1000.0;
    cfg.dt = 0.01;
    double b = fit_survival_exponent(survival_mc(cfg, 600000, 402));
    c.require(std::abs(b - 1.5) < 0.1, "free N=3 b=" + fmt(b));
  }
  {
    WalkerConfig cfg;  // N=2 under the W=0 moving wall: N^2/2 = 2
    cfg.N = 2;
    cfg.x0 = {-2.0, -1.0};
    cfg.boundary = Boundary::sqrt_w(0.0);
    cfg.t_end = 300.0;
    cfg.dt = 0.01;
    double b = fit_survival_exponent(survival_mc(cfg, 600000, 403));
    c.require(std::abs(b - 2.0) < 0.15, "W=0 N=2 b=" + fmt(b));
  }
  {
    WalkerConfig cfg;  // N=1 under W=1: parabolic-cylinder root
    cfg.N = 1;
    cfg.x0 = {-1.0};
    cfg.boundary = Boundary::sqrt_w(1.0);
    cfg.t0 = 1.0;
    cfg.t_end = 30000.0;
    cfg.dt = 0.01;
    double b = fit_survival_exponent(survival_mc(cfg, 400000, 404));
    double th = survival_exponent(1, 1.0);
    c.require(std::abs(b - th) < 0.08 * th,
              "W=1 b=" + fmt(b) + " vs " + fmt(th));
  }
  return c;
}

// 5. Exponent solver closed cases and the semiclassical scaling function
Check crit5() {
  Check c;
  for (int n = 1; n <= 6; ++n) {
    c.require(std::abs(survival_exponent(n, 0.0) - 0.5 * n * n) < 1e-4,
              "beta(" + std::to_string(n) + ",0)");
    c.require(std::abs(survival_exponent(n, 30.0) - 0.25 * n * (n - 1)) < 1e-4,
              "beta(" + std::to_string(n) + ",30)");
  }
  for (int n : {1, 2, 3}) {
    const auto coef = small_w_expansion(n);
    const double h = 1e-3;
    const double f0 = survival_exponent(n, 0.0);
    const double fp = survival_exponent(n, h), fm = survival_exponent(n, -h);
    const double c1 = (fp - fm) / (2.0 * h);
    c.require(std::abs(coef[0] - f0) < 1e-2 * std::max(1.0, std::abs(f0)),
              "c0 N=" + std::to_string(n));
    c.require(std::abs(coef[1] - c1) < 1e-2 * std::max(1.0, std::abs(c1)),
              "c1 N=" + std::to_string(n) + ": " + fmt(coef[1]) + " vs " + fmt(c1));
  }
  c.require(std::abs(semiclassical_b(1.0) - 1.0) < 1e-12, "b(1) != 1");
  c.require(std::abs(semiclassical_b(1.0 - 1e-9) - 1.0) < 1e-3, "b(1-) jump");
  return c;
}

// 6. Matrix Kesten stationarity in three forms
Check crit6() {
  Check c;
  {
    // discrete map, N=200: pooled chain snapshots vs the inverse MP law.
    // sigma_tilde=1, m=-1 => q = 1/(1-2m) = 1/3, i.e. kappa = 1
    const int n = 200;
    const double eps = 0.01, m = -1.0, sigma = 1.0 / std::sqrt((double)n);
    const long chains = 8, burn = 2000, snaps = 10, thin = 100;
    std::vector<Spectrum> sams(chains * snaps);
    for (long ch = 0; ch < chains; ++ch) {
      Rng rng(601, ch);
      Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n) * eps;
      for (long s = 0; s < burn; ++s) Z = kesten_discrete_step(Z, m, sigma, eps, rng);
      for (long k = 0; k < snaps; ++k) {
        for (long s = 0; s < thin; ++s) Z = kesten_discrete_step(Z, m, sigma, eps, rng);
        sams[ch * snaps + k].values = detail::sym_eigs(Z);
      }
    }
    double l1 = l1_distance(esd(sams, 1.0, 60), AnalyticLaw::imp_kappa(1.0, 1.0));
    c.require(l1 < 0.08, "discrete L1=" + fmt(l1));
  }
  {
    // continuous N=1 eigenvalue SDE vs the inverse-gamma stationary law
    const double m = -1.0, sigma = 0.8, s2 = sigma * sigma;
    ProcessSpec sp;
    sp.kind = ProcessKind::Kesten;
    sp.beta = 1.0;
    sp.N = 1;
    sp.m = m;
    sp.sigma = sigma;
    SdeConfig cfg;
    cfg.dt = 2e-4;
    Rng rng(602, 1);
    const int reps = 10000;
    std::vector<double> fin(reps);
    for (int r = 0; r < reps; ++r) {
      ProcessState st;
      st.lam = {1.0 / gamma_draw(rng, 1.0 - m / s2, s2)};
      run_to(sp, cfg, st, 0.5, rng);
      fin[r] = st.lam[0];
    }
    double ks = ks_distance(fin, AnalyticLaw::inverse_gamma(m, sigma));
    c.require(ks < 0.02, "continuous KS=" + fmt(ks));
  }
  {
    // N=3, beta=2: eigenvalue marginal of the stationary law (inverse-Wishart
    // with T = N - 2m/sigma^2 + 2/beta - 1, sigma_W = sigma/sqrt(2)) vs the
    // Morse-kernel diagonal (1/N) K_M(log l, log l) / l
    const int n = 3;
    const Kernel km = Kernel::morse(n, -1.0, 1.0);
    EnsembleSpec spec;
    spec.cls = EnsembleClass::InverseWishart;
    spec.beta = 2.0;
    spec.N = n;
    spec.sigma = 1.0 / std::sqrt(2.0);
    spec.T = 5.0;
    const long reps = 20000;
    std::vector<double> lam;
    lam.reserve(reps * n);
    for (long r = 0; r < reps; ++r)
      for (double l : sample_dense(spec, 603, r).values) lam.push_back(l);
    const EmpiricalDensity ed = histogram(lam, 80);
    double l1 = l1_distance(
        ed,
        [&](double l) { return density_from_kernel(km, std::log(l)) / l; },
        0.02, 12.0);
    c.require(l1 < 0.08, "Morse-kernel L1=" + fmt(l1));
  }
  return c;
}

// 7. Free probability: tables, free CLT, Haar-rotated sums, S*R consistency
Check crit7() {
  Check c;
  {
    // moment <-> free-cumulant rows n=1..5 at a generic cumulant vector,
    // against the explicit polynomial rows
    const std::vector<double> k{0.3, 1.2, -0.5, 0.7, 0.2};
    const double k1 = k[0], k2 = k[1], k3 = k[2], k4 = k[3], k5 = k[4];
    const std::vector<double> rows{
        k1,
        k2 + k1 * k1,
        k3 + 3 * k1 * k2 + k1 * k1 * k1,
        k4 + 4 * k1 * k3 + 2 * k2 * k2 + 6 * k1 * k1 * k2 + std::pow(k1, 4),
        k5 + 5 * k1 * k4 + 5 * k2 * k3 + 10 * k1 * k1 * k3 + 10 * k1 * k2 * k2 +
            10 * std::pow(k1, 3) * k2 + std::pow(k1, 5)};
    const auto m = moments_from_cumulants(k, true);
    const auto back = cumulants_from_moments(m, true);
    for (int i = 0; i < 5; ++i) {
      c.require(std::abs(m[i] - rows[i]) < 1e-12 * std::max(1.0, std::abs(rows[i])),
                "table row " + std::to_string(i + 1));
      c.require(std::abs(back[i] - k[i]) < 1e-12, "round trip " + std::to_string(i + 1));
    }
  }
  {
    // free CLT: SC(s) boxplus SC(s) = SC(sqrt(2) s) to order 8
    std::vector<double> msc(8, 0.0), m2(8, 0.0);
    for (int n = 2; n <= 8; n += 2) {
      msc[n - 1] = catalan_number(n / 2);
      m2[n - 1] = catalan_number(n / 2) * std::pow(std::sqrt(2.0), n);
    }
    const auto ma = free_add(msc, msc, 8);
    for (int i = 0; i < 8; ++i)
      c.require(std::abs(ma[i] - m2[i]) < 1e-9, "free CLT order " + std::to_string(i + 1));
  }
  {
    // A + U B U^dag at N=800: first 6 moments vs free addition of the
    // (fixed) empirical moments of A and B
    const int n = 800, n_mom = 6;
    const long reps = 24;
    EnsembleSpec g;
    g.cls = EnsembleClass::Gaussian;
    g.beta = 2.0;
    g.N = n;
    EnsembleSpec w = g;
    w.cls = EnsembleClass::Wishart;
    w.T = 2 * n;
    auto a = sample_dense(g, 701).values;
    auto b = sample_dense(w, 702).values;
    for (double& v : a) v /= std::sqrt((double)n);
    for (double& v : b) v /= w.T;
    auto emp_moments = [&](const std::vector<double>& lam) {
      std::vector<double> m(n_mom, 0.0);
      for (int k = 1; k <= n_mom; ++k) {
        for (double l : lam) m[k - 1] += std::pow(l, k);
        m[k - 1] /= lam.size();
      }
      return m;
    };
    const auto pred = free_add(emp_moments(a), emp_moments(b), n_mom);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) A(i, i) = a[i];
    Eigen::VectorXd bv = Eigen::VectorXd::Map(b.data(), n);
    std::vector<std::vector<double>> mom(reps);
    Rng rng(703, 0);
    for (long r = 0; r < reps; ++r) {
      const Eigen::MatrixXcd U = haar_unitary(n, rng);
      const Eigen::MatrixXcd S = A + U * bv.asDiagonal() * U.adjoint();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
      std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
      mom[r] = emp_moments(lam);
    }
    for (int k = 0; k < n_mom; ++k) {
      std::vector<double> col(reps);
      for (long r = 0; r < reps; ++r) col[r] = mom[r][k];
      auto [m, se] = mean_stderr(col);
      // the first moment is deterministic (trace-preserving rotation): its
      // MC sigma is pure eigensolver rounding, so give 3 sigma a tiny floor
      c.require(std::abs(m - pred[k]) < 3.0 * se + 1e-10,
                "moment " + std::to_string(k + 1) + " z=" + fmt((m - pred[k]) / se));
    }
  }
  {
    // S(w) R(w S(w)) = 1 on closed-form laws
    double worst = 0.0;
    const auto mp = AnalyticLaw::mp(0.5, 1.2);
    const auto im = AnalyticLaw::imp(0.25, 1.0);
    for (const AnalyticLaw* law : {&mp, &im})
      for (double w = -0.1; w <= 0.1001; w += 0.02) {
        cplx s = s_transform(*law, w);
        worst = std::max(worst, std::abs(s * r_transform(*law, w * s) - cplx(1.0)));
      }
    c.require(worst < 1e-8, "S*R err=" + fmt(worst));
  }
  return c;
}

// 8. HCIZ: exact determinant vs Haar MC, degenerate limit, rank-one rate
Check crit8() {
  Check c;
  for (int n : {2, 3}) {
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = 0.3 * (i + 1);
      b[i] = 0.5 * i;
    }
    const double exact = hciz_exact(a, b);
    const long reps = 200000;
    std::vector<double> vals(reps);
    Rng rng(801, n);
    Eigen::VectorXcd av(n), bv(n);
    for (int i = 0; i < n; ++i) {
      av(i) = a[i];
      bv(i) = b[i];
    }
    for (long r = 0; r < reps; ++r) {
      const Eigen::MatrixXcd U = haar_unitary(n, rng);
      cplx tr = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tr += av(i) * U(i, j) * bv(j) * std::conj(U(i, j));
      vals[r] = std::exp(tr.real());
    }
    auto [m, se] = mean_stderr(vals);
    c.require(std::abs(m - exact) < 3.0 * se,
              "N=" + std::to_string(n) + " z=" + fmt((m - exact) / se));
  }
  c.require(std::abs(hciz_exact({0.0, 0.0, 0.0}, {0.0, 1.0, 2.0}) - 1.0) < 1e-6,
            "degenerate limit");
  {
    // rank-one rate: (1/N) log I(a, diag(Nt, 0...)) approaches R-integral
    const double t = 0.3;
    auto sc_cdf = [](double x) {
      return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * M_PI) + std::asin(x / 2.0) / M_PI;
    };
    auto sc_quantile = [&](double p) {
      double lo = -2.0, hi = 2.0;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (sc_cdf(mid) < p ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    const double rate = hciz_lowrank_rate(AnalyticLaw::semicircle(1.0), t);
    double prev = 1e9;
    for (int n : {3, 4, 5, 6}) {
      std::vector<double> a(n), b(n, 0.0);
      for (int i = 0; i < n; ++i) a[i] = sc_quantile((i + 0.5) / n);
      b[n - 1] = n * t;
      for (int i = 0; i + 1 < n; ++i) b[i] = 1e-3 * i;
      const double err = std::abs(std::log(hciz_exact(a, b)) / n - rate);
      c.require(err < prev, "rate error not improving at N=" + std::to_string(n));
      prev = err;
    }
  }
  return c;
}

// 9. Interpolating ensemble: GOE/GUE limits and Pandey-Mehta parameters
Check crit9() {
  Check c;
  const int n = 3;
  const double t = 1.0;
  for (int which = 0; which < 2; ++which) {
    // T -> t: GOE (|Delta|^1); T -> infinity: GUE (Delta^2)
    const double T = which == 0 ? t * (1.0 + 1e-9) : 1e12 * t;
    const double beta = which == 0 ? 1.0 : 2.0;
    double first = 0.0, worst = 0.0;
    for (int g = 0; g < 5; ++g) {
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = -1.2 + 0.9 * i + 0.13 * g;
      double lg = 0.0;
      for (int i = 0; i < n; ++i) {
        lg -= y[i] * y[i] / (2.0 * t);
        for (int j = i + 1; j < n; ++j) lg += beta * std::log(y[j] - y[i]);
      }
      const double r = interpolating_jpdf(y, t, T) / std::exp(lg);
      if (g == 0) first = r;
      worst = std::max(worst, std::abs(r / first - 1.0));
    }
    c.require(worst < 1e-3,
              std::string(which == 0 ? "GOE" : "GUE") + " ratio dev=" + fmt(worst));
  }
  {
    // the (alpha, gamma) map round-trips through the defining relations
    for (double T : {1.01, 1.4, 5.0, 40.0}) {
      auto [al, ga] = pandey_mehta_params(0.7, T);
      c.require(std::abs(ga * ga / (1.0 + al * al) - 0.7) < 1e-12 &&
                    std::abs(ga * ga / (1.0 - std::pow(al, 4)) - T) < 1e-9 * T,
                "round trip T=" + fmt(T));
    }
    auto [a0, g0] = pandey_mehta_params(0.7, 0.7);
    c.require(a0 == 0.0 && std::abs(g0 - std::sqrt(0.7)) < 1e-12, "T=t endpoint");
  }
  return c;
}

// 10. Ferrari-Spohn: bridge MC vs the asymptotic law, N=2 marginal, and
// normalization of the generalized density
Check crit10() {
  Check c;
  {
    // N=1, W=6: the criterion demands KS(MC, P_FS) < 0.03, but the *exact*
    // finite-W mid-time law (parabolic-cylinder ground state squared) is
    // already 0.0525 away from P_FS in KS at W=6 -- the asymptote has not
    // set in. No Monte Carlo of the true bridge can beat the distance of
    // the exact law it samples from, so this clause is reported honestly
    // as failed rather than tuned around.
    const auto res = ferrari_spohn_mc(1, 6.0, 1.0, 200000, 1001);
    const double ks = ks_distance(res.samples[0], AnalyticLaw::ferrari_spohn(6.0, 1.0));
    c.require(ks < 0.03,
              "KS=" + fmt(ks) + " (exact finite-W law itself has KS 0.0525 vs P_FS; "
              "MC agrees with the exact law, the asymptote is out of reach at W=6)");
  }
  {
    // N=2, W=8: lower-particle marginal p_min(x) = 2 int_x^inf R(x,y) dy
    // from the generalized determinant density, vs bridge MC
    const int n = 2;
    const double w = 8.0, t = 1.0, hi = 4.0;
    const auto res = ferrari_spohn_mc(n, w, t, 150000, 1002);
    auto p_min = [&](double x) {
      return 2.0 * gl_integrate(
                       [&](double y) {
                         return y > x ? generalized_fs_jpdf(n, w, t, {x, y}) : 0.0;
                       },
                       x, hi, 200);
    };
    const EmpiricalDensity ed = histogram(res.samples[0], 40);
    const double l1 = l1_distance(ed, p_min, 0.0, hi);
    c.require(l1 < 0.08, "N=2 marginal L1=" + fmt(l1));
    // normalization of the generalized density at N=2
    double mass = gl_integrate(
        [&](double x) {
          return gl_integrate(
              [&](double y) { return y > x ? 2.0 * generalized_fs_jpdf(n, w, t, {x, y}) : 0.0; },
              x, hi, 120);
        },
        0.0, hi, 120);
    c.require(std::abs(mass - 1.0) < 1e-4, "normalization=" + fmt(mass));
  }
  return c;
}

// 11. Kernel invariants and density approximations in their regimes
Check crit11() {
  Check c;
  struct Item {
    Kernel k;
    double lo, hi;
  };
  const auto morse = morse_bound_states(3, -1.0, 1.0);
  const std::vector<Item> items = {
      {Kernel::hermite(5, 1.0), -10.0, 10.0},
      {Kernel::morse(3, -1.0, 1.0), morse.x0 - 2.5, 30.0},
      {Kernel::linear_wall(3, 1.0, 1.0), 0.0, 15.0},
  };
  std::vector<double> gx, gw;
  detail::gauss_legendre(400, gx, gw);
  Rng rng(1101, 0);
  for (const auto& it : items) {
    // trace = N
    double tr = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double x = 0.5 * (it.lo + it.hi) + 0.5 * (it.hi - it.lo) * gx[i];
      tr += gw[i] * kernel_eval(it.k, x, x);
    }
    tr *= 0.5 * (it.hi - it.lo);
    c.require(std::abs(tr - it.k.N) < 1e-6, "trace err=" + fmt(tr - it.k.N));
    // reproducibility: int K(x,u) K(u,y) du = K(x,y)
    for (auto [fx, fy] : {std::pair{0.3, 0.7}, {0.1, 0.9}, {0.5, 0.5}}) {
      const double x = it.lo + fx * (it.hi - it.lo), y = it.lo + fy * (it.hi - it.lo);
      double conv = 0.0;
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double u = 0.5 * (it.lo + it.hi) + 0.5 * (it.hi - it.lo) * gx[i];
        conv += gw[i] * kernel_eval(it.k, x, u) * kernel_eval(it.k, u, y);
      }
      conv *= 0.5 * (it.hi - it.lo);
      c.require(std::abs(conv - kernel_eval(it.k, x, y)) < 1e-6, "reproducibility");
    }
    // positivity of sampled principal minors
    for (int trial = 0; trial < 20; ++trial) {
      const int npts = 2 + (int)(rng.uniform() * 4.0);
      std::vector<double> pts(npts);
      for (double& p : pts) p = it.lo + rng.uniform() * (it.hi - it.lo);
      Eigen::MatrixXd G(npts, npts);
      for (int i = 0; i < npts; ++i)
        for (int j = 0; j < npts; ++j) G(i, j) = kernel_eval(it.k, pts[i], pts[j]);
      c.require(G.determinant() >= -1e-10, "positivity");
    }
  }
  {
    // linear-wall density approximations at N=20 in their regimes
    const int n = 20;
    const double w = 0.25, t = 1.0;
    const Kernel k = Kernel::linear_wall(n, w, t);
    const double x_edge = std::pow(3.0 * M_PI * n, 2.0 / 3.0) * std::sqrt(t) /
                          (std::pow(2.0, 4.0 / 3.0) * std::cbrt(w));
    const double w_n = std::sqrt(t) / std::cbrt(4.0 * w);
    const double k_n = std::cbrt(6.0 * M_PI * w * n) / std::sqrt(t);
    auto rel = [&](double x, FsRegime r) {
      const double ex = density_from_kernel(k, x);
      return std::abs(fs_density_approximations(n, w, t, r, x) - ex) / ex;
    };
    for (double f : {0.3, 0.5, 0.7})
      c.require(rel(f * x_edge, FsRegime::Bulk) < 0.10, "bulk at " + fmt(f));
    // soft edge: flank of the transition region (the O(N^{-1/3}) edge shift
    // dominates the relative error beyond the edge itself)
    for (double d : {-3.0, -2.5, -2.0, -1.5})
      c.require(rel(x_edge + d * w_n, FsRegime::SoftEdge) < 0.10, "soft edge at " + fmt(d));
    for (double z : {0.5, 1.0, 1.5})
      c.require(rel(z / k_n, FsRegime::Hard) < 0.10, "hard at " + fmt(z));
  }
  {
    // Morse far-right Bessel regime at N=50
    const int n = 50;
    const double m = -3.0, sigma = 2.0;
    const Kernel k = Kernel::morse(n, m, sigma);
    for (double x : {3.0, 3.5, 4.0}) {
      const double ex = density_from_kernel(k, x);
      const double ap = morse_density_approximations(n, m, sigma, MorseRegime::FarRightBessel, x);
      c.require(std::abs(ap - ex) / ex < 0.05, "far right at x=" + fmt(x));
    }
  }
  return c;
}

// 12. Fredholm machinery: exact N=1 gap, F2 monotonicity, GUE consistency
Check crit12() {
  Check c;
  {
    // N=1 Gaussian DPP: P(no particle in (-inf, s]) = right tail mass
    const Kernel k = Kernel::hermite(1, 1.0);
    const double inf = std::numeric_limits<double>::infinity();
    for (double s : {-1.0, 0.0, 1.0}) {
      const double gap = gap_probability(k, -inf, s);
      const double tail = 0.5 * std::erfc(s / std::sqrt(2.0));
      c.require(std::abs(gap - tail) < 1e-8, "gap at s=" + fmt(s));
    }
  }
  {
    const Kernel a = Kernel::airy();
    const double inf = std::numeric_limits<double>::infinity();
    double prev = -1.0;
    std::vector<double> f2;
    for (double s : {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
      const double v = gap_probability(a, s, inf);
      c.require(v > prev, "F2 monotonicity at s=" + fmt(s));
      prev = v;
      f2.push_back(v);
    }
    c.require(std::abs(f2.back() - 1.0) < 1e-3, "F2(3) -> 1");
    // GUE N=200: empirical CDF of the rescaled top eigenvalue vs F2(0)
    const int n = 200;
    const long reps = 2000;
    EnsembleSpec g;
    g.cls = EnsembleClass::Gaussian;
    g.beta = 2.0;
    g.N = n;
    const double f2_0 = gap_probability(a, 0.0, inf);
    long below = 0;
    for (long r = 0; r < reps; ++r) {
      const double lmax = sample_dense(g, 1201, r).values.back();
      // lambda_max ~ 2 sqrt(N) + N^{-1/6} TW2
      if ((lmax - 2.0 * std::sqrt((double)n)) * std::pow((double)n, 1.0 / 6.0) < 0.0) ++below;
    }
    const double p = (double)below / reps;
    const double se = std::sqrt(f2_0 * (1.0 - f2_0) / reps);
    c.require(std::abs(p - f2_0) < 3.0 * se + 0.02,
              "GUE consistency z=" + fmt((p - f2_0) / se));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using Fn = Check (*)();
  const Fn fns[12] = {crit1, crit2, crit3, crit4,  crit5,  crit6,
                      crit7, crit8, crit9, crit10, crit11, crit12};
  const char* names[12] = {
      "Wigner surmise at N=2 (beta 1,2,4)",
      "global spectral laws (semicircle / MP / inverse MP)",
      "Dyson Brownian motion moments and Burgers flow",
      "survival exponents from Monte Carlo",
      "exponent solver closed cases and b(y)",
      "matrix Kesten stationarity",
      "free probability (tables, CLT, Haar sums, S*R)",
      "HCIZ exact formula vs Monte Carlo",
      "interpolating ensemble limits",
      "Ferrari-Spohn laws",
      "kernel invariants and density regimes",
      "Fredholm gap probabilities",
  };
  int lo = 1, hi = 12;
  if (argc > 1) {
    lo = hi = std::atoi(argv[1]);
    if (lo < 1 || lo > 12) {
      std::fprintf(stderr, "usage: acceptance [1..12]\n");
      return 2;
    }
  }
  bool all_ok = true;
  for (int i = lo; i <= hi; ++i) {
    Check c;
    try {
      c = fns[i - 1]();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d [%s] %s%s%s\n", i, c.ok ? "PASS" : "FAIL", names[i - 1],
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    all_ok = all_ok && c.ok;
  }
  return all_ok ? 0 : 1;
}
