// Batch-experiment driver: named presets reproducing the library's reference
// figures at desk scale, JSON experiment configs with 1:1 flag overrides,
// deterministic seeding, CSV/JSON emission with a config-hash manifest, and
// optional gnuplot scripts.
//
// Exit codes: 0 success, 1 config/validation error, 2 numerical failure.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/fermion_dpp.hpp"
#include "rmtlab/freeprob.hpp"
#include "rmtlab/processes.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/specfn.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/walkers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace rmtlab;

namespace {

// ---------------------------------------------------------------- utilities

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int default_threads() {
  if (const char* e = std::getenv("RMT_LAB_THREADS")) {
    const int t = std::atoi(e);
    if (t > 0) return t;
  }
  return 1;
}

// deterministic parallel map: result i depends only on i
void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  threads = (int)std::max<long>(1, std::min<long>(threads, n));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (long i = t; i < n; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct CsvWriter {
  std::ofstream out;
  CsvWriter(const fs::path& p, const std::string& experiment,
            const std::string& hash, const std::vector<std::string>& cols) {
    out.open(p);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    out << "# rmtlab experiment: " << experiment << "\n";
    out << "# config-hash: " << hash << "\n# columns: ";
    for (std::size_t i = 0; i < cols.size(); ++i)
      out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  }
  void row(const std::vector<double>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i)
      out << fmt17(vs[i]) << (i + 1 < vs.size() ? "," : "\n");
  }
};

std::string revision_string() {
  std::ifstream head(".git/HEAD");
  std::string line;
  if (!head || !std::getline(head, line)) return "unknown";
  if (line.rfind("ref: ", 0) == 0) {
    std::ifstream ref(".git/" + line.substr(5));
    std::string sha;
    if (ref && std::getline(ref, sha)) return sha;
    return line.substr(5);
  }
  return line;
}

struct RunContext {
  json cfg;
  std::string hash;
  fs::path out_dir;
  json summary;  // merged into the manifest

  fs::path csv_path(const std::string& stem) const {
    return out_dir / (stem + ".csv");
  }
};

double cfgd(const json& c, const std::string& k, double def) {
  return c.contains(k) ? c.at(k).get<double>() : def;
}
long cfgl(const json& c, const std::string& k, long def) {
  return c.contains(k) ? c.at(k).get<long>() : def;
}
std::string cfgs(const json& c, const std::string& k, const std::string& def) {
  return c.contains(k) ? c.at(k).get<std::string>() : def;
}

void emit_gnuplot(const RunContext& ctx, const std::string& stem,
                  const std::string& title, const std::string& plot_expr) {
  std::ofstream g(ctx.out_dir / (stem + ".gnuplot"));
  g << "set datafile separator ','\nset title '" << title << "'\n"
    << "set key top right\nplot " << plot_expr << "\n";
}

// histogram CSV with one analytic reference column per law
void write_hist_csv(RunContext& ctx, const std::string& stem,
                    const EmpiricalDensity& ed,
                    const std::vector<std::pair<std::string,
                        std::function<double(double)>>>& refs) {
  std::vector<std::string> cols = {"bin_center", "empirical_density"};
  for (const auto& r : refs) cols.push_back(r.first);
  CsvWriter csv(ctx.csv_path(stem), ctx.cfg.at("experiment"), ctx.hash, cols);
  for (std::size_t b = 0; b < ed.masses.size(); ++b) {
    const double lo = ed.bin_edges[b], hi = ed.bin_edges[b + 1];
    const double c = 0.5 * (lo + hi);
    std::vector<double> row = {c, ed.masses[b] / (hi - lo)};
    for (const auto& r : refs) row.push_back(r.second(c));
    csv.row(row);
  }
}

// ------------------------------------------------------------- experiments

void run_surmise(RunContext& ctx) {
  const double beta = cfgd(ctx.cfg, "beta", 2.0);
  const long n_samples = cfgl(ctx.cfg, "samples", 100000);
  const std::uint64_t seed = (std::uint64_t)cfgl(ctx.cfg, "seed", 1);
  const int threads = (int)cfgl(ctx.cfg, "threads", default_threads());
  EnsembleSpec spec;
  spec.cls = EnsembleClass::BetaHermiteTridiag;
  spec.beta = beta;
  spec.N = 2;
  std::vector<Spectrum> sams((std::size_t)n_samples);
  parallel_for(n_samples, threads,
               [&](long i) { sams[i] = sample_tridiagonal(spec, seed, i); });
  const std::vector<double> sp = spacing_samples(sams, true);
  const AnalyticLaw law = AnalyticLaw::surmise(beta);
  const double ks = ks_distance(sp, law);
  write_hist_csv(ctx, "surmise", histogram(sp, (int)cfgl(ctx.cfg, "bins", 60)),
                 {{"surmise_pdf", [&](double s) { return density(law, s); }}});
  ctx.summary["ks_distance"] = ks;
  std::cout << "surmise beta=" << beta << " KS=" << ks << "\n";
}

void run_esd(RunContext& ctx) {
  const std::string cls = cfgs(ctx.cfg, "class", "gaussian");
  const double beta = cfgd(ctx.cfg, "beta", 2.0);
  const int n = (int)cfgl(ctx.cfg, "n", 500);
  const long n_samples = cfgl(ctx.cfg, "samples", 60);
  const double sigma = cfgd(ctx.cfg, "sigma", 1.0);
  const double q = cfgd(ctx.cfg, "q", 0.25);
  const std::uint64_t seed = (std::uint64_t)cfgl(ctx.cfg, "seed", 1);
  const int threads = (int)cfgl(ctx.cfg, "threads", default_threads());

  EnsembleSpec spec;
  spec.beta = beta;
  spec.N = n;
  spec.sigma = sigma;
  double rescale = 1.0;
  AnalyticLaw law = AnalyticLaw::semicircle(sigma);
  if (cls == "gaussian") {
    spec.cls = EnsembleClass::Gaussian;
    rescale = 1.0 / std::sqrt((double)n);
  } else if (cls == "wishart") {
    spec.cls = EnsembleClass::Wishart;
    spec.T = std::round(n / q);
    rescale = 1.0 / spec.T;
    law = AnalyticLaw::mp(n / spec.T, sigma);
  } else if (cls == "inverse-wishart") {
    spec.cls = EnsembleClass::InverseWishart;
    spec.T = std::round(n / q);
    // the inverse-MP law is normalized to unit mean: lambda * T * (1 - q)
    rescale = spec.T * (1.0 - n / spec.T);
    law = AnalyticLaw::imp(n / spec.T, sigma);
  } else {
    throw std::invalid_argument("esd: unknown class " + cls);
  }
  const std::string compare = cfgs(ctx.cfg, "compare", "auto");
  std::vector<Spectrum> sams((std::size_t)n_samples);
  parallel_for(n_samples, threads,
               [&](long i) { sams[i] = sample_dense(spec, seed, i); });
  const EmpiricalDensity ed = esd(sams, rescale, (int)cfgl(ctx.cfg, "bins", 80));
  write_hist_csv(ctx, "esd", ed,
                 {{"analytic_density",
                   [&](double x) { return density(law, x); }}});
  if (compare != "none") {
    const double l1 = l1_distance(ed, law);
    ctx.summary["l1_distance"] = l1;
    std::cout << "esd class=" << cls << " L1=" << l1 << "\n";
  }
}

void run_dbm(RunContext& ctx) {
  const int n = (int)cfgl(ctx.cfg, "n", 10);
  const double t = cfgd(ctx.cfg, "t", 1.0);
  const long paths = cfgl(ctx.cfg, "paths", 400);
  const double dt = cfgd(ctx.cfg, "dt", 1e-3);
  const std::uint64_t seed = (std::uint64_t)cfgl(ctx.cfg, "seed", 2);
  const int threads = (int)cfgl(ctx.cfg, "threads", default_threads());
  const double sigma0 = 0.05;

  ProcessSpec sp;
  sp.kind = ProcessKind::DBM;
  sp.beta = 2.0;
  sp.N = n;

  EnsembleSpec g0;
  g0.cls = EnsembleClass::Gaussian;
  g0.beta = 2.0;
  g0.N = n;
  g0.sigma = sigma0;
  EnsembleSpec gt = g0;
  gt.sigma = std::sqrt(sigma0 * sigma0 + t);

  const int n_mom = 4;
  std::vector<std::vector<double>> dbm_mom((std::size_t)paths),
      gue_mom((std::size_t)paths);
  parallel_for(paths, threads, [&](long p) {
    Rng rng(seed, (std::uint64_t)p);
    ProcessState st;
    st.lam = sample_dense(g0, seed + 1, (std::uint64_t)p).values;
    SdeConfig cfg;
    cfg.dt = dt;
    while (st.t < t - 1e-12) sde_step(sp, cfg, st, rng);
    std::vector<double> md(n_mom, 0.0), mg(n_mom, 0.0);
    const std::vector<double> gv = sample_dense(gt, seed + 2, (std::uint64_t)p).values;
    for (int k = 1; k <= n_mom; ++k) {
      for (double l : st.lam) md[k - 1] += std::pow(l, k);
      for (double l : gv) mg[k - 1] += std::pow(l, k);
    }
    dbm_mom[p] = md;
    gue_mom[p] = mg;
  });
  CsvWriter csv(ctx.csv_path("dbm_moments"), "dbm", ctx.hash,
                {"k", "dbm_mean", "gue_mean", "combined_stderr", "z"});
  double max_z = 0.0;
  for (int k = 0; k < n_mom; ++k) {
    double m1 = 0, m2 = 0, v1 = 0, v2 = 0;
    for (long p = 0; p < paths; ++p) {
      m1 += dbm_mom[p][k];
      m2 += gue_mom[p][k];
    }
    m1 /= paths;
    m2 /= paths;
    for (long p = 0; p < paths; ++p) {
      v1 += (dbm_mom[p][k] - m1) * (dbm_mom[p][k] - m1);
      v2 += (gue_mom[p][k] - m2) * (gue_mom[p][k] - m2);
    }
    const double se = std::sqrt((v1 + v2) / ((double)paths * (paths - 1.0)));
    const double z = (m1 - m2) / se;
    max_z = std::max(max_z, std::abs(z));
    csv.row({(double)k + 1, m1, m2, se, z});
  }
  ctx.summary["max_abs_z"] = max_z;
  std::cout << "dbm moments max |z| = " << max_z << "\n";
}

void run_exponent(RunContext& ctx) {
  const int n = (int)cfgl(ctx.cfg, "n", 1);
  const std::string wall = cfgs(ctx.cfg, "wall", "sqrt");
  const double w = cfgd(ctx.cfg, "w", 1.0);
  const long paths = cfgl(ctx.cfg, "mc-paths", 200000);
  const std::uint64_t seed = (std::uint64_t)cfgl(ctx.cfg, "seed", 3);

  WalkerConfig wc;
  wc.N = n;
  wc.t0 = 1.0;
  wc.t_end = cfgd(ctx.cfg, "t-end", 2e4);
  wc.dt = cfgd(ctx.cfg, "dt", 0.0);  // 0: heuristic below
  if (wall == "sqrt")
    wc.boundary = Boundary::sqrt_w(w);
  else if (wall == "fixed")
    wc.boundary = Boundary::fixed(w);
  else if (wall == "none")
    wc.boundary = Boundary::none();
  else
    throw std::invalid_argument("exponent: unknown wall " + wall);
  for (int i = 0; i < n; ++i)
    wc.x0.push_back(wc.boundary.at(wc.t0) -
                    (std::isfinite(wc.boundary.at(wc.t0)) ? 0.6 * (n - i) : (double)(i - n)));
  if (wc.dt <= 0.0) wc.dt = 0.02;

  const auto curve = survival_mc(wc, paths, seed);
  const double fit = fit_survival_exponent(curve);
  double analytic = std::numeric_limits<double>::quiet_NaN();
  if (wall == "sqrt") analytic = survival_exponent(n, w);
  if (wall == "fixed") analytic = n * n / 2.0;
  if (wall == "none") analytic = n * (n - 1) / 4.0;

  CsvWriter csv(ctx.csv_path("survival"), "exponent", ctx.hash,
                {"t", "S", "stderr"});
  for (const auto& p : curve) csv.row({p.t, p.s, p.stderr_});

  // rough CI from half-curve refits
  const std::vector<SurvivalPoint> head(curve.begin(),
                                        curve.begin() + curve.size() / 2);
  const std::vector<SurvivalPoint> tail(curve.begin() + curve.size() / 2,
                                        curve.end());
  const double ci = std::abs(fit_survival_exponent(head) -
                             fit_survival_exponent(tail));
  json rep = {{"N", n},       {"W", wall == "sqrt" ? w : 0.0},
              {"wall", wall}, {"beta_analytic", analytic},
              {"beta_mc", fit}, {"ci", ci}};
  std::ofstream(ctx.out_dir / "exponent.json") << rep.dump(2) << "\n";
  ctx.summary["beta_mc"] = fit;
  ctx.summary["beta_analytic"] = analytic;
  std::cout << "exponent N=" << n << " wall=" << wall
            << " beta_mc=" << fit << " analytic=" << analytic << "\n";
}

void run_kesten(RunContext& ctx) {
  const std::string mode = cfgs(ctx.cfg, "mode", "discrete");
  const int n = (int)cfgl(ctx.cfg, "n", 200);
  const double eps = cfgd(ctx.cfg, "eps", 0.01);
  const long steps = cfgl(ctx.cfg, "steps", 4000);
  const double m = cfgd(ctx.cfg, "m", -1.0);
  const double sigma_tilde = cfgd(ctx.cfg, "sigma-tilde", 1.0);
  const std::uint64_t seed = (std::uint64_t)cfgl(ctx.cfg, "seed", 4);
  if (mode != "discrete")
    throw std::invalid_argument("kesten: only discrete mode is exposed");

  const long chains = cfgl(ctx.cfg, "chains", 8);
  const long snapshots = cfgl(ctx.cfg, "snapshots", 20);
  const long thin = cfgl(ctx.cfg, "thin", 100);  // ~ relaxation time 1/|m| eps
  const int threads = (int)cfgl(ctx.cfg, "threads", default_threads());

  const double sigma = sigma_tilde / std::sqrt((double)n);
  std::vector<Spectrum> sams((std::size_t)(chains * snapshots));
  parallel_for(chains, threads, [&](long c) {
    Rng rng(seed, (std::uint64_t)c);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n) * eps;
    for (long s = 0; s < steps; ++s) Z = kesten_discrete_step(Z, m, sigma, eps, rng);
    for (long k = 0; k < snapshots; ++k) {
      for (long s = 0; s < thin; ++s) Z = kesten_discrete_step(Z, m, sigma, eps, rng);
      sams[c * snapshots + k].values = detail::sym_eigs(Z);
    }
  });
  const EmpiricalDensity ed = esd(sams, 1.0, (int)cfgl(ctx.cfg, "bins", 60));
  const double q = 1.0 / (1.0 - 2.0 * m / (sigma_tilde * sigma_tilde));
  const AnalyticLaw law = AnalyticLaw::imp(q, 1.0);
  write_hist_csv(ctx, "kesten_esd", ed,
                 {{"imp_density", [&](double x) { return density(law, x); }}});
  const double l1 = l1_distance(ed, law);
  ctx.summary["l1_distance"] = l1;
  std::cout << "kesten discrete N=" << n << " L1 vs IMP = " << l1 << "\n";
}

void run_beta_table(RunContext& ctx) {
  const int n = (int)cfgl(ctx.cfg, "n", 3);
  const double w_min = cfgd(ctx.cfg, "w-min", 0.0);
  const double w_max = cfgd(ctx.cfg, "w-max", 4.0);
  const long w_steps = cfgl(ctx.cfg, "w-steps", 40);
  CsvWriter csv(ctx.csv_path("beta_table"), "beta-table", ctx.hash,
                {"W", "beta"});
  for (long i = 0; i <= w_steps; ++i) {
    const double w = w_min + (w_max - w_min) * i / (double)w_steps;
    csv.row({w, survival_exponent(n, w)});
  }
  const auto c = small_w_expansion(n);
  ctx.summary["small_w_c0"] = c[0];
  ctx.summary["small_w_c1"] = c[1];
  ctx.summary["small_w_c2"] = c[2];
  std::cout << "beta(N=" << n << ", 0) = " << survival_exponent(n, 0.0) << "\n";
}

void run_freeprob(RunContext& ctx) {
  const int order = (int)cfgl(ctx.cfg, "order", 8);
  const double sigma = cfgd(ctx.cfg, "sigma", 1.0);
  // free_add(SC(s), SC(s)) must be SC(sqrt(2) s): compare even moments
  std::vector<double> m_sc(order), m_sc2(order);
  for (int k = 1; k <= order; ++k) {
    if (k % 2) {
      m_sc[k - 1] = m_sc2[k - 1] = 0.0;
    } else {
      const double cat = catalan_number(k / 2);
      m_sc[k - 1] = cat * std::pow(sigma, k);
      m_sc2[k - 1] = cat * std::pow(std::sqrt(2.0) * sigma, k);
    }
  }
  const std::vector<double> madd = free_add(m_sc, m_sc, order);
  CsvWriter csv(ctx.csv_path("free_add"), "freeprob", ctx.hash,
                {"n", "moment_free_add", "moment_sc_sqrt2"});
  double max_err = 0.0;
  for (int k = 1; k <= order; ++k) {
    csv.row({(double)k, madd[k - 1], m_sc2[k - 1]});
    max_err = std::max(max_err, std::abs(madd[k - 1] - m_sc2[k - 1]));
  }
  ctx.summary["max_moment_error"] = max_err;
  std::cout << "free CLT max moment error = " << max_err << "\n";
}

void run_hciz(RunContext& ctx) {
  const int n = (int)cfgl(ctx.cfg, "n", 3);
  const long samples = cfgl(ctx.cfg, "samples", 200000);
  const std::uint64_t seed = (std::uint64_t)cfgl(ctx.cfg, "seed", 5);
  const int threads = (int)cfgl(ctx.cfg, "threads", default_threads());
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = 0.3 * (i + 1);
    b[i] = 0.5 * i;
  }
  const double exact = hciz_exact(a, b);
  std::vector<double> vals((std::size_t)samples);
  parallel_for(samples, threads, [&](long i) {
    Rng rng(seed, (std::uint64_t)i);
    const Eigen::MatrixXcd U = haar_unitary(n, rng);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n),
                     B = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      A(j, j) = a[j];
      B(j, j) = b[j];
    }
    vals[i] = std::exp((A * U * B * U.adjoint()).trace().real());
  });
  double mean = 0, var = 0;
  for (double v : vals) mean += v;
  mean /= samples;
  for (double v : vals) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / ((double)samples * (samples - 1.0)));
  CsvWriter csv(ctx.csv_path("hciz"), "hciz", ctx.hash,
                {"N", "exact", "mc_mean", "mc_stderr", "z"});
  csv.row({(double)n, exact, mean, se, (mean - exact) / se});
  ctx.summary["z"] = (mean - exact) / se;
  std::cout << "hciz N=" << n << " exact=" << exact << " mc=" << mean
            << " +- " << se << "\n";
}

void run_interp(RunContext& ctx) {
  const int n = (int)cfgl(ctx.cfg, "n", 3);
  const double t = cfgd(ctx.cfg, "t", 1.0);
  const double ratio = cfgd(ctx.cfg, "T-over-t", 2000.0);
  const double T = ratio * t;
  CsvWriter csv(ctx.csv_path("interp"), "interp", ctx.hash,
                {"grid_index", "jpdf", "gue_ratio"});
  // GUE-limit check: P / (Delta(y) prod e^{-y^2/2t}) constant on a grid
  double first = 0.0, max_dev = 0.0;
  for (int gidx = 0; gidx < 5; ++gidx) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = -1.2 + 0.9 * i + 0.13 * gidx;
    const double p = interpolating_jpdf(y, t, T);
    double lg = 0.0;
    for (int i = 0; i < n; ++i) {
      lg -= y[i] * y[i] / (2.0 * t);
      for (int j = i + 1; j < n; ++j) lg += 2.0 * std::log(std::abs(y[j] - y[i]));
    }
    const double r = p / std::exp(lg);
    if (gidx == 0) first = r;
    max_dev = std::max(max_dev, std::abs(r / first - 1.0));
    csv.row({(double)gidx, p, r});
  }
  ctx.summary["gue_ratio_max_dev"] = max_dev;
  std::cout << "interpolation GUE-ratio max deviation = " << max_dev << "\n";
}

void run_ferrari_spohn(RunContext& ctx) {
  const int n = (int)cfgl(ctx.cfg, "n", 1);
  const double w = cfgd(ctx.cfg, "w", 6.0);
  const double t = cfgd(ctx.cfg, "t", 1.0);
  const long paths = cfgl(ctx.cfg, "paths", 200000);
  const std::uint64_t seed = (std::uint64_t)cfgl(ctx.cfg, "seed", 6);
  const auto res = ferrari_spohn_mc(n, w, t, paths, seed);
  const AnalyticLaw law = AnalyticLaw::ferrari_spohn(w, t);
  write_hist_csv(ctx, "ferrari_spohn", res.density,
                 {{"p_fs", [&](double x) { return density(law, x); }}});
  if (n == 1) {
    const double ks = ks_distance(res.samples[0], law);
    ctx.summary["ks_vs_fs"] = ks;
    std::cout << "ferrari-spohn N=1 KS vs P_FS = " << ks
              << " (survivors " << res.survivors << ")\n";
  } else {
    std::cout << "ferrari-spohn N=" << n << " survivors " << res.survivors
              << "\n";
  }
  ctx.summary["survivors"] = res.survivors;
}

void run_fermion_density(RunContext& ctx) {
  const std::string kind = cfgs(ctx.cfg, "kernel", "linear-wall");
  const int n = (int)cfgl(ctx.cfg, "n", 20);
  if (kind == "linear-wall") {
    const double w = cfgd(ctx.cfg, "w", 0.25);
    const double t = cfgd(ctx.cfg, "t", 1.0);
    const Kernel k = Kernel::linear_wall(n, w, t);
    const double x_edge = std::pow(3.0 * M_PI * n, 2.0 / 3.0) * std::sqrt(t) /
                          (std::pow(2.0, 4.0 / 3.0) * std::cbrt(w));
    CsvWriter csv(ctx.csv_path("fermion_density"), "fermion-density",
                  ctx.hash, {"x", "exact", "bulk", "soft_edge", "hard"});
    for (int i = 0; i <= 400; ++i) {
      const double x = (x_edge + 4.0) * i / 400.0;
      csv.row({x, density_from_kernel(k, x),
               fs_density_approximations(n, w, t, FsRegime::Bulk, x),
               fs_density_approximations(n, w, t, FsRegime::SoftEdge, x),
               fs_density_approximations(n, w, t, FsRegime::Hard, x)});
    }
  } else if (kind == "morse") {
    const double m = cfgd(ctx.cfg, "m", -3.0);
    const double sigma = cfgd(ctx.cfg, "sigma", 2.0);
    const Kernel k = Kernel::morse(n, m, sigma);
    CsvWriter csv(ctx.csv_path("fermion_density"), "fermion-density",
                  ctx.hash, {"x", "exact", "bulk", "left_edge", "far_right"});
    for (int i = 0; i <= 400; ++i) {
      const double x = -6.0 + 11.0 * i / 400.0;
      csv.row({x, density_from_kernel(k, x),
               morse_density_approximations(n, m, sigma, MorseRegime::Bulk, x),
               morse_density_approximations(n, m, sigma,
                                            MorseRegime::LeftEdgeAiry, x),
               morse_density_approximations(n, m, sigma,
                                            MorseRegime::FarRightBessel, x)});
    }
  } else {
    throw std::invalid_argument("fermion-density: unknown kernel " + kind);
  }
  std::cout << "fermion-density kernel=" << kind << " written\n";
}

void run_tracy_widom(RunContext& ctx) {
  const double lo = cfgd(ctx.cfg, "x-min", -5.0);
  const double hi = cfgd(ctx.cfg, "x-max", 3.0);
  const long steps = cfgl(ctx.cfg, "x-steps", 80);
  const Kernel a = Kernel::airy();
  const double inf = std::numeric_limits<double>::infinity();
  CsvWriter csv(ctx.csv_path("tracy_widom"), "tracy-widom", ctx.hash,
                {"x", "F2"});
  double last = 0.0;
  for (long i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / (double)steps;
    last = gap_probability(a, x, inf);
    csv.row({x, last});
  }
  ctx.summary["F2_at_max"] = last;
  std::cout << "tracy-widom F2(" << hi << ") = " << last << "\n";
}

// ------------------------------------------------------------ dispatch

using ExperimentFn = void (*)(RunContext&);

const std::map<std::string, ExperimentFn>& experiment_table() {
  static const std::map<std::string, ExperimentFn> tbl = {
      {"surmise", run_surmise},       {"esd", run_esd},
      {"dbm", run_dbm},               {"exponent", run_exponent},
      {"kesten", run_kesten},         {"beta-table", run_beta_table},
      {"freeprob", run_freeprob},     {"hciz", run_hciz},
      {"interp", run_interp},         {"ferrari-spohn", run_ferrari_spohn},
      {"fermion-density", run_fermion_density},
      {"tracy-widom", run_tracy_widom},
  };
  return tbl;
}

struct Preset {
  std::string name;
  std::string description;
  json cfg;
};

std::vector<Preset> preset_catalog() {
  return {
      {"fig-wigner-surmise", "N=2 spacing histogram vs the Wigner surmise",
       {{"experiment", "surmise"}, {"beta", 2.0}, {"samples", 100000}}},
      {"fig-semicircle", "GUE N=500 rescaled spectrum vs the semicircle",
       {{"experiment", "esd"}, {"class", "gaussian"}, {"beta", 2.0},
        {"n", 500}, {"samples", 60}, {"compare", "semicircle"}}},
      {"fig-marchenko-pastur", "Wishart q=0.25 spectrum vs Marchenko-Pastur",
       {{"experiment", "esd"}, {"class", "wishart"}, {"beta", 2.0},
        {"n", 250}, {"q", 0.25}, {"samples", 60}, {"compare", "mp"}}},
      {"fig-inverse-mp", "inverse-Wishart spectrum vs the inverse MP law",
       {{"experiment", "esd"}, {"class", "inverse-wishart"}, {"beta", 2.0},
        {"n", 250}, {"q", 0.25}, {"samples", 60}, {"compare", "imp"}}},
      {"fig-dbm-moments", "DBM endpoint power sums vs direct GUE sampling",
       {{"experiment", "dbm"}, {"n", 10}, {"t", 1.0}, {"paths", 400}}},
      {"fig-survival-fixed", "single walker over a fixed wall: exponent 1/2",
       {{"experiment", "exponent"}, {"n", 1}, {"wall", "fixed"}, {"w", 0.0},
        {"mc-paths", 200000}}},
      {"fig-survival-sqrt", "walker under a sqrt(t) boundary: analytic root",
       {{"experiment", "exponent"}, {"n", 1}, {"wall", "sqrt"}, {"w", 1.0},
        {"mc-paths", 300000}}},
      {"fig-beta-exponent", "survival exponent beta(N, W) over a W grid",
       {{"experiment", "beta-table"}, {"n", 3}}},
      {"fig-kesten-imp", "discrete matrix Kesten fixed point vs inverse MP",
       {{"experiment", "kesten"}, {"mode", "discrete"}, {"n", 200},
        {"eps", 0.01}, {"steps", 4000}, {"m", -1.0}, {"sigma-tilde", 1.0}}},
      {"fig-free-clt", "free addition of two semicircles (free CLT)",
       {{"experiment", "freeprob"}, {"order", 8}}},
      {"fig-hciz", "exact HCIZ determinant formula vs Haar Monte Carlo",
       {{"experiment", "hciz"}, {"n", 3}, {"samples", 200000}}},
      {"fig-interpolation", "partial non-crossing JPDF in the GUE limit",
       {{"experiment", "interp"}, {"n", 3}, {"T-over-t", 2000.0}}},
      {"fig-ferrari-spohn", "constrained bridge mid-time law vs Ferrari-Spohn",
       {{"experiment", "ferrari-spohn"}, {"n", 1}, {"w", 6.0}, {"t", 1.0},
        {"paths", 200000}}},
      {"fig-fermion-density", "linear-wall fermion density and approximations",
       {{"experiment", "fermion-density"}, {"kernel", "linear-wall"},
        {"n", 20}, {"w", 0.25}, {"t", 1.0}}},
      {"fig-tracy-widom", "GUE Tracy-Widom distribution from the Airy kernel",
       {{"experiment", "tracy-widom"}}},
  };
}

int run_config(json cfg) {
  if (!cfg.contains("experiment"))
    throw std::invalid_argument("config: missing 'experiment'");
  const std::string exp = cfg.at("experiment");
  const auto& tbl = experiment_table();
  const auto it = tbl.find(exp);
  if (it == tbl.end())
    throw std::invalid_argument("config: unknown experiment '" + exp + "'");
  if (!cfg.contains("seed")) cfg["seed"] = 1;
  if (!cfg.contains("threads")) cfg["threads"] = default_threads();

  RunContext ctx;
  ctx.cfg = cfg;
  json canon = cfg;  // results do not depend on worker count or target dir
  canon.erase("threads");
  canon.erase("out");
  ctx.hash = fnv1a_hex(canon.dump());
  ctx.out_dir = cfgs(cfg, "out", "out");
  fs::create_directories(ctx.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  it->second(ctx);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json manifest = {{"config", cfg},
                   {"config_hash", ctx.hash},
                   {"revision", revision_string()},
                   {"wall_time_s", wall},
                   {"generated_at", (long)std::time(nullptr)},
                   {"summary", ctx.summary}};
  std::ofstream(ctx.out_dir / "manifest.json") << manifest.dump(2) << "\n";
  if (cfg.value("emit_plots", false)) {
    // generic script: second column of each emitted CSV against the first
    std::string expr;
    for (const auto& ent : fs::directory_iterator(ctx.out_dir))
      if (ent.path().extension() == ".csv") {
        if (!expr.empty()) expr += ", ";
        expr += "'" + ent.path().filename().string() + "' using 1:2 with lines title '" +
                ent.path().stem().string() + "'";
      }
    if (!expr.empty()) emit_gnuplot(ctx, exp, exp, expr);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmtlab: random-matrix laboratory experiment driver"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list experiment presets");

  // generic runner: preset and/or config file, plus key=value overrides
  auto* run = app.add_subcommand("run", "run a preset or a JSON config");
  std::string preset_name, config_file, out_dir = "out";
  std::vector<std::string> overrides;
  long seed_flag = -1;
  run->add_option("--preset", preset_name, "preset name (see 'list')");
  run->add_option("--config", config_file, "JSON config file");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed_flag, "RNG seed override");
  run->add_option("--set", overrides,
                  "key=value config overrides (repeatable)");

  // convenience subcommands mirroring the config keys 1:1
  auto* sample = app.add_subcommand("sample", "sample an ensemble spectrum");
  json scfg = {{"experiment", "esd"}};
  {
    static std::string cls = "gaussian", rescale = "sqrtN", compare = "auto";
    static double beta = 2.0, q = 0.25, sigma = 1.0;
    static long n = 500, samples = 60, seed = 1;
    sample->add_option("--class", cls);
    sample->add_option("--beta", beta);
    sample->add_option("--n", n);
    sample->add_option("--samples", samples);
    sample->add_option("--q", q);
    sample->add_option("--sigma", sigma);
    sample->add_option("--rescale", rescale);
    sample->add_option("--compare", compare);
    sample->add_option("--seed", seed);
    sample->callback([&, sample] {
      scfg["class"] = cls;
      scfg["beta"] = beta;
      scfg["n"] = n;
      scfg["samples"] = samples;
      scfg["q"] = q;
      scfg["sigma"] = sigma;
      scfg["compare"] = compare;
      scfg["seed"] = seed;
    });
  }

  auto* exponent = app.add_subcommand("exponent", "survival exponent MC");
  json ecfg = {{"experiment", "exponent"}};
  {
    static long n = 3, paths = 200000, seed = 3;
    static double w = 0.5;
    static std::string wall = "sqrt";
    exponent->add_option("--n", n);
    exponent->add_option("--w", w);
    exponent->add_option("--wall", wall);
    exponent->add_option("--mc-paths", paths);
    exponent->add_option("--seed", seed);
    exponent->callback([&, exponent] {
      ecfg["n"] = n;
      ecfg["w"] = w;
      ecfg["wall"] = wall;
      ecfg["mc-paths"] = paths;
      ecfg["seed"] = seed;
    });
  }

  auto* kesten = app.add_subcommand("kesten", "matrix Kesten recursion");
  json kcfg = {{"experiment", "kesten"}};
  {
    static std::string mode = "discrete", compare = "imp";
    static long n = 200, steps = 4000, seed = 4;
    static double eps = 0.01, m = -1.0, sigma_tilde = 1.0;
    kesten->add_option("--mode", mode);
    kesten->add_option("--n", n);
    kesten->add_option("--eps", eps);
    kesten->add_option("--steps", steps);
    kesten->add_option("--m", m);
    kesten->add_option("--sigma-tilde", sigma_tilde);
    kesten->add_option("--compare", compare);
    kesten->add_option("--seed", seed);
    kesten->callback([&, kesten] {
      kcfg["mode"] = mode;
      kcfg["n"] = n;
      kcfg["eps"] = eps;
      kcfg["steps"] = steps;
      kcfg["m"] = m;
      kcfg["sigma-tilde"] = sigma_tilde;
      kcfg["compare"] = compare;
      kcfg["seed"] = seed;
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      const auto cat = preset_catalog();
      std::cout << cat.size() << " presets:\n";
      for (const auto& p : cat)
        std::cout << "  " << p.name << "  --  " << p.description << "\n";
      return 0;
    }
    json cfg;
    if (run->parsed()) {
      if (!preset_name.empty()) {
        const auto cat = preset_catalog();
        const auto it =
            std::find_if(cat.begin(), cat.end(),
                         [&](const Preset& p) { return p.name == preset_name; });
        if (it == cat.end())
          throw std::invalid_argument("unknown preset: " + preset_name);
        cfg = it->cfg;
      }
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw std::invalid_argument("cannot read " + config_file);
        json file_cfg = json::parse(in);
        for (auto& [k, v] : file_cfg.items()) cfg[k] = v;  // file over preset
      }
      for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--set expects key=value: " + ov);
        const std::string key = ov.substr(0, eq), val = ov.substr(eq + 1);
        try {
          cfg[key] = json::parse(val);  // numbers / booleans
        } catch (...) {
          cfg[key] = val;  // plain strings
        }
      }
      if (seed_flag >= 0) cfg["seed"] = seed_flag;
      cfg["out"] = out_dir;
    } else if (sample->parsed()) {
      cfg = scfg;
    } else if (exponent->parsed()) {
      cfg = ecfg;
    } else if (kesten->parsed()) {
      cfg = kcfg;
    }
    return run_config(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
