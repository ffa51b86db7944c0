// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pcd/pcd.hpp"

using namespace pcd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Kolmogorov limiting distribution P(sqrt(m) D > lambda) with the Stephens small-sample correction.
double ks_pvalue(double d, std::size_t m) {
  const double rm = std::sqrt(static_cast<double>(m));
  const double lambda = (rm + 0.12 + 0.11 / rm) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

ExperimentResult simulate(Hypothesis h, std::size_t n, std::size_t reps, std::vector<RFactor> grid,
                          std::uint64_t seed, bool keep = false) {
  ExperimentConfig cfg;
  cfg.hypothesis = h;
  cfg.n = n;
  cfg.reps = reps;
  cfg.r_grid = std::move(grid);
  cfg.seed = seed;
  cfg.workers = workers();
  cfg.keep_samples = keep;
  return run_experiment(cfg);
}

// ------------------------------------------------------------------ 1

Outcome closed_form_anchors() {
  Outcome o;
  auto exact = [&](double got, double want, const std::string& name) {
    o.require(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)), name + "=" + fmt(got, 17));
  };
  exact(mu_null(RFactor(1.0)), 37.0 / 216, "mu(1)");
  exact(mu_null(RFactor(2.0)), 5.0 / 8, "mu(2)");
  exact(nu_null(RFactor(2.0)), 25.0 / 192, "nu(2)");
  exact(mu_null(RFactor::infinity()), 1.0, "mu(inf)");
  exact(nu_null(RFactor::infinity()), 0.0, "nu(inf)");
  for (double b : {4.0 / 3, 1.5, 2.0}) {
    const RFactor left(std::nextafter(b, 0.0)), right(b);
    o.require(std::abs(mu_null(left) - mu_null(right)) <= 1e-9, "mu continuity at " + fmt(b));
    o.require(std::abs(nu_null(left) - nu_null(right)) <= 1e-9, "nu continuity at " + fmt(b));
  }
  const double ps = pae(RFactor(1.0), AltKind::segregation);
  const double pa = pae(RFactor(1.0), AltKind::association);
  o.detail << "pae_seg(1)=" << fmt(ps, 8) << " (target 160/7=" << fmt(160.0 / 7, 8) << "), pae_assoc(1)=" << fmt(pa, 8)
           << " (target 174240/17=" << fmt(174240.0 / 17, 9) << ")";
  o.require(rel(ps, 160.0 / 7) <= 1e-4, "pae_seg(1) vs 160/7");
  o.require(rel(pa, 174240.0 / 17) <= 1e-4, "pae_assoc(1) vs 174240/17");
  return o;
}

// ------------------------------------------------------------------ 2

Outcome null_moments_mc() {
  Outcome o;
  const std::size_t n = 1000, reps = 100000;
  const std::vector<double> rs{1.0, 1.2, 4.0 / 3, 1.5, 2.0, 3.0, 5.0};
  std::vector<RFactor> grid;
  for (double r : rs) grid.emplace_back(r);
  const auto res = simulate(Hypothesis::null(), n, reps, grid, 20260101);
  for (const auto& s : res.per_r) {
    const double r = s.r.value();
    const double mu = s.null_moments.mean, nu = s.null_moments.avar;
    const double nvar = static_cast<double>(n) * s.stats.variance;
    const double mean_z = (s.stats.mean - mu) / s.stats.se_mean;
    o.detail << " r=" << fmt(r, 4) << ": mean z=" << fmt(mean_z, 3) << ", n*var=" << fmt(nvar, 5) << " vs nu=" << fmt(nu, 5)
             << " (" << fmt(100 * (nvar - nu) / nu, 3) << "%);";
    o.require(std::abs(mean_z) <= 3.0, "mean at r=" + fmt(r, 4));
    o.require(std::abs(nvar - nu) <= 0.10 * nu, "n*var within 10% at r=" + fmt(r, 4));
  }
  // Probe at r = 1: compare against both candidate values of nu(1) after removing the
  // finite-n term of the U-statistic variance, n Var = (n-2)/(n-1) nu + Var[h12] / (2 (n-1)).
  Rng rng(stream_seed(20260101, 1));
  const auto tri = estimate_triple_probabilities(RFactor(1.0), 2000000, rng);
  const auto& s1 = res.per_r[0];
  const double nvar1 = static_cast<double>(n) * s1.stats.variance;
  const double se_nvar1 = static_cast<double>(n) * s1.stats.se_variance;
  // Var[h12] for h12 = a12 + a21 follows from P(a12) = mu and P(a12 a21) estimated directly.
  Rng rng2(stream_seed(20260101, 2));
  const Triangle& st = Triangle::standard();
  std::size_t both = 0;
  const std::size_t pairs = 2000000;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Point x1 = sample_point(st, Hypothesis::null(), rng2), x2 = sample_point(st, Hypothesis::null(), rng2);
    both += proximity_contains(st, RFactor(1.0), x1, x2) && proximity_contains(st, RFactor(1.0), x2, x1);
  }
  const double mu1 = mu_null(RFactor(1.0));
  const double p_both = static_cast<double>(both) / static_cast<double>(pairs);
  const double var_h12 = 2.0 * mu1 + 2.0 * p_both - 4.0 * mu1 * mu1;
  const double dn = static_cast<double>(n);
  auto predict = [&](double nu1) { return (dn - 2.0) / (dn - 1.0) * nu1 + var_h12 / (2.0 * (dn - 1.0)); };
  const double p18 = predict(18.0 / 58320), p34 = predict(34.0 / 58320);
  const double z18 = (nvar1 - p18) / se_nvar1, z34 = (nvar1 - p34) / se_nvar1;
  o.detail << " probe r=1: n*var=" << fmt(nvar1, 5) << "+-" << fmt(se_nvar1, 2) << ", predicted " << fmt(p18, 5)
           << " with nu(1)=18/58320 (z=" << fmt(z18, 3) << ") and " << fmt(p34, 5) << " with 34/58320 (z=" << fmt(z34, 3)
           << "); triple-oracle Cov[h12,h13]=" << fmt(tri.cov, 5) << "+-" << fmt(tri.se_cov, 2) << " vs 18/58320="
           << fmt(18.0 / 58320, 5) << ", 34/58320=" << fmt(34.0 / 58320, 5) << "; verdict "
           << (std::abs(z18) < std::abs(z34) ? "18/58320" : "34/58320");
  o.require(std::abs(z18) <= 3.0, "probe agrees with 18/58320 after finite-n correction");
  return o;
}

// ------------------------------------------------------------------ 3

Outcome normal_approximation() {
  Outcome o;
  const std::size_t n = 100, reps = 10000;
  const auto res = simulate(Hypothesis::null(), n, reps, {RFactor(2.0)}, 31337, true);
  const auto& s = res.per_r[0];
  const double mu = 5.0 / 8, var = 25.0 / (192.0 * n);
  const double mean_z = (s.stats.mean - mu) / s.stats.se_mean;
  o.require(std::abs(mean_z) <= 3.0, "mean within 3 SE");
  o.require(rel(s.stats.variance, var) <= 0.10, "variance within 10%");
  std::vector<double> z(s.samples.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (s.samples[i] - mu) / std::sqrt(var);
  std::sort(z.begin(), z.end());
  double d = 0.0;
  const double m = static_cast<double>(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = phi(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  const double p = ks_pvalue(d, z.size());
  o.detail << "mean z=" << fmt(mean_z, 3) << ", var rel err=" << fmt(100 * (s.stats.variance - var) / var, 3)
           << "%, KS D=" << fmt(d, 4) << " p=" << fmt(p, 3);
  o.require(p >= 0.01, "KS p-value >= 0.01");
  return o;
}

// ------------------------------------------------------------------ 4

Outcome triple_oracle() {
  Outcome o;
  const double r = 1.4;
  Rng rng(stream_seed(44, 0));
  const auto e = estimate_triple_probabilities(RFactor(r), 1000000, rng);
  const double p2n = 781.0 / 19440 * std::pow(r, 4);
  const double nu = nu_null(RFactor(r));
  o.detail << "P2N=" << fmt(e.p2n) << " vs " << fmt(p2n) << " (z=" << fmt((e.p2n - p2n) / e.se_p2n, 3) << "), Cov=" << fmt(e.cov)
           << " vs nu(1.4)=" << fmt(nu) << " (z=" << fmt((e.cov - nu) / e.se_cov, 3) << ")";
  o.require(std::abs(e.p2n - p2n) <= 3 * e.se_p2n, "P2N within 3 SE");
  o.require(std::abs(e.cov - nu) <= 3 * e.se_cov, "covariance within 3 SE");
  return o;
}

// ------------------------------------------------------------------ 5

Outcome power_reproduction() {
  Outcome o;
  const double s3 = kSqrt3;
  const auto a = simulate({Mode::segregation, s3 / 8}, 100, 1000, {RFactor(1.1)}, 55, true);
  const double pw = *a.per_r[0].reject_upper;
  o.detail << "power(eps=sqrt3/8, r=1.1, n=100)=" << fmt(pw, 4);
  o.require(pw >= 0.72 && pw <= 0.82, "power in [0.72, 0.82]");
  // Diagnostic: the asymptotic critical value is too low at r=1.1, n=100 because the
  // O(1/n) term of the null variance is comparable to nu(1.1)/n.
  const auto null_a = simulate(Hypothesis::null(), 100, 10000, {RFactor(1.1)}, 58, true);
  const double crit = order_statistic(null_a.per_r[0].samples, 0.95);
  const auto& alt = a.per_r[0].samples;
  const double emp = static_cast<double>(std::count_if(alt.begin(), alt.end(), [&](double v) { return v > crit; })) /
                     static_cast<double>(alt.size());
  o.detail << " [asymptotic level at r=1.1, n=100: " << fmt(*null_a.per_r[0].reject_upper, 4)
           << ", power with the empirical critical value: " << fmt(emp, 4) << "]";
  const auto b = simulate({Mode::segregation, s3 / 4}, 10, 10000, {RFactor(2.0), RFactor(3.0)}, 56);
  const auto c = simulate(Hypothesis::null(), 10, 10000, {RFactor(2.0), RFactor(3.0)}, 57);
  for (std::size_t k = 0; k < 2; ++k) {
    const double p = *b.per_r[k].reject_upper, lvl = *c.per_r[k].reject_upper;
    const std::string r = fmt(b.per_r[k].r.value());
    o.detail << ", power(eps=sqrt3/4, n=10, r=" << r << ")=" << fmt(p, 4) << ", level(r=" << r << ")=" << fmt(lvl, 4);
    o.require(p >= 0.99, "power >= 0.99 at r=" + r);
    o.require(lvl >= 0.02 && lvl <= 0.09, "level in [0.02, 0.09] at r=" + r);
  }
  return o;
}

// ------------------------------------------------------------------ 6

Outcome alternative_moments() {
  Outcome o;
  const double s3 = kSqrt3;
  const std::vector<RFactor> grid{RFactor(1.0), RFactor(1.2), RFactor(1.5), RFactor(1.8)};
  const std::size_t n = 200;
  const auto seg = simulate({Mode::segregation, s3 / 4}, n, 10000, grid, 61);
  const auto asc = simulate({Mode::association, s3 / 12}, n, 10000, grid, 62);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double ms = mu_segregation(grid[k], s3 / 4), ma = mu_association(grid[k], s3 / 12);
    const double zs = (seg.per_r[k].stats.mean - ms) / seg.per_r[k].stats.se_mean;
    const double za = (asc.per_r[k].stats.mean - ma) / asc.per_r[k].stats.se_mean;
    o.detail << "r=" << fmt(grid[k].value()) << ": seg z=" << fmt(zs, 3) << ", assoc z=" << fmt(za, 3) << "; ";
    o.require(std::abs(zs) <= 3.0, "segregation mean at r=" + fmt(grid[k].value()));
    o.require(std::abs(za) <= 3.0, "association mean at r=" + fmt(grid[k].value()));
  }
  const double nu1 = nu_association_s312(RFactor(1.0));
  o.require(std::abs(nu1) <= 1e-12, "nu_association_s312(1) = 0");
  const auto& s1 = asc.per_r[0];
  const double nvar = static_cast<double>(n) * s1.stats.variance;
  const double se = static_cast<double>(n) * s1.stats.se_variance;
  // A zero asymptotic variance shows up as n Var shrinking like 1/n; report it next to the literal check.
  const auto half = simulate({Mode::association, s3 / 12}, 2 * n, 10000, {RFactor(1.0)}, 63);
  const double nvar2 = static_cast<double>(2 * n) * half.per_r[0].stats.variance;
  o.detail << "nu_A(1)=" << fmt(nu1, 3) << ", n*var(n=200)=" << fmt(nvar, 4) << "+-" << fmt(se, 2)
           << ", n*var(n=400)=" << fmt(nvar2, 4) << " (ratio " << fmt(nvar / nvar2, 3) << ")";
  o.require(nvar <= 3 * se, "n*var at r=1 within 3 SE of 0");
  return o;
}

// ------------------------------------------------------------------ 7

Outcome ordering() {
  Outcome o;
  std::size_t checks = 0, flat_a = 0;
  std::vector<double> eps;
  for (int k = 1; 0.05 * k < kEpsMax; ++k) eps.push_back(0.05 * k);
  for (double r = 1.0; r <= 5.0 + 1e-12; r += 0.01) {
    const RFactor rf(r);
    const double m0 = mu_null(rf);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double ms = mu_segregation(rf, eps[i]), ma = mu_association(rf, eps[i]);
      o.require(ms > m0 && m0 > ma, "ordering at r=" + fmt(r) + " eps=" + fmt(eps[i]));
      if (i > 0) {
        const double ps = mu_segregation(rf, eps[i - 1]), pa = mu_association(rf, eps[i - 1]);
        o.require(ps < 1.0 ? ms > ps : ms == 1.0, "mu_S increasing at r=" + fmt(r) + " eps=" + fmt(eps[i]));
        o.require(ma <= pa, "mu_A non-increasing at r=" + fmt(r) + " eps=" + fmt(eps[i]));
        flat_a += ma == pa;
      }
      ++checks;
    }
  }
  o.detail << checks << " (r, eps) pairs, " << flat_a << " flat mu_A steps";
  return o;
}

// ------------------------------------------------------------------ 8

Outcome geometry_invariance() {
  Outcome o;
  std::mt19937_64 g(88);
  std::uniform_real_distribution<double> uc(-100.0, 100.0), u(0.0, 1.0), ur(1.0, 3.0);
  std::size_t sets = 0, mismatches = 0;
  const Triangle& st = Triangle::standard();
  for (int t = 0; t < 100; ++t) {
    Point a, b, c;
    do {
      a = {uc(g), uc(g)}, b = {uc(g), uc(g)}, c = {uc(g), uc(g)};
    } while (std::abs(orient(a, b, c)) < 10.0);
    const Triangle tri(a, b, c);
    const AffineMap m = to_standard_map(tri);
    for (int s = 0; s < 100; ++s) {
      std::vector<Point> pts(20), mapped(20);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        double p = u(g), q = u(g);
        if (p + q > 1) p = 1 - p, q = 1 - q;
        pts[i] = tri.from_barycentric({{1 - p - q, p, q}});
        mapped[i] = m(pts[i]);
      }
      const RFactor r(s % 4 == 0 ? 1.0 : s % 4 == 1 ? 1.5 : s % 4 == 2 ? 2.0 : ur(g));
      if (arc_list(tri, pts, r) != arc_list(st, mapped, r)) ++mismatches;
      ++sets;
    }
  }
  o.detail << sets << " point sets, " << mismatches << " mismatching arc sets";
  o.require(mismatches == 0, "identical arc sets");
  return o;
}

// ------------------------------------------------------------------ 9

Outcome multi_triangle() {
  Outcome o;
  std::mt19937_64 g(20091);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> y(10);
  for (auto& p : y) p = {u(g), u(g)};
  ExperimentConfig cfg;
  cfg.anchors = y;
  cfg.n = 500;
  cfg.reps = 10000;
  cfg.r_grid = {RFactor(1.2), RFactor(2.0)};
  cfg.seed = 909;
  cfg.workers = workers();
  const auto res = run_experiment(cfg);
  o.detail << "J=" << res.cells << ";";
  for (const auto& s : res.per_r) {
    const double nvar = static_cast<double>(cfg.n) * s.stats.variance;
    const double mean_z = (s.stats.mean - s.null_moments.mean) / s.stats.se_mean;
    const double err = (nvar - s.null_moments.avar) / s.null_moments.avar;
    o.detail << " r=" << fmt(s.r.value()) << ": mean z=" << fmt(mean_z, 3) << ", n*var=" << fmt(nvar, 5) << " vs nu(r,J)="
             << fmt(s.null_moments.avar, 5) << " (" << fmt(100 * err, 3) << "%), identity violations "
             << s.identity_violations << ";";
    o.require(std::abs(mean_z) <= 3.0, "mean at r=" + fmt(s.r.value()));
    o.require(std::abs(err) <= 0.15, "n*var within 15% at r=" + fmt(s.r.value()));
    o.require(s.identity_violations == 0, "decomposition identity at r=" + fmt(s.r.value()));
  }
  return o;
}

// ------------------------------------------------------------------ 10

std::pair<int, std::string> capture(const std::string& cmd) {
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, {}};
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.require(false, "no --cli path given");
    return o;
  }
  const std::vector<std::string> commands{
      "simulate --mode null --n 100 --reps 500 --r 1,1.5,2,inf --seed 1",
      "simulate --mode seg --eps sqrt3/8 --n 50 --reps 500 --r 11/10,2 --seed 12345 --empirical-critical --format csv",
      "simulate --mode assoc --eps sqrt3/12 --n 30 --reps 300 --r 1,2 --seed 7"};
  for (const auto& c : commands) {
    std::string first;
    for (unsigned w : {1u, 4u, 8u}) {
      for (int rep = 0; rep < 2; ++rep) {
        const auto [code, out] = capture(cli + " " + c + " --workers " + std::to_string(w));
        o.require(code == 0, "exit status of '" + c + "'");
        if (first.empty()) first = out;
        o.require(out == first, "identical output for '" + c + "' with " + std::to_string(w) + " workers");
      }
    }
    o.detail << "'" << c << "' identical over workers 1,4,8 (" << first.size() << " bytes); ";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "closed-form anchors", closed_form_anchors},
      {2, "null Monte Carlo moments", null_moments_mc},
      {3, "normal approximation", normal_approximation},
      {4, "triple-probability oracle", triple_oracle},
      {5, "power reproduction", power_reproduction},
      {6, "alternative moment oracles", alternative_moments},
      {7, "ordering and monotonicity", ordering},
      {8, "geometry invariance", geometry_invariance},
      {9, "multi-triangle moments", multi_triangle},
      {10, "determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " (" << c.name << ", " << fmt(secs, 3)
              << " s): " << o.detail.str() << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
