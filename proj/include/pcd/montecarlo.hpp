#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pcd/alternatives.hpp"
#include "pcd/delaunay.hpp"
#include "pcd/digraph.hpp"
#include "pcd/error.hpp"
#include "pcd/geometry.hpp"
#include "pcd/null_moments.hpp"

namespace pcd {

// Stream seed for replicate `index`: the splitmix64 finalizer applied to a
// golden-ratio stride from `seed`, so streams do not depend on scheduling.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

enum class Mode { null, segregation, association };

struct Hypothesis {
  Mode mode = Mode::null;
  double eps = 0.0;

  static Hypothesis null() { return {}; }
  static Hypothesis from(const AltSpec& s) {
    return {s.kind == AltKind::segregation ? Mode::segregation : Mode::association, s.eps};
  }
};

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::null:
      return "null";
    case Mode::segregation:
      return "segregation";
    case Mode::association:
      return "association";
  }
  return "";
}

inline void validate(const Hypothesis& h) {
  if (h.mode != Mode::null) validate_eps(h.eps);
}

// Corner depth 1 - b_k bounding T(y_k, eps), as a fraction of the altitude.
inline double corner_depth(double eps) { return 2.0 * eps / kSqrt3; }

// Probability that a uniform point avoids all three segregation corners.
inline double segregation_acceptance(double eps) {
  const double t = corner_depth(eps);
  if (t <= 0.5) return 1.0 - 3.0 * t * t;
  const double side = 2.0 - 3.0 * t;
  return side > 0.0 ? side * side : 0.0;
}

inline bool in_support(const Barycentric& b, const Hypothesis& h) {
  if (!b.inside()) return false;
  if (h.mode == Mode::null) return true;
  const double t = h.mode == Mode::segregation ? corner_depth(h.eps) : corner_depth(kEpsMax - h.eps);
  int near = 0;
  for (std::size_t k = 0; k < 3; ++k)
    if (1.0 - b[k] <= t) ++near;
  return h.mode == Mode::segregation ? near == 0 : near > 0;
}

inline Barycentric uniform_barycentric(Rng& rng) {
  const double s = std::sqrt(rng.uniform());
  const double u = rng.uniform();
  return {{1.0 - s, s * (1.0 - u), s * u}};
}

// Barycentric coordinates of one draw under hypothesis h (same law in every triangle).
inline Barycentric sample_barycentric(const Hypothesis& h, Rng& rng) {
  switch (h.mode) {
    case Mode::null:
      return uniform_barycentric(rng);
    case Mode::segregation: {
      const double t = corner_depth(h.eps);
      for (;;) {
        const Barycentric b = uniform_barycentric(rng);
        if (1.0 - b[0] > t && 1.0 - b[1] > t && 1.0 - b[2] > t) return b;
      }
    }
    case Mode::association: {
      const double t = corner_depth(kEpsMax - h.eps);
      for (;;) {
        const std::size_t k = static_cast<std::size_t>(rng.uniform() * 3.0);
        const Barycentric u = uniform_barycentric(rng);
        Barycentric b;
        for (std::size_t i = 0; i < 3; ++i) b.w[i] = t * u[i] + (i == k ? 1.0 - t : 0.0);
        if (t <= 0.5) return b;
        // Corners overlap: keep a draw covered by m corners with probability 1/m.
        int m = 0;
        for (std::size_t i = 0; i < 3; ++i)
          if (1.0 - b[i] <= t) ++m;
        if (m <= 1 || rng.uniform() * m < 1.0) return b;
      }
    }
  }
  return uniform_barycentric(rng);
}

inline void check_sampler(const Hypothesis& h) {
  validate(h);
  if (h.mode == Mode::segregation && segregation_acceptance(h.eps) < 1e-6)
    throw DomainError("segregation sampler acceptance below 1e-6 for eps = " + std::to_string(h.eps));
}

inline Point sample_point(const Triangle& tri, const Hypothesis& h, Rng& rng) {
  return tri.from_barycentric(sample_barycentric(h, rng));
}

// n i.i.d. draws over a triangulation: cell j with probability w_j, then within the cell.
inline std::vector<Point> sample(const Triangulation& tr, const Hypothesis& h, std::size_t n, Rng& rng) {
  check_sampler(h);
  std::vector<double> cumulative(tr.weights.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < tr.weights.size(); ++j) cumulative[j] = acc += tr.weights[j];
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = 0;
    if (tr.size() > 1) {
      const double u = rng.uniform() * acc;
      j = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      j = std::min(j, tr.size() - 1);
    }
    pts.push_back(sample_point(tr.cells[j], h, rng));
  }
  return pts;
}

inline std::vector<Point> sample(const Triangle& tri, const Hypothesis& h, std::size_t n, Rng& rng) {
  check_sampler(h);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_point(tri, h, rng));
  return pts;
}

inline std::vector<Point> sample_null(const Triangle& tri, std::size_t n, Rng& rng) {
  return sample(tri, Hypothesis::null(), n, rng);
}
inline std::vector<Point> sample_null(const Triangulation& tr, std::size_t n, Rng& rng) {
  return sample(tr, Hypothesis::null(), n, rng);
}
inline std::vector<Point> sample_segregation(const Triangle& tri, double eps, std::size_t n, Rng& rng) {
  return sample(tri, {Mode::segregation, eps}, n, rng);
}
inline std::vector<Point> sample_association(const Triangle& tri, double eps, std::size_t n, Rng& rng) {
  return sample(tri, {Mode::association, eps}, n, rng);
}

// Runs body(i) for i in [0, count) on `workers` threads. Each index is handled once,
// so results written by index are independent of the schedule.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se_mean = 0.0;
  double se_variance = 0.0;
};

// Sequential two-pass moments; fixed summation order keeps results reproducible.
inline SampleStats sample_stats(std::span<const double> x) {
  SampleStats s;
  const double m = static_cast<double>(x.size());
  if (x.empty()) return s;
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / m;
  if (x.size() < 2) return s;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - s.mean) * (v - s.mean);
    m2 += d;
    m4 += d * d;
  }
  s.variance = m2 / (m - 1.0);
  s.se_mean = std::sqrt(s.variance / m);
  const double mu2 = m2 / m, mu4 = m4 / m;
  s.se_variance = std::sqrt(std::max(0.0, (mu4 - (m - 3.0) / (m - 1.0) * mu2 * mu2) / m));
  return s;
}

// Order statistic at probability p (the ceil(p m)-th smallest value).
inline double order_statistic(std::vector<double> x, double p) {
  if (x.empty()) throw DomainError("order statistic of an empty sample");
  std::sort(x.begin(), x.end());
  const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(x.size())));
  return x[std::min(x.size() - 1, k == 0 ? 0 : k - 1)];
}

struct ExperimentConfig {
  Hypothesis hypothesis;
  std::size_t n = 100;
  std::size_t reps = 1000;
  std::vector<RFactor> r_grid;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::optional<std::vector<Point>> anchors;  // nullopt: the standard triangle
  unsigned workers = 1;
  bool keep_samples = false;
  bool empirical_critical = false;  // also run a paired null experiment for critical values
};

struct RSummary {
  RFactor r{1.0};
  SampleStats stats;
  MomentPair null_moments;
  std::optional<double> reject_upper;  // rate of z > z_{1-alpha}
  std::optional<double> reject_lower;  // rate of z < z_alpha
  std::optional<double> critical_upper;
  std::optional<double> critical_lower;
  std::optional<double> empirical_reject_upper;
  std::optional<double> empirical_reject_lower;
  std::size_t identity_violations = 0;
  std::vector<double> samples;
};

struct ExperimentResult {
  std::size_t cells = 1;
  std::vector<double> weights;
  std::vector<RSummary> per_r;
};

inline Triangulation experiment_region(const ExperimentConfig& cfg) {
  return cfg.anchors ? triangulate(*cfg.anchors) : single_triangle(Triangle::standard());
}

namespace detail {

// rho[r_index][rep] for every replicate of cfg under hypothesis h.
inline std::vector<std::vector<double>> simulate_rho(const ExperimentConfig& cfg, const Triangulation& tr,
                                                    const Hypothesis& h, std::uint64_t seed,
                                                    std::vector<std::size_t>* violations) {
  const std::size_t nr = cfg.r_grid.size();
  std::vector<std::vector<double>> rho(nr, std::vector<double>(cfg.reps));
  std::vector<std::vector<char>> bad(nr, std::vector<char>(cfg.reps, 0));
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
    Rng rng(stream_seed(seed, rep));
    const std::vector<Point> pts = sample(tr, h, cfg.n, rng);
    const PartitionedSample part(tr, pts, OutsidePolicy::drop);
    for (std::size_t k = 0; k < nr; ++k) {
      const PCDigraph d = part.digraph(cfg.r_grid[k]);
      const double r = relative_density(d);
      rho[k][rep] = r;
      // Per-cell densities recombined with weights n_j (n_j - 1) must give n (n - 1) rho.
      double recombined = 0.0;
      for (const auto& c : d.cells) {
        if (c.points < 2) continue;
        const double pairs = static_cast<double>(c.points) * static_cast<double>(c.points - 1);
        recombined += pairs * (static_cast<double>(c.arcs) / pairs);
      }
      const double pairs = static_cast<double>(d.n) * static_cast<double>(d.n - 1);
      if (std::llround(recombined) != std::llround(pairs * r) ||
          std::llround(recombined) != static_cast<long long>(d.total_arcs) || d.n != cfg.n)
        bad[k][rep] = 1;
    }
  });
  if (violations) {
    violations->assign(nr, 0);
    for (std::size_t k = 0; k < nr; ++k)
      for (char b : bad[k]) (*violations)[k] += b ? 1 : 0;
  }
  return rho;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw DomainError("reps must be >= 1");
  if (cfg.n < 2) throw DomainError("n must be >= 2");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (cfg.r_grid.empty()) throw DomainError("r grid is empty");
  check_sampler(cfg.hypothesis);

  const Triangulation tr = experiment_region(cfg);
  ExperimentResult out;
  out.cells = tr.size();
  out.weights = tr.weights;

  std::vector<std::size_t> violations;
  const auto rho = detail::simulate_rho(cfg, tr, cfg.hypothesis, cfg.seed, &violations);
  std::optional<std::vector<std::vector<double>>> null_rho;
  if (cfg.hypothesis.mode == Mode::null) {
    null_rho = rho;
  } else if (cfg.empirical_critical) {
    null_rho = detail::simulate_rho(cfg, tr, Hypothesis::null(), stream_seed(cfg.seed, ~0ULL), nullptr);
  }

  const double z_hi = phi_inv(1.0 - cfg.alpha);
  const double z_lo = phi_inv(cfg.alpha);
  const double reps = static_cast<double>(cfg.reps);
  for (std::size_t k = 0; k < cfg.r_grid.size(); ++k) {
    RSummary s;
    s.r = cfg.r_grid[k];
    s.stats = sample_stats(rho[k]);
    s.null_moments = null_moments_multi(s.r, tr.weights);
    s.identity_violations = violations[k];
    if (s.null_moments.avar > kDegenerateVariance) {
      const double root_n = std::sqrt(static_cast<double>(cfg.n));
      const double sd = std::sqrt(s.null_moments.avar);
      std::size_t hi = 0, lo = 0;
      for (double v : rho[k]) {
        const double z = root_n * (v - s.null_moments.mean) / sd;
        if (z > z_hi) ++hi;
        if (z < z_lo) ++lo;
      }
      s.reject_upper = static_cast<double>(hi) / reps;
      s.reject_lower = static_cast<double>(lo) / reps;
    }
    if (null_rho) {
      s.critical_upper = order_statistic((*null_rho)[k], 1.0 - cfg.alpha);
      s.critical_lower = order_statistic((*null_rho)[k], cfg.alpha);
      std::size_t hi = 0, lo = 0;
      for (double v : rho[k]) {
        if (v > *s.critical_upper) ++hi;
        if (v < *s.critical_lower) ++lo;
      }
      s.empirical_reject_upper = static_cast<double>(hi) / reps;
      s.empirical_reject_lower = static_cast<double>(lo) / reps;
    }
    if (cfg.keep_samples) s.samples = rho[k];
    out.per_r.push_back(std::move(s));
  }
  return out;
}

struct TripleEstimate {
  std::size_t triples = 0;
  double p2n = 0.0, pm = 0.0, p2g = 0.0;
  double se_p2n = 0.0, se_pm = 0.0, se_p2g = 0.0;
  double mean = 0.0;  // estimate of P(X2 in N(X1)), the mean of rho
  double se_mean = 0.0;
  double cov = 0.0;  // estimate of Cov[h12, h13]
  double se_cov = 0.0;
};

// Monte Carlo over i.i.d. triples (X1, X2, X3) in the standard triangle under h:
// P2N = P(X2, X3 in N(X1)), PM = P(X2 in N(X1), X3 in Gamma1(X1)), P2G = P(X2, X3 in Gamma1(X1)).
inline TripleEstimate estimate_triple_probabilities(RFactor r, std::size_t triples, Rng& rng,
                                                    const Hypothesis& h = Hypothesis::null()) {
  if (triples < 2) throw DomainError("need at least 2 triples");
  check_sampler(h);
  const Triangle& tri = Triangle::standard();
  double n2n = 0, nm = 0, n2g = 0;
  double sum_h = 0, sum_y = 0, sum_hh = 0, sum_yy = 0, sum_hy = 0;
  for (std::size_t i = 0; i < triples; ++i) {
    const Barycentric b1 = sample_barycentric(h, rng);
    const Barycentric b2 = sample_barycentric(h, rng);
    const Barycentric b3 = sample_barycentric(h, rng);
    const Point x1 = tri.from_barycentric(b1), x2 = tri.from_barycentric(b2), x3 = tri.from_barycentric(b3);
    const Barycentric c1 = tri.barycentric(x1), c2 = tri.barycentric(x2), c3 = tri.barycentric(x3);
    const bool a12 = proximity_contains(tri, r, x1, c1, x2, c2);
    const bool a13 = proximity_contains(tri, r, x1, c1, x3, c3);
    const bool g12 = proximity_contains(tri, r, x2, c2, x1, c1);
    const bool g13 = proximity_contains(tri, r, x3, c3, x1, c1);
    n2n += a12 && a13;
    nm += 0.5 * ((a12 && g13) + (a13 && g12));
    n2g += g12 && g13;
    const double h12 = a12 + g12, h13 = a13 + g13;
    const double hbar = 0.5 * (h12 + h13);
    const double y = h12 * h13;
    sum_h += hbar;
    sum_y += y;
    sum_hh += hbar * hbar;
    sum_yy += y * y;
    sum_hy += hbar * y;
  }
  const double m = static_cast<double>(triples);
  TripleEstimate e;
  e.triples = triples;
  e.p2n = n2n / m;
  e.pm = nm / m;
  e.p2g = n2g / m;
  auto bern_se = [m](double p) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / m); };
  e.se_p2n = bern_se(e.p2n);
  e.se_pm = bern_se(e.pm);
  e.se_p2g = bern_se(e.p2g);
  const double mh = sum_h / m, my = sum_y / m;
  const double var_h = (sum_hh / m - mh * mh) * m / (m - 1.0);
  const double var_y = (sum_yy / m - my * my) * m / (m - 1.0);
  const double cov_hy = (sum_hy / m - mh * my) * m / (m - 1.0);
  e.mean = mh / 2.0;
  e.se_mean = std::sqrt(var_h / m) / 2.0;
  e.cov = my - mh * mh;
  // Delta method for my - mh^2.
  const double g = 2.0 * mh;
  e.se_cov = std::sqrt(std::max(0.0, var_y - 2.0 * g * cov_hy + g * g * var_h) / m);
  return e;
}

// Triple-based estimate of the asymptotic variance Cov[h12, h13] under an alternative.
inline TripleEstimate estimate_alt_variance(RFactor r, const AltSpec& spec, std::size_t triples, Rng& rng) {
  validate(spec);
  return estimate_triple_probabilities(r, triples, rng, Hypothesis::from(spec));
}

}  // namespace pcd
