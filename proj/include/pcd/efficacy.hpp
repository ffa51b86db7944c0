#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcd/alternatives.hpp"
#include "pcd/error.hpp"
#include "pcd/montecarlo.hpp"
#include "pcd/normal.hpp"
#include "pcd/null_moments.hpp"

namespace pcd {

enum class VarianceSource { closed_form, monte_carlo };

struct MonteCarloVariance {
  std::size_t triples = 1'000'000;
  std::uint64_t seed = 1;
};

// Efficacy or power value; `diverges` marks a genuine +infinity (zero variance, nonzero gap).
struct Efficacy {
  double value = 0.0;
  bool diverges = false;
  std::string note;
};

namespace detail {

// Second eps-derivative at 0 of the analytic piece that governs small eps > 0.
// Central differences in long double with Richardson extrapolation over h and h/2.
// The piece's eps-expansion converges only for eps below about 1/r, so callers
// with large r pass a proportionally smaller h.
template <typename F>
double second_derivative_at_zero(F f, long double h = 1e-4L) {
  auto d = [&](long double s) { return (f(s) - 2.0L * f(0.0L) + f(-s)) / (s * s); };
  const long double coarse = d(h);
  const long double fine = d(h / 2);
  const long double rich = (4.0L * fine - coarse) / 3.0L;
  if (std::abs(rich - fine) > 1e-5L * std::abs(rich) + 1e-12L)
    throw NumericalError("second derivative did not stabilise under step refinement");
  return static_cast<double>(rich);
}

inline double alt_variance(RFactor r, const AltSpec& spec, VarianceSource src, const MonteCarloVariance& mc) {
  if (!alt_nondegenerate(r, spec)) return 0.0;
  if (src == VarianceSource::closed_form) {
    if (spec.kind == AltKind::segregation) {
      if (std::abs(spec.eps - kSqrt3 / 4) > 1e-12)
        throw DomainError("closed-form segregation variance exists only for eps = sqrt3/4");
      return nu_segregation_s34(r);
    }
    if (std::abs(spec.eps - kSqrt3 / 12) > 1e-12)
      throw DomainError("closed-form association variance exists only for eps = sqrt3/12");
    return nu_association_s312(r);
  }
  Rng rng(mc.seed);
  return std::max(0.0, estimate_alt_variance(r, spec, mc.triples, rng).cov);
}

}  // namespace detail

// d^2/d eps^2 of the alternative mean at eps = 0.
inline double mu_second_derivative(RFactor r, AltKind kind) {
  if (r.is_infinite()) return 0.0;
  const long double rv = r.value();
  constexpr double select = 1e-12;  // picks the interval that survives as eps -> 0+
  const long double h = 1e-4L * std::min(1.0L, 10.0L / rv);
  if (kind == AltKind::segregation) {
    const auto piece = detail::seg_piece(r.value(), select);
    return detail::second_derivative_at_zero([&](long double e) { return detail::seg_value(piece, rv, e); }, h);
  }
  const auto piece = detail::assoc_piece(r.value(), select);
  return detail::second_derivative_at_zero([&](long double e) { return detail::assoc_value(piece, rv, e); }, h);
}

inline double pae(RFactor r, AltKind kind) {
  const double nu = nu_null(r);
  if (nu <= kDegenerateVariance) throw DomainError("Pitman efficacy undefined where the null variance is 0");
  const double d2 = mu_second_derivative(r, kind);
  return d2 * d2 / nu;
}

inline double pae_multi(RFactor r, AltKind kind, std::span<const double> weights) {
  const double nu = nu_null_multi(r, weights);
  if (nu <= kDegenerateVariance) throw DomainError("Pitman efficacy undefined where the null variance is 0");
  const double d2 = mu_second_derivative(r, kind) * detail::weight_sums(weights).s2;
  return d2 * d2 / nu;
}

// r -> infinity limit of pae_multi under segregation: mu'' -> 8, nu -> 0, mu -> 1.
inline double pae_multi_limit_derived(std::span<const double> weights) {
  const auto s = detail::weight_sums(weights);
  return 16.0 * s.s2 * s.s2 / (s.s3 - s.s2 * s.s2);
}

// The same limit in the form 8 S2 / (256 (S3 - S2^2)) quoted for the segregation case.
inline double pae_multi_limit_stated(std::span<const double> weights) {
  const auto s = detail::weight_sums(weights);
  return 8.0 * s.s2 / (256.0 * (s.s3 - s.s2 * s.s2));
}

namespace detail {

inline Efficacy ratio(double gap, double var) {
  if (var <= kDegenerateVariance) {
    if (gap == 0.0) return {0.0, false, "zero mean gap and zero variance"};
    return {std::numeric_limits<double>::infinity(), true, "alternative variance is zero"};
  }
  return {gap * gap / var, false, {}};
}

}  // namespace detail

inline Efficacy hlae(RFactor r, const AltSpec& spec, VarianceSource src, const MonteCarloVariance& mc = {}) {
  validate(spec);
  const double gap = mu_alternative(r, spec) - mu_null(r);
  return detail::ratio(gap, detail::alt_variance(r, spec, src, mc));
}

inline Efficacy hlae_multi(RFactor r, const AltSpec& spec, std::span<const double> weights, VarianceSource src,
                           const MonteCarloVariance& mc = {}) {
  validate(spec);
  const auto s = detail::weight_sums(weights);
  const double mu_alt = mu_alternative(r, spec);
  const double gap = (mu_alt - mu_null(r)) * s.s2;
  const double var = detail::alt_variance(r, spec, src, mc) * s.s3 + 4.0 * mu_alt * mu_alt * (s.s3 - s.s2 * s.s2);
  return detail::ratio(gap, var);
}

// Asymptotic power of the one-sided level-alpha test given null and alternative moments.
inline Efficacy power_from_moments(const MomentPair& null, const MomentPair& alt, std::size_t n, double alpha,
                                   AltKind kind) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (null.avar <= kDegenerateVariance) throw DomainError("power undefined where the null variance is 0");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double z = kind == AltKind::segregation ? phi_inv(1.0 - alpha) : phi_inv(alpha);
  const double shift = z * std::sqrt(null.avar) + root_n * (null.mean - alt.mean);
  if (alt.avar <= kDegenerateVariance) {
    // Limit of the normal formula: rho equals its mean, so the test either always or never rejects.
    const bool rejects = kind == AltKind::segregation ? shift < 0.0 : shift > 0.0;
    return {rejects ? 1.0 : 0.0, false, "degenerate alternative: relative density is constant"};
  }
  const double arg = shift / std::sqrt(alt.avar);
  return {kind == AltKind::segregation ? phi(-arg) : phi(arg), false, {}};
}

inline Efficacy power_asymptotic(RFactor r, std::size_t n, const AltSpec& spec, double alpha, VarianceSource src,
                                 const MonteCarloVariance& mc = {}) {
  validate(spec);
  const MomentPair alt{mu_alternative(r, spec), detail::alt_variance(r, spec, src, mc)};
  return power_from_moments(null_moments(r), alt, n, alpha, spec.kind);
}

// Interval endpoints of the null and alternative formulas inside [lo, hi].
inline std::vector<double> curve_breakpoints(std::optional<AltSpec> spec, double lo, double hi) {
  std::vector<double> b{4.0 / 3.0, 1.5, 2.0};
  if (spec) {
    const double e = spec->eps, s3 = kSqrt3, q = s3 * e;
    if (spec->kind == AltKind::segregation) {
      for (double v : {1.5 - s3 * e, 2 - 4 * e / s3, s3 / (2 * e) - 1, s3 / (2 * e), 3 - 2 * s3 * e, s3 / e - 2,
                       9.0 / 8.0, 9.0 / 7.0})
        b.push_back(v);
    } else {
      for (double v : {(1 + 2 * q) / (1 - q), 4 * (1 - q) / 3, 4 * (1 + 2 * q) / 3, 3 / (2 * (1 - q)),
                       (1 + 2 * q) / (2 * (1 - q))})
        b.push_back(v);
    }
  }
  std::vector<double> out;
  for (double v : b)
    if (v >= lo && v <= hi) out.push_back(v);
  return out;
}

// Evenly spaced grid over [lo, hi] merged with the breakpoints, strictly increasing.
inline std::vector<double> curve_grid(double lo, double hi, std::size_t steps, std::span<const double> extra) {
  if (!(lo >= 1.0) || !(hi >= lo) || !std::isfinite(hi)) throw DomainError("grid needs 1 <= r-min <= r-max < inf");
  if (steps < 1) throw DomainError("steps must be >= 1");
  std::vector<double> g;
  if (steps == 1 || hi == lo) {
    g.push_back(lo);
  } else {
    for (std::size_t i = 0; i < steps; ++i)
      g.push_back(i + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  g.insert(g.end(), extra.begin(), extra.end());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

// A quantity evaluated over an r grid.
struct EfficacyReport {
  std::string quantity;
  std::optional<AltSpec> spec;
  std::optional<std::size_t> n;
  std::vector<double> weights;
  std::vector<double> r_grid;
  std::vector<Efficacy> values;
};

}  // namespace pcd
