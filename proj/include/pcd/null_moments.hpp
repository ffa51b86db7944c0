#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>

#include "pcd/error.hpp"
#include "pcd/geometry.hpp"
#include "pcd/normal.hpp"

namespace pcd {

// Mean and asymptotic variance (Cov[h12, h13]) of the relative density.
struct MomentPair {
  double mean = 0.0;
  double avar = 0.0;
};

inline constexpr double kDegenerateVariance = 1e-14;

namespace detail {

// Polynomial with coefficients listed from the highest power down.
template <typename T>
T horner(std::initializer_list<T> coeffs, T x) {
  T acc = 0;
  for (T c : coeffs) acc = acc * x + c;
  return acc;
}

struct WeightSums {
  double s2 = 0.0;
  double s3 = 0.0;
};

inline WeightSums weight_sums(std::span<const double> w) {
  if (w.empty()) throw DomainError("weights must be non-empty");
  double total = 0.0;
  WeightSums s;
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("weights must be positive and finite");
    total += v;
    s.s2 += v * v;
    s.s3 += v * v * v;
  }
  if (std::abs(total - 1.0) > 1e-10) throw DomainError("weights must sum to 1, got " + std::to_string(total));
  return s;
}

}  // namespace detail

inline double mu_null(RFactor rf) {
  if (rf.is_infinite()) return 1.0;
  const double r = rf.value();
  if (r < 1.5) return 37.0 * r * r / 216.0;
  if (r < 2.0) return -r * r / 8.0 + 4.0 - 8.0 / r + 9.0 / (2.0 * r * r);
  return 1.0 - 3.0 / (2.0 * r * r);
}

inline double nu_null(RFactor rf) {
  using detail::horner;
  if (rf.is_infinite()) return 0.0;
  const double r = rf.value();
  const double r2 = r * r, r4 = r2 * r2;
  if (r < 4.0 / 3.0)
    return horner<double>({3007, -13824, 898, 77760, -117953, 48888, -24246, 60480, -38880, 0, 3888}, r) /
           (58320.0 * r4);
  if (r < 1.5)
    return horner<double>({5467, -37800, 61912, 0, 46588, -191520, 13608, 241920, -155520, 0, 15552}, r) /
           (233280.0 * r4);
  if (r < 2.0)
    return -horner<double>(
               {7, -72, 312, 0, -5332, 15072, 13704, -139264, 273600, -242176, 103232, -27648, 8640}, r) /
           (960.0 * r4 * r2);
  return horner<double>({15, 0, -11, -48, 25}, r) / (15.0 * r4 * r2);
}

inline MomentPair null_moments(RFactor r) { return {mu_null(r), nu_null(r)}; }

inline double mu_null_multi(RFactor r, std::span<const double> weights) {
  return mu_null(r) * detail::weight_sums(weights).s2;
}

inline double nu_null_multi(RFactor r, std::span<const double> weights) {
  const auto s = detail::weight_sums(weights);
  const double mu = mu_null(r);
  return nu_null(r) * s.s3 + 4.0 * mu * mu * (s.s3 - s.s2 * s.s2);
}

inline MomentPair null_moments_multi(RFactor r, std::span<const double> weights) {
  return {mu_null_multi(r, weights), nu_null_multi(r, weights)};
}

struct TestResult {
  double rho = 0.0;
  double mean = 0.0;
  double avar = 0.0;
  std::optional<double> z;
  std::optional<double> p_segregation;  // upper tail
  std::optional<double> p_association;  // lower tail
  bool degenerate = false;
};

// Standardized statistic sqrt(n) (rho - mean) / sqrt(avar) with one-sided p-values.
inline TestResult test(double rho, std::size_t n, RFactor r, std::span<const double> weights) {
  if (n < 2) throw DomainError("test needs n >= 2");
  const MomentPair m = null_moments_multi(r, weights);
  TestResult t{rho, m.mean, m.avar, std::nullopt, std::nullopt, std::nullopt, false};
  if (m.avar <= kDegenerateVariance) {
    t.degenerate = true;
    return t;
  }
  const double z = std::sqrt(static_cast<double>(n)) * (rho - m.mean) / std::sqrt(m.avar);
  t.z = z;
  t.p_segregation = phi(-z);
  t.p_association = phi(z);
  return t;
}

inline TestResult test(double rho, std::size_t n, RFactor r) {
  const double w[] = {1.0};
  return test(rho, n, r, w);
}

}  // namespace pcd
