#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "pcd/error.hpp"

namespace pcd {

inline constexpr double kSqrt3 = std::numbers::sqrt3;
// Slack on barycentric coordinates for "inside" and on the proximity inequality.
inline constexpr double kBaryTol = 1e-12;
// Coordinate tolerance for point equality (vertex detection, duplicates).
inline constexpr double kCoordTol = 1e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
};

inline bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline bool nearly_equal(Point a, Point b, double tol = kCoordTol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol;
}

// Twice the signed area of (a, b, c); positive when counter-clockwise.
inline double orient(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Expansion factor r in [1, inf]; infinity is a distinct state, not a large double.
class RFactor {
 public:
  explicit RFactor(double value) : value_(value) {
    if (!(value >= 1.0)) throw DomainError("r must be >= 1, got " + std::to_string(value));
  }
  static RFactor infinity() { return RFactor(std::numeric_limits<double>::infinity()); }

  [[nodiscard]] bool is_infinite() const { return std::isinf(value_); }
  [[nodiscard]] double value() const { return value_; }

  friend bool operator==(const RFactor&, const RFactor&) = default;
  friend auto operator<=>(const RFactor& a, const RFactor& b) { return a.value_ <=> b.value_; }

 private:
  double value_;
};

struct Barycentric {
  std::array<double, 3> w{};

  double operator[](std::size_t i) const { return w[i]; }
  [[nodiscard]] bool inside(double tol = kBaryTol) const {
    return w[0] >= -tol && w[1] >= -tol && w[2] >= -tol;
  }
  // Index of the largest weight; ties go to the lowest index.
  [[nodiscard]] std::size_t dominant() const {
    std::size_t j = 0;
    if (w[1] > w[j]) j = 1;
    if (w[2] > w[j]) j = 2;
    return j;
  }
};

class Triangle {
 public:
  Triangle(Point a, Point b, Point c) : v_{a, b, c} {
    if (!finite(a) || !finite(b) || !finite(c)) throw DomainError("triangle vertex is not finite");
    det_ = orient(a, b, c);
    const double scale =
        std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x), std::abs(c.y - a.y)});
    if (!(std::abs(det_) > 1e-14 * scale * scale)) throw DomainError("degenerate triangle");
    // Rows of the inverse of [b - c, a - c]^T give b1 and b2 from p - c.
    inv_ = {(b.y - c.y) / det_, (c.x - b.x) / det_, (c.y - a.y) / det_, (a.x - c.x) / det_};
  }

  // The equilateral reference triangle (0,0), (1,0), (1/2, sqrt3/2).
  static const Triangle& standard() {
    static const Triangle t({0.0, 0.0}, {1.0, 0.0}, {0.5, kSqrt3 / 2.0});
    return t;
  }

  [[nodiscard]] const Point& vertex(std::size_t i) const { return v_[i]; }
  [[nodiscard]] const std::array<Point, 3>& vertices() const { return v_; }
  [[nodiscard]] double signed_area() const { return det_ / 2.0; }
  [[nodiscard]] double area() const { return std::abs(det_) / 2.0; }
  [[nodiscard]] Point centroid() const {
    return {(v_[0].x + v_[1].x + v_[2].x) / 3.0, (v_[0].y + v_[1].y + v_[2].y) / 3.0};
  }
  // Midpoint of the edge opposite vertex j.
  [[nodiscard]] Point midpoint(std::size_t j) const {
    const Point& p = v_[(j + 1) % 3];
    const Point& q = v_[(j + 2) % 3];
    return {(p.x + q.x) / 2.0, (p.y + q.y) / 2.0};
  }

  [[nodiscard]] Barycentric barycentric(Point p) const {
    const double dx = p.x - v_[2].x;
    const double dy = p.y - v_[2].y;
    const double b1 = inv_[0] * dx + inv_[1] * dy;
    const double b2 = inv_[2] * dx + inv_[3] * dy;
    return {{b1, b2, 1.0 - b1 - b2}};
  }

  [[nodiscard]] Point from_barycentric(const Barycentric& b) const {
    return {b[0] * v_[0].x + b[1] * v_[1].x + b[2] * v_[2].x,
            b[0] * v_[0].y + b[1] * v_[1].y + b[2] * v_[2].y};
  }

  [[nodiscard]] bool contains(Point p, double tol = kBaryTol) const { return barycentric(p).inside(tol); }

  // Index of the vertex equal to p within kCoordTol, if any.
  [[nodiscard]] std::optional<std::size_t> vertex_at(Point p) const {
    for (std::size_t j = 0; j < 3; ++j)
      if (nearly_equal(p, v_[j])) return j;
    return std::nullopt;
  }

 private:
  std::array<Point, 3> v_;
  double det_ = 0.0;
  std::array<double, 4> inv_{};
};

inline Barycentric barycentric(const Triangle& tri, Point p) { return tri.barycentric(p); }

// Vertex region of p as a 0-based vertex index (argmax barycentric, lowest index on ties).
inline std::size_t vertex_region(const Triangle& tri, Point p) {
  const Barycentric b = tri.barycentric(p);
  if (!b.inside()) throw DataError("point outside triangle");
  return b.dominant();
}

namespace detail {
// Right-hand side of the membership test 1 - b_j(y) <= r (1 - b_j(x)) + tol.
inline double reach(double r, double key_x) { return r * key_x + kBaryTol; }
}  // namespace detail

// Membership y in N^r(x) given precomputed barycentrics. Both points must be inside tri.
inline bool proximity_contains(const Triangle& tri, RFactor r, Point x, const Barycentric& bx, Point y,
                               const Barycentric& by) {
  if (tri.vertex_at(x)) return nearly_equal(x, y);
  if (r.is_infinite()) return true;
  const std::size_t j = bx.dominant();
  return 1.0 - by[j] <= detail::reach(r.value(), 1.0 - bx[j]);
}

inline bool proximity_contains(const Triangle& tri, RFactor r, Point x, Point y) {
  const Barycentric bx = tri.barycentric(x);
  const Barycentric by = tri.barycentric(y);
  if (!bx.inside() || !by.inside()) throw DataError("point outside triangle");
  return proximity_contains(tri, r, x, bx, y, by);
}

// z lies in the Gamma1 region of x iff x lies in N^r(z).
inline bool gamma1_contains(const Triangle& tri, RFactor r, Point x, Point z) {
  return proximity_contains(tri, r, z, x);
}

class AffineMap {
 public:
  AffineMap(std::array<double, 4> linear, Point translation) : a_(linear), t_(translation) {
    if (determinant() == 0.0 || !std::isfinite(determinant())) throw DomainError("affine map is singular");
  }

  Point operator()(Point p) const {
    return {a_[0] * p.x + a_[1] * p.y + t_.x, a_[2] * p.x + a_[3] * p.y + t_.y};
  }
  [[nodiscard]] double determinant() const { return a_[0] * a_[3] - a_[1] * a_[2]; }
  [[nodiscard]] const std::array<double, 4>& linear() const { return a_; }
  [[nodiscard]] Point translation() const { return t_; }

  [[nodiscard]] AffineMap inverse() const {
    const double d = determinant();
    const std::array<double, 4> inv{a_[3] / d, -a_[1] / d, -a_[2] / d, a_[0] / d};
    return {inv, {-(inv[0] * t_.x + inv[1] * t_.y), -(inv[2] * t_.x + inv[3] * t_.y)}};
  }

 private:
  std::array<double, 4> a_;  // row-major 2x2
  Point t_;
};

// Affine map sending the vertices of tri, in order, onto the standard triangle's vertices.
inline AffineMap to_standard_map(const Triangle& tri) {
  const Point a = tri.vertex(0), b = tri.vertex(1), c = tri.vertex(2);
  // Solve M [b-a, c-a] = [(1,0), (1/2, sqrt3/2)].
  const double ux = b.x - a.x, uy = b.y - a.y, vx = c.x - a.x, vy = c.y - a.y;
  const double d = ux * vy - uy * vx;
  const double i00 = vy / d, i01 = -vx / d, i10 = -uy / d, i11 = ux / d;
  const double h = kSqrt3 / 2.0;
  const std::array<double, 4> m{1.0 * i00 + 0.5 * i10, 1.0 * i01 + 0.5 * i11, h * i10, h * i11};
  return {m, {-(m[0] * a.x + m[1] * a.y), -(m[2] * a.x + m[3] * a.y)}};
}

}  // namespace pcd
