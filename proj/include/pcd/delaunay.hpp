#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pcd/error.hpp"
#include "pcd/geometry.hpp"

namespace pcd {

// Delaunay triangulation of an anchor set. Triangles are counter-clockwise index
// triples into `points`; `cells[j]` is the geometric triangle of `triangles[j]`.
struct Triangulation {
  std::vector<Point> points;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<Triangle> cells;
  std::vector<double> weights;
  double hull_area = 0.0;

  [[nodiscard]] std::size_t size() const { return triangles.size(); }
};

namespace detail {

// Positive when d lies strictly inside the circumcircle of counter-clockwise (a, b, c).
inline double incircle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline double incircle_scale(Point a, Point b, Point c, Point d) {
  auto sq = [&](Point p) { return (p.x - d.x) * (p.x - d.x) + (p.y - d.y) * (p.y - d.y); };
  const double m = std::max({sq(a), sq(b), sq(c)});
  return m * m;
}

class Mesh {
 public:
  explicit Mesh(const std::vector<Point>& pts) : p_(pts) {}

  std::size_t add(std::size_t a, std::size_t b, std::size_t c) {
    const std::size_t t = tri_.size();
    tri_.push_back({a, b, c});
    link(t);
    return t;
  }

  // Triangle owning directed edge (u, v), if any.
  [[nodiscard]] std::optional<std::size_t> owner(std::size_t u, std::size_t v) const {
    auto it = edge_.find(key(u, v));
    if (it == edge_.end()) return std::nullopt;
    return it->second;
  }

  // Restore the empty-circumcircle property by edge flips.
  void legalize(double tol) {
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (const auto& t : tri_)
      for (int k = 0; k < 3; ++k) stack.emplace_back(t[k], t[(k + 1) % 3]);
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      auto t1 = owner(a, b);
      auto t2 = owner(b, a);
      if (!t1 || !t2) continue;
      const std::size_t c = third(*t1, a, b);
      const std::size_t d = third(*t2, b, a);
      const Point pa = p_[a], pb = p_[b], pc = p_[c], pd = p_[d];
      if (incircle(pa, pb, pc, pd) <= tol * incircle_scale(pa, pb, pc, pd)) continue;
      // Both new triangles must stay counter-clockwise; otherwise the quad is not convex.
      if (orient(pc, pa, pd) <= 0.0 || orient(pd, pb, pc) <= 0.0) continue;
      unlink(*t1);
      unlink(*t2);
      tri_[*t1] = {c, a, d};
      tri_[*t2] = {d, b, c};
      link(*t1);
      link(*t2);
      stack.emplace_back(a, d);
      stack.emplace_back(d, b);
      stack.emplace_back(b, c);
      stack.emplace_back(c, a);
    }
  }

  [[nodiscard]] const std::vector<std::array<std::size_t, 3>>& triangles() const { return tri_; }

 private:
  static std::uint64_t key(std::size_t u, std::size_t v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
  }
  void link(std::size_t t) {
    for (int k = 0; k < 3; ++k) edge_[key(tri_[t][k], tri_[t][(k + 1) % 3])] = t;
  }
  void unlink(std::size_t t) {
    for (int k = 0; k < 3; ++k) edge_.erase(key(tri_[t][k], tri_[t][(k + 1) % 3]));
  }
  [[nodiscard]] std::size_t third(std::size_t t, std::size_t u, std::size_t v) const {
    for (std::size_t w : tri_[t])
      if (w != u && w != v) return w;
    return tri_[t][0];
  }

  const std::vector<Point>& p_;
  std::vector<std::array<std::size_t, 3>> tri_;
  std::unordered_map<std::uint64_t, std::size_t> edge_;
};

inline void check_anchors(std::span<const Point> y) {
  if (y.size() < 3) throw DataError("triangulation needs at least 3 points, got " + std::to_string(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!finite(y[i])) throw DataError("anchor point " + std::to_string(i) + " is not finite");
}

}  // namespace detail

// Incremental lexicographic sweep followed by Lawson flips. Deterministic for a fixed
// input order; triangle indices refer to positions in `y`.
inline Triangulation triangulate(std::span<const Point> y) {
  detail::check_anchors(y);
  const std::size_t n = y.size();

  double minx = y[0].x, maxx = y[0].x, miny = y[0].y, maxy = y[0].y;
  for (const Point& p : y) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double scale = std::max(maxx - minx, maxy - miny);
  const Point centre{(minx + maxx) / 2.0, (miny + maxy) / 2.0};
  std::vector<Point> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = {(y[i].x - centre.x) / scale, (y[i].y - centre.y) / scale};

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return y[a].x != y[b].x ? y[a].x < y[b].x : (y[a].y != y[b].y ? y[a].y < y[b].y : a < b);
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && y[order[j]].x - y[order[i]].x <= kCoordTol; ++j) {
      if (std::abs(y[order[j]].y - y[order[i]].y) <= kCoordTol)
        throw DataError("duplicate anchor points " + std::to_string(std::min(order[i], order[j])) + " and " +
                        std::to_string(std::max(order[i], order[j])));
    }
  }

  constexpr double kCollinear = 1e-12;
  std::size_t k = 2;
  while (k < n && std::abs(orient(q[order[0]], q[order[1]], q[order[k]])) <= kCollinear) ++k;
  if (k == n) throw DataError("all anchor points are collinear");

  detail::Mesh mesh(q);
  // Hull as a counter-clockwise cycle of point indices.
  std::vector<std::size_t> hull;
  {
    const std::size_t apex = order[k];
    const bool ccw = orient(q[order[0]], q[order[1]], q[apex]) > 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      std::size_t a = order[i], b = order[i + 1];
      if (!ccw) std::swap(a, b);
      mesh.add(a, b, apex);
    }
    if (ccw) {
      for (std::size_t i = 0; i < k; ++i) hull.push_back(order[i]);
      hull.push_back(apex);
    } else {
      hull.push_back(apex);
      for (std::size_t i = k; i-- > 0;) hull.push_back(order[i]);
    }
  }

  for (std::size_t s = k + 1; s < n; ++s) {
    const std::size_t p = order[s];
    const std::size_t h = hull.size();
    std::vector<char> visible(h, 0);
    bool any = false;
    for (std::size_t i = 0; i < h; ++i) {
      if (orient(q[hull[i]], q[hull[(i + 1) % h]], q[p]) < -kCollinear) {
        visible[i] = 1;
        any = true;
      }
    }
    if (!any) throw DataError("anchor point " + std::to_string(p) + " could not be inserted");
    // Rotate so the visible chain is contiguous starting at index 0.
    std::size_t start = 0;
    while (!(visible[start] && !visible[(start + h - 1) % h])) ++start;
    std::vector<std::size_t> next{hull[start]};
    std::size_t i = start;
    while (visible[i % h]) {
      const std::size_t a = hull[i % h], b = hull[(i + 1) % h];
      mesh.add(a, p, b);
      ++i;
    }
    const std::size_t end = i % h;
    next.push_back(p);
    for (std::size_t j = end; j != start; j = (j + 1) % h) next.push_back(hull[j]);
    hull = std::move(next);
  }

  mesh.legalize(1e-12);

  // Canonical order: rotate each triangle so its smallest index leads, then sort.
  std::vector<std::array<std::size_t, 3>> tris = mesh.triangles();
  for (auto& t : tris) std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
  std::sort(tris.begin(), tris.end());

  Triangulation out;
  out.points.assign(y.begin(), y.end());
  out.triangles = std::move(tris);
  out.cells.reserve(out.triangles.size());
  for (const auto& t : out.triangles) out.cells.emplace_back(y[t[0]], y[t[1]], y[t[2]]);
  for (const Triangle& c : out.cells) out.hull_area += c.area();
  for (const Triangle& c : out.cells) out.weights.push_back(c.area() / out.hull_area);
  return out;
}

// Triangulation consisting of one given triangle (vertex order preserved).
inline Triangulation single_triangle(const Triangle& tri) {
  Triangulation out;
  out.points.assign(tri.vertices().begin(), tri.vertices().end());
  out.triangles = {{0, 1, 2}};
  out.cells = {tri};
  out.weights = {1.0};
  out.hull_area = tri.area();
  return out;
}

// Lowest index of a triangle containing p, or nullopt when p is outside the hull.
inline std::optional<std::size_t> locate(const Triangulation& tr, Point p) {
  for (std::size_t j = 0; j < tr.cells.size(); ++j)
    if (tr.cells[j].contains(p)) return j;
  return std::nullopt;
}

}  // namespace pcd
