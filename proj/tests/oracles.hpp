#pragma once

// Independent reference implementations used only by the tests. None of them call the
// library routine they are checking.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "pcd/geometry.hpp"

namespace oracle {

using pcd::Point;

inline double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Barycentric weights as ratios of sub-triangle areas.
inline std::array<double, 3> area_weights(const std::array<Point, 3>& v, Point p) {
  const double total = cross(v[0], v[1], v[2]);
  return {cross(p, v[1], v[2]) / total, cross(v[0], p, v[2]) / total, cross(v[0], v[1], p) / total};
}

// Distance from vertex j to the line through p parallel to the opposite edge.
inline double height_distance(const std::array<Point, 3>& v, std::size_t j, Point p) {
  const Point a = v[(j + 1) % 3], b = v[(j + 2) % 3];
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const double nx = -(b.y - a.y) / len, ny = (b.x - a.x) / len;
  return std::abs((p.x - v[j].x) * nx + (p.y - v[j].y) * ny);
}

// Vertex region as the largest area weight, lowest index on ties.
inline std::size_t median_region(const std::array<Point, 3>& v, Point p) {
  const auto w = area_weights(v, p);
  std::size_t best = 0;
  for (std::size_t j = 1; j < 3; ++j)
    if (w[j] > w[best]) best = j;
  return best;
}

// Membership y in N^r(x) via the similar-triangle construction in Euclidean distances.
inline bool in_proximity(const std::array<Point, 3>& v, double r, Point x, Point y) {
  for (std::size_t j = 0; j < 3; ++j)
    if (std::abs(x.x - v[j].x) <= 1e-12 && std::abs(x.y - v[j].y) <= 1e-12)
      return std::abs(x.x - y.x) <= 1e-12 && std::abs(x.y - y.y) <= 1e-12;
  const std::size_t j = median_region(v, x);
  const Point a = v[(j + 1) % 3], b = v[(j + 2) % 3];
  const double h = std::abs(cross(a, b, v[j])) / std::hypot(b.x - a.x, b.y - a.y);
  return height_distance(v, j, y) <= r * height_distance(v, j, x) + 1e-12 * h;
}

// Brute-force Delaunay: all triples whose circumcircle contains no other point.
inline std::set<std::array<std::size_t, 3>> delaunay_triples(const std::vector<Point>& p) {
  std::set<std::array<std::size_t, 3>> out;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double d = 2.0 * cross(p[i], p[j], p[k]);
        if (std::abs(d) < 1e-14) continue;
        const double a2 = p[i].x * p[i].x + p[i].y * p[i].y;
        const double b2 = p[j].x * p[j].x + p[j].y * p[j].y;
        const double c2 = p[k].x * p[k].x + p[k].y * p[k].y;
        const double ux = (a2 * (p[j].y - p[k].y) + b2 * (p[k].y - p[i].y) + c2 * (p[i].y - p[j].y)) / d;
        const double uy = (a2 * (p[k].x - p[j].x) + b2 * (p[i].x - p[k].x) + c2 * (p[j].x - p[i].x)) / d;
        const double rad = std::hypot(p[i].x - ux, p[i].y - uy);
        bool empty = true;
        for (std::size_t m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          if (std::hypot(p[m].x - ux, p[m].y - uy) < rad * (1 - 1e-9)) empty = false;
        }
        if (empty) out.insert({i, j, k});
      }
  return out;
}

// Number of convex hull vertices (monotone chain, collinear points excluded).
inline std::size_t hull_size(std::vector<Point> p) {
  std::sort(p.begin(), p.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  std::vector<Point> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  return k - 1;
}

// Standard normal CDF by composite Simpson integration of the density from 0.
inline double normal_cdf(double x) {
  const int m = 20000;
  const double a = 0.0, b = std::abs(x), h = (b - a) / m;
  auto f = [](double t) { return std::exp(-t * t / 2) / std::sqrt(2 * M_PI); };
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  const double half = s * h / 3;
  return x >= 0 ? 0.5 + half : 0.5 - half;
}

}  // namespace oracle
