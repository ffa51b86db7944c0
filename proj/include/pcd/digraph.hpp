#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcd/delaunay.hpp"
#include "pcd/error.hpp"
#include "pcd/geometry.hpp"

namespace pcd {

enum class OutsidePolicy { reject, drop };

struct CellCount {
  std::size_t points = 0;
  std::uint64_t arcs = 0;
};

struct PCDigraph {
  std::size_t n = 0;
  std::vector<CellCount> cells;
  std::uint64_t total_arcs = 0;
  RFactor r{1.0};
  std::size_t dropped = 0;
};

// Arc count of the digraph on `pts` (all inside `tri`) by the direct double loop.
inline std::uint64_t count_arcs_direct(const Triangle& tri, std::span<const Point> pts, RFactor r) {
  std::vector<Barycentric> b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) b[i] = tri.barycentric(pts[i]);
  std::uint64_t arcs = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j && proximity_contains(tri, r, pts[i], b[i], pts[j], b[j])) ++arcs;
  return arcs;
}

// Explicit arc list (i, j) meaning pts[j] in N^r(pts[i]); intended for small samples.
inline std::vector<std::pair<std::size_t, std::size_t>> arc_list(const Triangle& tri,
                                                                 std::span<const Point> pts, RFactor r) {
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j && proximity_contains(tri, r, pts[i], pts[j])) arcs.emplace_back(i, j);
  return arcs;
}

// Counts arcs within one triangle for any r in O(n log n) after an O(n log n) setup.
// Gives exactly the count of the direct loop: each point's out-degree is the number of
// keys 1 - b_j(y) not exceeding its reach, found by binary search in sorted keys.
class CellArcCounter {
 public:
  CellArcCounter(const Triangle& tri, std::span<const Point> pts) : pts_(pts.begin(), pts.end()) {
    const std::size_t n = pts.size();
    key_x_.reserve(n);
    dom_.reserve(n);
    for (auto& k : keys_) k.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Barycentric b = tri.barycentric(pts[i]);
      for (std::size_t k = 0; k < 3; ++k) keys_[k].push_back(1.0 - b[k]);
      if (tri.vertex_at(pts[i])) {
        vertex_points_.push_back(i);
        continue;
      }
      const std::size_t j = b.dominant();
      dom_.push_back(static_cast<std::uint8_t>(j));
      key_x_.push_back(1.0 - b[j]);
    }
    for (auto& k : keys_) std::sort(k.begin(), k.end());
  }

  [[nodiscard]] std::size_t size() const { return pts_.size(); }

  [[nodiscard]] std::uint64_t count(RFactor r) const {
    const std::size_t n = pts_.size();
    std::uint64_t arcs = 0;
    if (r.is_infinite()) {
      arcs = static_cast<std::uint64_t>(key_x_.size()) * (n == 0 ? 0 : n - 1);
    } else {
      const double rv = r.value();
      for (std::size_t i = 0; i < key_x_.size(); ++i) {
        const double reach = detail::reach(rv, key_x_[i]);
        const auto& keys = keys_[dom_[i]];
        const auto hits =
            static_cast<std::uint64_t>(std::upper_bound(keys.begin(), keys.end(), reach) - keys.begin());
        // The point itself is among the keys; drop it if it passed the test.
        arcs += hits - (key_x_[i] <= reach ? 1 : 0);
      }
    }
    // A point sitting on a vertex of the triangle only reaches exact duplicates of itself.
    for (std::size_t i : vertex_points_)
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && nearly_equal(pts_[i], pts_[j])) ++arcs;
    return arcs;
  }

 private:
  std::vector<Point> pts_;
  std::array<std::vector<double>, 3> keys_;
  std::vector<double> key_x_;
  std::vector<std::uint8_t> dom_;
  std::vector<std::size_t> vertex_points_;
};

// A sample split into the cells of a triangulation; builds the digraph for any r.
class PartitionedSample {
 public:
  PartitionedSample(const Triangulation& tr, std::span<const Point> x,
                    OutsidePolicy policy = OutsidePolicy::reject)
      : members_(tr.size()) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!finite(x[i])) throw DataError("data point " + std::to_string(i) + " is not finite");
      const auto j = locate(tr, x[i]);
      if (!j) {
        if (policy == OutsidePolicy::reject)
          throw DataError("data point " + std::to_string(i) + " lies outside the convex hull of the anchors");
        ++dropped_;
        continue;
      }
      members_[*j].push_back(x[i]);
    }
    counters_.reserve(tr.size());
    for (std::size_t j = 0; j < tr.size(); ++j) counters_.emplace_back(tr.cells[j], members_[j]);
  }

  [[nodiscard]] std::size_t dropped() const { return dropped_; }
  [[nodiscard]] const std::vector<std::vector<Point>>& members() const { return members_; }

  [[nodiscard]] PCDigraph digraph(RFactor r) const {
    PCDigraph d;
    d.r = r;
    d.dropped = dropped_;
    d.cells.reserve(counters_.size());
    for (const auto& c : counters_) {
      const CellCount cc{c.size(), c.count(r)};
      d.n += cc.points;
      d.total_arcs += cc.arcs;
      d.cells.push_back(cc);
    }
    return d;
  }

 private:
  std::vector<std::vector<Point>> members_;
  std::vector<CellArcCounter> counters_;
  std::size_t dropped_ = 0;
};

inline PCDigraph build_digraph(const Triangulation& tr, std::span<const Point> x, RFactor r,
                               OutsidePolicy policy = OutsidePolicy::reject) {
  return PartitionedSample(tr, x, policy).digraph(r);
}

inline double relative_density(const PCDigraph& d) {
  if (d.n < 2) throw DomainError("relative density needs at least 2 points");
  const double n = static_cast<double>(d.n);
  return static_cast<double>(d.total_arcs) / (n * (n - 1.0));
}

// Arcs over the number of possible within-cell arcs.
inline double adjusted_density(const PCDigraph& d) {
  std::uint64_t possible = 0;
  for (const auto& c : d.cells)
    possible += static_cast<std::uint64_t>(c.points) * (c.points ? c.points - 1 : 0);
  if (possible == 0) throw DomainError("adjusted density undefined: no cell holds 2 or more points");
  return static_cast<double>(d.total_arcs) / static_cast<double>(possible);
}

// Sum of w_j^2 times the per-cell density over cells holding at least 2 points.
inline double weighted_u(const PCDigraph& d, std::span<const double> weights) {
  if (weights.size() != d.cells.size()) throw DomainError("weight count does not match cell count");
  double u = 0.0;
  bool any = false;
  for (std::size_t j = 0; j < d.cells.size(); ++j) {
    const auto& c = d.cells[j];
    if (c.points < 2) continue;
    any = true;
    const double nj = static_cast<double>(c.points);
    u += weights[j] * weights[j] * static_cast<double>(c.arcs) / (nj * (nj - 1.0));
  }
  if (!any) throw DomainError("weighted U undefined: no cell holds 2 or more points");
  return u;
}

inline double weighted_u(const PCDigraph& d, const Triangulation& tr) { return weighted_u(d, tr.weights); }

}  // namespace pcd
