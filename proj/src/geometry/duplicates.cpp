// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "dupcox/error.hpp"
#include "dupcox/geometry.hpp"

namespace dupcox {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // The smaller index stays the root so group order follows input order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct CellKey {
  long long ix, iy;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return std::hash<long long>()(k.ix * 0x9e3779b97f4a7c15LL ^ k.iy);
  }
};

}  // namespace

std::size_t MultiplicityMap::total() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.count();
  return n;
}

std::size_t MultiplicityMap::duplicated_points() const {
  std::size_t n = 0;
  for (const auto& g : groups)
    if (g.count() > 1) n += g.count();
  return n;
}

std::size_t MultiplicityMap::max_multiplicity() const {
  std::size_t m = 0;
  for (const auto& g : groups) m = std::max(m, g.count());
  return m;
}

double default_duplicate_tolerance(const Window& window) {
  return 1e-9 * std::max(window.width(), window.height());
}

MultiplicityMap find_duplicates(const PointPattern& pattern, double tol) {
  if (!(tol >= 0.0)) throw config_error("find_duplicates: tol must be >= 0");
  const auto& pts = pattern.points();
  const std::size_t n = pts.size();
  DisjointSets sets(n);

  if (tol == 0.0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
      if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
      return a < b;
    });
    for (std::size_t i = 1; i < n; ++i)
      if (pts[order[i]] == pts[order[i - 1]]) sets.unite(order[i], order[i - 1]);
  } else {
    // Bucket by tol-sized cells; any pair within tol sits in adjacent cells.
    const Box& b = pattern.window().bounds();
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> buckets;
    auto key_of = [&](Point p) {
      return CellKey{static_cast<long long>(std::floor((p.x - b.xmin) / tol)),
                     static_cast<long long>(std::floor((p.y - b.ymin) / tol))};
    };
    for (std::size_t i = 0; i < n; ++i) buckets[key_of(pts[i])].push_back(i);
    const double tol2 = tol * tol;
    for (std::size_t i = 0; i < n; ++i) {
      const CellKey k = key_of(pts[i]);
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy) {
          auto it = buckets.find({k.ix + dx, k.iy + dy});
          if (it == buckets.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i) continue;
            const double ex = pts[i].x - pts[j].x, ey = pts[i].y - pts[j].y;
            if (ex * ex + ey * ey <= tol2) sets.unite(i, j);
          }
        }
    }
  }

  MultiplicityMap map;
  std::vector<std::size_t> group_of(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (group_of[root] == n) {
      group_of[root] = map.groups.size();
      map.groups.push_back({pts[root], {}});
    }
    map.groups[group_of[root]].members.push_back(i);
  }
  return map;
}

}  // namespace dupcox
