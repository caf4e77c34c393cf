#pragma once

#include <cmath>
#include <vector>

#include "dupcox/geometry.hpp"
#include "dupcox/random.hpp"

namespace dupcox::test {

inline bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

inline PointPattern uniform_pattern(const Window& w, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const Box& b = w.bounds();
  std::vector<Point> pts;
  while (pts.size() < n) {
    const Point p{rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
    if (w.contains(p)) pts.push_back(p);
  }
  return PointPattern(w, std::move(pts));
}

}  // namespace dupcox::test
