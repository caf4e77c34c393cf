// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <fmt/format.h>

#include "dupcox/estimation.hpp"
#include "dupcox/random.hpp"

namespace dupcox {
namespace {

// duplicated[i] is true when point i belongs to a group of two or more.
std::vector<char> duplicated_flags(const PointPattern& pattern, double tol,
                                   std::vector<char>* keep_first = nullptr) {
  if (tol < 0.0) tol = default_duplicate_tolerance(pattern.window());
  const MultiplicityMap m = find_duplicates(pattern, tol);
  std::vector<char> dup(pattern.size(), 0);
  if (keep_first != nullptr) keep_first->assign(pattern.size(), 1);
  for (const auto& g : m.groups) {
    if (g.count() < 2) continue;
    for (std::size_t k = 0; k < g.members.size(); ++k) {
      dup[g.members[k]] = 1;
      // members are ascending, so the first is the earliest in input order
      if (keep_first != nullptr && k > 0) (*keep_first)[g.members[k]] = 0;
    }
  }
  return dup;
}

}  // namespace

PointPattern dedup(const PointPattern& pattern, double tol) {
  std::vector<char> keep;
  duplicated_flags(pattern, tol, &keep);
  std::vector<Point> out;
  out.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (keep[i]) out.push_back(pattern[i]);
  return PointPattern(pattern.window(), std::move(out));
}

PointPattern jitter(const PointPattern& pattern, double d, std::uint64_t seed,
                    double tol) {
  if (!(d > 0.0)) throw config_error(fmt::format("jitter: d must be > 0 (got {})", d));
  const std::vector<char> dup = duplicated_flags(pattern, tol);
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (!dup[i]) {
      out.push_back(pattern[i]);
      continue;
    }
    const double ox = rng.uniform(-d, d);
    const double oy = rng.uniform(-d, d);
    const Point p{pattern[i].x + ox, pattern[i].y + oy};
    if (pattern.window().contains(p)) out.push_back(p);
  }
  return PointPattern(pattern.window(), std::move(out));
}

PointPattern redistribute(const PointPattern& pattern,
                          const Partition& partition, std::uint64_t seed,
                          double tol) {
  if (!(pattern.window() == partition.window()))
    throw config_error("redistribute: pattern and partition windows differ");
  const std::vector<char> dup = duplicated_flags(pattern, tol);
  Rng rng(seed);
  std::vector<Point> out = pattern.points();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (dup[i]) out[i] = partition.sample_in_cell(partition.locate(out[i]), rng);
  return PointPattern(pattern.window(), std::move(out));
}

}  // namespace dupcox
