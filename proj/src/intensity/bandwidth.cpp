// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/intensity.hpp"

namespace dupcox {

std::vector<double> default_bandwidth_candidates(const Window& window,
                                                 IntensityGrid grid) {
  constexpr int kCount = 25;
  const Box& b = window.bounds();
  const double cell = std::max(b.width() / grid.nx, b.height() / grid.ny);
  const double lo = 4.0 * cell;
  const double hi = std::hypot(b.width(), b.height()) / 4.0;
  if (!(hi > lo))
    throw config_error("default bandwidth grid is empty: refine the intensity grid");
  std::vector<double> out(kCount);
  const double step = std::log(hi / lo) / (kCount - 1);
  for (int k = 0; k < kCount; ++k) out[k] = lo * std::exp(step * k);
  out.back() = hi;
  return out;
}

BandwidthSelection select_bandwidth_cvl(const PointPattern& pattern,
                                        std::span<const double> candidates,
                                        IntensityGrid grid) {
  if (candidates.empty())
    throw config_error("select_bandwidth_cvl: no candidate bandwidths");
  for (double h : candidates)
    if (!(h > 0.0)) throw config_error("select_bandwidth_cvl: candidates must be > 0");
  if (pattern.empty())
    throw config_error("select_bandwidth_cvl: pattern has no points");

  BandwidthSelection sel;
  sel.candidates.assign(candidates.begin(), candidates.end());
  sel.criterion.assign(candidates.size(), std::numeric_limits<double>::infinity());
  const double area = pattern.window().area();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const std::vector<double> lam =
        kernel_intensity_at_points(pattern, candidates[k], grid);
    double s = 0.0;
    bool ok = true;
    for (double l : lam) {
      if (!(l > 0.0)) {
        ok = false;
        break;
      }
      s += 1.0 / l;
    }
    if (!ok) continue;
    sel.criterion[k] = (s - area) * (s - area);
    if (sel.criterion[k] < best) {
      best = sel.criterion[k];
      sel.h = candidates[k];
    }
  }
  if (!(sel.h > 0.0))
    throw numerical_error(
        "select_bandwidth_cvl: every candidate gives zero intensity at some data point");
  return sel;
}

}  // namespace dupcox
