// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "dupcox/geometry.hpp"
#include "dupcox/raster.hpp"

namespace dupcox {

/// (N - 1) / |W|. Throws a config error for N < 2.
double constant_intensity(const PointPattern& pattern);

/// Evaluation grid for kernel estimates. Each kernel is stored as its exact
/// cell averages, and q_h sums the same cell masses over the window, so the
/// raster integrates to one up to the truncation at 10 h.
struct IntensityGrid {
  int nx = 256;
  int ny = 256;
};

/// Gaussian edge factor q_h(x | W) = h^-2 int_W kappa((u - x) / h) du.
double edge_factor(Point x, double h, const Window& window, IntensityGrid grid);

/// Fixed-bandwidth Gaussian kernel estimate
///   f(s) = n^-1 sum_i kappa_h(s - x_i) / q_h(x_i | W)
/// on the grid. This is a density: it integrates to 1 over W. Multiply by N
/// for an intensity.
RasterField kernel_intensity_fixed(const PointPattern& pattern, double h,
                                   IntensityGrid grid = {});

/// The same estimator evaluated exactly at the data points (no raster
/// interpolation), scaled to an intensity (times N).
std::vector<double> kernel_intensity_at_points(const PointPattern& pattern,
                                               double h, IntensityGrid grid = {});

struct AdaptiveIntensity {
  RasterField density;             // integrates to 1 over W
  std::vector<double> bandwidths;  // h(x_i), one per point
  double gamma = 0.0;              // geometric mean of pilot^(-1/2)
};

/// Adaptive estimate with per-point bandwidths h0 * pilot(x_i)^(-1/2) / gamma.
/// Each point uses its own bandwidth in both the kernel and its edge factor.
/// pilot_h <= 0 means pilot_h = h0.
AdaptiveIntensity kernel_intensity_adaptive(const PointPattern& pattern,
                                            double h0, double pilot_h = 0.0,
                                            IntensityGrid grid = {});

/// 25 log-spaced values from 4 grid cells to a quarter of the window diameter.
std::vector<double> default_bandwidth_candidates(const Window& window,
                                                 IntensityGrid grid = {});

struct BandwidthSelection {
  double h = 0.0;
  std::vector<double> candidates;
  std::vector<double> criterion;  // (sum_i 1/lambda(x_i) - |W|)^2 per candidate
};

/// Cronie-van Lieshout selection over the candidate list.
BandwidthSelection select_bandwidth_cvl(const PointPattern& pattern,
                                        std::span<const double> candidates,
                                        IntensityGrid grid = {});

/// sqrt(ARE(phi)^2 + ARE(sigma2)^2).
double red(double phi_hat, double sigma2_hat, double phi_true,
           double sigma2_true);

}  // namespace dupcox
