// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dupcox/geometry.hpp"
#include "dupcox/raster.hpp"

namespace dupcox {

enum class KVariant { hom, inhom };
enum class EdgeCorrection { translation, border };

struct KEstimate {
  std::vector<double> r;
  std::vector<double> khat;
  KVariant variant = KVariant::hom;
  EdgeCorrection correction = EdgeCorrection::translation;
  std::size_t n_points = 0;
  std::string window;     // Window::describe()
  std::string intensity;  // provenance of the intensity used
  std::vector<std::string> warnings;

  double r_max() const { return r.empty() ? 0.0 : r.back(); }
};

/// n equally spaced distances on [0, r_max].
std::vector<double> default_r_grid(double r_max, std::size_t n = 513);

/// |W| / area(W intersected with W shifted by u - s). Rectangle windows only;
/// throws a numerical error when the shifted copy does not overlap.
double translation_correction(Point s, Point u, const Window& window);

/// Homogeneous K with lambda = (N - 1) / |W|:
///   K(r) = |W| / (N (N - 1)) sum_{i != j} 1[d_ij <= r] e_ij.
/// Translation correction on rectangles, border correction on polygons.
/// Coincident points are counted with weight 1 at every r.
KEstimate k_hom(const PointPattern& pattern, std::span<const double> r);

/// Inhomogeneous K: sum_{i != j} 1[d_ij <= r] e_ij / (lambda_i lambda_j |W|),
/// lambda_i interpolated bilinearly from the raster.
KEstimate k_inhom(const PointPattern& pattern, const RasterField& lambda,
                  std::span<const double> r, std::string provenance = "raster");

/// As above with lambda given at each data point.
KEstimate k_inhom(const PointPattern& pattern, std::span<const double> lambda,
                  std::span<const double> r, std::string provenance = "per-point");

void write_kest_csv(std::ostream& out, const KEstimate& k);
void write_kest_csv(const std::string& path, const KEstimate& k);
KEstimate read_kest_csv(std::istream& in);
KEstimate read_kest_csv(const std::string& path);

}  // namespace dupcox
