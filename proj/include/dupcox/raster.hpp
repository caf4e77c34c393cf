// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dupcox/geometry.hpp"

namespace dupcox {

/// Scalar field on an nx by ny grid of equal cells covering the window's
/// bounding box. Row-major with row 0 at the bottom (ymin). For polygon
/// windows, cells whose centre falls outside the window are masked out of
/// integrals.
class RasterField {
 public:
  RasterField(Window window, int nx, int ny);
  RasterField(Window window, int nx, int ny, std::vector<double> values);

  const Window& window() const { return window_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }

  double x_center(int ix) const { return window_.bounds().xmin + (ix + 0.5) * dx_; }
  double y_center(int iy) const { return window_.bounds().ymin + (iy + 0.5) * dy_; }

  double& at(int ix, int iy) { return values_[index(ix, iy)]; }
  double at(int ix, int iy) const { return values_[index(ix, iy)]; }
  std::span<double> row(int iy) { return {values_.data() + index(0, iy), static_cast<std::size_t>(nx_)}; }
  std::span<const double> row(int iy) const { return {values_.data() + index(0, iy), static_cast<std::size_t>(nx_)}; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool inside(int ix, int iy) const { return mask_.empty() || mask_[index(ix, iy)] != 0; }

  /// Bilinear interpolation between cell centres, constant beyond the
  /// outermost centres.
  double interpolate(Point p) const;
  /// Midpoint-rule integral over the unmasked cells.
  double integral() const;
  double min() const;
  double max() const;
  bool all_finite() const;

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * nx_ + ix;
  }

 private:
  void build_mask();

  Window window_;
  int nx_, ny_;
  double dx_, dy_;
  std::vector<double> values_;
  std::vector<unsigned char> mask_;  // empty for rectangles
};

/// CSV raster format: four header lines
///   # dupcox raster
///   window,xmin,xmax,ymin,ymax
///   nx,<nx>
///   ny,<ny>
/// followed by ny rows of nx values, top (north) row first.
void write_raster_csv(std::ostream& out, const RasterField& field);
void write_raster_csv(const std::string& path, const RasterField& field);
/// The header only carries the bounding box, so the result has a
/// rectangular window.
RasterField read_raster_csv(std::istream& in);
RasterField read_raster_csv(const std::string& path);

}  // namespace dupcox
