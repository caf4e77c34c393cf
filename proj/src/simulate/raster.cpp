// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include "dupcox/raster.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "dupcox/error.hpp"

namespace dupcox {

RasterField::RasterField(Window window, int nx, int ny)
    : RasterField(std::move(window), nx, ny,
                  std::vector<double>(static_cast<std::size_t>(std::max(nx, 0)) *
                                      static_cast<std::size_t>(std::max(ny, 0)))) {}

RasterField::RasterField(Window window, int nx, int ny, std::vector<double> values)
    : window_(std::move(window)), nx_(nx), ny_(ny), values_(std::move(values)) {
  if (nx < 1 || ny < 1) throw config_error("raster: nx and ny must be positive");
  if (values_.size() != static_cast<std::size_t>(nx) * ny)
    throw config_error("raster: value count does not match nx*ny");
  dx_ = window_.width() / nx;
  dy_ = window_.height() / ny;
  build_mask();
}

void RasterField::build_mask() {
  if (window_.is_rectangle()) return;
  mask_.assign(values_.size(), 0);
  for (int iy = 0; iy < ny_; ++iy)
    for (int ix = 0; ix < nx_; ++ix)
      mask_[index(ix, iy)] = window_.contains({x_center(ix), y_center(iy)}) ? 1 : 0;
}

double RasterField::interpolate(Point p) const {
  const Box& b = window_.bounds();
  const double fx = std::clamp((p.x - b.xmin) / dx_ - 0.5, 0.0, nx_ - 1.0);
  const double fy = std::clamp((p.y - b.ymin) / dy_ - 0.5, 0.0, ny_ - 1.0);
  const int ix0 = std::min(static_cast<int>(fx), nx_ - 1);
  const int iy0 = std::min(static_cast<int>(fy), ny_ - 1);
  const int ix1 = std::min(ix0 + 1, nx_ - 1);
  const int iy1 = std::min(iy0 + 1, ny_ - 1);
  const double tx = fx - ix0;
  const double ty = fy - iy0;
  const double bottom = (1.0 - tx) * at(ix0, iy0) + tx * at(ix1, iy0);
  const double top = (1.0 - tx) * at(ix0, iy1) + tx * at(ix1, iy1);
  return (1.0 - ty) * bottom + ty * top;
}

double RasterField::integral() const {
  double sum = 0.0;
  for (int iy = 0; iy < ny_; ++iy) {
    double row_sum = 0.0;
    for (int ix = 0; ix < nx_; ++ix)
      if (inside(ix, iy)) row_sum += at(ix, iy);
    sum += row_sum;
  }
  return sum * cell_area();
}

double RasterField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double RasterField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

bool RasterField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void write_raster_csv(std::ostream& out, const RasterField& field) {
  const Box& b = field.window().bounds();
  out << "# dupcox raster\n";
  out << fmt::format("window,{},{},{},{}\n", b.xmin, b.xmax, b.ymin, b.ymax);
  out << fmt::format("nx,{}\nny,{}\n", field.nx(), field.ny());
  for (int iy = field.ny() - 1; iy >= 0; --iy) {
    std::string line;
    for (int ix = 0; ix < field.nx(); ++ix) {
      if (ix > 0) line += ',';
      line += fmt::format("{}", field.at(ix, iy));
    }
    line += '\n';
    out << line;
  }
}

void write_raster_csv(const std::string& path, const RasterField& field) {
  std::ofstream out(path);
  if (!out) throw io_error(fmt::format("cannot write raster {}", path));
  write_raster_csv(out, field);
  if (!out) throw io_error(fmt::format("error writing raster {}", path));
}

RasterField read_raster_csv(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw io_error(fmt::format("raster: missing {}", what));
  };
  next_line("comment header");
  if (line.rfind("#", 0) != 0) throw io_error("raster: first line must be a comment");
  next_line("window line");
  double xmin, xmax, ymin, ymax;
  if (std::sscanf(line.c_str(), "window,%lf,%lf,%lf,%lf", &xmin, &xmax, &ymin,
                  &ymax) != 4)
    throw io_error("raster: malformed window line");
  int nx = 0, ny = 0;
  next_line("nx line");
  if (std::sscanf(line.c_str(), "nx,%d", &nx) != 1) throw io_error("raster: malformed nx line");
  next_line("ny line");
  if (std::sscanf(line.c_str(), "ny,%d", &ny) != 1) throw io_error("raster: malformed ny line");
  if (nx < 1 || ny < 1) throw io_error("raster: nx, ny must be positive");

  std::vector<double> values(static_cast<std::size_t>(nx) * ny);
  for (int iy = ny - 1; iy >= 0; --iy) {
    next_line("data row");
    std::stringstream ss(line);
    std::string cell;
    for (int ix = 0; ix < nx; ++ix) {
      if (!std::getline(ss, cell, ','))
        throw io_error(fmt::format("raster: row {} is short", ny - 1 - iy));
      try {
        values[static_cast<std::size_t>(iy) * nx + ix] = std::stod(cell);
      } catch (const std::exception&) {
        throw io_error(fmt::format("raster: bad number '{}'", cell));
      }
    }
  }
  return RasterField(Window::rectangle(xmin, xmax, ymin, ymax), nx, ny,
                     std::move(values));
}

RasterField read_raster_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(fmt::format("cannot open raster {}", path));
  return read_raster_csv(in);
}

}  // namespace dupcox
