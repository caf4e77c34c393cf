// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dupcox {

class Rng;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b);

/// Axis-aligned bounding box.
struct Box {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(Point p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

// Polygon helpers. Rings are implicitly closed (last vertex != first).
double signed_area(std::span<const Point> ring);
Point polygon_centroid(std::span<const Point> ring);
Box bounding_box(std::span<const Point> ring);
/// True when p lies inside the ring or on its boundary.
bool ring_contains(std::span<const Point> ring, Point p);
Point nearest_boundary_point(std::span<const Point> ring, Point p);
double boundary_distance(std::span<const Point> ring, Point p);
/// No two non-adjacent edges intersect and no edge is degenerate.
bool is_simple(std::span<const Point> ring);

/// Observation window: a rectangle or a simple polygon (stored CCW).
class Window {
 public:
  static Window rectangle(double xmin, double xmax, double ymin, double ymax);
  static Window polygon(std::vector<Point> ring);

  bool is_rectangle() const { return rectangle_; }
  double area() const { return area_; }
  const Box& bounds() const { return box_; }
  /// Side lengths of the bounding box (L_x, L_y).
  double width() const { return box_.width(); }
  double height() const { return box_.height(); }
  const std::vector<Point>& ring() const { return ring_; }

  bool contains(Point p) const;
  /// Distance from an interior point to the window boundary.
  double boundary_distance(Point p) const;

  std::string describe() const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window() = default;

  bool rectangle_ = true;
  Box box_;
  std::vector<Point> ring_;
  double area_ = 0.0;
};

/// Finite set of locations inside a window. Coincident points are allowed.
class PointPattern {
 public:
  /// Throws a config error if any point falls outside the window.
  PointPattern(Window window, std::vector<Point> points);

  const Window& window() const { return window_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  Point operator[](std::size_t i) const { return points_[i]; }

 private:
  Window window_;
  std::vector<Point> points_;
};

struct Cell {
  std::vector<Point> ring;  // CCW
  double area = 0.0;
  Point centroid;
  /// Location used when snapping points of this cell: the centroid when it
  /// lies in the window, otherwise the nearest point of the cell to it.
  Point snap;
  Box box;
};

/// Decomposition of a window into interior-disjoint cells.
class Partition {
 public:
  enum class Kind { grid, tessellation, polygons };

  Kind kind() const { return kind_; }
  const Window& window() const { return window_; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  const Cell& operator[](std::size_t k) const { return cells_[k]; }
  double mean_cell_area() const;
  /// Grid dimensions; zero unless kind() == grid.
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const std::vector<Point>& seeds() const { return seeds_; }

  /// Index of the cell whose closure holds p; ties go to the lowest index.
  /// Throws a config error when p is outside the window.
  std::size_t locate(Point p) const;

  /// Uniform draw inside cell k (rejection from the bounding box for
  /// non-rectangular cells). Throws a numerical error after max_tries misses.
  Point sample_in_cell(std::size_t k, Rng& rng,
                       std::size_t max_tries = 1'000'000) const;

  friend Partition make_regular_grid(const Window&, int, int);
  friend Partition make_dirichlet_tessellation(const Window&,
                                               std::span<const Point>);
  friend Partition make_polygon_partition(const Window&,
                                          std::vector<std::vector<Point>>);

 private:
  Partition(Kind kind, Window window) : kind_(kind), window_(std::move(window)) {}
  void add_cell(std::vector<Point> ring);

  Kind kind_;
  Window window_;
  std::vector<Cell> cells_;
  int nx_ = 0, ny_ = 0;
  std::vector<Point> seeds_;
};

/// nx by ny congruent axis-aligned cells, indexed row-major from the
/// lower-left corner (k = iy * nx + ix).
Partition make_regular_grid(const Window& window, int nx, int ny);

/// Voronoi cells of distinct seeds, clipped to the window.
Partition make_dirichlet_tessellation(const Window& window,
                                      std::span<const Point> seeds);

/// Validated user polygons: simple, inside the window, non-overlapping, and
/// covering it (areas sum to |W| within 1e-6 relative).
Partition make_polygon_partition(const Window& window,
                                 std::vector<std::vector<Point>> rings);

/// Parses `{ "cells": [ { "id": ..., "ring": [[x,y], ...] }, ... ] }`. An
/// optional top-level "window" (either {xmin,xmax,ymin,ymax} or a ring) is
/// honoured when no window is passed; otherwise the bounding box of all cells
/// is used.
Partition load_partition(const std::string& json_text,
                         const std::optional<Window>& window = std::nullopt);
Partition load_partition_file(const std::string& path,
                              const std::optional<Window>& window = std::nullopt);
std::string partition_to_json(const Partition& partition);

struct DuplicateGroup {
  Point location;                    // first member by input order
  std::vector<std::size_t> members;  // input indices, ascending

  std::size_t count() const { return members.size(); }
};

/// Distinct locations with their multiplicities, ordered by first occurrence.
struct MultiplicityMap {
  std::vector<DuplicateGroup> groups;

  std::size_t total() const;
  /// Number of points that share their location with at least one other.
  std::size_t duplicated_points() const;
  std::size_t max_multiplicity() const;
};

/// 1e-9 times the longer window side.
double default_duplicate_tolerance(const Window& window);

/// Groups points connected by pairwise distance <= tol (transitively).
MultiplicityMap find_duplicates(const PointPattern& pattern, double tol);

/// Diameter of the circle with the given area: 2 sqrt(area / pi).
double equivalent_diameter(double area);

inline double distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace dupcox
