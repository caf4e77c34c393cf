// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/geometry.hpp"

namespace dupcox {
namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Point closest_on_segment(Point a, Point b, Point p) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return a;
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return {a.x + t * dx, a.y + t * dy};
}

int orientation(Point a, Point b, Point c) {
  const double v = cross(a, b, c);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

double signed_area(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Shoelace relative to the first vertex to limit cancellation.
  const Point o = ring[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) twice += cross(o, ring[i], ring[i + 1]);
  return 0.5 * twice;
}

Point polygon_centroid(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n == 0) return {};
  const Point o = ring[0];
  double twice = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double c = cross(o, ring[i], ring[i + 1]);
    twice += c;
    cx += c * (ring[i].x + ring[i + 1].x - 2.0 * o.x);
    cy += c * (ring[i].y + ring[i + 1].y - 2.0 * o.y);
  }
  if (twice == 0.0) {
    Point mean;
    for (auto p : ring) {
      mean.x += p.x / static_cast<double>(n);
      mean.y += p.y / static_cast<double>(n);
    }
    return mean;
  }
  return {o.x + cx / (3.0 * twice), o.y + cy / (3.0 * twice)};
}

Box bounding_box(std::span<const Point> ring) {
  Box b{std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  for (auto p : ring) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

bool ring_contains(std::span<const Point> ring, Point p) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = ring[j];
    const Point b = ring[i];
    if (cross(a, b, p) == 0.0 && on_segment(a, b, p)) return true;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_at = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  if (inside) return true;
  // Points within rounding of an edge count as boundary points.
  const Box box = bounding_box(ring);
  const double scale = std::max(box.width(), box.height());
  return boundary_distance(ring, p) <= 1e-12 * scale;
}

Point nearest_boundary_point(std::span<const Point> ring, Point p) {
  const std::size_t n = ring.size();
  Point best = ring.empty() ? p : ring[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point c = closest_on_segment(ring[j], ring[i], p);
    const double d = distance(c, p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double boundary_distance(std::span<const Point> ring, Point p) {
  return distance(nearest_boundary_point(ring, p), p);
}

bool is_simple(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (ring[i] == ring[(i + 1) % n]) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i], b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges
      const Point c = ring[j], d = ring[(j + 1) % n];
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return std::fabs(signed_area(ring)) > 0.0;
}

Window Window::rectangle(double xmin, double xmax, double ymin, double ymax) {
  if (!(xmax > xmin) || !(ymax > ymin) || !std::isfinite(xmin) ||
      !std::isfinite(xmax) || !std::isfinite(ymin) || !std::isfinite(ymax))
    throw config_error(fmt::format(
        "window: degenerate rectangle [{},{}]x[{},{}]", xmin, xmax, ymin, ymax));
  Window w;
  w.rectangle_ = true;
  w.box_ = {xmin, xmax, ymin, ymax};
  w.ring_ = {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
  w.area_ = (xmax - xmin) * (ymax - ymin);
  return w;
}

Window Window::polygon(std::vector<Point> ring) {
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (!is_simple(ring)) throw config_error("window: polygon is not simple");
  if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
  Window w;
  w.rectangle_ = false;
  w.box_ = bounding_box(ring);
  w.area_ = signed_area(ring);
  w.ring_ = std::move(ring);
  return w;
}

bool Window::contains(Point p) const {
  if (rectangle_) return box_.contains(p);
  return box_.contains(p) && ring_contains(ring_, p);
}

double Window::boundary_distance(Point p) const {
  if (rectangle_)
    return std::min({p.x - box_.xmin, box_.xmax - p.x, p.y - box_.ymin,
                     box_.ymax - p.y});
  return dupcox::boundary_distance(ring_, p);
}

std::string Window::describe() const {
  if (rectangle_)
    return fmt::format("rect[{},{}]x[{},{}]", box_.xmin, box_.xmax, box_.ymin,
                       box_.ymax);
  return fmt::format("polygon[{} vertices, area {}]", ring_.size(), area_);
}

PointPattern::PointPattern(Window window, std::vector<Point> points)
    : window_(std::move(window)), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!window_.contains(points_[i]))
      throw config_error(fmt::format("point {} ({}, {}) lies outside {}", i,
                                     points_[i].x, points_[i].y,
                                     window_.describe()));
  }
}

double equivalent_diameter(double area) {
  if (!(area > 0.0) || !std::isfinite(area))
    throw config_error("equivalent_diameter: area must be positive");
  return 2.0 * std::sqrt(area / std::numbers::pi);
}

}  // namespace dupcox
