// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/geometry.hpp"
#include "dupcox/random.hpp"
#include "json.hpp"

namespace dupcox {
namespace {

constexpr double kCoverageTolerance = 1e-6;

// Sutherland-Hodgman step: keeps the part of `subject` where
// (p - origin) . normal <= 0.
std::vector<Point> clip_half_plane(const std::vector<Point>& subject,
                                   Point origin, Point normal) {
  std::vector<Point> out;
  const std::size_t n = subject.size();
  if (n == 0) return out;
  out.reserve(n + 2);
  auto side = [&](Point p) {
    return (p.x - origin.x) * normal.x + (p.y - origin.y) * normal.y;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Point cur = subject[i];
    const Point nxt = subject[(i + 1) % n];
    const double sc = side(cur);
    const double sn = side(nxt);
    if (sc <= 0.0) out.push_back(cur);
    if ((sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  // Drop consecutive repeats introduced by vertices on the clip line.
  std::vector<Point> dedup;
  dedup.reserve(out.size());
  for (auto p : out)
    if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  return dedup;
}

bool boxes_overlap(const Box& a, const Box& b) {
  return a.xmin < b.xmax && b.xmin < a.xmax && a.ymin < b.ymax &&
         b.ymin < a.ymax;
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool proper_crossing(Point a, Point b, Point c, Point d) {
  auto orient = [](Point o, Point p, Point q) {
    return sign((p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x));
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

bool rings_overlap(const Cell& a, const Cell& b, double tol) {
  if (!boxes_overlap(a.box, b.box)) return false;
  const std::size_t na = a.ring.size(), nb = b.ring.size();
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      if (proper_crossing(a.ring[i], a.ring[(i + 1) % na], b.ring[j],
                          b.ring[(j + 1) % nb]))
        return true;
  auto strictly_inside = [tol](const Cell& outer, Point p) {
    return ring_contains(outer.ring, p) && boundary_distance(outer.ring, p) > tol;
  };
  for (auto p : a.ring)
    if (strictly_inside(b, p)) return true;
  for (auto p : b.ring)
    if (strictly_inside(a, p)) return true;
  // Identical rings have neither crossings nor strictly interior vertices.
  return strictly_inside(b, a.centroid) && strictly_inside(a, b.centroid);
}

std::vector<Point> parse_ring(const nlohmann::json& j) {
  if (!j.is_array()) throw io_error("partition: ring must be an array");
  std::vector<Point> ring;
  ring.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw io_error("partition: vertex must be [x, y]");
    ring.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return ring;
}

}  // namespace

double Partition::mean_cell_area() const {
  return cells_.empty() ? 0.0
                        : window_.area() / static_cast<double>(cells_.size());
}

void Partition::add_cell(std::vector<Point> ring) {
  if (signed_area(ring) < 0.0) std::reverse(ring.begin(), ring.end());
  Cell cell;
  cell.area = signed_area(ring);
  cell.centroid = polygon_centroid(ring);
  cell.box = bounding_box(ring);
  cell.ring = std::move(ring);
  cell.snap = window_.contains(cell.centroid)
                  ? cell.centroid
                  : nearest_boundary_point(cell.ring, cell.centroid);
  cells_.push_back(std::move(cell));
}

std::size_t Partition::locate(Point p) const {
  if (!window_.contains(p))
    throw config_error(fmt::format("locate: ({}, {}) outside {}", p.x, p.y,
                                   window_.describe()));
  switch (kind_) {
    case Kind::grid: {
      const Box& b = window_.bounds();
      const double w = b.width() / nx_;
      const double h = b.height() / ny_;
      // ceil(.) - 1 sends points on a shared edge to the lower index.
      const int ix = std::clamp(
          static_cast<int>(std::ceil((p.x - b.xmin) / w)) - 1, 0, nx_ - 1);
      const int iy = std::clamp(
          static_cast<int>(std::ceil((p.y - b.ymin) / h)) - 1, 0, ny_ - 1);
      return static_cast<std::size_t>(iy) * nx_ + ix;
    }
    case Kind::tessellation: {
      std::size_t best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < seeds_.size(); ++k) {
        const double dx = p.x - seeds_[k].x;
        const double dy = p.y - seeds_[k].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
          best_d2 = d2;
          best = k;
        }
      }
      return best;
    }
    case Kind::polygons: {
      for (std::size_t k = 0; k < cells_.size(); ++k)
        if (cells_[k].box.contains(p) && ring_contains(cells_[k].ring, p))
          return k;
      // Slivers left by the coverage tolerance: take the nearest cell.
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < cells_.size(); ++k) {
        const double d = boundary_distance(cells_[k].ring, p);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      return best;
    }
  }
  return 0;
}

Point Partition::sample_in_cell(std::size_t k, Rng& rng,
                                std::size_t max_tries) const {
  const Cell& cell = cells_.at(k);
  const Box& b = cell.box;
  if (kind_ == Kind::grid)
    return {rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
  for (std::size_t t = 0; t < max_tries; ++t) {
    const Point p{rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
    if (ring_contains(cell.ring, p) && window_.contains(p)) return p;
  }
  throw numerical_error(
      fmt::format("sample_in_cell: rejection failed for cell {}", k));
}

Partition make_regular_grid(const Window& window, int nx, int ny) {
  if (!window.is_rectangle())
    throw config_error("make_regular_grid: unsupported geometry (window is not a rectangle)");
  if (nx < 1 || ny < 1)
    throw config_error("make_regular_grid: nx and ny must be positive");
  Partition part(Partition::Kind::grid, window);
  part.nx_ = nx;
  part.ny_ = ny;
  const Box& b = window.bounds();
  part.cells_.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    const double y0 = b.ymin + b.height() * iy / ny;
    const double y1 = iy + 1 == ny ? b.ymax : b.ymin + b.height() * (iy + 1) / ny;
    for (int ix = 0; ix < nx; ++ix) {
      const double x0 = b.xmin + b.width() * ix / nx;
      const double x1 =
          ix + 1 == nx ? b.xmax : b.xmin + b.width() * (ix + 1) / nx;
      Cell cell;
      cell.ring = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      cell.area = (x1 - x0) * (y1 - y0);
      cell.centroid = {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
      cell.snap = cell.centroid;
      cell.box = {x0, x1, y0, y1};
      part.cells_.push_back(std::move(cell));
    }
  }
  return part;
}

Partition make_dirichlet_tessellation(const Window& window,
                                      std::span<const Point> seeds) {
  if (seeds.empty())
    throw config_error("make_dirichlet_tessellation: no seeds");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!window.contains(seeds[i]))
      throw config_error(
          fmt::format("make_dirichlet_tessellation: seed {} outside window", i));
  }
  {
    std::vector<Point> sorted(seeds.begin(), seeds.end());
    std::sort(sorted.begin(), sorted.end(), [](Point a, Point b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw config_error("make_dirichlet_tessellation: degenerate (duplicate) seeds");
  }

  Partition part(Partition::Kind::tessellation, window);
  part.seeds_.assign(seeds.begin(), seeds.end());
  std::vector<std::size_t> order(seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const Point s = seeds[k];
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> d2(seeds.size());
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      const double dx = seeds[j].x - s.x, dy = seeds[j].y - s.y;
      d2[j] = dx * dx + dy * dy;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
    });

    std::vector<Point> cell = window.ring();
    double reach2 = 0.0;  // squared distance from s to the farthest vertex
    for (auto v : cell) {
      const double dx = v.x - s.x, dy = v.y - s.y;
      reach2 = std::max(reach2, dx * dx + dy * dy);
    }
    for (std::size_t j : order) {
      if (j == k) continue;
      // Bisectors farther than the current cell's reach cannot cut it.
      if (d2[j] >= 4.0 * reach2) break;
      const Point mid{0.5 * (s.x + seeds[j].x), 0.5 * (s.y + seeds[j].y)};
      const Point normal{seeds[j].x - s.x, seeds[j].y - s.y};
      cell = clip_half_plane(cell, mid, normal);
      reach2 = 0.0;
      for (auto v : cell) {
        const double dx = v.x - s.x, dy = v.y - s.y;
        reach2 = std::max(reach2, dx * dx + dy * dy);
      }
    }
    part.add_cell(std::move(cell));
  }
  return part;
}

Partition make_polygon_partition(const Window& window,
                                 std::vector<std::vector<Point>> rings) {
  if (rings.empty()) throw config_error("invalid partition: no cells");
  Partition part(Partition::Kind::polygons, window);
  const double scale = std::max(window.width(), window.height());
  const double tol = 1e-9 * scale;
  for (std::size_t k = 0; k < rings.size(); ++k) {
    auto& ring = rings[k];
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    if (!is_simple(ring))
      throw config_error(fmt::format("invalid partition: cell {} is not simple", k));
    for (auto p : ring) {
      if (!window.contains(p) &&
          dupcox::boundary_distance(window.ring(), p) > tol)
        throw config_error(fmt::format(
            "invalid partition: cell {} extends outside the window", k));
    }
    part.add_cell(std::move(ring));
  }
  double total = 0.0;
  for (const auto& c : part.cells_) total += c.area;
  if (std::fabs(total - window.area()) > kCoverageTolerance * window.area())
    throw config_error(fmt::format(
        "invalid partition: cell areas sum to {} but window area is {} "
        "(overlap or coverage gap)",
        total, window.area()));
  for (std::size_t a = 0; a < part.cells_.size(); ++a)
    for (std::size_t b = a + 1; b < part.cells_.size(); ++b)
      if (rings_overlap(part.cells_[a], part.cells_[b], tol))
        throw config_error(
            fmt::format("invalid partition: cells {} and {} overlap", a, b));
  return part;
}

Partition load_partition(const std::string& json_text,
                         const std::optional<Window>& window) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(fmt::format("partition: parse error: {}", e.what()));
  }
  if (!doc.is_object() || !doc.contains("cells") || !doc["cells"].is_array())
    throw io_error("partition: expected an object with a \"cells\" array");

  std::vector<std::vector<Point>> rings;
  for (const auto& c : doc["cells"]) {
    if (!c.is_object() || !c.contains("ring"))
      throw io_error("partition: each cell needs a \"ring\"");
    rings.push_back(parse_ring(c["ring"]));
  }

  std::optional<Window> w = window;
  if (!w && doc.contains("window")) {
    const auto& jw = doc["window"];
    if (jw.is_object())
      w = Window::rectangle(jw.at("xmin").get<double>(), jw.at("xmax").get<double>(),
                            jw.at("ymin").get<double>(), jw.at("ymax").get<double>());
    else
      w = Window::polygon(parse_ring(jw));
  }
  if (!w) {
    Box box = bounding_box(rings.front());
    for (const auto& r : rings) {
      const Box b = bounding_box(r);
      box.xmin = std::min(box.xmin, b.xmin);
      box.xmax = std::max(box.xmax, b.xmax);
      box.ymin = std::min(box.ymin, b.ymin);
      box.ymax = std::max(box.ymax, b.ymax);
    }
    w = Window::rectangle(box.xmin, box.xmax, box.ymin, box.ymax);
  }
  return make_polygon_partition(*w, std::move(rings));
}

Partition load_partition_file(const std::string& path,
                              const std::optional<Window>& window) {
  std::ifstream in(path);
  if (!in) throw io_error(fmt::format("cannot open partition file {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return load_partition(ss.str(), window);
}

std::string partition_to_json(const Partition& partition) {
  nlohmann::json doc;
  const Box& b = partition.window().bounds();
  if (partition.window().is_rectangle()) {
    doc["window"] = {{"xmin", b.xmin}, {"xmax", b.xmax}, {"ymin", b.ymin}, {"ymax", b.ymax}};
  } else {
    auto ring = nlohmann::json::array();
    for (auto p : partition.window().ring()) ring.push_back({p.x, p.y});
    doc["window"] = ring;
  }
  auto cells = nlohmann::json::array();
  for (std::size_t k = 0; k < partition.size(); ++k) {
    auto ring = nlohmann::json::array();
    for (auto p : partition[k].ring) ring.push_back({p.x, p.y});
    cells.push_back({{"id", k}, {"ring", ring}});
  }
  doc["cells"] = cells;
  return doc.dump(1);
}

}  // namespace dupcox
