// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/random.hpp"
#include "dupcox/simulate.hpp"

namespace dupcox {
namespace {

constexpr double kMaxLogIntensity = 700.0;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double segment_distance(Point a, Point b, Point p) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 == 0.0 ? 0.0 : ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

RasterField evaluate_mean(const MeanModel& mean, const Window& window, int nx,
                          int ny) {
  RasterField out(window, nx, ny);
  std::visit(
      Overloaded{
          [&](const ConstantMean& m) {
            std::fill(out.values().begin(), out.values().end(), m.value);
          },
          [&](const LinearMean& m) {
            for (int iy = 0; iy < ny; ++iy)
              for (int ix = 0; ix < nx; ++ix)
                out.at(ix, iy) = m.intercept + m.coef_x * out.x_center(ix) +
                                 m.coef_y * out.y_center(iy);
          },
          [&](const CovariateMean& m) {
            if (m.coefficients.size() != m.covariates.size())
              throw config_error("mean model: coefficient/covariate count mismatch");
            for (const auto& c : m.covariates)
              if (c.nx() != nx || c.ny() != ny || !(c.window() == window))
                throw config_error(
                    "mean model: covariate raster does not match the simulation grid");
            std::fill(out.values().begin(), out.values().end(), m.intercept);
            for (std::size_t k = 0; k < m.covariates.size(); ++k)
              for (std::size_t i = 0; i < out.values().size(); ++i)
                out.values()[i] += m.coefficients[k] * m.covariates[k].values()[i];
          },
      },
      mean);
  return out;
}

double constant_mean_for_count(double expected_count, const Window& window) {
  if (!(expected_count > 0.0))
    throw config_error("constant_mean_for_count: expected count must be > 0");
  return std::log(expected_count / window.area());
}

LgcpRealization simulate_lgcp(const GrfSampler& sampler,
                              const RasterField& mean_surface,
                              std::uint64_t seed) {
  RasterField field = sampler.sample(derive_seed(seed, {1}));
  if (field.nx() != mean_surface.nx() || field.ny() != mean_surface.ny())
    throw config_error("simulate_lgcp: mean surface grid does not match the sampler");
  const double cell_area = field.cell_area();
  for (std::size_t i = 0; i < field.values().size(); ++i) {
    const double log_lambda = mean_surface.values()[i] + field.values()[i];
    if (!(log_lambda < kMaxLogIntensity))
      throw numerical_error(fmt::format(
          "simulate_lgcp: simulation overflow (log intensity {} in cell {})",
          log_lambda, i));
    field.values()[i] = std::exp(log_lambda);
  }

  Rng rng(derive_seed(seed, {2}));
  std::vector<Point> pts;
  const Box& b = field.window().bounds();
  for (int iy = 0; iy < field.ny(); ++iy) {
    const double y0 = b.ymin + iy * field.dy();
    for (int ix = 0; ix < field.nx(); ++ix) {
      const double x0 = b.xmin + ix * field.dx();
      const std::uint64_t count = rng.poisson(field.at(ix, iy) * cell_area);
      for (std::uint64_t c = 0; c < count; ++c) {
        const double x = std::min(x0 + rng.uniform() * field.dx(), b.xmax);
        const double y = std::min(y0 + rng.uniform() * field.dy(), b.ymax);
        pts.push_back({x, y});
      }
    }
  }
  PointPattern pattern(field.window(), std::move(pts));
  return {std::move(field), std::move(pattern)};
}

PointPattern simulate_lgcp(const MeanModel& mean, CovarianceParams cov,
                           const Window& window, int nx, int ny,
                           std::uint64_t seed) {
  const GrfSampler sampler(window, nx, ny, cov);
  const RasterField m = evaluate_mean(mean, window, nx, ny);
  return simulate_lgcp(sampler, m, seed).pattern;
}

PointPattern corrupt(const PointPattern& pattern, const Partition& partition,
                     const CorruptionSpec& spec,
                     std::vector<std::size_t>* snapped) {
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0))
    throw config_error("corrupt: fraction must lie in [0, 1]");
  if (!(pattern.window() == partition.window()))
    throw config_error("corrupt: pattern and partition windows differ");
  const std::size_t n = pattern.size();
  // The small offset keeps e.g. 0.6 * 1000 from flooring to 599.
  const auto k = static_cast<std::size_t>(
      std::floor(spec.fraction * static_cast<double>(n) + 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + k);
  std::sort(chosen.begin(), chosen.end());

  std::vector<Point> pts = pattern.points();
  for (std::size_t i : chosen) pts[i] = partition[partition.locate(pts[i])].snap;
  if (snapped != nullptr) *snapped = std::move(chosen);
  return PointPattern(pattern.window(), std::move(pts));
}

RasterField log_distance_to_points(const Window& window, int nx, int ny,
                                   std::span<const Point> anchors,
                                   double min_distance) {
  if (anchors.empty()) throw config_error("log_distance_to_points: no anchors");
  RasterField out(window, nx, ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Point c{out.x_center(ix), out.y_center(iy)};
      double d = std::numeric_limits<double>::infinity();
      for (auto a : anchors) d = std::min(d, distance(a, c));
      out.at(ix, iy) = std::log(std::max(d, min_distance));
    }
  return out;
}

RasterField log_distance_to_polyline(const Window& window, int nx, int ny,
                                     std::span<const Point> polyline,
                                     double min_distance) {
  if (polyline.size() < 2)
    throw config_error("log_distance_to_polyline: need at least two vertices");
  RasterField out(window, nx, ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Point c{out.x_center(ix), out.y_center(iy)};
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s + 1 < polyline.size(); ++s)
        d = std::min(d, segment_distance(polyline[s], polyline[s + 1], c));
      out.at(ix, iy) = std::log(std::max(d, min_distance));
    }
  return out;
}

}  // namespace dupcox
