// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/intensity.hpp"
#include "dupcox/simd/kernels.hpp"

namespace dupcox {
namespace {

// Kernel tails beyond this many bandwidths are below 1e-21 of the peak.
constexpr double kTruncation = 10.0;

void check_grid(IntensityGrid grid) {
  if (grid.nx < 1 || grid.ny < 1)
    throw config_error("intensity grid dimensions must be positive");
}

void check_bandwidth(double h, const char* what) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw config_error(fmt::format("{} must be > 0 (got {})", what, h));
}

// One-dimensional Gaussian factors of a point's kernel: the cell average of
// the normal density over each grid cell, truncated to [lo, hi).
struct Profile {
  std::vector<double> g;
  int lo = 0, hi = 0;
};

// P(a < Z < b) for standard normal Z, without cancellation in either tail.
double normal_mass(double a, double b) {
  constexpr double s = std::numbers::sqrt2 / 2.0;
  if (a >= 0.0) return 0.5 * (std::erfc(a * s) - std::erfc(b * s));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * s) - std::erfc(-a * s));
  return 1.0 - 0.5 * (std::erfc(-a * s) + std::erfc(b * s));
}

void gaussian_profile(double x, double h, double origin, double step, int n,
                      Profile& out) {
  out.g.assign(static_cast<std::size_t>(n), 0.0);
  const double reach = kTruncation * h;
  out.lo = std::clamp(static_cast<int>(std::floor((x - reach - origin) / step)), 0, n);
  out.hi = std::clamp(static_cast<int>(std::ceil((x + reach - origin) / step)) + 1, 0, n);
  for (int i = out.lo; i < out.hi; ++i) {
    const double a = (origin + i * step - x) / h;
    const double b = (origin + (i + 1) * step - x) / h;
    out.g[static_cast<std::size_t>(i)] = normal_mass(a, b) / step;
  }
}

double profile_mass(const Profile& p, double step) {
  double s = 0.0;
  for (int i = p.lo; i < p.hi; ++i) s += p.g[static_cast<std::size_t>(i)];
  return s * step;
}

double masked_mass(const RasterField& tmpl, const Profile& px, const Profile& py) {
  double s = 0.0;
  for (int iy = py.lo; iy < py.hi; ++iy) {
    double row = 0.0;
    for (int ix = px.lo; ix < px.hi; ++ix)
      if (tmpl.inside(ix, iy)) row += px.g[static_cast<std::size_t>(ix)];
    s += py.g[static_cast<std::size_t>(iy)] * row;
  }
  return s * tmpl.cell_area();
}

// Adds weight * kappa_h(. - x) / q_h(x) to out and returns q_h(x).
double deposit(RasterField& out, Point x, double h, double weight, Profile& px,
               Profile& py) {
  const Box& b = out.window().bounds();
  gaussian_profile(x.x, h, b.xmin, out.dx(), out.nx(), px);
  gaussian_profile(x.y, h, b.ymin, out.dy(), out.ny(), py);
  const double q = out.window().is_rectangle()
                       ? profile_mass(px, out.dx()) * profile_mass(py, out.dy())
                       : masked_mass(out, px, py);
  if (!(q > 0.0))
    throw numerical_error(fmt::format(
        "kernel intensity: edge factor vanished at ({}, {}) with h = {}", x.x, x.y, h));
  const double w = weight / q;
  const auto span = static_cast<std::size_t>(px.hi - px.lo);
  for (int iy = py.lo; iy < py.hi; ++iy) {
    const double a = w * py.g[static_cast<std::size_t>(iy)];
    if (a == 0.0) continue;
    simd::axpy(a, px.g.data() + px.lo, out.row(iy).data() + px.lo, span);
  }
  return q;
}

void apply_mask(RasterField& f) {
  if (f.window().is_rectangle()) return;
  for (int iy = 0; iy < f.ny(); ++iy)
    for (int ix = 0; ix < f.nx(); ++ix)
      if (!f.inside(ix, iy)) f.at(ix, iy) = 0.0;
}

}  // namespace

double constant_intensity(const PointPattern& pattern) {
  if (pattern.size() < 2)
    throw config_error(fmt::format(
        "constant_intensity: insufficient points (N = {}, need >= 2)", pattern.size()));
  return static_cast<double>(pattern.size() - 1) / pattern.window().area();
}

double edge_factor(Point x, double h, const Window& window, IntensityGrid grid) {
  check_bandwidth(h, "edge_factor: h");
  check_grid(grid);
  const RasterField tmpl(window, grid.nx, grid.ny);
  Profile px, py;
  const Box& b = window.bounds();
  gaussian_profile(x.x, h, b.xmin, tmpl.dx(), tmpl.nx(), px);
  gaussian_profile(x.y, h, b.ymin, tmpl.dy(), tmpl.ny(), py);
  return window.is_rectangle() ? profile_mass(px, tmpl.dx()) * profile_mass(py, tmpl.dy())
                               : masked_mass(tmpl, px, py);
}

RasterField kernel_intensity_fixed(const PointPattern& pattern, double h,
                                   IntensityGrid grid) {
  check_bandwidth(h, "kernel_intensity_fixed: h");
  check_grid(grid);
  if (pattern.empty())
    throw config_error("kernel_intensity_fixed: pattern has no points");
  RasterField out(pattern.window(), grid.nx, grid.ny);
  const double weight = 1.0 / static_cast<double>(pattern.size());
  Profile px, py;
  for (const Point& p : pattern.points()) deposit(out, p, h, weight, px, py);
  apply_mask(out);
  return out;
}

namespace {

// Edge factors for each point at per-point bandwidths.
std::vector<double> edge_factors(const PointPattern& pattern,
                                 std::span<const double> h, IntensityGrid grid) {
  const RasterField tmpl(pattern.window(), grid.nx, grid.ny);
  const Box& b = pattern.window().bounds();
  std::vector<double> q(pattern.size());
  Profile px, py;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Point x = pattern[i];
    gaussian_profile(x.x, h[i], b.xmin, tmpl.dx(), tmpl.nx(), px);
    gaussian_profile(x.y, h[i], b.ymin, tmpl.dy(), tmpl.ny(), py);
    q[i] = pattern.window().is_rectangle()
               ? profile_mass(px, tmpl.dx()) * profile_mass(py, tmpl.dy())
               : masked_mass(tmpl, px, py);
  }
  return q;
}

}  // namespace

std::vector<double> kernel_intensity_at_points(const PointPattern& pattern,
                                               double h, IntensityGrid grid) {
  check_bandwidth(h, "kernel_intensity_at_points: h");
  check_grid(grid);
  const std::size_t n = pattern.size();
  if (n == 0) return {};
  const std::vector<double> hs(n, h);
  const std::vector<double> q = edge_factors(pattern, hs, grid);
  std::vector<double> inv_q(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(q[j] > 0.0))
      throw numerical_error("kernel intensity: edge factor vanished at a data point");
    inv_q[j] = 1.0 / q[j];
  }

  std::vector<double> xs(n), ys(n), dist(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = pattern[j].x;
    ys[j] = pattern[j].y;
  }
  const double norm = 1.0 / (2.0 * std::numbers::pi * h * h);
  const double c = -0.5 / (h * h);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    simd::distances(xs[i], ys[i], xs.data(), ys.data(), n, dist.data());
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      s += std::exp(c * dist[j] * dist[j]) * inv_q[j];
    out[i] = norm * s;
  }
  return out;
}

AdaptiveIntensity kernel_intensity_adaptive(const PointPattern& pattern,
                                            double h0, double pilot_h,
                                            IntensityGrid grid) {
  check_bandwidth(h0, "kernel_intensity_adaptive: h0");
  if (pilot_h <= 0.0) pilot_h = h0;
  check_bandwidth(pilot_h, "kernel_intensity_adaptive: pilot_h");
  check_grid(grid);
  const std::size_t n = pattern.size();
  if (n < 2)
    throw config_error(fmt::format(
        "kernel_intensity_adaptive: insufficient points (N = {}, need >= 2)", n));

  const std::vector<double> pilot = kernel_intensity_at_points(pattern, pilot_h, grid);
  double log_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pilot[i] > 0.0) || !std::isfinite(pilot[i]))
      throw numerical_error(fmt::format(
          "kernel_intensity_adaptive: degenerate pilot intensity {} at point {}",
          pilot[i], i));
    log_sum += -0.5 * std::log(pilot[i]);
  }
  const double log_gamma = log_sum / static_cast<double>(n);

  AdaptiveIntensity res{RasterField(pattern.window(), grid.nx, grid.ny), {}, 0.0};
  res.gamma = std::exp(log_gamma);
  res.bandwidths.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    res.bandwidths[i] = h0 * std::exp(-0.5 * std::log(pilot[i]) - log_gamma);

  const double weight = 1.0 / static_cast<double>(n);
  Profile px, py;
  for (std::size_t i = 0; i < n; ++i)
    deposit(res.density, pattern[i], res.bandwidths[i], weight, px, py);
  apply_mask(res.density);
  return res;
}

double red(double phi_hat, double sigma2_hat, double phi_true,
           double sigma2_true) {
  if (!(phi_true > 0.0) || !(sigma2_true > 0.0))
    throw config_error("red: true parameters must be > 0");
  const double a = std::fabs(phi_hat - phi_true) / phi_true;
  const double b = std::fabs(sigma2_hat - sigma2_true) / sigma2_true;
  return std::sqrt(a * a + b * b);
}

}  // namespace dupcox
