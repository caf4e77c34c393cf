// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dupcox/error.hpp"
#include "dupcox/geometry.hpp"
#include "dupcox/kfunction.hpp"

namespace dupcox {

/// Fitting method labels. MC-I/II/III are MC on a pattern preprocessed by
/// dedup, jitter or redistribute; MMC is MC with delta > 0.
enum class Method { mc, mc_i, mc_ii, mc_iii, mmc };

std::string_view method_name(Method m);
/// Accepts "MC", "MC-I", "MC-II", "MC-III", "MMC" (case-insensitive).
Method parse_method(std::string_view name);

struct ContrastConfig {
  double delta = 0.0;
  double r_max = 0.0;
  double exponent = 0.25;
};

/// Contrast restricted to grid nodes: delta and r_max snap to the nearest
/// node of the K grid and the integral is the composite trapezoid rule over
/// the nodes in between.
class Contrast {
 public:
  Contrast(const KEstimate& khat, const ContrastConfig& config);

  double operator()(double phi, double sigma2) const;

  double delta() const { return delta_; }  // snapped
  double r_max() const { return r_max_; }  // snapped
  std::size_t nodes() const { return r_.size(); }

 private:
  std::vector<double> r_;
  std::vector<double> target_;   // khat^exponent
  std::vector<double> weights_;  // trapezoid weights
  double exponent_;
  double delta_, r_max_;
};

/// U_delta(phi, sigma2) = int_delta^r_max (khat^c - K^c)^2 dr.
double contrast(const KEstimate& khat, double phi, double sigma2,
                const ContrastConfig& config);

struct Bounds {
  double phi_lo = 0.1, phi_hi = 50.0;
  double sigma2_lo = 0.01, sigma2_hi = 20.0;
};

struct OptimizerSpec {
  int max_iterations = 500;
  double tolerance = 1e-6;  // simplex diameter in log space
  /// Starts as fractions of the log box, (phi, sigma2).
  std::vector<std::array<double, 2>> starts = {
      {0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}, {0.5, 0.5}};
};

struct FitResult {
  double phi = 0.0;
  double sigma2 = 0.0;
  double contrast = 0.0;
  Method method = Method::mc;
  double delta = 0.0;  // snapped to the K grid
  double r_max = 0.0;  // snapped to the K grid
  int iterations = 0;  // summed over starts
  int starts = 0;
  int converged_starts = 0;
  bool converged = false;
};

/// Thrown when no start converges; carries the best point found.
class NonConvergence : public Error {
 public:
  explicit NonConvergence(FitResult best);
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Multi-start Nelder-Mead over (log phi, log sigma2) within the box. The
/// method label defaults to MC for delta = 0 and MMC otherwise.
FitResult fit(const KEstimate& khat, const ContrastConfig& config,
              const Bounds& bounds = {}, const OptimizerSpec& optimizer = {});
FitResult fit(const KEstimate& khat, const ContrastConfig& config,
              Method label, const Bounds& bounds = {},
              const OptimizerSpec& optimizer = {});

/// One third of the equivalent diameter of the mean cell.
double delta_rule(double mean_cell_area);

/// min(Lx, Ly) / 4 for rectangles; config error for polygon windows.
double rmax_rule(const Window& window);

/// Method I: the first member of every duplicate group is kept.
/// tol < 0 selects default_duplicate_tolerance.
PointPattern dedup(const PointPattern& pattern, double tol = -1.0);

/// Method II: every member of a duplicate group gets independent U(-d, d)
/// offsets in x and y; perturbed points outside the window are dropped.
PointPattern jitter(const PointPattern& pattern, double d, std::uint64_t seed,
                    double tol = -1.0);

/// Method III: every member of a duplicate group is replaced by a uniform
/// draw inside its partition cell.
PointPattern redistribute(const PointPattern& pattern,
                          const Partition& partition, std::uint64_t seed,
                          double tol = -1.0);

}  // namespace dupcox
