// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dupcox/geometry.hpp"
#include "dupcox/raster.hpp"

namespace dupcox {

/// Exponential covariance c(h) = sigma2 * exp(-h / phi).
struct CovarianceParams {
  double phi = 1.0;     // range, length units
  double sigma2 = 1.0;  // variance of the log-intensity field

  /// Throws a config error unless phi > 0 and sigma2 > 0.
  void validate() const;
  double covariance(double h) const;
};

struct ConstantMean {
  double value = 0.0;
};

/// m(s) = intercept + coef_x * x + coef_y * y.
struct LinearMean {
  double intercept = 0.0;
  double coef_x = 0.0;
  double coef_y = 0.0;
};

/// m(s) = intercept + sum_k coefficients[k] * covariates[k](s). Covariate
/// rasters must match the simulation window and grid.
struct CovariateMean {
  double intercept = 0.0;
  std::vector<double> coefficients;
  std::vector<RasterField> covariates;
};

using MeanModel = std::variant<ConstantMean, LinearMean, CovariateMean>;

/// Mean surface at cell centres of an nx by ny grid over the window.
RasterField evaluate_mean(const MeanModel& mean, const Window& window, int nx,
                          int ny);

/// log(E(N) / |W|): the constant mean giving an expected count of E(N).
double constant_mean_for_count(double expected_count, const Window& window);

enum class GrfMethod { automatic, circulant, dense };

struct GrfDiagnostics {
  GrfMethod method = GrfMethod::circulant;
  int embedding_factor = 0;    // 0 when the dense route was used
  double min_eigenvalue = 0.0; // relative to the largest, after the final try
  std::string note;
};

/// Stationary Gaussian field with mean -sigma2/2 and exponential covariance
/// sampled at the cell centres of a rectangle. The spectral factorisation is
/// done once at construction and reused for every sample.
///
/// Circulant embedding on a torus of 2 f n cells per axis, f = 1..4. If no
/// factor gives a nonnegative-definite embedding, grids of at most
/// kDenseLimit cells fall back to a dense Cholesky root; larger grids throw
/// a numerical error. The route taken is reported in diagnostics().
class GrfSampler {
 public:
  static constexpr int kDenseLimit = 64 * 64;

  GrfSampler(const Window& window, int nx, int ny, CovarianceParams cov,
             GrfMethod method = GrfMethod::automatic);
  ~GrfSampler();
  GrfSampler(GrfSampler&&) noexcept;
  GrfSampler& operator=(GrfSampler&&) noexcept;

  RasterField sample(std::uint64_t seed) const;
  const GrfDiagnostics& diagnostics() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RasterField simulate_grf(const Window& window, int nx, int ny,
                         CovarianceParams cov, std::uint64_t seed,
                         GrfMethod method = GrfMethod::automatic);

/// LGCP realisation: intensity exp(m + Z) on the grid, then per-cell Poisson
/// counts with points uniform inside each cell.
struct LgcpRealization {
  RasterField intensity;
  PointPattern pattern;
};

/// Draws one pattern from a prepared sampler (which fixes window, grid and
/// covariance). `mean_surface` must be on the sampler's grid.
LgcpRealization simulate_lgcp(const GrfSampler& sampler,
                              const RasterField& mean_surface,
                              std::uint64_t seed);

PointPattern simulate_lgcp(const MeanModel& mean, CovarianceParams cov,
                           const Window& window, int nx, int ny,
                           std::uint64_t seed);

/// Theoretical LGCP K-function
///   K(r) = 2 pi int_0^r s exp(sigma2 exp(-s/phi)) ds
/// by adaptive Gauss-Kronrod quadrature (relative error well below 1e-8).
/// sigma2 = 0 is admitted and gives pi r^2.
double theoretical_k(double r, CovarianceParams cov);

/// K at every node of an increasing grid of r >= 0, from the termwise
/// integrated series of the clustering excess. Independent of, and agrees
/// with, the quadrature in theoretical_k.
std::vector<double> theoretical_k_grid(std::span<const double> r,
                                       CovarianceParams cov);

struct CorruptionSpec {
  double fraction = 0.0;  // in [0, 1]
  std::uint64_t seed = 0;
};

/// Snaps floor(fraction * N) points, chosen uniformly without replacement,
/// to the snap location of their containing cell. Order and count are
/// preserved. `snapped`, when given, receives the chosen indices ascending.
PointPattern corrupt(const PointPattern& pattern, const Partition& partition,
                     const CorruptionSpec& spec,
                     std::vector<std::size_t>* snapped = nullptr);

/// Synthetic covariate: log of the distance to the nearest anchor, with
/// distances floored at min_distance.
RasterField log_distance_to_points(const Window& window, int nx, int ny,
                                   std::span<const Point> anchors,
                                   double min_distance);
/// Synthetic covariate: log of the distance to a polyline.
RasterField log_distance_to_polyline(const Window& window, int nx, int ny,
                                     std::span<const Point> polyline,
                                     double min_distance);

}  // namespace dupcox
