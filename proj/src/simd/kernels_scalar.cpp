// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "dupcox/simd/kernels.hpp"

namespace dupcox::simd::scalar {

void translation_pairs(double xi, double yi, const double* xs, const double* ys,
                       std::size_t n, double width, double height, double* dist,
                       double* weight) {
  const double area = width * height;
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = xs[j] - xi;
    const double dy = ys[j] - yi;
    dist[j] = std::sqrt(dx * dx + dy * dy);
    weight[j] = area / ((width - std::fabs(dx)) * (height - std::fabs(dy)));
  }
}

void distances(double xi, double yi, const double* xs, const double* ys,
               std::size_t n, double* dist) {
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = xs[j] - xi;
    const double dy = ys[j] - yi;
    dist[j] = std::sqrt(dx * dx + dy * dy);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

void scale(double a, double* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] *= a;
}

}  // namespace dupcox::simd::scalar
