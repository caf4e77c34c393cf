// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

// AArch64 only. Advanced SIMD is mandatory there, so no runtime probe.

#include <arm_neon.h>

#include "dupcox/simd/kernels.hpp"

namespace dupcox::simd::neon {

void translation_pairs(double xi, double yi, const double* xs, const double* ys,
                       std::size_t n, double width, double height, double* dist,
                       double* weight) {
  const float64x2_t vxi = vdupq_n_f64(xi);
  const float64x2_t vyi = vdupq_n_f64(yi);
  const float64x2_t vw = vdupq_n_f64(width);
  const float64x2_t vh = vdupq_n_f64(height);
  const float64x2_t varea = vdupq_n_f64(width * height);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + j), vxi);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + j), vyi);
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    vst1q_f64(dist + j, vsqrtq_f64(d2));
    const float64x2_t overlap =
        vmulq_f64(vsubq_f64(vw, vabsq_f64(dx)), vsubq_f64(vh, vabsq_f64(dy)));
    vst1q_f64(weight + j, vdivq_f64(varea, overlap));
  }
  if (j < n)
    scalar::translation_pairs(xi, yi, xs + j, ys + j, n - j, width, height,
                              dist + j, weight + j);
}

void distances(double xi, double yi, const double* xs, const double* ys,
               std::size_t n, double* dist) {
  const float64x2_t vxi = vdupq_n_f64(xi);
  const float64x2_t vyi = vdupq_n_f64(yi);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + j), vxi);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + j), vyi);
    vst1q_f64(dist + j,
              vsqrtq_f64(vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy))));
  }
  if (j < n) scalar::distances(xi, yi, xs + j, ys + j, n - j, dist + j);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2)
    vst1q_f64(y + j, vaddq_f64(vld1q_f64(y + j), vmulq_f64(va, vld1q_f64(x + j))));
  if (j < n) scalar::axpy(a, x + j, y + j, n - j);
}

void scale(double a, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) vst1q_f64(y + j, vmulq_f64(vld1q_f64(y + j), va));
  if (j < n) scalar::scale(a, y + j, n - j);
}

}  // namespace dupcox::simd::neon
