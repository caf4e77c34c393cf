// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 (and without FMA); only called after a CPUID check.

#include <immintrin.h>

#include "dupcox/simd/kernels.hpp"

namespace dupcox::simd::avx2 {
namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

}  // namespace

void translation_pairs(double xi, double yi, const double* xs, const double* ys,
                       std::size_t n, double width, double height, double* dist,
                       double* weight) {
  const __m256d vxi = _mm256_set1_pd(xi);
  const __m256d vyi = _mm256_set1_pd(yi);
  const __m256d vw = _mm256_set1_pd(width);
  const __m256d vh = _mm256_set1_pd(height);
  const __m256d varea = _mm256_set1_pd(width * height);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + j), vxi);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + j), vyi);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(dist + j, _mm256_sqrt_pd(d2));
    const __m256d overlap = _mm256_mul_pd(_mm256_sub_pd(vw, abs_pd(dx)),
                                          _mm256_sub_pd(vh, abs_pd(dy)));
    _mm256_storeu_pd(weight + j, _mm256_div_pd(varea, overlap));
  }
  if (j < n)
    scalar::translation_pairs(xi, yi, xs + j, ys + j, n - j, width, height,
                              dist + j, weight + j);
}

void distances(double xi, double yi, const double* xs, const double* ys,
               std::size_t n, double* dist) {
  const __m256d vxi = _mm256_set1_pd(xi);
  const __m256d vyi = _mm256_set1_pd(yi);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + j), vxi);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + j), vyi);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(dist + j, _mm256_sqrt_pd(d2));
  }
  if (j < n) scalar::distances(xi, yi, xs + j, ys + j, n - j, dist + j);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256d y0 = _mm256_add_pd(_mm256_loadu_pd(y + j),
                                     _mm256_mul_pd(va, _mm256_loadu_pd(x + j)));
    const __m256d y1 = _mm256_add_pd(_mm256_loadu_pd(y + j + 4),
                                     _mm256_mul_pd(va, _mm256_loadu_pd(x + j + 4)));
    _mm256_storeu_pd(y + j, y0);
    _mm256_storeu_pd(y + j + 4, y1);
  }
  for (; j + 4 <= n; j += 4)
    _mm256_storeu_pd(y + j, _mm256_add_pd(_mm256_loadu_pd(y + j),
                                          _mm256_mul_pd(va, _mm256_loadu_pd(x + j))));
  if (j < n) scalar::axpy(a, x + j, y + j, n - j);
}

void scale(double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4)
    _mm256_storeu_pd(y + j, _mm256_mul_pd(_mm256_loadu_pd(y + j), va));
  if (j < n) scalar::scale(a, y + j, n - j);
}

}  // namespace dupcox::simd::avx2
