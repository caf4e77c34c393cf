// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

// Data-parallel inner loops with a scalar reference and vector variants.
//
// Every variant performs the same IEEE operations in the same order per
// element (no fused multiply-add, no reassociation), so all variants return
// bit-identical results. The equivalence tests rely on this.

#pragma once

#include <cstddef>
#include <string_view>

namespace dupcox::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);
bool supported(Isa isa);
/// Widest variant the running CPU supports.
Isa best_available();
/// Variant used by the dispatching overloads. Defaults to best_available(),
/// overridable with DUPCOX_SIMD=scalar|avx2|neon or set_active().
Isa active();
/// Throws a config error if the CPU lacks the requested variant.
void set_active(Isa isa);

/// For a reference point (xi, yi) and a block of n points:
///   dist[j]   = |p_j - p_i|
///   weight[j] = (w h) / ((w - |dx|) (h - |dy|))   (rectangle translation
///               correction; infinite or negative when |dx| >= w or |dy| >= h)
void translation_pairs(Isa isa, double xi, double yi, const double* xs,
                       const double* ys, std::size_t n, double width,
                       double height, double* dist, double* weight);
void translation_pairs(double xi, double yi, const double* xs, const double* ys,
                       std::size_t n, double width, double height, double* dist,
                       double* weight);

/// dist[j] = |p_j - p_i|.
void distances(Isa isa, double xi, double yi, const double* xs,
               const double* ys, std::size_t n, double* dist);
void distances(double xi, double yi, const double* xs, const double* ys,
               std::size_t n, double* dist);

/// y[j] += a * x[j].
void axpy(Isa isa, double a, const double* x, double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);

/// y[j] *= a.
void scale(Isa isa, double a, double* y, std::size_t n);
void scale(double a, double* y, std::size_t n);

namespace scalar {
void translation_pairs(double, double, const double*, const double*,
                       std::size_t, double, double, double*, double*);
void distances(double, double, const double*, const double*, std::size_t,
               double*);
void axpy(double, const double*, double*, std::size_t);
void scale(double, double*, std::size_t);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void translation_pairs(double, double, const double*, const double*,
                       std::size_t, double, double, double*, double*);
void distances(double, double, const double*, const double*, std::size_t,
               double*);
void axpy(double, const double*, double*, std::size_t);
void scale(double, double*, std::size_t);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void translation_pairs(double, double, const double*, const double*,
                       std::size_t, double, double, double*, double*);
void distances(double, double, const double*, const double*, std::size_t,
               double*);
void axpy(double, const double*, double*, std::size_t);
void scale(double, double*, std::size_t);
}  // namespace neon
#endif

}  // namespace dupcox::simd
