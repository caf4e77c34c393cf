// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "dupcox/error.hpp"
#include "dupcox/simd/kernels.hpp"

namespace dupcox::simd {
namespace {

Isa initial_isa() {
  const char* env = std::getenv("DUPCOX_SIMD");
  if (env != nullptr) {
    const std::string v(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (v == isa_name(isa) && supported(isa)) return isa;
  }
  return best_available();
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_available() {
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active() { return active_slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  if (!supported(isa))
    throw config_error("simd: " + std::string(isa_name(isa)) +
                       " is not supported on this CPU");
  active_slot().store(isa, std::memory_order_relaxed);
}

#if defined(__x86_64__) || defined(_M_X64)
#define DUPCOX_DISPATCH(fn, ...)                 \
  switch (isa) {                                 \
    case Isa::avx2:                              \
      return avx2::fn(__VA_ARGS__);              \
    default:                                     \
      return scalar::fn(__VA_ARGS__);            \
  }
#elif defined(__aarch64__)
#define DUPCOX_DISPATCH(fn, ...)                 \
  switch (isa) {                                 \
    case Isa::neon:                              \
      return neon::fn(__VA_ARGS__);              \
    default:                                     \
      return scalar::fn(__VA_ARGS__);            \
  }
#else
#define DUPCOX_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__);
#endif

void translation_pairs(Isa isa, double xi, double yi, const double* xs,
                       const double* ys, std::size_t n, double width,
                       double height, double* dist, double* weight) {
  DUPCOX_DISPATCH(translation_pairs, xi, yi, xs, ys, n, width, height, dist,
                  weight)
}

void translation_pairs(double xi, double yi, const double* xs, const double* ys,
                       std::size_t n, double width, double height, double* dist,
                       double* weight) {
  translation_pairs(active(), xi, yi, xs, ys, n, width, height, dist, weight);
}

void distances(Isa isa, double xi, double yi, const double* xs,
               const double* ys, std::size_t n, double* dist) {
  DUPCOX_DISPATCH(distances, xi, yi, xs, ys, n, dist)
}

void distances(double xi, double yi, const double* xs, const double* ys,
               std::size_t n, double* dist) {
  distances(active(), xi, yi, xs, ys, n, dist);
}

void axpy(Isa isa, double a, const double* x, double* y, std::size_t n) {
  DUPCOX_DISPATCH(axpy, a, x, y, n)
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  axpy(active(), a, x, y, n);
}

void scale(Isa isa, double a, double* y, std::size_t n) {
  DUPCOX_DISPATCH(scale, a, y, n)
}

void scale(double a, double* y, std::size_t n) { scale(active(), a, y, n); }

#undef DUPCOX_DISPATCH

}  // namespace dupcox::simd
