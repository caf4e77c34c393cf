#include <doctest.h>

#include <cstring>
#include <vector>

#include "dupcox/random.hpp"
#include "dupcox/simd/kernels.hpp"

using namespace dupcox;
namespace simd = dupcox::simd;

namespace {

std::vector<simd::Isa> available() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::scalar, simd::Isa::avx2, simd::Isa::neon})
    if (simd::supported(isa)) out.push_back(isa);
  return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar is always available and active is supported") {
  CHECK(simd::supported(simd::Isa::scalar));
  CHECK(simd::supported(simd::active()));
  CHECK(simd::supported(simd::best_available()));
}

TEST_CASE("vector variants are bit-identical to scalar") {
  Rng rng(17);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 31u, 64u, 257u}) {
    std::vector<double> xs(n), ys(n), y0(n);
    for (std::size_t j = 0; j < n; ++j) {
      xs[j] = rng.uniform(0, 810);
      ys[j] = rng.uniform(0, 810);
      y0[j] = rng.uniform(-5, 5);
    }
    if (n > 2) {
      xs[1] = 100.0;  // coincident with the reference point
      ys[1] = 200.0;
    }
    const double a = rng.uniform(-3, 3);

    std::vector<double> d_ref(n), w_ref(n), dd_ref(n), ax_ref = y0, sc_ref = y0;
    simd::scalar::translation_pairs(100.0, 200.0, xs.data(), ys.data(), n, 810, 810,
                                    d_ref.data(), w_ref.data());
    simd::scalar::distances(100.0, 200.0, xs.data(), ys.data(), n, dd_ref.data());
    simd::scalar::axpy(a, xs.data(), ax_ref.data(), n);
    simd::scalar::scale(a, sc_ref.data(), n);

    for (auto isa : available()) {
      CAPTURE(simd::isa_name(isa));
      CAPTURE(n);
      std::vector<double> d(n), w(n), dd(n), ax = y0, sc = y0;
      simd::translation_pairs(isa, 100.0, 200.0, xs.data(), ys.data(), n, 810, 810,
                              d.data(), w.data());
      simd::distances(isa, 100.0, 200.0, xs.data(), ys.data(), n, dd.data());
      simd::axpy(isa, a, xs.data(), ax.data(), n);
      simd::scale(isa, a, sc.data(), n);
      CHECK(same_bits(d, d_ref));
      CHECK(same_bits(w, w_ref));
      CHECK(same_bits(dd, dd_ref));
      CHECK(same_bits(ax, ax_ref));
      CHECK(same_bits(sc, sc_ref));
    }
  }
}

TEST_CASE("translation weights on the unit square") {
  const double xs[] = {0.0, 0.5, 0.5};
  const double ys[] = {0.0, 0.0, 0.5};
  double d[3], w[3];
  simd::scalar::translation_pairs(0.0, 0.0, xs, ys, 3, 1.0, 1.0, d, w);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 2.0);
  CHECK(w[2] == 4.0);
  CHECK(d[1] == 0.5);
}

TEST_CASE("set_active switches and restores") {
  const auto before = simd::active();
  simd::set_active(simd::Isa::scalar);
  CHECK(simd::active() == simd::Isa::scalar);
  simd::set_active(before);
  CHECK(simd::active() == before);
  for (auto isa : {simd::Isa::avx2, simd::Isa::neon})
    if (!simd::supported(isa)) CHECK_THROWS(simd::set_active(isa));
}
