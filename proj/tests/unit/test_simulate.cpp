#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dupcox/error.hpp"
#include "dupcox/simulate.hpp"
#include "support.hpp"

using namespace dupcox;
using dupcox::test::uniform_pattern;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson on 2 pi s exp(sigma2 exp(-s / phi)) over [0, r].
double simpson_k(double r, double phi, double sigma2, int n = 1'000'000) {
  const double h = r / n;
  auto f = [&](double s) { return s * std::exp(sigma2 * std::exp(-s / phi)); };
  double acc = f(0.0) + f(r);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return 2.0 * kPi * acc * h / 3.0;
}

}  // namespace

TEST_CASE("theoretical K reference values") {
  for (double phi : {1.0, 20.0, 300.0})
    for (double r : {1.0, 5.0, 10.0, 20.0, 100.0})
      CHECK(theoretical_k(r, {phi, 0.0}) == doctest::Approx(kPi * r * r).epsilon(1e-12));
  CHECK(theoretical_k(0.0, {20, 2}) == 0.0);

  const double simpson = simpson_k(20.0, 20.0, 2.0);
  CHECK(theoretical_k(20.0, {20, 2}) == doctest::Approx(simpson).epsilon(1e-10));
  // High-precision values of the same integral.
  CHECK(theoretical_k(20.0, {20, 2}) == doctest::Approx(3758.0253804742029649).epsilon(1e-11));
  CHECK(theoretical_k(100.0, {20, 2}) == doctest::Approx(38006.945370309149909).epsilon(1e-11));
  CHECK(theoretical_k(5.0, {15, 4}) == doctest::Approx(2021.9269041021303917).epsilon(1e-11));
}

TEST_CASE("series grid agrees with adaptive quadrature") {
  std::vector<double> r;
  for (int i = 0; i <= 512; ++i) r.push_back(202.5 * i / 512.0);
  for (double phi : {0.1, 2.0, 15.0, 20.0, 30.0, 50.0})
    for (double s2 : {0.0, 0.01, 1.0, 2.0, 4.0, 20.0}) {
      const auto g = theoretical_k_grid(r, {phi, s2});
      REQUIRE(g.size() == r.size());
      CHECK(g[0] == 0.0);
      for (std::size_t i = 1; i < r.size(); i += 37) {
        CAPTURE(phi);
        CAPTURE(s2);
        CAPTURE(r[i]);
        CHECK(g[i] == doctest::Approx(theoretical_k(r[i], {phi, s2})).epsilon(1e-10));
      }
    }
}

TEST_CASE("theoretical K is increasing in r and sigma2 and above Poisson") {
  std::vector<double> r;
  for (int i = 0; i <= 200; ++i) r.push_back(i * 1.0);
  for (double s2 : {0.5, 2.0, 4.0}) {
    const auto lo = theoretical_k_grid(r, {20, s2});
    const auto hi = theoretical_k_grid(r, {20, s2 * 1.5});
    for (std::size_t i = 1; i < r.size(); ++i) {
      CHECK(lo[i] > lo[i - 1]);
      CHECK(hi[i] > lo[i]);
      CHECK(lo[i] >= kPi * r[i] * r[i]);
    }
  }
}

TEST_CASE("GRF Monte Carlo moments") {
  // 10-unit cells: probes two cells apart are separated by phi = 20.
  const Window w = Window::rectangle(0, 640, 0, 640);
  const CovarianceParams cov{20.0, 2.0};
  GrfSampler sampler(w, 64, 64, cov);
  const int reps = 500;
  double s_a = 0, s_aa = 0, s_b = 0, s_bb = 0, s_ab = 0;
  for (int k = 0; k < reps; ++k) {
    const RasterField z = sampler.sample(1000 + k);
    const double a = z.at(30, 30), b = z.at(32, 30);
    s_a += a;
    s_aa += a * a;
    s_b += b;
    s_bb += b * b;
    s_ab += a * b;
  }
  const double ma = s_a / reps, mb = s_b / reps;
  const double va = s_aa / reps - ma * ma, vb = s_bb / reps - mb * mb;
  const double corr = (s_ab / reps - ma * mb) / std::sqrt(va * vb);
  CHECK(std::fabs(ma + 1.0) < 0.15);
  CHECK(std::fabs(va - 2.0) < 0.3);
  CHECK(std::fabs(corr - std::exp(-1.0)) < 0.1);

  double m200 = 0.0;
  for (int k = 0; k < 200; ++k) m200 += sampler.sample(5000 + k).at(10, 50);
  CHECK(std::fabs(m200 / 200 + 1.0) < 0.15);
}

TEST_CASE("GRF sampler is deterministic and reports its route") {
  const Window w = Window::rectangle(0, 810, 0, 810);
  GrfSampler s(w, 128, 128, {20, 2});
  CHECK(s.diagnostics().method == GrfMethod::circulant);
  CHECK(s.diagnostics().embedding_factor >= 1);
  CHECK(s.sample(7).values() == s.sample(7).values());
  CHECK(s.sample(7).values() != s.sample(8).values());

  GrfSampler d(Window::rectangle(0, 100, 0, 100), 16, 16, {20, 2}, GrfMethod::dense);
  CHECK(d.diagnostics().method == GrfMethod::dense);
  CHECK(d.sample(1).all_finite());
  CHECK_THROWS_AS(GrfSampler(w, 256, 256, {20, 2}, GrfMethod::dense), Error);
}

TEST_CASE("LGCP mean point counts") {
  const Window w = Window::rectangle(0, 810, 0, 810);
  const CovarianceParams cov{20, 2};
  GrfSampler sampler(w, 256, 256, cov);
  const RasterField hmean =
      evaluate_mean(ConstantMean{constant_mean_for_count(1000, w)}, w, 256, 256);
  const RasterField imean = evaluate_mean(LinearMean{-7.0753, -0.0018, 0.0026}, w, 256, 256);
  double nh = 0.0, ni = 0.0;
  for (int k = 0; k < 200; ++k) {
    nh += static_cast<double>(simulate_lgcp(sampler, hmean, 10 + k).pattern.size());
    ni += static_cast<double>(simulate_lgcp(sampler, imean, 900 + k).pattern.size());
  }
  CHECK(std::fabs(nh / 200 - 1000) < 50);
  CHECK(std::fabs(ni / 200 - 1000) < 60);
}

TEST_CASE("constant mean for a target count") {
  const Window w = Window::rectangle(0, 810, 0, 810);
  CHECK(constant_mean_for_count(1000, w) == doctest::Approx(std::log(1000.0 / 656100.0)));
  CHECK(std::exp(constant_mean_for_count(1000, w)) * w.area() == doctest::Approx(1000.0));
}

TEST_CASE("near-Poisson LGCP looks like CSR") {
  const Window w = Window::rectangle(0, 810, 0, 810);
  const auto p = simulate_lgcp(ConstantMean{constant_mean_for_count(1000, w)}, {20, 1e-8}, w,
                               128, 128, 3);
  CHECK(p.size() > 850);
  CHECK(p.size() < 1150);
}

TEST_CASE("LGCP simulation is reproducible") {
  const Window w = Window::rectangle(0, 810, 0, 810);
  const MeanModel m = ConstantMean{constant_mean_for_count(500, w)};
  const auto a = simulate_lgcp(m, {20, 2}, w, 128, 128, 42);
  const auto b = simulate_lgcp(m, {20, 2}, w, 128, 128, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
}

TEST_CASE("covariate mean must match the grid") {
  const Window w = Window::rectangle(0, 810, 0, 810);
  CovariateMean cm;
  cm.coefficients = {1.0};
  cm.covariates.emplace_back(w, 32, 32);
  CHECK_THROWS_AS(evaluate_mean(cm, w, 64, 64), Error);
  CHECK_NOTHROW(evaluate_mean(cm, w, 32, 32));
}

TEST_CASE("corruption") {
  const Window w = Window::rectangle(0, 810, 0, 810);
  const PointPattern p = uniform_pattern(w, 1000, 77);
  const Partition grid = make_regular_grid(w, 18, 18);

  SUBCASE("fraction 0 is the identity") {
    const auto c = corrupt(p, grid, {0.0, 1});
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(c[i].x == p[i].x);
      CHECK(c[i].y == p[i].y);
    }
  }
  SUBCASE("fraction 1 on one cell") {
    const auto one = make_regular_grid(w, 1, 1);
    const auto c = corrupt(p, one, {1.0, 1});
    const auto m = find_duplicates(c, 0.0);
    REQUIRE(m.groups.size() == 1);
    CHECK(m.groups[0].count() == p.size());
    CHECK(m.groups[0].location.x == 405.0);
  }
  SUBCASE("fraction 1 is idempotent") {
    const auto c1 = corrupt(p, grid, {1.0, 5});
    const auto c2 = corrupt(c1, grid, {1.0, 6});
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(c1[i].x == c2[i].x);
      CHECK(c1[i].y == c2[i].y);
    }
  }
  SUBCASE("60% grid corruption") {
    std::vector<std::size_t> snapped;
    const auto c = corrupt(p, grid, {0.6, 3}, &snapped);
    CHECK(c.size() == p.size());
    CHECK(snapped.size() == 600);
    CHECK(std::is_sorted(snapped.begin(), snapped.end()));
    std::size_t moved = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (c[i].x != p[i].x || c[i].y != p[i].y) ++moved;
    CHECK(moved == 600);
    std::vector<std::size_t> cells;
    for (std::size_t i : snapped) cells.push_back(grid.locate(c[i]));
    std::sort(cells.begin(), cells.end());
    const auto distinct = static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
    const auto m = find_duplicates(c, 0.0);
    CHECK(m.duplicated_points() >= 600 - distinct);
    CHECK(m.duplicated_points() <= 600);
    const double share = static_cast<double>(m.duplicated_points()) / 1000.0;
    CHECK(share == doctest::Approx(0.6).epsilon(0.1));
  }
  SUBCASE("nested across fractions with a shared seed") {
    std::vector<std::size_t> s2, s4;
    corrupt(p, grid, {0.2, 9}, &s2);
    corrupt(p, grid, {0.4, 9}, &s4);
    CHECK(std::includes(s4.begin(), s4.end(), s2.begin(), s2.end()));
  }
  CHECK_THROWS_AS(corrupt(p, grid, {1.5, 1}), Error);
}
