// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/quadrature.hpp"
#include "dupcox/simulate.hpp"

namespace dupcox {
namespace {

// K(r) = pi r^2 + 2 pi phi^2 G(r / phi), where
//   G(x) = int_0^x t (exp(sigma2 e^{-t}) - 1) dt
// is the clustering excess in units of phi. The excess integrand decays like
// t e^{-t}, so G is flat beyond `cutoff`.
struct Excess {
  double sigma2;

  double operator()(double t) const {
    return t * std::expm1(sigma2 * std::exp(-t));
  }
  double cutoff() const { return std::max(0.0, std::log(sigma2)) + 60.0; }
};

constexpr double kRelTol = 1e-13;

// 1 - e^{-y} (1 + y), with e^{-y} supplied. Taylor series near 0 where the
// direct form cancels.
double one_minus_exp_poly(double y, double exp_neg_y) {
  if (y >= 0.1) return 1.0 - exp_neg_y * (1.0 + y);
  // sum_{k>=2} (-1)^k (k - 1) y^k / k!
  double term = y * y / 2.0, sum = 0.0;
  for (int k = 2; k < 14; ++k) {
    sum += (k - 1) * term;
    term *= -y / (k + 1);
  }
  return sum;
}

void check_params(CovarianceParams cov) {
  if (!(cov.phi > 0.0) || !std::isfinite(cov.phi))
    throw config_error(fmt::format("theoretical_k: phi must be > 0 (got {})", cov.phi));
  if (!(cov.sigma2 >= 0.0) || !std::isfinite(cov.sigma2))
    throw config_error(
        fmt::format("theoretical_k: sigma2 must be >= 0 (got {})", cov.sigma2));
}

}  // namespace

double theoretical_k(double r, CovarianceParams cov) {
  check_params(cov);
  if (!(r >= 0.0)) throw config_error("theoretical_k: r must be >= 0");
  const double poisson = std::numbers::pi * r * r;
  if (cov.sigma2 == 0.0 || r == 0.0) return poisson;
  const Excess g{cov.sigma2};
  const double upper = std::min(r / cov.phi, g.cutoff());
  const double excess = quad::adaptive(g, 0.0, upper, kRelTol, 1e-300);
  return poisson + 2.0 * std::numbers::pi * cov.phi * cov.phi * excess;
}

std::vector<double> theoretical_k_grid(std::span<const double> r,
                                       CovarianceParams cov) {
  check_params(cov);
  std::vector<double> out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(r[k] >= 0.0)) throw config_error("theoretical_k_grid: r must be >= 0");
    if (k > 0 && !(r[k] > r[k - 1]))
      throw config_error("theoretical_k_grid: r must be strictly increasing");
  }
  const double scale = 2.0 * std::numbers::pi * cov.phi * cov.phi;

  // Expanding expm1(sigma2 e^{-t}) termwise gives
  //   G(x) = sum_{n>=1} sigma2^n / (n! n^2) * (1 - e^{-nx} (1 + nx)).
  // Truncated once a coefficient falls below 1e-18 of the running sum.
  std::vector<double> coef;
  if (cov.sigma2 > 0.0) {
    double c = 1.0, total = 0.0;
    for (int n = 1; n < 400; ++n) {
      c *= cov.sigma2 / n;
      const double term = c / (static_cast<double>(n) * n);
      coef.push_back(term);
      total += term;
      if (n > cov.sigma2 && term < 1e-18 * total) break;
    }
  }
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double x = r[k] / cov.phi;
    const double q = std::exp(-x);
    double qn = 1.0, g = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) {
      const double y = static_cast<double>(i + 1) * x;
      qn *= q;
      g += coef[i] * one_minus_exp_poly(y, qn);
    }
    out[k] = std::numbers::pi * r[k] * r[k] + scale * g;
  }
  return out;
}

}  // namespace dupcox
