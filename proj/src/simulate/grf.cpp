// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <fftw3.h>
#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/random.hpp"
#include "dupcox/simulate.hpp"

namespace dupcox {
namespace {

// The FFTW planner is not re-entrant; execution with fresh arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (data == nullptr) throw numerical_error("fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
};

}  // namespace

void CovarianceParams::validate() const {
  if (!(phi > 0.0) || !std::isfinite(phi))
    throw config_error(fmt::format("covariance: phi must be > 0 (got {})", phi));
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw config_error(
        fmt::format("covariance: sigma2 must be > 0 (got {})", sigma2));
}

double CovarianceParams::covariance(double h) const {
  return sigma2 * std::exp(-h / phi);
}

struct GrfSampler::Impl {
  Window window;
  int nx = 0, ny = 0;
  CovarianceParams cov;
  GrfDiagnostics diag;

  // Circulant route.
  int m1 = 0, m2 = 0;
  std::vector<double> amplitude;  // sqrt(eigenvalue / (m1 m2))
  fftw_plan plan = nullptr;

  // Dense route.
  Eigen::MatrixXd root;

  Impl(const Window& w, int nx_, int ny_, CovarianceParams c)
      : window(w), nx(nx_), ny(ny_), cov(c) {}

  ~Impl() {
    if (plan != nullptr) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }

  // Tries a torus of (2 f nx) x (2 f ny) cells. Returns the relative
  // minimum eigenvalue; keeps the factorisation when it is acceptable.
  double try_embedding(int factor) {
    const int n1 = 2 * factor * nx;
    const int n2 = 2 * factor * ny;
    const std::size_t total = static_cast<std::size_t>(n1) * n2;
    const double dx = window.width() / nx;
    const double dy = window.height() / ny;

    FftwBuffer buf(total);
    fftw_plan p;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      p = fftw_plan_dft_2d(n2, n1, buf.data, buf.data, FFTW_FORWARD,
                           FFTW_ESTIMATE);
    }
    for (int j = 0; j < n2; ++j) {
      const double hy = std::min(j, n2 - j) * dy;
      for (int i = 0; i < n1; ++i) {
        const double hx = std::min(i, n1 - i) * dx;
        const std::size_t k = static_cast<std::size_t>(j) * n1 + i;
        buf.data[k][0] = cov.covariance(std::sqrt(hx * hx + hy * hy));
        buf.data[k][1] = 0.0;
      }
    }
    fftw_execute(p);

    double lmin = buf.data[0][0], lmax = buf.data[0][0];
    for (std::size_t k = 0; k < total; ++k) {
      lmin = std::min(lmin, buf.data[k][0]);
      lmax = std::max(lmax, buf.data[k][0]);
    }
    const double rel = lmin / lmax;
    if (rel < -1e-10) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(p);
      return rel;
    }
    amplitude.resize(total);
    for (std::size_t k = 0; k < total; ++k)
      amplitude[k] = std::sqrt(std::max(buf.data[k][0], 0.0) /
                               static_cast<double>(total));
    m1 = n1;
    m2 = n2;
    plan = p;
    return rel;
  }

  void build_dense() {
    const int n = nx * ny;
    Eigen::MatrixXd c(n, n);
    for (int a = 0; a < n; ++a) {
      const double xa = (a % nx + 0.5) * window.width() / nx;
      const double ya = (a / nx + 0.5) * window.height() / ny;
      for (int b = 0; b <= a; ++b) {
        const double xb = (b % nx + 0.5) * window.width() / nx;
        const double yb = (b / nx + 0.5) * window.height() / ny;
        const double h = std::hypot(xa - xb, ya - yb);
        c(a, b) = c(b, a) = cov.covariance(h);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
      c.diagonal().array() += 1e-10 * cov.sigma2;
      llt.compute(c);
      if (llt.info() != Eigen::Success)
        throw numerical_error("grf: dense covariance is not positive definite");
    }
    root = llt.matrixL();
  }
};

GrfSampler::GrfSampler(const Window& window, int nx, int ny,
                       CovarianceParams cov, GrfMethod method)
    : impl_(std::make_unique<Impl>(window, nx, ny, cov)) {
  cov.validate();
  if (!window.is_rectangle())
    throw config_error("simulate_grf: window must be a rectangle");
  if (nx < 2 || ny < 2) throw config_error("simulate_grf: nx, ny must be >= 2");

  auto& d = impl_->diag;
  if (method != GrfMethod::dense) {
    double rel = 0.0;
    for (int f = 1; f <= 4; ++f) {
      rel = impl_->try_embedding(f);
      if (impl_->plan != nullptr) {
        d.method = GrfMethod::circulant;
        d.embedding_factor = f;
        d.min_eigenvalue = rel;
        return;
      }
    }
    d.min_eigenvalue = rel;
    d.note = fmt::format(
        "circulant embedding not nonnegative definite up to factor 4 "
        "(min relative eigenvalue {:.3g})",
        rel);
    if (method == GrfMethod::circulant) throw numerical_error("simulate_grf: " + d.note);
  }
  if (nx * ny > kDenseLimit)
    throw numerical_error(fmt::format(
        "simulate_grf: {}; dense fallback limited to {} cells, grid has {}",
        d.note.empty() ? std::string("dense route requested") : d.note,
        kDenseLimit, nx * ny));
  impl_->build_dense();
  d.method = GrfMethod::dense;
  d.embedding_factor = 0;
  if (!d.note.empty()) d.note += "; used dense Cholesky root";
}

GrfSampler::~GrfSampler() = default;
GrfSampler::GrfSampler(GrfSampler&&) noexcept = default;
GrfSampler& GrfSampler::operator=(GrfSampler&&) noexcept = default;

const GrfDiagnostics& GrfSampler::diagnostics() const { return impl_->diag; }

RasterField GrfSampler::sample(std::uint64_t seed) const {
  const Impl& im = *impl_;
  RasterField field(im.window, im.nx, im.ny);
  Rng rng(seed);
  const double mean = -0.5 * im.cov.sigma2;

  if (im.diag.method == GrfMethod::dense) {
    const int n = im.nx * im.ny;
    Eigen::VectorXd xi(n);
    for (int k = 0; k < n; ++k) xi[k] = rng.normal();
    const Eigen::VectorXd z = im.root * xi;
    for (int k = 0; k < n; ++k) field.values()[k] = mean + z[k];
    return field;
  }

  const std::size_t total = static_cast<std::size_t>(im.m1) * im.m2;
  FftwBuffer buf(total);
  for (std::size_t k = 0; k < total; ++k) {
    const double re = rng.normal();
    const double imag = rng.normal();
    buf.data[k][0] = im.amplitude[k] * re;
    buf.data[k][1] = im.amplitude[k] * imag;
  }
  fftw_execute_dft(im.plan, buf.data, buf.data);
  for (int iy = 0; iy < im.ny; ++iy)
    for (int ix = 0; ix < im.nx; ++ix)
      field.at(ix, iy) =
          mean + buf.data[static_cast<std::size_t>(iy) * im.m1 + ix][0];
  return field;
}

RasterField simulate_grf(const Window& window, int nx, int ny,
                         CovarianceParams cov, std::uint64_t seed,
                         GrfMethod method) {
  return GrfSampler(window, nx, ny, cov, method).sample(seed);
}

}  // namespace dupcox
