// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dupcox/estimation.hpp"

namespace dupcox {
namespace {

using Vec = std::array<double, 2>;

struct Box2 {
  Vec lo, hi;
  Vec clamp(Vec v) const {
    return {std::clamp(v[0], lo[0], hi[0]), std::clamp(v[1], lo[1], hi[1])};
  }
};

struct LocalResult {
  Vec x{};
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

template <class F>
LocalResult nelder_mead(const F& f, Vec start, const Box2& box,
                        const OptimizerSpec& spec) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  std::array<Vec, 3> v;
  std::array<double, 3> fv;
  v[0] = box.clamp(start);
  for (int d = 0; d < 2; ++d) {
    Vec p = v[0];
    const double step = 0.1 * (box.hi[d] - box.lo[d]);
    p[d] = p[d] + step <= box.hi[d] ? p[d] + step : p[d] - step;
    v[d + 1] = box.clamp(p);
  }
  for (int i = 0; i < 3; ++i) fv[i] = f(v[i]);

  LocalResult res;
  for (int it = 0;; ++it) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = idx[0], mid = idx[1], worst = idx[2];

    double diameter = 0.0;
    for (int i : {mid, worst})
      diameter = std::max(diameter, std::hypot(v[i][0] - v[best][0], v[i][1] - v[best][1]));
    res.iterations = it;
    if (diameter < spec.tolerance) {
      res.converged = true;
      res.x = v[best];
      res.f = fv[best];
      return res;
    }
    if (it >= spec.max_iterations) {
      res.x = v[best];
      res.f = fv[best];
      return res;
    }

    const Vec c = {0.5 * (v[best][0] + v[mid][0]), 0.5 * (v[best][1] + v[mid][1])};
    auto along = [&](double t) {
      return box.clamp({c[0] + t * (v[worst][0] - c[0]), c[1] + t * (v[worst][1] - c[1])});
    };
    const Vec xr = along(-kReflect);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const Vec xe = along(-kExpand);
      const double fe = f(xe);
      if (fe < fr) {
        v[worst] = xe;
        fv[worst] = fe;
      } else {
        v[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[mid]) {
      v[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Vec xc = along(outside ? kContract : -kContract);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      v[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (int i : {mid, worst}) {
      v[i] = box.clamp({v[best][0] + kShrink * (v[i][0] - v[best][0]),
                        v[best][1] + kShrink * (v[i][1] - v[best][1])});
      fv[i] = f(v[i]);
    }
  }
}

void check_bounds(const Bounds& b) {
  if (!(b.phi_lo > 0.0 && b.phi_hi > b.phi_lo && b.sigma2_lo > 0.0 &&
        b.sigma2_hi > b.sigma2_lo))
    throw config_error("fit: bounds must be positive, nonempty intervals");
}

}  // namespace

NonConvergence::NonConvergence(FitResult best)
    : Error(ErrorKind::numerical,
            fmt::format("fit: no start converged (best phi = {}, sigma2 = {}, contrast = {})",
                        best.phi, best.sigma2, best.contrast)),
      best_(best) {}

FitResult fit(const KEstimate& khat, const ContrastConfig& config, Method label,
              const Bounds& bounds, const OptimizerSpec& optimizer) {
  check_bounds(bounds);
  if (optimizer.starts.empty()) throw config_error("fit: no starting points");
  if (optimizer.max_iterations < 1 || !(optimizer.tolerance > 0.0))
    throw config_error("fit: invalid optimizer settings");
  const Contrast u(khat, config);
  const Box2 box{{std::log(bounds.phi_lo), std::log(bounds.sigma2_lo)},
                 {std::log(bounds.phi_hi), std::log(bounds.sigma2_hi)}};
  auto objective = [&](Vec x) {
    const double val = u(std::exp(x[0]), std::exp(x[1]));
    return std::isfinite(val) ? val : std::numeric_limits<double>::max();
  };

  FitResult out;
  out.method = label;
  out.delta = u.delta();
  out.r_max = u.r_max();
  out.starts = static_cast<int>(optimizer.starts.size());
  LocalResult best;
  LocalResult best_converged;
  for (const auto& s : optimizer.starts) {
    const Vec x0 = {box.lo[0] + s[0] * (box.hi[0] - box.lo[0]),
                    box.lo[1] + s[1] * (box.hi[1] - box.lo[1])};
    const LocalResult r = nelder_mead(objective, x0, box, optimizer);
    out.iterations += r.iterations;
    if (r.f < best.f) best = r;
    if (r.converged) {
      ++out.converged_starts;
      if (r.f < best_converged.f) best_converged = r;
    }
  }
  const LocalResult& chosen = out.converged_starts > 0 ? best_converged : best;
  out.phi = std::exp(chosen.x[0]);
  out.sigma2 = std::exp(chosen.x[1]);
  out.contrast = chosen.f;
  out.converged = out.converged_starts > 0;
  if (!out.converged) throw NonConvergence(out);
  return out;
}

FitResult fit(const KEstimate& khat, const ContrastConfig& config,
              const Bounds& bounds, const OptimizerSpec& optimizer) {
  return fit(khat, config, config.delta > 0.0 ? Method::mmc : Method::mc, bounds,
             optimizer);
}

}  // namespace dupcox
