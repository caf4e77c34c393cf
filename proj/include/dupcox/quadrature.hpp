// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace dupcox::quad {

/// 15-point Gauss-Kronrod rule with the embedded 7-point Gauss estimate.
/// Returns the Kronrod value; `err` receives |K15 - G7|.
template <class F>
double gauss_kronrod15(const F& f, double a, double b, double& err) {
  static constexpr double xgk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wgk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = wgk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * xgk[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += wgk[i] * pair;
    if (i % 2 == 1) gauss += wg[i / 2] * pair;
  }
  err = std::fabs((kronrod - gauss) * half);
  return kronrod * half;
}

/// Recursive-bisection adaptive Gauss-Kronrod quadrature. Accepts a panel
/// when its error estimate is below max(abs_tol, rel_tol * |panel value|)
/// or the depth limit is hit.
template <class F>
double adaptive(const F& f, double a, double b, double rel_tol, double abs_tol,
                int max_depth = 40) {
  double err = 0.0;
  const double whole = gauss_kronrod15(f, a, b, err);
  if (err <= abs_tol || err <= rel_tol * std::fabs(whole) || max_depth <= 0)
    return whole;
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, rel_tol, 0.5 * abs_tol, max_depth - 1) +
         adaptive(f, mid, b, rel_tol, 0.5 * abs_tol, max_depth - 1);
}

}  // namespace dupcox::quad
