// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/kfunction.hpp"
#include "dupcox/simd/kernels.hpp"

namespace dupcox {
namespace {

void check_r_grid(std::span<const double> r) {
  if (r.empty()) throw config_error("K estimate: empty r grid");
  if (r[0] != 0.0) throw config_error("K estimate: r grid must start at 0");
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] > r[k - 1]))
      throw config_error("K estimate: r grid must be strictly increasing");
}

// First node with r_k >= d.
std::size_t first_node_at_or_above(std::span<const double> r, double d) {
  return static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), d) - r.begin());
}

// Pair sums sum_{i != j, d_ij <= r_k} e_ij v_i v_j at every node, where v is
// a per-point factor (all ones for the homogeneous estimator).
std::vector<double> translation_sums(const PointPattern& pattern,
                                     std::span<const double> v,
                                     std::span<const double> r) {
  const std::size_t n = pattern.size();
  const double r_max = r.back();
  const double w = pattern.window().width(), h = pattern.window().height();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pattern[a].x < pattern[b].x;
  });
  std::vector<double> xs(n), ys(n), vs(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = pattern[order[k]].x;
    ys[k] = pattern[order[k]].y;
    vs[k] = v[order[k]];
  }

  std::vector<double> bins(r.size(), 0.0);
  std::vector<double> dist(n), weight(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t end = i + 1;
    while (end < n && xs[end] - xs[i] <= r_max) ++end;
    const std::size_t m = end - (i + 1);
    if (m == 0) continue;
    simd::translation_pairs(xs[i], ys[i], xs.data() + i + 1, ys.data() + i + 1, m,
                            w, h, dist.data(), weight.data());
    for (std::size_t j = 0; j < m; ++j) {
      const double d = dist[j];
      if (!(d <= r_max)) continue;
      const double e = weight[j];
      if (!(e > 0.0) || !std::isfinite(e)) continue;
      bins[first_node_at_or_above(r, d)] += 2.0 * e * vs[i] * vs[i + 1 + j];
    }
  }
  for (std::size_t k = 1; k < bins.size(); ++k) bins[k] += bins[k - 1];
  return bins;
}

// Border-corrected pair sums with their normalisers: for node r_k,
//   num[k] = sum_{i: b_i >= r_k} sum_{j != i, d_ij <= r_k} v_i v_j
//   den[k] = sum_{i: b_i >= r_k} v_i
struct BorderSums {
  std::vector<double> num, den;
};

BorderSums border_sums(const PointPattern& pattern, std::span<const double> v,
                       std::span<const double> r) {
  const std::size_t n = pattern.size();
  const double r_max = r.back();
  const std::size_t nr = r.size();

  std::vector<double> b(n), xs(n), ys(n);
  std::vector<std::size_t> stop(n);  // first node with r_k > b_i
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pattern[i].x;
    ys[i] = pattern[i].y;
    b[i] = pattern.window().boundary_distance(pattern[i]);
    stop[i] = static_cast<std::size_t>(
        std::upper_bound(r.begin(), r.end(), b[i]) - r.begin());
  }

  BorderSums s{std::vector<double>(nr + 1, 0.0), std::vector<double>(nr + 1, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    s.den[0] += v[i];
    s.den[stop[i]] -= v[i];
  }
  std::vector<double> dist(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t m = n - (i + 1);
    simd::distances(xs[i], ys[i], xs.data() + i + 1, ys.data() + i + 1, m, dist.data());
    for (std::size_t jj = 0; jj < m; ++jj) {
      const double d = dist[jj];
      if (!(d <= r_max)) continue;
      const std::size_t j = i + 1 + jj;
      const std::size_t k0 = first_node_at_or_above(r, d);
      const double c = v[i] * v[j];
      if (k0 < stop[i]) {
        s.num[k0] += c;
        s.num[stop[i]] -= c;
      }
      if (k0 < stop[j]) {
        s.num[k0] += c;
        s.num[stop[j]] -= c;
      }
    }
  }
  for (std::size_t k = 1; k <= nr; ++k) {
    s.num[k] += s.num[k - 1];
    s.den[k] += s.den[k - 1];
  }
  s.num.resize(nr);
  s.den.resize(nr);
  return s;
}

KEstimate make_estimate(const PointPattern& pattern, std::span<const double> r,
                        KVariant variant) {
  KEstimate k;
  k.r.assign(r.begin(), r.end());
  k.variant = variant;
  k.correction = pattern.window().is_rectangle() ? EdgeCorrection::translation
                                                 : EdgeCorrection::border;
  k.n_points = pattern.size();
  k.window = pattern.window().describe();
  return k;
}

}  // namespace

std::vector<double> default_r_grid(double r_max, std::size_t n) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw config_error(fmt::format("r grid: r_max must be > 0 (got {})", r_max));
  if (n < 2) throw config_error("r grid: need at least two nodes");
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k)
    r[k] = r_max * static_cast<double>(k) / static_cast<double>(n - 1);
  return r;
}

double translation_correction(Point s, Point u, const Window& window) {
  if (!window.is_rectangle())
    throw config_error("translation_correction: rectangle windows only");
  const double w = window.width(), h = window.height();
  const double ox = w - std::fabs(u.x - s.x);
  const double oy = h - std::fabs(u.y - s.y);
  if (!(ox > 0.0) || !(oy > 0.0))
    throw numerical_error("translation_correction: shifted window does not overlap (infinite weight)");
  return (w * h) / (ox * oy);
}

KEstimate k_hom(const PointPattern& pattern, std::span<const double> r) {
  const std::size_t n = pattern.size();
  if (n < 2)
    throw config_error(fmt::format("k_hom: insufficient points (N = {}, need >= 2)", n));
  check_r_grid(r);
  KEstimate k = make_estimate(pattern, r, KVariant::hom);
  k.intensity = "constant (N-1)/|W|";
  const std::vector<double> ones(n, 1.0);
  const double area = pattern.window().area();
  const double nn = static_cast<double>(n);
  if (pattern.window().is_rectangle()) {
    const std::vector<double> s = translation_sums(pattern, ones, r);
    const double c = area / (nn * (nn - 1.0));
    k.khat.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) k.khat[i] = c * s[i];
  } else {
    const BorderSums s = border_sums(pattern, ones, r);
    k.khat.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      k.khat[i] = s.den[i] > 0.0 ? area / (nn - 1.0) * s.num[i] / s.den[i] : 0.0;
  }
  return k;
}

KEstimate k_inhom(const PointPattern& pattern, std::span<const double> lambda,
                  std::span<const double> r, std::string provenance) {
  const std::size_t n = pattern.size();
  if (n < 2)
    throw config_error(fmt::format("k_inhom: insufficient points (N = {}, need >= 2)", n));
  if (lambda.size() != n)
    throw config_error("k_inhom: one intensity value per point is required");
  check_r_grid(r);
  KEstimate k = make_estimate(pattern, r, KVariant::inhom);
  k.intensity = std::move(provenance);

  double lmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i]))
      throw numerical_error(fmt::format(
          "k_inhom: invalid intensity {} at point {} ({}, {})", lambda[i], i,
          pattern[i].x, pattern[i].y));
    lmax = std::max(lmax, lambda[i]);
  }
  const double floor = 1e-12 * lmax;
  std::vector<double> inv(n);
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double l = lambda[i];
    if (l < floor) {
      l = floor;
      ++clamped;
    }
    inv[i] = 1.0 / l;
  }
  if (clamped > 0)
    k.warnings.push_back(fmt::format(
        "intensity clamped below at 1e-12 x max for {} point(s)", clamped));

  const double area = pattern.window().area();
  k.khat.resize(r.size());
  if (pattern.window().is_rectangle()) {
    const std::vector<double> s = translation_sums(pattern, inv, r);
    for (std::size_t i = 0; i < r.size(); ++i) k.khat[i] = s[i] / area;
  } else {
    const BorderSums s = border_sums(pattern, inv, r);
    for (std::size_t i = 0; i < r.size(); ++i)
      k.khat[i] = s.den[i] > 0.0 ? s.num[i] / s.den[i] : 0.0;
  }
  return k;
}

KEstimate k_inhom(const PointPattern& pattern, const RasterField& lambda,
                  std::span<const double> r, std::string provenance) {
  std::vector<double> at(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) at[i] = lambda.interpolate(pattern[i]);
  return k_inhom(pattern, at, r, std::move(provenance));
}

namespace {

std::string_view variant_name(KVariant v) { return v == KVariant::hom ? "hom" : "inhom"; }
std::string_view correction_name(EdgeCorrection c) {
  return c == EdgeCorrection::translation ? "translation" : "border";
}

}  // namespace

void write_kest_csv(std::ostream& out, const KEstimate& k) {
  out << "# dupcox kest\n";
  out << "# variant," << variant_name(k.variant) << '\n';
  out << "# n," << k.n_points << '\n';
  out << "# window," << k.window << '\n';
  out << "# intensity," << k.intensity << '\n';
  out << "# correction," << correction_name(k.correction) << '\n';
  for (const auto& w : k.warnings) out << "# warning," << w << '\n';
  out << "r,khat\n";
  for (std::size_t i = 0; i < k.r.size(); ++i)
    out << fmt::format("{},{}\n", k.r[i], k.khat[i]);
}

void write_kest_csv(const std::string& path, const KEstimate& k) {
  std::ofstream f(path);
  if (!f) throw io_error(fmt::format("cannot open '{}' for writing", path));
  write_kest_csv(f, k);
  if (!f) throw io_error(fmt::format("write to '{}' failed", path));
}

KEstimate read_kest_csv(std::istream& in) {
  KEstimate k;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::string body = line.substr(2);
      const auto comma = body.find(',');
      if (comma == std::string::npos) continue;
      const std::string key = body.substr(0, comma), val = body.substr(comma + 1);
      if (key == "variant") k.variant = val == "inhom" ? KVariant::inhom : KVariant::hom;
      else if (key == "n") k.n_points = std::stoul(val);
      else if (key == "window") k.window = val;
      else if (key == "intensity") k.intensity = val;
      else if (key == "correction")
        k.correction = val == "border" ? EdgeCorrection::border : EdgeCorrection::translation;
      else if (key == "warning") k.warnings.push_back(val);
      continue;
    }
    if (!header) {
      if (line != "r,khat") throw io_error("kest csv: expected header 'r,khat'");
      header = true;
      continue;
    }
    std::istringstream ss(line);
    double r = 0.0, v = 0.0;
    char c = 0;
    if (!(ss >> r >> c >> v) || c != ',')
      throw io_error(fmt::format("kest csv: malformed row '{}'", line));
    k.r.push_back(r);
    k.khat.push_back(v);
  }
  if (!header) throw io_error("kest csv: missing 'r,khat' header");
  return k;
}

KEstimate read_kest_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error(fmt::format("cannot open '{}'", path));
  return read_kest_csv(f);
}

}  // namespace dupcox
