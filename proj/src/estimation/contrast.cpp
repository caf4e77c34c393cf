// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "dupcox/estimation.hpp"
#include "dupcox/simulate.hpp"

namespace dupcox {
namespace {

std::size_t nearest_node(const std::vector<double>& r, double x) {
  const auto it = std::lower_bound(r.begin(), r.end(), x);
  if (it == r.begin()) return 0;
  if (it == r.end()) return r.size() - 1;
  const auto k = static_cast<std::size_t>(it - r.begin());
  return (x - r[k - 1] <= r[k] - x) ? k - 1 : k;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::mc: return "MC";
    case Method::mc_i: return "MC-I";
    case Method::mc_ii: return "MC-II";
    case Method::mc_iii: return "MC-III";
    case Method::mmc: return "MMC";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string up(name);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Method m : {Method::mc, Method::mc_i, Method::mc_ii, Method::mc_iii, Method::mmc})
    if (up == method_name(m)) return m;
  throw config_error(fmt::format("unknown method '{}' (expected MC, MC-I, MC-II, MC-III or MMC)", name));
}

Contrast::Contrast(const KEstimate& khat, const ContrastConfig& config)
    : exponent_(config.exponent) {
  if (khat.r.size() < 2 || khat.r.size() != khat.khat.size())
    throw config_error("contrast: malformed K estimate");
  if (!(config.delta >= 0.0))
    throw config_error(fmt::format("contrast: delta must be >= 0 (got {})", config.delta));
  if (!(config.r_max > config.delta))
    throw config_error(fmt::format("contrast: r_max ({}) must exceed delta ({})",
                                   config.r_max, config.delta));
  if (!(config.exponent > 0.0)) throw config_error("contrast: exponent must be > 0");
  const double top = khat.r.back();
  const double slack = 1e-9 * std::max(1.0, top);
  if (config.r_max > top + slack || khat.r.front() > config.delta + slack)
    throw config_error(fmt::format(
        "contrast: K grid [{}, {}] does not cover [{}, {}]", khat.r.front(), top,
        config.delta, config.r_max));

  const std::size_t lo = nearest_node(khat.r, config.delta);
  const std::size_t hi = nearest_node(khat.r, config.r_max);
  delta_ = khat.r[lo];
  r_max_ = khat.r[hi];
  if (hi <= lo) return;  // empty range: the contrast is identically zero
  r_.assign(khat.r.begin() + lo, khat.r.begin() + hi + 1);
  target_.resize(r_.size());
  for (std::size_t k = 0; k < r_.size(); ++k) {
    const double v = khat.khat[lo + k];
    if (!(v >= 0.0) || !std::isfinite(v))
      throw config_error(fmt::format("contrast: invalid K estimate {} at r = {}", v, r_[k]));
    target_[k] = std::pow(v, exponent_);
  }
  weights_.assign(r_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < r_.size(); ++k) {
    const double half = 0.5 * (r_[k + 1] - r_[k]);
    weights_[k] += half;
    weights_[k + 1] += half;
  }
}

double Contrast::operator()(double phi, double sigma2) const {
  if (r_.empty()) return 0.0;
  const std::vector<double> k = theoretical_k_grid(r_, {phi, sigma2});
  double u = 0.0;
  for (std::size_t i = 0; i < r_.size(); ++i) {
    const double diff = target_[i] - std::pow(k[i], exponent_);
    u += weights_[i] * diff * diff;
  }
  return u;
}

double contrast(const KEstimate& khat, double phi, double sigma2,
                const ContrastConfig& config) {
  return Contrast(khat, config)(phi, sigma2);
}

double delta_rule(double mean_cell_area) {
  return equivalent_diameter(mean_cell_area) / 3.0;
}

double rmax_rule(const Window& window) {
  if (!window.is_rectangle())
    throw config_error("rmax_rule: unsupported for polygon windows; supply r_max explicitly");
  return std::min(window.width(), window.height()) / 4.0;
}

}  // namespace dupcox
