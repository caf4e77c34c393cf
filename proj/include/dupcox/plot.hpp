// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dupcox/harness.hpp"

namespace dupcox {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

/// Labelled polylines, e.g. K curve overlays.
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series);

struct BandSeries {
  std::vector<double> x;
  std::array<std::vector<double>, 5> q;  // 5, 25, 50, 75, 95 % at each x
};

/// Median line with shaded 25-75 % and 5-95 % bands.
std::string svg_band_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const BandSeries& band,
                          std::optional<double> truth = std::nullopt);

struct QuantileBar {
  std::string label;
  std::array<double, 5> q{};
};

/// Box-style bars (whiskers 5-95 %, box 25-75 %, median tick), one per entry.
std::string svg_quantile_bars(const std::string& title, const std::string& ylabel,
                              const std::vector<QuantileBar>& bars,
                              std::optional<double> truth = std::nullopt);

struct PlotFile {
  std::string name;
  std::string svg;
};

/// Documents for a study summary: per-parameter quantile bars by method and
/// fraction, and, when the summary holds several deltas for one method, a
/// delta band plot per fraction. Empty summary gives no documents.
std::vector<PlotFile> emit_plots(const std::vector<SummaryRow>& summary,
                                 CovarianceParams truth);

}  // namespace dupcox
