// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "dupcox/plot.hpp"

namespace dupcox {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void pad(double& lo, double& hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi <= lo) {
    const double c = lo;
    lo = c - 0.5 * std::max(1.0, std::fabs(c));
    hi = c + 0.5 * std::max(1.0, std::fabs(c));
  }
  const double m = 0.05 * (hi - lo);
  lo -= m;
  hi += m;
}

std::string header(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
      kWidth, kHeight, kWidth, kHeight, kWidth / 2, escape(title));
}

std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel,
                 bool numeric_x = true) {
  std::string s;
  const double xa = kLeft, xb = kWidth - kRight, ya = kTop, yb = kHeight - kBottom;
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                   xa, ya, xb - xa, yb - ya);
  for (int i = 0; i <= 4; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
                     xa - 6, f.py(y) + 4, y);
    if (numeric_x) {
      const double x = f.x0 + (f.x1 - f.x0) * i / 4.0;
      s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n",
                       f.px(x), yb + 16, x);
    }
  }
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                   (xa + xb) / 2, kHeight - 10, escape(xlabel));
  s += fmt::format("<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
                   (ya + yb) / 2, (ya + yb) / 2, escape(ylabel));
  return s;
}

std::string polyline(const Frame& f, const std::vector<double>& x,
                     const std::vector<double>& y, const char* color,
                     const char* extra = "") {
  std::string pts;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (std::isfinite(x[i]) && std::isfinite(y[i]))
      pts += fmt::format("{:.2f},{:.2f} ", f.px(x[i]), f.py(y[i]));
  return fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n",
                     pts, color, extra);
}

std::string truth_line(const Frame& f, double truth) {
  return fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" "
      "stroke-dasharray=\"5,4\"/>\n",
      kLeft, f.py(truth), kWidth - kRight, f.py(truth));
}

std::string legend_entry(int i, const std::string& label, const char* color) {
  const double y = kTop + 14 + 18 * i;
  const double x = kWidth - kRight + 12;
  return fmt::format(
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>"
      "<text x=\"{}\" y=\"{}\">{}</text>\n",
      x, y - 4, x + 18, y - 4, color, x + 24, y, escape(label));
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
  pad(x0, x1);
  pad(y0, y1);
  const Frame f{x0, x1, y0, y1};
  std::string svg = header(title) + axes(f, xlabel, ylabel);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg += "<g class=\"series\">\n";
    svg += polyline(f, series[i].x, series[i].y, color);
    svg += "</g>\n";
    svg += legend_entry(static_cast<int>(i), series[i].label, color);
  }
  return svg + "</svg>\n";
}

std::string svg_band_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const BandSeries& band,
                          std::optional<double> truth) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (double x : band.x) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
  }
  for (const auto& q : band.q)
    for (double v : q)
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
  if (truth) {
    y0 = std::min(y0, *truth);
    y1 = std::max(y1, *truth);
  }
  pad(x0, x1);
  pad(y0, y1);
  const Frame f{x0, x1, y0, y1};
  std::string svg = header(title) + axes(f, xlabel, ylabel);
  auto area = [&](const std::vector<double>& lo, const std::vector<double>& hi,
                  const char* fill) {
    std::string pts;
    for (std::size_t i = 0; i < band.x.size(); ++i)
      if (std::isfinite(hi[i])) pts += fmt::format("{:.2f},{:.2f} ", f.px(band.x[i]), f.py(hi[i]));
    for (std::size_t i = band.x.size(); i-- > 0;)
      if (std::isfinite(lo[i])) pts += fmt::format("{:.2f},{:.2f} ", f.px(band.x[i]), f.py(lo[i]));
    return fmt::format("<polygon class=\"band\" points=\"{}\" fill=\"{}\" stroke=\"none\"/>\n", pts, fill);
  };
  svg += area(band.q[0], band.q[4], "#dddddd");
  svg += area(band.q[1], band.q[3], "#aaaaaa");
  svg += "<g class=\"series\">\n" + polyline(f, band.x, band.q[2], "black") + "</g>\n";
  if (truth) svg += truth_line(f, *truth);
  svg += legend_entry(0, "median", "black");
  svg += legend_entry(1, "25-75%", "#aaaaaa");
  svg += legend_entry(2, "5-95%", "#dddddd");
  return svg + "</svg>\n";
}

std::string svg_quantile_bars(const std::string& title, const std::string& ylabel,
                              const std::vector<QuantileBar>& bars,
                              std::optional<double> truth) {
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& b : bars)
    for (double v : b.q)
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
  if (truth) {
    y0 = std::min(y0, *truth);
    y1 = std::max(y1, *truth);
  }
  pad(y0, y1);
  const double n = static_cast<double>(std::max<std::size_t>(bars.size(), 1));
  const Frame f{0.0, n, y0, y1};
  std::string svg = header(title) + axes(f, "", ylabel, false);
  const double slot = (kWidth - kLeft - kRight) / n;
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& q = bars[i].q;
    const double cx = f.px(static_cast<double>(i) + 0.5);
    const double half = std::min(14.0, 0.3 * slot);
    const char* color = kPalette[i % std::size(kPalette)];
    svg += "<g class=\"bar\">\n";
    if (std::isfinite(q[0]) && std::isfinite(q[4]))
      svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\"/>\n",
                         cx, f.py(q[0]), f.py(q[4]), color);
    if (std::isfinite(q[1]) && std::isfinite(q[3]))
      svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"{}\"/>\n",
                         cx - half, f.py(q[3]), 2 * half, f.py(q[1]) - f.py(q[3]), color, color);
    if (std::isfinite(q[2]))
      svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
                         cx - half, f.py(q[2]), cx + half, f.py(q[2]));
    svg += "</g>\n";
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-45 {:.2f} {:.2f})\">{}</text>\n",
                       cx, kHeight - kBottom + 12, cx, kHeight - kBottom + 12, escape(bars[i].label));
  }
  if (truth) svg += truth_line(f, *truth);
  return svg + "</svg>\n";
}

std::vector<PlotFile> emit_plots(const std::vector<SummaryRow>& summary,
                                 CovarianceParams truth) {
  std::vector<PlotFile> out;
  if (summary.empty()) return out;

  // Several deltas for a single (fraction, method) means a sweep.
  std::map<std::pair<double, int>, std::vector<const SummaryRow*>> by_key;
  for (const auto& s : summary) by_key[{s.fraction, static_cast<int>(s.method)}].push_back(&s);
  const bool sweep = std::any_of(by_key.begin(), by_key.end(),
                                 [](const auto& kv) { return kv.second.size() > 1; });

  if (sweep) {
    for (auto& [key, rows] : by_key) {
      std::sort(rows.begin(), rows.end(),
                [](const SummaryRow* a, const SummaryRow* b) { return a->delta < b->delta; });
      for (int param = 0; param < 2; ++param) {
        BandSeries band;
        for (const SummaryRow* r : rows) {
          band.x.push_back(r->delta);
          const auto& q = param == 0 ? r->phi_q : r->sigma2_q;
          for (int k = 0; k < 5; ++k) band.q[static_cast<std::size_t>(k)].push_back(q[static_cast<std::size_t>(k)]);
        }
        const char* pname = param == 0 ? "phi" : "sigma2";
        out.push_back({fmt::format("delta_sweep_{}_{}_{}pct.svg", pname,
                                   method_name(static_cast<Method>(key.second)),
                                   static_cast<int>(std::lround(key.first * 100))),
                       svg_band_plot(fmt::format("{} estimates against delta ({}% corruption)",
                                                 pname, std::lround(key.first * 100)),
                                     "delta", pname, band,
                                     param == 0 ? truth.phi : truth.sigma2)});
      }
    }
    return out;
  }

  for (int param = 0; param < 2; ++param) {
    std::vector<QuantileBar> bars;
    for (const auto& s : summary)
      bars.push_back({fmt::format("{} {}%", method_name(s.method), std::lround(s.fraction * 100)),
                      param == 0 ? s.phi_q : s.sigma2_q});
    const char* pname = param == 0 ? "phi" : "sigma2";
    out.push_back({fmt::format("quantiles_{}.svg", pname),
                   svg_quantile_bars(fmt::format("{} estimates by method and corruption", pname),
                                     pname, bars, param == 0 ? truth.phi : truth.sigma2)});
  }
  return out;
}

}  // namespace dupcox
