// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "dupcox/harness.hpp"
#include "dupcox/intensity.hpp"

namespace dupcox {

double quantile_sorted(const std::vector<double>& x, double p) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (!(p >= 0.0 && p <= 1.0)) throw config_error("quantile: p must lie in [0, 1]");
  const double h = static_cast<double>(x.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double t = h - static_cast<double>(lo);
  const double a = x[lo], b = x[hi];
  const double diff = b - a;
  // Same lerp as numpy's "linear" method, so summaries recompute exactly.
  return t >= 0.5 ? b - diff * (1.0 - t) : a + diff * t;
}

std::vector<SummaryRow> summarize(const std::vector<FitRow>& rows,
                                  CovarianceParams truth) {
  using Key = std::tuple<double, int, double>;
  std::vector<Key> keys;
  std::vector<std::vector<const FitRow*>> groups;
  for (const FitRow& r : rows) {
    const Key k{r.fraction, static_cast<int>(r.method), r.delta};
    auto it = std::find(keys.begin(), keys.end(), k);
    if (it == keys.end()) {
      keys.push_back(k);
      groups.emplace_back();
      it = keys.end() - 1;
    }
    groups[static_cast<std::size_t>(it - keys.begin())].push_back(&r);
  }

  constexpr std::array<double, 5> kProbs = {0.05, 0.25, 0.5, 0.75, 0.95};
  std::vector<SummaryRow> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    SummaryRow s;
    s.fraction = std::get<0>(keys[g]);
    s.method = static_cast<Method>(std::get<1>(keys[g]));
    s.delta = std::get<2>(keys[g]);
    s.fits = groups[g].size();
    std::vector<double> phi, s2;
    for (const FitRow* r : groups[g])
      if (r->converged) {
        phi.push_back(r->phi);
        s2.push_back(r->sigma2);
      }
    s.converged = phi.size();
    std::sort(phi.begin(), phi.end());
    std::sort(s2.begin(), s2.end());
    for (std::size_t q = 0; q < kProbs.size(); ++q) {
      s.phi_q[q] = quantile_sorted(phi, kProbs[q]);
      s.sigma2_q[q] = quantile_sorted(s2, kProbs[q]);
    }
    s.red_of_medians = phi.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : red(s.phi_q[2], s.sigma2_q[2], truth.phi, truth.sigma2);
    out.push_back(s);
  }
  return out;
}

void write_rows_header(std::ostream& out) {
  out << "scenario,rep,seed,fraction,method,n,delta,r_max,phi_hat,sigma2_hat,"
         "contrast,converged,status\n";
}

void write_rows(std::ostream& out, const std::vector<FitRow>& rows) {
  for (const FitRow& r : rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario, r.rep,
                       r.seed, r.fraction, method_name(r.method), r.n_points, r.delta,
                       r.r_max, r.phi, r.sigma2, r.contrast, r.converged ? 1 : 0,
                       r.status);
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "method,fraction,delta,fits,converged,"
         "phi_q05,phi_q25,phi_q50,phi_q75,phi_q95,"
         "sigma2_q05,sigma2_q25,sigma2_q50,sigma2_q75,sigma2_q95,red_medians\n";
  for (const SummaryRow& s : summary) {
    out << fmt::format("{},{},{},{},{}", method_name(s.method), s.fraction, s.delta,
                       s.fits, s.converged);
    for (double v : s.phi_q) out << fmt::format(",{}", v);
    for (double v : s.sigma2_q) out << fmt::format(",{}", v);
    out << fmt::format(",{}\n", s.red_of_medians);
  }
}

std::vector<SummaryRow> read_summary(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("method,fraction,delta,", 0) != 0)
    throw io_error("summary csv: missing header");
  std::vector<SummaryRow> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 16)
      throw io_error(fmt::format("summary csv line {}: expected 16 fields", lineno));
    try {
      SummaryRow s;
      s.method = parse_method(f[0]);
      s.fraction = std::stod(f[1]);
      s.delta = std::stod(f[2]);
      s.fits = std::stoul(f[3]);
      s.converged = std::stoul(f[4]);
      for (std::size_t k = 0; k < 5; ++k) {
        s.phi_q[k] = std::stod(f[5 + k]);
        s.sigma2_q[k] = std::stod(f[10 + k]);
      }
      s.red_of_medians = std::stod(f[15]);
      out.push_back(s);
    } catch (const std::logic_error&) {
      throw io_error(fmt::format("summary csv line {}: malformed number", lineno));
    }
  }
  return out;
}

}  // namespace dupcox
