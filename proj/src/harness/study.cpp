// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "dupcox/harness.hpp"
#include "dupcox/intensity.hpp"
#include "dupcox/random.hpp"

namespace dupcox {
namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kTagCorrupt = 3;
constexpr std::uint64_t kTagJitter = 4;
constexpr std::uint64_t kTagRedistribute = 5;
constexpr std::uint64_t kTagTessellation = 97;
constexpr std::uint64_t kTagAnchors = 98;

RasterField build_mean(const ScenarioConfig& c) {
  const MeanConfig& m = c.mean;
  switch (m.kind) {
    case MeanKind::constant: {
      const double v = m.expected_count > 0.0
                           ? constant_mean_for_count(m.expected_count, c.window)
                           : m.value;
      return evaluate_mean(ConstantMean{v}, c.window, c.sim_nx, c.sim_ny);
    }
    case MeanKind::linear:
      return evaluate_mean(LinearMean{m.intercept, m.coef_x, m.coef_y}, c.window,
                           c.sim_nx, c.sim_ny);
    case MeanKind::synthetic_covariates: {
      Rng rng(derive_seed(c.seed, {kTagAnchors}));
      const Box& b = c.window.bounds();
      std::vector<Point> anchors;
      for (int k = 0; k < m.anchors; ++k)
        anchors.push_back({rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)});
      CovariateMean cm;
      cm.coefficients = {m.coefficients[0], m.coefficients[1]};
      cm.covariates.push_back(
          log_distance_to_points(c.window, c.sim_nx, c.sim_ny, anchors, m.min_distance));
      cm.covariates.push_back(log_distance_to_polyline(c.window, c.sim_nx, c.sim_ny,
                                                       m.polyline, m.min_distance));
      // Intercept chosen so that the integral of exp(m) is the expected count.
      const RasterField slope = evaluate_mean(cm, c.window, c.sim_nx, c.sim_ny);
      double mass = 0.0;
      for (double v : slope.values()) mass += std::exp(v);
      mass *= slope.cell_area();
      cm.intercept = std::log(m.expected_count / mass);
      return evaluate_mean(cm, c.window, c.sim_nx, c.sim_ny);
    }
  }
  throw config_error("unknown mean model");
}

template <class F>
void parallel_for(int n, int workers, F&& body) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

// Delivers per-replication rows to the sink in replication order.
class OrderedSink {
 public:
  OrderedSink(int n, const RowSink& sink) : done_(static_cast<std::size_t>(n)), sink_(sink) {}

  void complete(int rep, std::vector<FitRow> rows) {
    std::lock_guard<std::mutex> lock(mu_);
    done_[static_cast<std::size_t>(rep)] = std::move(rows);
    while (next_ < done_.size() && done_[next_]) {
      if (sink_) sink_(*done_[next_]);
      ++next_;
    }
  }

  std::vector<FitRow> collect() {
    std::vector<FitRow> all;
    for (auto& d : done_)
      if (d) all.insert(all.end(), d->begin(), d->end());
    return all;
  }

 private:
  std::mutex mu_;
  std::vector<std::optional<std::vector<FitRow>>> done_;
  std::size_t next_ = 0;
  const RowSink& sink_;
};

std::string clean_message(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

FitRow base_row(const StudyContext& ctx, int rep, double fraction, Method m,
                double delta) {
  FitRow row;
  row.scenario = ctx.config().label;
  row.rep = rep;
  row.fraction = fraction;
  row.method = m;
  row.seed = ctx.replication_seed(rep);
  row.delta = delta;
  row.r_max = ctx.r_max();
  row.phi = row.sigma2 = row.contrast = std::numeric_limits<double>::quiet_NaN();
  return row;
}

void run_fit(FitRow& row, const KEstimate& k, const ScenarioConfig& c,
             double delta, double r_max) {
  try {
    const FitResult f = fit(k, {delta, r_max}, row.method, c.bounds, c.optimizer);
    row.phi = f.phi;
    row.sigma2 = f.sigma2;
    row.contrast = f.contrast;
    row.delta = f.delta;
    row.r_max = f.r_max;
    row.converged = true;
    row.status = "ok";
  } catch (const NonConvergence& e) {
    row.phi = e.best().phi;
    row.sigma2 = e.best().sigma2;
    row.contrast = e.best().contrast;
    row.delta = e.best().delta;
    row.r_max = e.best().r_max;
    row.converged = false;
    row.status = "nonconverged";
  }
}

}  // namespace

Partition build_partition(const ScenarioConfig& c) {
  switch (c.corruption.partition) {
    case PartitionKind::grid:
      return make_regular_grid(c.window, c.corruption.nx, c.corruption.ny);
    case PartitionKind::tessellation: {
      Rng rng(derive_seed(c.seed, {kTagTessellation}));
      const Box& b = c.window.bounds();
      std::vector<Point> seeds;
      seeds.reserve(static_cast<std::size_t>(c.corruption.cells));
      while (seeds.size() < static_cast<std::size_t>(c.corruption.cells)) {
        const Point p{rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
        if (c.window.contains(p)) seeds.push_back(p);
      }
      return make_dirichlet_tessellation(c.window, seeds);
    }
    case PartitionKind::file:
      return load_partition_file(c.corruption.file, c.window);
  }
  throw config_error("unknown partition kind");
}

struct StudyContext::Impl {
  ScenarioConfig config;
  Partition partition;
  RasterField mean;
  GrfSampler sampler;
  double delta = 0.0, r_max = 0.0;
  std::vector<double> r;

  explicit Impl(const ScenarioConfig& c)
      : config(c),
        partition(build_partition(c)),
        mean(build_mean(c)),
        sampler(c.window, c.sim_nx, c.sim_ny, c.cov) {
    delta = c.delta >= 0.0 ? c.delta : delta_rule(partition.mean_cell_area());
    r_max = c.r_max > 0.0 ? c.r_max : rmax_rule(c.window);
    if (!(delta < r_max))
      throw config_error(fmt::format("config: delta ({}) must be below r_max ({})", delta, r_max));
    r = default_r_grid(r_max, static_cast<std::size_t>(c.r_nodes));
  }
};

StudyContext::StudyContext(const ScenarioConfig& config) {
  config.validate();
  impl_ = std::make_unique<Impl>(config);
}
StudyContext::~StudyContext() = default;
StudyContext::StudyContext(StudyContext&&) noexcept = default;

const ScenarioConfig& StudyContext::config() const { return impl_->config; }
const Partition& StudyContext::partition() const { return impl_->partition; }
const RasterField& StudyContext::mean_surface() const { return impl_->mean; }
double StudyContext::delta() const { return impl_->delta; }
double StudyContext::r_max() const { return impl_->r_max; }
const std::vector<double>& StudyContext::r_grid() const { return impl_->r; }

std::uint64_t StudyContext::replication_seed(int rep) const {
  return impl_->config.seed + static_cast<std::uint64_t>(rep);
}

PointPattern StudyContext::simulate(int rep) const {
  return simulate_lgcp(impl_->sampler, impl_->mean, replication_seed(rep)).pattern;
}

PointPattern StudyContext::corrupt(const PointPattern& pattern, int rep,
                                   double fraction) const {
  return dupcox::corrupt(pattern, impl_->partition,
                         {fraction, derive_seed(replication_seed(rep), {kTagCorrupt})});
}

PointPattern StudyContext::preprocess(const PointPattern& corrupted, Method m,
                                      int rep, std::size_t fraction_index) const {
  const std::uint64_t rs = replication_seed(rep);
  switch (m) {
    case Method::mc:
    case Method::mmc:
      return corrupted;
    case Method::mc_i:
      return dedup(corrupted);
    case Method::mc_ii:
      return jitter(corrupted, impl_->config.jitter_radius,
                    derive_seed(rs, {kTagJitter, fraction_index}));
    case Method::mc_iii:
      return redistribute(corrupted, impl_->partition,
                          derive_seed(rs, {kTagRedistribute, fraction_index}));
  }
  throw config_error("unknown method");
}

KEstimate StudyContext::estimate_k(const PointPattern& pattern) const {
  const ScenarioConfig& c = impl_->config;
  const IntensityGrid grid{c.intensity_nx, c.intensity_ny};
  const double n = static_cast<double>(pattern.size());
  switch (c.scenario_class) {
    case ScenarioClass::homogeneous:
      return k_hom(pattern, impl_->r);
    case ScenarioClass::ih1: {
      RasterField lam = kernel_intensity_fixed(pattern, c.bandwidth, grid);
      for (double& v : lam.values()) v *= n;
      return k_inhom(pattern, lam, impl_->r,
                     fmt::format("fixed Gaussian kernel h={}", c.bandwidth));
    }
    case ScenarioClass::ih2: {
      const std::vector<double> cand = c.bandwidth_candidates.empty()
                                           ? default_bandwidth_candidates(pattern.window(), grid)
                                           : c.bandwidth_candidates;
      const BandwidthSelection sel = select_bandwidth_cvl(pattern, cand, grid);
      AdaptiveIntensity a = kernel_intensity_adaptive(pattern, sel.h, c.pilot_bandwidth, grid);
      for (double& v : a.density.values()) v *= n;
      return k_inhom(pattern, a.density, impl_->r,
                     fmt::format("adaptive Gaussian kernel h0={} (CvL)", sel.h));
    }
  }
  throw config_error("unknown scenario class");
}

StudyResult run_scenario(const ScenarioConfig& config, const RowSink& sink) {
  const StudyContext ctx(config);
  const auto& fractions = config.corruption.fractions;
  OrderedSink out(config.replications, sink);

  parallel_for(config.replications, config.workers, [&](int rep) {
    std::vector<FitRow> rows;
    std::optional<PointPattern> truth;
    std::string sim_error;
    try {
      truth = ctx.simulate(rep);
    } catch (const std::exception& e) {
      sim_error = clean_message(e.what());
    }
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      std::optional<PointPattern> corrupted;
      std::optional<KEstimate> k_corrupted;
      for (Method m : config.methods) {
        FitRow row = base_row(ctx, rep, fractions[fi], m, m == Method::mmc ? ctx.delta() : 0.0);
        try {
          if (!truth) throw numerical_error(sim_error);
          if (!corrupted) corrupted = ctx.corrupt(*truth, rep, fractions[fi]);
          const bool shared = m == Method::mc || m == Method::mmc;
          std::optional<KEstimate> own;
          if (shared && !k_corrupted) k_corrupted = ctx.estimate_k(*corrupted);
          PointPattern p = shared ? *corrupted : ctx.preprocess(*corrupted, m, rep, fi);
          row.n_points = p.size();
          if (!shared) own = ctx.estimate_k(p);
          run_fit(row, shared ? *k_corrupted : *own, config, row.delta, ctx.r_max());
        } catch (const std::exception& e) {
          row.converged = false;
          row.status = "error: " + clean_message(e.what());
        }
        rows.push_back(std::move(row));
      }
    }
    out.complete(rep, std::move(rows));
  });

  StudyResult res;
  res.rows = out.collect();
  res.summary = summarize(res.rows, config.cov);
  return res;
}

StudyResult delta_sweep(const ScenarioConfig& config, const std::vector<double>& deltas,
                        const RowSink& sink) {
  const StudyContext ctx(config);
  if (deltas.empty()) throw config_error("delta_sweep: empty delta grid");
  for (double d : deltas)
    if (!(d >= 0.0 && d < ctx.r_max()))
      throw config_error(fmt::format("delta_sweep: delta {} outside [0, r_max = {})", d, ctx.r_max()));
  const auto& fractions = config.corruption.fractions;
  OrderedSink out(config.replications, sink);

  parallel_for(config.replications, config.workers, [&](int rep) {
    std::vector<FitRow> rows;
    std::optional<PointPattern> truth;
    std::string sim_error;
    try {
      truth = ctx.simulate(rep);
    } catch (const std::exception& e) {
      sim_error = clean_message(e.what());
    }
    for (double fraction : fractions) {
      std::optional<KEstimate> k;
      std::string k_error;
      std::size_t n = 0;
      try {
        if (!truth) throw numerical_error(sim_error);
        const PointPattern p = ctx.corrupt(*truth, rep, fraction);
        n = p.size();
        k = ctx.estimate_k(p);
      } catch (const std::exception& e) {
        k_error = clean_message(e.what());
      }
      for (double d : deltas) {
        FitRow row = base_row(ctx, rep, fraction, Method::mmc, d);
        row.n_points = n;
        try {
          if (!k) throw numerical_error(k_error);
          run_fit(row, *k, config, d, ctx.r_max());
        } catch (const std::exception& e) {
          row.converged = false;
          row.status = "error: " + clean_message(e.what());
        }
        rows.push_back(std::move(row));
      }
    }
    out.complete(rep, std::move(rows));
  });

  StudyResult res;
  res.rows = out.collect();
  res.summary = summarize(res.rows, config.cov);
  return res;
}

RedSearchResult red_bandwidth_search(const ScenarioConfig& config,
                                     const std::vector<double>& candidates) {
  if (candidates.empty()) throw config_error("red search: no candidates");
  ScenarioConfig base = config;
  base.scenario_class = ScenarioClass::ih1;
  RedSearchResult res;
  res.candidates = candidates;
  res.red.assign(candidates.size(), std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    base.bandwidth = candidates[k];
    const StudyContext ctx(base);
    std::vector<double> phi(static_cast<std::size_t>(base.replications),
                            std::numeric_limits<double>::quiet_NaN());
    std::vector<double> s2 = phi;
    parallel_for(base.replications, base.workers, [&](int rep) {
      try {
        const FitResult f = fit(ctx.estimate_k(ctx.simulate(rep)), {0.0, ctx.r_max()},
                                Method::mc, base.bounds, base.optimizer);
        phi[static_cast<std::size_t>(rep)] = f.phi;
        s2[static_cast<std::size_t>(rep)] = f.sigma2;
      } catch (const std::exception&) {
      }
    });
    std::vector<double> p, s;
    for (std::size_t i = 0; i < phi.size(); ++i)
      if (std::isfinite(phi[i])) {
        p.push_back(phi[i]);
        s.push_back(s2[i]);
      }
    if (p.empty()) continue;
    std::sort(p.begin(), p.end());
    std::sort(s.begin(), s.end());
    res.red[k] = red(quantile_sorted(p, 0.5), quantile_sorted(s, 0.5), base.cov.phi,
                     base.cov.sigma2);
    if (res.red[k] < best) {
      best = res.red[k];
      res.h = candidates[k];
    }
  }
  if (!(res.h > 0.0)) throw numerical_error("red search: no candidate produced a fit");
  return res;
}

}  // namespace dupcox
