// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dupcox/estimation.hpp"
#include "dupcox/geometry.hpp"
#include "dupcox/simulate.hpp"

namespace dupcox {

/// How first-order intensity is estimated before computing K.
///   homogeneous: constant (N - 1) / |W| and the homogeneous K
///   ih1:         fixed-bandwidth kernel, bandwidth from the config
///   ih2:         adaptive kernel with h0 selected by CvL per pattern
enum class ScenarioClass { homogeneous, ih1, ih2 };

enum class MeanKind { constant, linear, synthetic_covariates };

struct MeanConfig {
  MeanKind kind = MeanKind::constant;
  double expected_count = 1000.0;  // constant and synthetic: sets the intercept
  double value = 0.0;              // constant: used when expected_count <= 0
  double intercept = 0.0, coef_x = 0.0, coef_y = 0.0;  // linear
  // synthetic: log distance to `anchors` random points and to a polyline
  int anchors = 10;
  std::vector<Point> polyline;
  std::array<double, 2> coefficients = {-0.392, -1.075};
  double min_distance = 1.0;
};

enum class PartitionKind { grid, tessellation, file };

struct CorruptionConfig {
  PartitionKind partition = PartitionKind::grid;
  int nx = 18, ny = 18;  // grid
  int cells = 324;       // tessellation
  std::string file;      // polygon partition JSON
  std::vector<double> fractions = {0.0, 0.2, 0.4, 0.6};
};

struct ScenarioConfig {
  std::string label = "custom";
  ScenarioClass scenario_class = ScenarioClass::homogeneous;
  Window window = Window::rectangle(0.0, 810.0, 0.0, 810.0);
  int sim_nx = 256, sim_ny = 256;
  MeanConfig mean;
  CovarianceParams cov{20.0, 2.0};
  int replications = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  CorruptionConfig corruption;
  std::vector<Method> methods = {Method::mc, Method::mc_i, Method::mc_ii,
                                 Method::mc_iii, Method::mmc};
  double jitter_radius = 25.0;
  double delta = -1.0;  // < 0: rule of thirds on the mean cell area
  double r_max = -1.0;  // <= 0: min side / 4
  int r_nodes = 513;
  int intensity_nx = 128, intensity_ny = 128;
  double bandwidth = 285.0;      // ih1
  double pilot_bandwidth = 0.0;  // ih2; <= 0 means h0
  std::vector<double> bandwidth_candidates;  // ih2; empty means default grid
  Bounds bounds;
  OptimizerSpec optimizer;

  /// Throws a config error describing the first invalid field.
  void validate() const;
};

/// Labels accepted by preset(): H.1-H.3, IH1.1-IH1.3, IH2.1-IH2.3.
std::vector<std::string> preset_labels();
ScenarioConfig preset(const std::string& label);

/// YAML round trip. Unknown keys are rejected.
ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_yaml(const ScenarioConfig& config);

/// The corruption partition of a config. Tessellation seeds derive from
/// config.seed, so the partition is fixed for the whole study.
Partition build_partition(const ScenarioConfig& config);

/// Everything fixed per study: the sampler, mean surface and partition.
class StudyContext {
 public:
  explicit StudyContext(const ScenarioConfig& config);
  ~StudyContext();
  StudyContext(StudyContext&&) noexcept;
  StudyContext& operator=(StudyContext&&) = delete;

  const ScenarioConfig& config() const;
  const Partition& partition() const;
  const RasterField& mean_surface() const;
  double delta() const;  // resolved
  double r_max() const;  // resolved
  const std::vector<double>& r_grid() const;

  std::uint64_t replication_seed(int rep) const;
  /// The uncorrupted LGCP pattern of replication `rep`.
  PointPattern simulate(int rep) const;
  /// Corrupted pattern; fractions are nested within a replication.
  PointPattern corrupt(const PointPattern& pattern, int rep, double fraction) const;
  /// Method preprocessing (identity for MC and MMC).
  PointPattern preprocess(const PointPattern& corrupted, Method m, int rep,
                          std::size_t fraction_index) const;
  /// K estimate of a pattern under the scenario's intensity treatment.
  KEstimate estimate_k(const PointPattern& pattern) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct FitRow {
  std::string scenario;
  int rep = 0;
  double fraction = 0.0;
  Method method = Method::mc;
  std::uint64_t seed = 0;
  std::size_t n_points = 0;
  double delta = 0.0;
  double r_max = 0.0;
  double phi = 0.0;
  double sigma2 = 0.0;
  double contrast = 0.0;
  bool converged = false;
  std::string status = "ok";  // ok | nonconverged | error: <message>
};

struct SummaryRow {
  Method method = Method::mc;
  double fraction = 0.0;
  double delta = 0.0;
  std::size_t fits = 0;
  std::size_t converged = 0;
  std::array<double, 5> phi_q{};     // 5, 25, 50, 75, 95 %
  std::array<double, 5> sigma2_q{};
  double red_of_medians = 0.0;
};

struct StudyResult {
  std::vector<FitRow> rows;
  std::vector<SummaryRow> summary;
};

using RowSink = std::function<void(const std::vector<FitRow>&)>;

/// Runs every replication on a pool of config.workers threads. Rows come out
/// sorted by (replication, fraction, method); `sink`, when given, receives
/// each replication's rows in replication order as soon as they are final.
StudyResult run_scenario(const ScenarioConfig& config, const RowSink& sink = {});

/// MMC fits on the corrupted patterns at each delta, for every corruption
/// fraction of the config. Rows carry the delta they were fitted with.
StudyResult delta_sweep(const ScenarioConfig& config,
                        const std::vector<double>& deltas,
                        const RowSink& sink = {});

/// Simulation-only IH1 bandwidth search: the candidate whose uncorrupted MC
/// fits have the smallest RED of medians.
struct RedSearchResult {
  double h = 0.0;
  std::vector<double> candidates;
  std::vector<double> red;
};
RedSearchResult red_bandwidth_search(const ScenarioConfig& config,
                                     const std::vector<double>& candidates);

/// Type-7 (linear interpolation) sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Quantiles over converged rows, grouped by (fraction, method, delta) in
/// order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<FitRow>& rows,
                                  CovarianceParams truth);

void write_rows_header(std::ostream& out);
void write_rows(std::ostream& out, const std::vector<FitRow>& rows);
void write_summary(std::ostream& out, const std::vector<SummaryRow>& summary);
std::vector<SummaryRow> read_summary(std::istream& in);

}  // namespace dupcox
