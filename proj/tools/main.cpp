// Copyright 2026 The dupcox Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dupcox/error.hpp"
#include "dupcox/estimation.hpp"
#include "dupcox/harness.hpp"
#include "dupcox/intensity.hpp"
#include "dupcox/io.hpp"
#include "dupcox/kfunction.hpp"
#include "dupcox/plot.hpp"
#include "dupcox/simulate.hpp"

namespace fs = std::filesystem;
using namespace dupcox;

namespace {

constexpr const char* kDefaultWindow = "0,810,0,810";

struct Shared {
  std::uint64_t seed = 1;
  std::string window = kDefaultWindow;
  std::string out;
  std::vector<int> grid;
  double rmax = -1.0;
  double delta = -1.0;
  int reps = 0;
  std::string config;
  std::string preset;
  int workers = 0;
};

struct PartitionOpts {
  std::string kind = "grid";
  int cells = 324;
  std::string file;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw io_error(fmt::format("cannot open '{}' for writing", path));
  return f;
}

void finish(std::ofstream& f, const std::string& path) {
  f.close();
  if (f.fail()) throw io_error(fmt::format("write to '{}' failed", path));
}

/// Writes to --out, or stdout when it is empty or "-".
template <class F>
void emit(const std::string& out, F&& body) {
  if (out.empty() || out == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  auto f = open_out(out);
  body(f);
  finish(f, out);
}

std::array<int, 2> grid_or(const Shared& s, int nx, int ny) {
  if (s.grid.empty()) return {nx, ny};
  if (s.grid[0] < 1 || s.grid[1] < 1) throw config_error("--grid: NX and NY must be positive");
  return {s.grid[0], s.grid[1]};
}

Window window_for(const std::string& points_path, const Shared& s, bool window_given) {
  if (!window_given) {
    const std::string side = window_sidecar_path(points_path);
    if (fs::exists(side)) return read_window_file(side);
  }
  return parse_window_spec(s.window);
}

PointPattern load_points(const std::string& path, const Shared& s, bool window_given) {
  return read_points_csv(path, window_for(path, s, window_given));
}

void save_points(const std::string& path, const PointPattern& p,
                 const std::vector<std::string>& echo) {
  if (path.empty() || path == "-") {
    for (const auto& e : echo) std::cout << "# " << e << '\n';
    write_points_csv(std::cout, p);
    return;
  }
  auto f = open_out(path);
  for (const auto& e : echo) f << "# " << e << '\n';
  write_points_csv(f, p);
  finish(f, path);
  write_window_file(window_sidecar_path(path), p.window());
}

Partition partition_for(const Window& w, const Shared& s, const PartitionOpts& p) {
  ScenarioConfig c;
  c.window = w;
  c.seed = s.seed;
  if (p.kind == "grid") {
    c.corruption.partition = PartitionKind::grid;
    const auto g = grid_or(s, 18, 18);
    c.corruption.nx = g[0];
    c.corruption.ny = g[1];
  } else if (p.kind == "tessellation") {
    c.corruption.partition = PartitionKind::tessellation;
    c.corruption.cells = p.cells;
  } else if (p.kind == "file") {
    if (p.file.empty()) throw config_error("--partition file needs --partition-file");
    c.corruption.partition = PartitionKind::file;
    c.corruption.file = p.file;
  } else {
    throw config_error(fmt::format("--partition: unknown kind '{}'", p.kind));
  }
  if (c.corruption.partition != PartitionKind::file && !w.is_rectangle())
    return make_regular_grid(w, c.corruption.nx, c.corruption.ny);
  return build_partition(c);
}

std::string partition_echo(const Shared& s, const PartitionOpts& p) {
  if (p.kind == "grid") {
    const auto g = grid_or(s, 18, 18);
    return fmt::format("partition=grid {}x{}", g[0], g[1]);
  }
  if (p.kind == "tessellation") return fmt::format("partition=tessellation cells={}", p.cells);
  return fmt::format("partition=file {}", p.file);
}

void add_shared(CLI::App* app, Shared& s, bool with_study_flags = false) {
  app->add_option("--seed", s.seed, "Base seed")->capture_default_str();
  app->add_option("--window", s.window, "xmin,xmax,ymin,ymax")->capture_default_str();
  app->add_option("--out", s.out, "Output file or directory");
  app->add_option("--grid", s.grid, "Grid size NX NY")->expected(2);
  app->add_option("--rmax", s.rmax, "Upper contrast limit (<= 0: rule)");
  app->add_option("--delta", s.delta, "Lower contrast limit (< 0: rule)");
  app->add_option("--reps", s.reps, "Replications");
  app->add_option("--config", s.config, "YAML scenario config");
  if (with_study_flags) {
    app->add_option("--preset", s.preset, "Built-in scenario (H.1 .. IH2.3)");
    app->add_option("--workers", s.workers, "Worker threads");
  }
}

ScenarioConfig study_config(const Shared& s, CLI::App* app) {
  if (!s.config.empty() && !s.preset.empty())
    throw config_error("--config and --preset are mutually exclusive");
  ScenarioConfig c = !s.config.empty()   ? load_config(s.config)
                     : !s.preset.empty() ? preset(s.preset)
                                         : preset("H.2");
  if (app->count("--seed")) c.seed = s.seed;
  if (app->count("--window")) c.window = parse_window_spec(s.window);
  if (app->count("--grid")) {
    const auto g = grid_or(s, 0, 0);
    c.sim_nx = g[0];
    c.sim_ny = g[1];
  }
  if (app->count("--rmax")) c.r_max = s.rmax;
  if (app->count("--delta")) c.delta = s.delta;
  if (app->count("--reps")) c.replications = s.reps;
  if (app->count("--workers")) c.workers = s.workers;
  c.validate();
  return c;
}

void write_study(const fs::path& dir, const ScenarioConfig& c, const StudyResult& res,
                 bool plots) {
  {
    const auto p = (dir / "summary.csv").string();
    auto f = open_out(p);
    write_summary(f, res.summary);
    finish(f, p);
  }
  if (plots)
    for (const auto& doc : emit_plots(res.summary, c.cov)) {
      const auto p = (dir / doc.name).string();
      auto f = open_out(p);
      f << doc.svg;
      finish(f, p);
    }
}

/// Study runner shared by `study` and `delta-sweep`: rows stream to
/// rows.csv as replications complete.
template <class Run>
StudyResult run_to_dir(const fs::path& dir, const ScenarioConfig& c, Run&& run) {
  fs::create_directories(dir);
  {
    const auto p = (dir / "config.yaml").string();
    auto f = open_out(p);
    f << config_to_yaml(c);
    finish(f, p);
  }
  const auto rows_path = (dir / "rows.csv").string();
  auto rows = open_out(rows_path);
  write_rows_header(rows);
  StudyResult res = run([&](const std::vector<FitRow>& r) {
    write_rows(rows, r);
    rows.flush();
  });
  finish(rows, rows_path);
  return res;
}

std::vector<double> parse_list(const std::string& spec, const char* what) {
  // "a:b:step" or "a,b,c"
  std::vector<double> out;
  try {
    if (spec.find(':') != std::string::npos) {
      std::vector<double> p;
      std::istringstream ss(spec);
      for (std::string t; std::getline(ss, t, ':');) p.push_back(std::stod(t));
      if (p.size() != 3 || !(p[2] > 0.0) || p[1] < p[0])
        throw config_error(fmt::format("{}: expected start:stop:step", what));
      const int n = static_cast<int>(std::floor((p[1] - p[0]) / p[2] + 1e-9));
      for (int i = 0; i <= n; ++i) out.push_back(p[0] + i * p[2]);
    } else {
      std::istringstream ss(spec);
      for (std::string t; std::getline(ss, t, ',');) out.push_back(std::stod(t));
    }
  } catch (const std::logic_error&) {
    throw config_error(fmt::format("{}: cannot parse '{}'", what, spec));
  }
  if (out.empty()) throw config_error(fmt::format("{}: empty list", what));
  return out;
}

void print_fit(std::ostream& o, const FitResult& r) {
  o << "method,delta,r_max,phi_hat,sigma2_hat,contrast,iterations,converged_starts,converged\n";
  o << fmt::format("{},{},{},{},{},{},{},{},{}\n", method_name(r.method), r.delta, r.r_max,
                   r.phi, r.sigma2, r.contrast, r.iterations, r.converged_starts,
                   r.converged ? 1 : 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dupcox: duplicate-robust LGCP second-order estimation"};
  app.require_subcommand(1);

  // simulate
  Shared sim;
  double sim_phi = 20.0, sim_sigma2 = 2.0, sim_count = 1000.0;
  auto* c_sim = app.add_subcommand("simulate", "Simulate an LGCP pattern to CSV");
  add_shared(c_sim, sim);
  c_sim->add_option("--phi", sim_phi)->capture_default_str();
  c_sim->add_option("--sigma2", sim_sigma2)->capture_default_str();
  c_sim->add_option("--expected-count", sim_count)->capture_default_str();

  // corrupt
  Shared cor;
  PartitionOpts cor_part;
  std::string cor_in;
  double cor_fraction = 0.6;
  auto* c_cor = app.add_subcommand("corrupt", "Snap a fraction of points to cell centroids");
  add_shared(c_cor, cor);
  c_cor->add_option("--in", cor_in)->required();
  c_cor->add_option("--fraction", cor_fraction)->capture_default_str();
  c_cor->add_option("--partition", cor_part.kind, "grid | tessellation | file")->capture_default_str();
  c_cor->add_option("--cells", cor_part.cells, "Tessellation cell count")->capture_default_str();
  c_cor->add_option("--partition-file", cor_part.file);

  // dedup | jitter | redistribute
  Shared rem;
  PartitionOpts rem_part;
  std::string rem_in;
  double rem_tol = -1.0, rem_radius = 25.0;
  auto* c_dedup = app.add_subcommand("dedup", "Method I: drop duplicates beyond the first");
  auto* c_jit = app.add_subcommand("jitter", "Method II: jitter duplicated points");
  auto* c_red = app.add_subcommand("redistribute", "Method III: redraw duplicated points in their cell");
  for (auto* c : {c_dedup, c_jit, c_red}) {
    add_shared(c, rem);
    c->add_option("--in", rem_in)->required();
    c->add_option("--tol", rem_tol, "Duplicate tolerance (< 0: default)");
  }
  c_jit->add_option("--radius", rem_radius)->capture_default_str();
  c_red->add_option("--partition", rem_part.kind)->capture_default_str();
  c_red->add_option("--cells", rem_part.cells)->capture_default_str();
  c_red->add_option("--partition-file", rem_part.file);

  // intensity
  Shared inten;
  std::string inten_in, inten_mode = "fixed";
  double inten_h = 0.0, inten_pilot = 0.0;
  auto* c_int = app.add_subcommand("intensity", "Kernel intensity raster");
  add_shared(c_int, inten);
  c_int->add_option("--in", inten_in)->required();
  c_int->add_option("--mode", inten_mode, "fixed | adaptive")->capture_default_str();
  c_int->add_option("--bandwidth", inten_h, "Bandwidth (<= 0: CvL selection)");
  c_int->add_option("--pilot", inten_pilot, "Adaptive pilot bandwidth (<= 0: h0)");

  // kest
  Shared kest;
  std::string kest_in, kest_variant = "hom", kest_lambda;
  double kest_h = 0.0;
  int kest_nodes = 513;
  auto* c_kest = app.add_subcommand("kest", "Estimate the K function");
  add_shared(c_kest, kest);
  c_kest->add_option("--in", kest_in)->required();
  c_kest->add_option("--variant", kest_variant, "hom | inhom")->capture_default_str();
  c_kest->add_option("--intensity", kest_lambda, "Intensity raster CSV (inhom)");
  c_kest->add_option("--bandwidth", kest_h, "Fixed kernel bandwidth at points (inhom)");
  c_kest->add_option("--nodes", kest_nodes)->capture_default_str();

  // fit
  Shared fitf;
  std::string fit_in, fit_method;
  OptimizerSpec fit_opt;
  auto* c_fit = app.add_subcommand("fit", "Minimum contrast fit of a K estimate");
  add_shared(c_fit, fitf);
  c_fit->add_option("--in", fit_in, "K estimate CSV")->required();
  c_fit->add_option("--method", fit_method, "Label for the result (default MC or MMC)");
  c_fit->add_option("--max-iterations", fit_opt.max_iterations)->capture_default_str()->check(CLI::PositiveNumber);

  // study
  Shared study;
  bool red_search = false, no_plots = false;
  std::string red_candidates = "150:400:25";
  auto* c_study = app.add_subcommand("study", "Run a replicated scenario");
  add_shared(c_study, study, true);
  c_study->add_flag("--red-search", red_search, "IH1: choose the bandwidth by RED grid search");
  c_study->add_option("--red-candidates", red_candidates)->capture_default_str();
  c_study->add_flag("--no-plots", no_plots);

  // delta-sweep
  Shared sweep;
  std::string sweep_deltas = "0:70:5";
  auto* c_sweep = app.add_subcommand("delta-sweep", "MMC fits over a grid of delta");
  add_shared(c_sweep, sweep, true);
  c_sweep->add_option("--deltas", sweep_deltas, "start:stop:step or a,b,c")->capture_default_str();
  c_sweep->add_flag("--no-plots", no_plots);

  // delta-rule
  Shared rule;
  PartitionOpts rule_part;
  double rule_area = 0.0;
  auto* c_rule = app.add_subcommand("delta-rule", "Rule-of-thirds delta for a partition");
  add_shared(c_rule, rule);
  c_rule->add_option("--cell-area", rule_area, "Mean cell area");
  c_rule->add_option("--partition", rule_part.kind)->capture_default_str();
  c_rule->add_option("--cells", rule_part.cells)->capture_default_str();
  c_rule->add_option("--partition-file", rule_part.file);

  // plot
  Shared plot;
  std::string plot_summary;
  std::vector<std::string> plot_kest;
  double plot_phi = 20.0, plot_sigma2 = 2.0;
  bool plot_theory = false;
  auto* c_plot = app.add_subcommand("plot", "SVG plots from a summary or K estimates");
  add_shared(c_plot, plot);
  c_plot->add_option("--summary", plot_summary, "summary.csv from study or delta-sweep");
  c_plot->add_option("--kest", plot_kest, "K estimate CSVs to overlay");
  c_plot->add_option("--phi", plot_phi, "True phi")->capture_default_str();
  c_plot->add_option("--sigma2", plot_sigma2, "True sigma2")->capture_default_str();
  c_plot->add_flag("--theory", plot_theory, "Overlay the theoretical K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::config);
  }

  try {
    if (*c_sim) {
      const Window w = parse_window_spec(sim.window);
      const auto g = grid_or(sim, 256, 256);
      const CovarianceParams cov{sim_phi, sim_sigma2};
      cov.validate();
      const double m = constant_mean_for_count(sim_count, w);
      const PointPattern p = simulate_lgcp(ConstantMean{m}, cov, w, g[0], g[1], sim.seed);
      save_points(sim.out, p,
                  {"dupcox simulate",
                   fmt::format("seed={} window={} grid={}x{} phi={} sigma2={} expected_count={}",
                               sim.seed, w.describe(), g[0], g[1], sim_phi, sim_sigma2,
                               sim_count)});
    } else if (*c_cor) {
      const PointPattern p = load_points(cor_in, cor, c_cor->count("--window") > 0);
      const Partition part = partition_for(p.window(), cor, cor_part);
      const PointPattern out = corrupt(p, part, {cor_fraction, cor.seed});
      save_points(cor.out, out,
                  {"dupcox corrupt", fmt::format("seed={} fraction={} {}", cor.seed, cor_fraction,
                                                 partition_echo(cor, cor_part))});
    } else if (*c_dedup || *c_jit || *c_red) {
      CLI::App* sub = *c_dedup ? c_dedup : *c_jit ? c_jit : c_red;
      const PointPattern p = load_points(rem_in, rem, sub->count("--window") > 0);
      std::optional<PointPattern> out;
      std::string echo;
      if (*c_dedup) {
        out = dedup(p, rem_tol);
        echo = fmt::format("tol={}", rem_tol);
      } else if (*c_jit) {
        out = jitter(p, rem_radius, rem.seed, rem_tol);
        echo = fmt::format("seed={} radius={} tol={}", rem.seed, rem_radius, rem_tol);
      } else {
        out = redistribute(p, partition_for(p.window(), rem, rem_part), rem.seed, rem_tol);
        echo = fmt::format("seed={} tol={} {}", rem.seed, rem_tol, partition_echo(rem, rem_part));
      }
      save_points(rem.out, *out, {fmt::format("dupcox {}", sub->get_name()), echo});
    } else if (*c_int) {
      const PointPattern p = load_points(inten_in, inten, c_int->count("--window") > 0);
      const auto g = grid_or(inten, 256, 256);
      const IntensityGrid grid{g[0], g[1]};
      double h = inten_h;
      if (!(h > 0.0)) {
        const auto sel = select_bandwidth_cvl(p, default_bandwidth_candidates(p.window(), grid), grid);
        h = sel.h;
        std::cerr << fmt::format("CvL bandwidth: {}\n", h);
      }
      RasterField f = [&] {
        if (inten_mode == "fixed") return kernel_intensity_fixed(p, h, grid);
        if (inten_mode == "adaptive") return kernel_intensity_adaptive(p, h, inten_pilot, grid).density;
        throw config_error(fmt::format("--mode: unknown '{}'", inten_mode));
      }();
      for (double& v : f.values()) v *= static_cast<double>(p.size());
      emit(inten.out, [&](std::ostream& o) { write_raster_csv(o, f); });
    } else if (*c_kest) {
      const PointPattern p = load_points(kest_in, kest, c_kest->count("--window") > 0);
      const double rmax = kest.rmax > 0.0 ? kest.rmax : rmax_rule(p.window());
      const auto r = default_r_grid(rmax, static_cast<std::size_t>(kest_nodes));
      KEstimate k;
      if (kest_variant == "hom") {
        k = k_hom(p, r);
      } else if (kest_variant == "inhom") {
        if (!kest_lambda.empty()) {
          k = k_inhom(p, read_raster_csv(kest_lambda), r, kest_lambda);
        } else if (kest_h > 0.0) {
          const auto g = grid_or(kest, 256, 256);
          const auto lam = kernel_intensity_at_points(p, kest_h, {g[0], g[1]});
          k = k_inhom(p, lam, r, fmt::format("fixed kernel h={}", kest_h));
        } else {
          throw config_error("kest --variant inhom needs --intensity or --bandwidth");
        }
      } else {
        throw config_error(fmt::format("--variant: unknown '{}'", kest_variant));
      }
      for (const auto& w : k.warnings) std::cerr << "warning: " << w << '\n';
      emit(kest.out, [&](std::ostream& o) { write_kest_csv(o, k); });
    } else if (*c_fit) {
      const KEstimate k = read_kest_csv(fit_in);
      ContrastConfig cc;
      cc.delta = fitf.delta > 0.0 ? fitf.delta : 0.0;
      cc.r_max = fitf.rmax > 0.0 ? fitf.rmax : k.r_max();
      const Method label = !fit_method.empty() ? parse_method(fit_method)
                           : cc.delta > 0.0    ? Method::mmc
                                               : Method::mc;
      try {
        const FitResult r = fit(k, cc, label, {}, fit_opt);
        emit(fitf.out, [&](std::ostream& o) { print_fit(o, r); });
      } catch (const NonConvergence& e) {
        emit(fitf.out, [&](std::ostream& o) { print_fit(o, e.best()); });
        throw;
      }
    } else if (*c_study) {
      ScenarioConfig c = study_config(study, c_study);
      if (red_search) {
        if (c.scenario_class != ScenarioClass::ih1)
          throw config_error("--red-search applies to IH1 scenarios only");
        const auto res = red_bandwidth_search(c, parse_list(red_candidates, "--red-candidates"));
        for (std::size_t i = 0; i < res.candidates.size(); ++i)
          std::cerr << fmt::format("h={} red={}\n", res.candidates[i], res.red[i]);
        c.bandwidth = res.h;
        std::cerr << fmt::format("selected bandwidth: {}\n", res.h);
      }
      const fs::path dir = study.out.empty() ? fs::path("study_out") : fs::path(study.out);
      const auto res = run_to_dir(dir, c, [&](const RowSink& sink) { return run_scenario(c, sink); });
      write_study(dir, c, res, !no_plots);
      write_summary(std::cout, res.summary);
    } else if (*c_sweep) {
      const ScenarioConfig c = study_config(sweep, c_sweep);
      const auto deltas = parse_list(sweep_deltas, "--deltas");
      const fs::path dir = sweep.out.empty() ? fs::path("sweep_out") : fs::path(sweep.out);
      const auto res =
          run_to_dir(dir, c, [&](const RowSink& sink) { return delta_sweep(c, deltas, sink); });
      write_study(dir, c, res, !no_plots);
      write_summary(std::cout, res.summary);
    } else if (*c_rule) {
      double area = rule_area;
      if (!(area > 0.0)) {
        const Window w = parse_window_spec(rule.window);
        area = partition_for(w, rule, rule_part).mean_cell_area();
      }
      std::cout << fmt::format("mean_cell_area,delta\n{},{}\n", area, delta_rule(area));
    } else if (*c_plot) {
      if (plot_summary.empty() && plot_kest.empty())
        throw config_error("plot needs --summary or --kest");
      const fs::path dir = plot.out.empty() ? fs::path(".") : fs::path(plot.out);
      fs::create_directories(dir);
      std::vector<PlotFile> docs;
      if (!plot_summary.empty()) {
        std::ifstream f(plot_summary);
        if (!f) throw io_error(fmt::format("cannot open '{}'", plot_summary));
        docs = emit_plots(read_summary(f), {plot_phi, plot_sigma2});
      }
      if (!plot_kest.empty()) {
        std::vector<Series> series;
        for (const auto& path : plot_kest) {
          const KEstimate k = read_kest_csv(path);
          series.push_back({fs::path(path).stem().string(), k.r, k.khat});
        }
        if (plot_theory) {
          const auto& r = series.front().x;
          series.push_back({"theoretical", r, theoretical_k_grid(r, {plot_phi, plot_sigma2})});
        }
        docs.push_back({"k_overlay.svg", svg_line_plot("K function", "r", "K(r)", series)});
      }
      for (const auto& d : docs) {
        const auto p = (dir / d.name).string();
        auto f = open_out(p);
        f << d.svg;
        finish(f, p);
        std::cout << p << '\n';
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(ErrorKind::io);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
