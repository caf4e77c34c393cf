#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dupcox/error.hpp"
#include "dupcox/harness.hpp"
#include "dupcox/intensity.hpp"
#include "dupcox/io.hpp"
#include "dupcox/plot.hpp"
#include "support.hpp"

using namespace dupcox;
using dupcox::test::uniform_pattern;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

ScenarioConfig small(const std::string& label, int reps) {
  ScenarioConfig c = preset(label);
  c.replications = reps;
  c.corruption.fractions = {0.0, 0.6};
  return c;
}

std::string rows_csv(const StudyResult& r) {
  std::ostringstream o;
  write_rows_header(o);
  write_rows(o, r.rows);
  return o.str();
}

}  // namespace

TEST_CASE("presets") {
  const auto labels = preset_labels();
  CHECK(labels.size() == 9);
  for (const auto& l : labels) {
    const ScenarioConfig c = preset(l);
    CHECK(c.label == l);
    CHECK_NOTHROW(c.validate());
  }
  CHECK(preset("H.1").cov.phi == 15);
  CHECK(preset("H.2").cov.phi == 20);
  CHECK(preset("H.3").cov.phi == 30);
  CHECK(preset("IH1.1").bandwidth == 270);
  CHECK(preset("IH1.2").bandwidth == 285);
  CHECK(preset("IH1.3").bandwidth == 325);
  CHECK(preset("IH2.2").scenario_class == ScenarioClass::ih2);
  CHECK(preset("H.2").corruption.nx == 18);
  CHECK_THROWS_AS(preset("H.4"), Error);
}

TEST_CASE("shipped preset files equal the built-in presets") {
  for (const auto& l : preset_labels()) {
    CAPTURE(l);
    const std::string path = std::string(DUPCOX_PRESET_DIR) + "/" + l + ".yaml";
    CHECK(config_to_yaml(load_config(path)) == config_to_yaml(preset(l)));
  }
}

TEST_CASE("config round trip and validation") {
  ScenarioConfig c = preset("IH1.2");
  c.label = "custom";
  c.replications = 7;
  c.seed = 12345678901ULL;
  c.corruption.fractions = {0.0, 0.35};
  c.methods = {Method::mc, Method::mmc};
  c.delta = 12.5;
  c.r_max = 150;
  c.bandwidth_candidates = {80, 120.5};
  c.bounds.phi_hi = 40;
  const ScenarioConfig back = parse_config(config_to_yaml(c));
  CHECK(config_to_yaml(back) == config_to_yaml(c));
  CHECK(back.seed == 12345678901ULL);
  CHECK(back.delta == 12.5);
  CHECK(back.methods.size() == 2);

  const ScenarioConfig over = parse_config("preset: H.3\nreplications: 5\nseed: 9\n");
  CHECK(over.cov.phi == 30);
  CHECK(over.replications == 5);
  CHECK(over.seed == 9);

  CHECK_THROWS_AS(parse_config("replicationz: 3\n"), Error);
  CHECK_THROWS_AS(parse_config("replications: 0\n"), Error);
  CHECK_THROWS_AS(parse_config("corruption:\n  fractions: [0, 1.5]\n"), Error);
  CHECK_THROWS_AS(parse_config("methods: [MC, MC-X]\n"), Error);
  CHECK_THROWS_AS(parse_config("window: [0, 1, 0]\n"), Error);
  CHECK_THROWS_AS(parse_config(": : :\n"), Error);
  try {
    parse_config("replications: -1\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("type 7 quantiles") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(quantile_sorted(x, 0.0) == 1.0);
  CHECK(quantile_sorted(x, 0.25) == 1.75);
  CHECK(quantile_sorted(x, 0.5) == 2.5);
  CHECK(quantile_sorted(x, 1.0) == 4.0);
  CHECK(quantile_sorted({7.0}, 0.95) == 7.0);
  CHECK(std::isnan(quantile_sorted({}, 0.5)));
  const std::vector<double> y{0.1, 0.7, 1.3, 2.9, 3.0, 10.0};
  CHECK(quantile_sorted(y, 0.05) == doctest::Approx(0.25));
  CHECK(quantile_sorted(y, 0.95) == doctest::Approx(8.25));
  CHECK_THROWS_AS(quantile_sorted(x, 1.5), Error);
}

TEST_CASE("summary uses converged rows and keeps quantiles ordered") {
  std::vector<FitRow> rows;
  Rng rng(1);
  for (int rep = 0; rep < 40; ++rep)
    for (Method m : {Method::mc, Method::mmc}) {
      FitRow r;
      r.rep = rep;
      r.method = m;
      r.fraction = 0.6;
      r.phi = rng.uniform(10, 30);
      r.sigma2 = rng.uniform(1, 3);
      r.converged = rep % 10 != 0;
      if (!r.converged) r.phi = 1e6;
      rows.push_back(r);
    }
  const auto s = summarize(rows, {20, 2});
  REQUIRE(s.size() == 2);
  CHECK(s[0].method == Method::mc);
  CHECK(s[0].fits == 40);
  CHECK(s[0].converged == 36);
  CHECK(s[0].phi_q[4] < 1e6);
  for (const auto& row : s)
    for (int k = 0; k < 4; ++k) {
      CHECK(row.phi_q[k] <= row.phi_q[k + 1]);
      CHECK(row.sigma2_q[k] <= row.sigma2_q[k + 1]);
    }
  CHECK(s[1].red_of_medians == doctest::Approx(red(s[1].phi_q[2], s[1].sigma2_q[2], 20, 2)));

  std::stringstream ss;
  write_summary(ss, s);
  const auto back = read_summary(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].phi_q == s[1].phi_q);
  CHECK(back[1].sigma2_q == s[1].sigma2_q);
  CHECK(back[1].converged == s[1].converged);
}

TEST_CASE("study row contract, ordering and worker independence") {
  ScenarioConfig c = small("H.2", 3);
  std::vector<int> seen;
  const StudyResult one = run_scenario(c, [&](const std::vector<FitRow>& rows) {
    REQUIRE_FALSE(rows.empty());
    seen.push_back(rows.front().rep);
  });
  CHECK(one.rows.size() == 3 * 2 * 5);
  CHECK(seen == std::vector<int>{0, 1, 2});
  for (std::size_t i = 1; i < one.rows.size(); ++i) {
    const auto& a = one.rows[i - 1];
    const auto& b = one.rows[i];
    CHECK(std::tie(a.rep, a.fraction) <= std::tie(b.rep, b.fraction));
  }
  CHECK(one.summary.size() == 2 * 5);

  c.workers = 4;
  const StudyResult four = run_scenario(c);
  CHECK(rows_csv(one) == rows_csv(four));
  CHECK(rows_csv(one) == rows_csv(run_scenario(c)));
}

TEST_CASE("failures are flagged rather than dropped") {
  ScenarioConfig c = small("H.2", 2);
  c.optimizer.max_iterations = 2;
  const StudyResult r = run_scenario(c);
  CHECK(r.rows.size() == 2 * 2 * 5);
  for (const auto& row : r.rows) {
    CHECK_FALSE(row.converged);
    CHECK(row.status == "nonconverged");
  }
  for (const auto& s : r.summary) {
    CHECK(s.converged == 0);
    CHECK(std::isnan(s.phi_q[2]));
  }
}

TEST_CASE("IH1 and IH2 studies run") {
  for (const char* label : {"IH1.2", "IH2.2"}) {
    ScenarioConfig c = small(label, 1);
    c.methods = {Method::mc, Method::mc_iii, Method::mmc};
    const StudyResult r = run_scenario(c);
    CHECK(r.rows.size() == 6);
    for (const auto& row : r.rows) CHECK(row.status.rfind("error", 0) != 0);
  }
}

TEST_CASE("delta sweep rows") {
  ScenarioConfig c = small("H.3", 2);
  const std::vector<double> deltas{0, 10, 20};
  const StudyResult r = delta_sweep(c, deltas);
  CHECK(r.rows.size() == 2 * 2 * 3);
  CHECK(r.summary.size() == 2 * 3);
  for (const auto& row : r.rows) CHECK(row.method == Method::mmc);
  CHECK_THROWS_AS(delta_sweep(c, {0, 500}), Error);
}

TEST_CASE("study context streams") {
  const StudyContext ctx(preset("H.2"));
  CHECK(ctx.delta() == doctest::Approx(16.9257).epsilon(1e-4));
  CHECK(ctx.r_max() == 202.5);
  CHECK(ctx.r_grid().size() == 513);
  const auto a = ctx.simulate(4), b = ctx.simulate(4);
  CHECK(a.points() == b.points());
  CHECK(ctx.simulate(5).points() != a.points());
  const auto c2 = ctx.corrupt(a, 4, 0.2), c6 = ctx.corrupt(a, 4, 0.6);
  std::size_t moved2 = 0, both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool m2 = c2[i].x != a[i].x || c2[i].y != a[i].y;
    const bool m6 = c6[i].x != a[i].x || c6[i].y != a[i].y;
    moved2 += m2;
    both += m2 && m6;
  }
  CHECK(moved2 == both);
}

TEST_CASE("plots") {
  CHECK(emit_plots({}, {20, 2}).empty());

  ScenarioConfig c = small("H.2", 2);
  const auto docs = emit_plots(run_scenario(c).summary, c.cov);
  CHECK(docs.size() == 2);
  for (const auto& d : docs) {
    CHECK(d.svg.rfind("<svg", 0) == 0);
    CHECK(count(d.svg, "class=\"bar\"") == 10);
  }

  const auto sweep = emit_plots(delta_sweep(c, {0, 10, 20}).summary, c.cov);
  CHECK(sweep.size() == 4);
  for (const auto& d : sweep) {
    CHECK(count(d.svg, "class=\"band\"") == 2);
    CHECK(count(d.svg, "<polyline") == 1);
  }

  std::vector<Series> curves;
  for (const char* name : {"truth", "corrupted", "MC-I", "MC-II", "MC-III"})
    curves.push_back({name, {0, 1, 2}, {0, 1, 4}});
  const std::string svg = svg_line_plot("K", "r", "K", curves);
  CHECK(count(svg, "<polyline") == 5);
  CHECK(count(svg, ">MC-II<") == 1);
  CHECK(count(svg_line_plot("a<b", "r", "K", curves), "a&lt;b") == 1);
}

TEST_CASE("points and window files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dupcox_io_test";
  fs::create_directories(dir);
  const Window w = Window::rectangle(0, 810, 0, 810);
  const auto p = uniform_pattern(w, 50, 1);
  const std::string path = (dir / "pts.csv").string();
  write_points_csv(path, p);
  CHECK(read_points_csv(path, w).points() == p.points());
  CHECK(window_sidecar_path(path) == (dir / "pts.window.yaml").string());

  const Window poly = Window::polygon({{0, 0}, {10, 0}, {10, 5}, {0, 10}});
  write_window_file(window_sidecar_path(path), poly);
  CHECK(read_window_file(window_sidecar_path(path)) == poly);
  write_window_file(window_sidecar_path(path), w);
  CHECK(read_window_file(window_sidecar_path(path)) == w);

  std::stringstream outside("# note\nx,y\n1,1\n900,1\n");
  try {
    read_points_csv(outside, w);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
  std::stringstream junk("x,y\n1,abc\n");
  CHECK_THROWS_AS(read_points_csv(junk, w), Error);
  CHECK(parse_window_spec("0,810,0,405").height() == 405);
  CHECK_THROWS_AS(parse_window_spec("0,810"), Error);
  CHECK_THROWS_AS(read_points_csv((dir / "missing.csv").string(), w), Error);
  fs::remove_all(dir);
}
