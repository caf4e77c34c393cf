// Acceptance run: one PASS/FAIL line per criterion, diagnostics indented.
//
//   acceptance [--out DIR] [--reps N] [--expect-fail LIST] [--only LIST]
//
// Exit status is 0 when the set of failing criteria equals --expect-fail
// (default: empty). A listed criterion that passes also gives a nonzero exit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dupcox/error.hpp"
#include "dupcox/estimation.hpp"
#include "dupcox/harness.hpp"
#include "dupcox/intensity.hpp"
#include "dupcox/kfunction.hpp"
#include "dupcox/random.hpp"
#include "dupcox/simulate.hpp"

namespace fs = std::filesystem;
using namespace dupcox;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

PointPattern uniform_pattern(const Window& w, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const Box& b = w.bounds();
  std::vector<Point> pts;
  pts.reserve(n);
  while (pts.size() < n) {
    const Point p{rng.uniform(b.xmin, b.xmax), rng.uniform(b.ymin, b.ymax)};
    if (w.contains(p)) pts.push_back(p);
  }
  return PointPattern(w, std::move(pts));
}

double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

const SummaryRow* find_row(const std::vector<SummaryRow>& s, double fraction, Method m) {
  for (const auto& r : s)
    if (r.fraction == fraction && r.method == m) return &r;
  return nullptr;
}

std::string rows_csv(const StudyResult& res) {
  std::ostringstream o;
  write_rows_header(o);
  write_rows(o, res.rows);
  return o.str();
}

void save(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

// --- 1 ---------------------------------------------------------------------

Outcome poisson_degeneracy() {
  double worst = 0.0;
  for (double phi : {0.5, 20.0, 300.0})
    for (double r : {1.0, 5.0, 20.0, 100.0})
      worst = std::max(worst, rel_err(theoretical_k(r, {phi, 0.0}), kPi * r * r));
  return {worst <= 1e-6, fmt::format("max rel err {:.3g} (tol 1e-6)", worst), {}};
}

// --- 2 ---------------------------------------------------------------------

Outcome noiseless_inversion() {
  double worst = 0.0;
  int failed = 0;
  for (double phi : {15.0, 20.0, 30.0})
    for (double s2 : {1.0, 2.0, 4.0}) {
      KEstimate k;
      k.r = default_r_grid(202.5, 513);
      k.khat = theoretical_k_grid(k.r, {phi, s2});
      try {
        const FitResult f = fit(k, {0.0, 202.5});
        worst = std::max({worst, rel_err(f.phi, phi), rel_err(f.sigma2, s2)});
      } catch (const Error&) {
        ++failed;
      }
    }
  const bool ok = failed == 0 && worst <= 1e-3;
  return {ok, fmt::format("9 fits, {} failed, max rel err {:.3g} (tol 1e-3)", failed, worst), {}};
}

// --- 3 ---------------------------------------------------------------------

Outcome csr_calibration() {
  const Window w = Window::rectangle(0, 810, 0, 810);
  const int reps = 200;
  const auto r = default_r_grid(202.5, 513);
  std::vector<double> mean_hom(r.size(), 0.0), mean_inh(r.size(), 0.0);
  const double lambda = 500.0 / w.area();
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(derive_seed(2024, {static_cast<std::uint64_t>(rep)}));
    const std::size_t n = rng.poisson(500.0);
    const auto p = uniform_pattern(w, n, derive_seed(2024, {static_cast<std::uint64_t>(rep), 1}));
    const auto kh = k_hom(p, r);
    const std::vector<double> lam(p.size(), lambda);
    const auto ki = k_inhom(p, lam, r);
    for (std::size_t k = 0; k < r.size(); ++k) {
      mean_hom[k] += kh.khat[k] / reps;
      mean_inh[k] += ki.khat[k] / reps;
    }
  }
  double worst_h = 0.0, worst_i = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] < 10.0 || r[k] > 100.0) continue;
    const double pr2 = kPi * r[k] * r[k];
    worst_h = std::max(worst_h, rel_err(mean_hom[k], pr2));
    worst_i = std::max(worst_i, rel_err(mean_inh[k], pr2));
  }
  return {worst_h <= 0.05 && worst_i <= 0.07,
          fmt::format("max rel dev on [10,100]: hom {:.4f} (tol 0.05), inhom {:.4f} (tol 0.07)",
                      worst_h, worst_i),
          {}};
}

// --- 4 ---------------------------------------------------------------------

std::vector<double> naive_k(const PointPattern& p, const std::vector<double>& v,
                            const std::vector<double>& r) {
  const double w = p.window().width(), h = p.window().height();
  std::vector<double> s(r.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j) continue;
      const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      const double e = (w * h) / ((w - std::fabs(dx)) * (h - std::fabs(dy)));
      for (std::size_t k = 0; k < r.size(); ++k)
        if (d <= r[k]) s[k] += e * v[i] * v[j];
    }
  return s;
}

double worst_rel(const std::vector<double>& got, const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t k = 0; k < got.size(); ++k) {
    if (want[k] == 0.0) {
      if (got[k] != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, rel_err(got[k], want[k]));
  }
  return worst;
}

Outcome oracle_equivalence() {
  double worst_h = 0.0, worst_i = 0.0;
  for (int t = 0; t < 50; ++t) {
    Rng rng(derive_seed(4, {static_cast<std::uint64_t>(t)}));
    const double wx = rng.uniform(100, 900), wy = rng.uniform(100, 900);
    const Window w = Window::rectangle(0, wx, 0, wy);
    const std::size_t n = 2 + rng.index(299);
    auto pts = uniform_pattern(w, n, rng.bits()).points();
    // Some patterns carry duplicates.
    if (t % 3 == 0)
      for (std::size_t i = 1; i < pts.size(); i += 7) pts[i] = pts[i - 1];
    const PointPattern p(w, pts);
    const auto r = default_r_grid(std::min(wx, wy) / 4, 129);
    const double nn = static_cast<double>(n);

    auto want_h = naive_k(p, std::vector<double>(n, 1.0), r);
    for (double& x : want_h) x *= w.area() / (nn * (nn - 1.0));
    worst_h = std::max(worst_h, worst_rel(k_hom(p, r).khat, want_h));

    std::vector<double> lam(n), inv(n);
    for (std::size_t i = 0; i < n; ++i) {
      lam[i] = rng.uniform(1e-4, 5e-3);
      inv[i] = 1.0 / lam[i];
    }
    auto want_i = naive_k(p, inv, r);
    for (double& x : want_i) x /= w.area();
    worst_i = std::max(worst_i, worst_rel(k_inhom(p, lam, r).khat, want_i));
  }
  return {worst_h <= 1e-12 && worst_i <= 1e-12,
          fmt::format("50 patterns: hom {:.3g}, inhom {:.3g} (tol 1e-12)", worst_h, worst_i), {}};
}

// --- 5, 6, 11 --------------------------------------------------------------

struct H2Runs {
  StudyResult parallel;
  StudyResult serial;
  double seconds_parallel = 0.0;
  double seconds_serial = 0.0;
};

ScenarioConfig h2_config(int reps) {
  ScenarioConfig c = preset("H.2");
  c.replications = reps;
  c.corruption.fractions = {0.0, 0.6};
  c.delta = 17.0;
  return c;
}

H2Runs run_h2(int reps, const fs::path& out) {
  H2Runs runs;
  ScenarioConfig c = h2_config(reps);
  save(out / "h2_config.yaml", config_to_yaml(c));
  for (int workers : {8, 1}) {
    c.workers = workers;
    const auto t0 = std::chrono::steady_clock::now();
    StudyResult res = run_scenario(c);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    save(out / fmt::format("h2_rows_w{}.csv", workers), rows_csv(res));
    if (workers == 8) {
      std::ostringstream s;
      write_summary(s, res.summary);
      save(out / "h2_summary.csv", s.str());
      runs.parallel = std::move(res);
      runs.seconds_parallel = secs;
    } else {
      runs.serial = std::move(res);
      runs.seconds_serial = secs;
    }
  }
  return runs;
}

Outcome mc_recovery(const H2Runs& runs) {
  const SummaryRow* mc = find_row(runs.parallel.summary, 0.0, Method::mc);
  if (!mc) return {false, "no MC summary at 0%", {}};
  const double phi = mc->phi_q[2], s2 = mc->sigma2_q[2];
  return {rel_err(phi, 20.0) <= 0.25 && rel_err(s2, 2.0) <= 0.25,
          fmt::format("median phi {:.3f} (20 +-25%), median sigma2 {:.3f} (2 +-25%), {}/{} converged",
                      phi, s2, mc->converged, mc->fits),
          {}};
}

Outcome mmc_dominance(const H2Runs& runs) {
  const auto& s = runs.parallel.summary;
  const SummaryRow* mmc = find_row(s, 0.6, Method::mmc);
  const SummaryRow* mc = find_row(s, 0.6, Method::mc);
  if (!mmc || !mc) return {false, "missing summary rows at 60%", {}};
  const double d_phi_mmc = std::fabs(mmc->phi_q[2] - 20.0);
  const double d_phi_mc = std::fabs(mc->phi_q[2] - 20.0);
  const double d_s2_mmc = std::fabs(mmc->sigma2_q[2] - 2.0);
  double best_other = std::numeric_limits<double>::infinity();
  Outcome o;
  for (Method m : {Method::mc, Method::mc_i, Method::mc_ii, Method::mc_iii, Method::mmc}) {
    const SummaryRow* row = find_row(s, 0.6, m);
    if (!row) return {false, fmt::format("missing {} at 60%", method_name(m)), {}};
    o.notes.push_back(fmt::format("{:7s} median phi {:8.3f}  median sigma2 {:7.4f}  delta {:.3f}",
                                  method_name(m), row->phi_q[2], row->sigma2_q[2], row->delta));
    if (m != Method::mmc) best_other = std::min(best_other, std::fabs(row->sigma2_q[2] - 2.0));
  }
  o.pass = d_phi_mmc < d_phi_mc && d_s2_mmc < best_other;
  o.detail = fmt::format("|phi-20|: MMC {:.3f} vs MC {:.3f}; |sigma2-2|: MMC {:.4f} vs best other {:.4f}",
                         d_phi_mmc, d_phi_mc, d_s2_mmc, best_other);
  return o;
}

Outcome determinism(const H2Runs& runs) {
  const std::string a = rows_csv(runs.parallel), b = rows_csv(runs.serial);
  return {a == b,
          fmt::format("rows CSV {} bytes, 8 workers {} 1 worker ({:.0f} s vs {:.0f} s)", a.size(),
                      a == b ? "==" : "!=", runs.seconds_parallel, runs.seconds_serial),
          {}};
}

// --- 7 ---------------------------------------------------------------------

Outcome rule_of_thirds() {
  const double a = delta_rule(30.0 * 30.0), b = delta_rule(45.0 * 45.0), c = delta_rule(54.0 * 54.0);
  return {std::lround(a) == 11 && std::lround(b) == 17 && std::lround(c) == 20,
          fmt::format("{:.4f}, {:.4f}, {:.4f} (want 11, 17, 20)", a, b, c), {}};
}

// --- 8 ---------------------------------------------------------------------

std::vector<double> median_phi_by_delta(const StudyResult& res, const std::vector<double>& deltas) {
  std::vector<double> out;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (k >= res.summary.size()) break;
    out.push_back(res.summary[k].phi_q[2]);
  }
  return out;
}

Outcome delta_sweep_artifacts(int reps, const fs::path& out) {
  std::vector<double> deltas;
  for (int d = 0; d <= 70; d += 5) deltas.push_back(d);

  ScenarioConfig grid = preset("H.3");
  grid.replications = reps;
  grid.corruption.fractions = {0.6};
  ScenarioConfig tess = grid;
  tess.corruption.partition = PartitionKind::tessellation;
  tess.corruption.cells = grid.corruption.nx * grid.corruption.ny;

  const StudyResult rg = delta_sweep(grid, deltas);
  const StudyResult rt = delta_sweep(tess, deltas);
  for (const auto& [name, res] : {std::pair{"grid", &rg}, std::pair{"tessellation", &rt}}) {
    std::ostringstream s;
    write_summary(s, res->summary);
    save(out / fmt::format("h3_sweep_{}_summary.csv", name), s.str());
    save(out / fmt::format("h3_sweep_{}_rows.csv", name), rows_csv(*res));
  }

  const auto mg = median_phi_by_delta(rg, deltas);
  const auto mt = median_phi_by_delta(rt, deltas);
  if (mg.size() != deltas.size() || mt.size() != deltas.size())
    return {false, "sweep summary is incomplete", {}};

  const std::size_t bins = deltas.size() - 1;
  std::vector<double> jg(bins), jt(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    jg[k] = std::fabs(mg[k + 1] - mg[k]);
    jt[k] = std::fabs(mt[k + 1] - mt[k]);
  }
  std::vector<std::size_t> order(bins);
  for (std::size_t k = 0; k < bins; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return jg[a] > jg[b]; });
  const std::size_t top[2] = {order[0], order[1]};

  auto contains = [&](std::size_t k, double x) { return deltas[k] <= x && x <= deltas[k + 1]; };
  const bool placed = (contains(top[0], 45.0) && contains(top[1], 63.6)) ||
                      (contains(top[1], 45.0) && contains(top[0], 63.6));
  const bool damped = jt[top[0]] * 2.0 <= jg[top[0]] && jt[top[1]] * 2.0 <= jg[top[1]];

  Outcome o;
  o.pass = placed && damped;
  o.detail = fmt::format("largest grid jumps in [{:g},{:g}] ({:.3f}) and [{:g},{:g}] ({:.3f}); "
                         "want bins holding 45 and 63.6: {}; tessellation at least 2x smaller: {}",
                         deltas[top[0]], deltas[top[0] + 1], jg[top[0]], deltas[top[1]],
                         deltas[top[1] + 1], jg[top[1]], placed ? "yes" : "no",
                         damped ? "yes" : "no");
  o.notes.push_back("delta  median phi (grid)  median phi (tess)");
  for (std::size_t k = 0; k < deltas.size(); ++k)
    o.notes.push_back(fmt::format("{:5.1f}  {:17.3f}  {:17.3f}", rg.summary[k].delta, mg[k], mt[k]));
  o.notes.push_back("bin        |jump| grid  |jump| tess");
  for (std::size_t k = 0; k < bins; ++k)
    o.notes.push_back(fmt::format("[{:2g},{:2g}]  {:11.3f}  {:11.3f}", deltas[k], deltas[k + 1], jg[k], jt[k]));
  // Ranking with the jump out of delta = 0 set aside.
  std::vector<std::size_t> inner(order.begin(), order.end());
  inner.erase(std::remove(inner.begin(), inner.end(), std::size_t{0}), inner.end());
  o.notes.push_back(fmt::format("excluding [0,5]: largest jumps in [{:g},{:g}] and [{:g},{:g}]",
                                deltas[inner[0]], deltas[inner[0] + 1], deltas[inner[1]],
                                deltas[inner[1] + 1]));
  return o;
}

// --- 9 ---------------------------------------------------------------------

Outcome duplicate_jump() {
  const Window w = Window::rectangle(0, 810, 0, 810);
  int bad = 0, cases = 0;
  const std::vector<double> r = default_r_grid(202.5, 65);
  for (int t = 0; t < 20; ++t) {
    auto pts = uniform_pattern(w, 50 + 20 * t, derive_seed(9, {static_cast<std::uint64_t>(t)})).points();
    pts.push_back(pts[static_cast<std::size_t>(t)]);
    const PointPattern p(w, pts);
    const PointPattern d = dedup(p);
    const std::vector<double> lam(p.size(), 1e-3), lam_d(d.size(), 1e-3);
    ++cases;
    if (!(k_hom(p, r).khat[0] > 0.0) || k_hom(d, r).khat[0] != 0.0) ++bad;
    if (!(k_inhom(p, lam, r).khat[0] > 0.0) || k_inhom(d, lam_d, r).khat[0] != 0.0) ++bad;
  }
  const StudyContext ctx(preset("H.2"));
  for (int rep = 0; rep < 3; ++rep) {
    const auto c = ctx.corrupt(ctx.simulate(rep), rep, 0.2);
    ++cases;
    if (!(ctx.estimate_k(c).khat[0] > 0.0) || ctx.estimate_k(dedup(c)).khat[0] != 0.0) ++bad;
  }
  return {bad == 0, fmt::format("{} patterns, {} violations", cases, bad), {}};
}

// --- 10 --------------------------------------------------------------------

Outcome kernel_contracts() {
  const Window w = Window::rectangle(0, 810, 0, 810);
  const IntensityGrid g{256, 256};
  double worst_mass = 0.0, worst_gm = 0.0;
  for (int t = 0; t < 4; ++t) {
    const auto p = uniform_pattern(w, 200 + 100 * t, derive_seed(10, {static_cast<std::uint64_t>(t)}));
    for (double h : {15.0, 50.0, 150.0, 285.0, 600.0})
      worst_mass = std::max(worst_mass, std::fabs(kernel_intensity_fixed(p, h, g).integral() - 1.0));
    for (double h0 : {30.0, 120.0, 285.0}) {
      const auto a = kernel_intensity_adaptive(p, h0, 0.0, g);
      double log_sum = 0.0;
      for (double h : a.bandwidths) log_sum += std::log(h);
      const double gm = std::exp(log_sum / static_cast<double>(a.bandwidths.size()));
      worst_gm = std::max(worst_gm, rel_err(gm, h0));
      worst_mass = std::max(worst_mass, std::fabs(a.density.integral() - 1.0));
    }
  }
  return {worst_mass <= 0.02 && worst_gm <= 1e-9,
          fmt::format("max |mass - 1| {:.4f} (tol 0.02), geometric mean rel err {:.3g} (tol 1e-9)",
                      worst_mass, worst_gm),
          {}};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_out";
  int reps = 100;
  std::set<int> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << a << '\n';
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--out") out = next();
    else if (a == "--reps") reps = std::stoi(next());
    else if (a == "--expect-fail") expect_fail = parse_list(next());
    else if (a == "--only") only = parse_list(next());
    else {
      std::cerr << "unknown argument " << a << '\n';
      return 2;
    }
  }
  fs::create_directories(out);

  const char* names[] = {"",
                         "Poisson degeneracy",
                         "noiseless inversion",
                         "CSR calibration",
                         "naive oracle equivalence",
                         "uncorrupted MC recovery (H.2)",
                         "MMC dominance at 60% (H.2, delta 17)",
                         "rule of thirds",
                         "delta-sweep artifacts (H.3)",
                         "duplicate-origin jump",
                         "kernel estimator contracts",
                         "determinism across workers"};

  std::set<int> failed;
  std::ofstream report(out / "report.txt");
  auto emit = [&](int id, const Outcome& o, double secs) {
    const std::string line = fmt::format("{} {:2d} {}: {} [{:.1f} s]", o.pass ? "PASS" : "FAIL", id,
                                         names[id], o.detail, secs);
    std::cout << line << '\n';
    report << line << '\n';
    for (const auto& n : o.notes) {
      std::cout << "     " << n << '\n';
      report << "     " << n << '\n';
    }
    std::cout.flush();
    if (!o.pass) failed.insert(id);
  };
  auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };
  auto timed = [&](int id, const std::function<Outcome()>& f) {
    if (!wanted(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what()), {}};
    }
    emit(id, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };

  timed(1, poisson_degeneracy);
  timed(2, noiseless_inversion);
  timed(3, csr_calibration);
  timed(4, oracle_equivalence);
  if (wanted(5) || wanted(6) || wanted(11)) {
    const auto t0 = std::chrono::steady_clock::now();
    H2Runs runs;
    std::string err;
    try {
      runs = run_h2(reps, out);
    } catch (const std::exception& e) {
      err = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto guarded = [&](int id, Outcome (*f)(const H2Runs&)) {
      if (!wanted(id)) return;
      emit(id, err.empty() ? f(runs) : Outcome{false, "study threw: " + err, {}}, id == 5 ? secs : 0.0);
    };
    guarded(5, mc_recovery);
    guarded(6, mmc_dominance);
    guarded(11, determinism);
  }
  timed(7, rule_of_thirds);
  timed(8, [&] { return delta_sweep_artifacts(reps, out); });
  timed(9, duplicate_jump);
  timed(10, kernel_contracts);

  std::string failed_list;
  for (int id : failed) failed_list += (failed_list.empty() ? "" : ",") + std::to_string(id);
  const int run_count = only.empty() ? 11 : static_cast<int>(only.size());
  const std::string summary =
      fmt::format("SUMMARY {}/{} passed; failed: {}; expected to fail: {}", run_count - static_cast<int>(failed.size()),
                  run_count, failed_list.empty() ? "none" : failed_list,
                  expect_fail.empty() ? "none" : fmt::format("{}", fmt::join(expect_fail, ",")));
  std::cout << summary << '\n';
  report << summary << '\n';

  std::set<int> expected;
  for (int id : expect_fail)
    if (wanted(id)) expected.insert(id);
  return failed == expected ? 0 : 1;
}
