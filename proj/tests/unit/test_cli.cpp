#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "dupcox_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" + DUPCOX_CLI_PATH + "' " + args +
                          " > last.out 2> last.err";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) {
  std::ifstream f(workdir() / name);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& name) {
  const std::string s = slurp(name);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("pattern pipeline") {
  REQUIRE(run("simulate --seed 4 --out p.csv") == 0);
  CHECK(fs::exists(workdir() / "p.window.yaml"));
  CHECK(slurp("p.csv").find("# seed=4 window=") != std::string::npos);
  REQUIRE(run("corrupt --in p.csv --fraction 0.6 --seed 2 --out c.csv") == 0);
  CHECK(lines("c.csv") == lines("p.csv"));
  REQUIRE(run("dedup --in c.csv --out d.csv") == 0);
  CHECK(lines("d.csv") < lines("c.csv"));
  REQUIRE(run("jitter --in c.csv --radius 25 --out j.csv") == 0);
  REQUIRE(run("redistribute --in c.csv --out r.csv") == 0);
  CHECK(lines("r.csv") == lines("c.csv"));
  REQUIRE(run("corrupt --in p.csv --fraction 0.4 --partition tessellation --cells 50 --out t.csv") == 0);

  REQUIRE(run("kest --in c.csv --out kc.csv") == 0);
  REQUIRE(run("kest --in d.csv --out kd.csv") == 0);
  CHECK(slurp("kc.csv").find("# variant,hom") != std::string::npos);
  REQUIRE(run("fit --in kc.csv --delta 17 --out fit.csv") == 0);
  CHECK(slurp("fit.csv").rfind("method,delta,r_max,phi_hat", 0) == 0);
  CHECK(slurp("fit.csv").find("\nMMC,") != std::string::npos);

  REQUIRE(run("intensity --in p.csv --bandwidth 285 --grid 64 64 --out lam.csv") == 0);
  REQUIRE(run("kest --in p.csv --variant inhom --intensity lam.csv --out ki.csv") == 0);
  REQUIRE(run("kest --in p.csv --variant inhom --bandwidth 285 --out kb.csv") == 0);
  REQUIRE(run("plot --kest kc.csv --kest kd.csv --theory --out plots") == 0);
  CHECK(fs::exists(workdir() / "plots" / "k_overlay.svg"));
}

TEST_CASE("delta rule") {
  REQUIRE(run("delta-rule --grid 18 18") == 0);
  CHECK(slurp("last.out").find("2025,16.92") != std::string::npos);
  REQUIRE(run("delta-rule --cell-area 900") == 0);
  CHECK(slurp("last.out").find(",11.28") != std::string::npos);
}

TEST_CASE("study and sweep outputs") {
  REQUIRE(run("study --preset H.2 --reps 2 --workers 2 --out s") == 0);
  for (const char* f : {"rows.csv", "summary.csv", "config.yaml", "quantiles_phi.svg"})
    CHECK(fs::exists(workdir() / "s" / f));
  CHECK(lines("s/rows.csv") == 1 + 2 * 4 * 5);
  CHECK(slurp("s/config.yaml").find("replications: 2") != std::string::npos);

  REQUIRE(run("delta-sweep --preset H.3 --reps 1 --deltas 0:10:5 --out sw --no-plots") == 0);
  CHECK(lines("sw/rows.csv") == 1 + 4 * 3);
  REQUIRE(run("plot --summary sw/summary.csv --out swp") == 0);
  CHECK(fs::exists(workdir() / "swp" / "delta_sweep_phi_MMC_60pct.svg"));

  std::ofstream(workdir() / "none.yaml") << "preset: H.2\nreplications: 1\nmethods: []\n";
  REQUIRE(run("study --config none.yaml --out empty") == 0);
  CHECK(lines("empty/rows.csv") == 1);
  CHECK_FALSE(fs::exists(workdir() / "empty" / "quantiles_phi.svg"));
}

TEST_CASE("exit codes") {
  CHECK(run("") == 2);
  CHECK(run("bogus") == 2);
  CHECK(run("simulate --phi -3 --out x.csv") == 2);
  CHECK(run("corrupt --in p.csv --fraction 1.5") == 2);
  CHECK(run("study --preset H.9") == 2);
  CHECK(run("kest --in missing.csv") == 4);
  std::ofstream(workdir() / "bad.csv") << "x,y\n1,zz\n";
  CHECK(run("kest --in bad.csv") == 4);
  std::ofstream(workdir() / "one.csv") << "x,y\n1,1\n";
  CHECK(run("kest --in one.csv") == 2);
  std::ofstream(workdir() / "coarse.csv") << "# dupcox kest\nr,khat\n0,0\n100,31415.9\n200,125663.7\n";
  CHECK(run("fit --in coarse.csv") == 0);
  std::ofstream(workdir() / "neg.csv") << "# dupcox kest\nr,khat\n0,0\n1,-1\n2,-1\n";
  CHECK(run("fit --in neg.csv") == 2);
  CHECK(run("fit --in kc.csv --max-iterations 0") == 2);
  // Two iterations cannot converge: the best point is still written.
  CHECK(run("fit --in kc.csv --max-iterations 2 --out tight.csv") == 3);
  CHECK(slurp("tight.csv").find("\nMC,") != std::string::npos);
}
