#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(GOXLENS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

struct Workspace {
  fs::path root;
  explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("goxlens_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string operator/(const std::string& leaf) const { return (root / leaf).string(); }
};

void write_spec(const Workspace& w) {
  spit(w / "spec.json", R"({"n_days": 21, "n_trades": 20000, "wash_rate": 0.05, "duplicate_rate": 0.02})");
}

}  // namespace

TEST_CASE("synth is reproducible byte for byte") {
  Workspace w("synth");
  write_spec(w);
  REQUIRE(run("synth --spec " + (w / "spec.json") + " --seed 7 --out " + (w / "a")) == 0);
  REQUIRE(run("synth --spec " + (w / "spec.json") + " --seed 7 --out " + (w / "b")) == 0);
  REQUIRE(run("synth --spec " + (w / "spec.json") + " --seed 8 --out " + (w / "c")) == 0);
  for (const char* f : {"trades.csv", "truth.json", "onchain.csv", "market_daily.csv", "supply.csv", "trends.csv"}) {
    CAPTURE(f);
    CHECK(slurp(w.root / "a" / f) == slurp(w.root / "b" / f));
  }
  CHECK(slurp(w.root / "a" / "trades.csv") != slurp(w.root / "c" / "trades.csv"));
}

TEST_CASE("ingest, detect and bars agree with the planted truth") {
  Workspace w("pipeline");
  write_spec(w);
  REQUIRE(run("synth --spec " + (w / "spec.json") + " --seed 3 --out " + (w / "s")) == 0);
  const auto truth = nlohmann::json::parse(slurp(w.root / "s" / "truth.json"));
  const std::string trades = (w.root / "s" / "trades.csv").string();
  REQUIRE(run("ingest --trades " + trades + " --out " + (w / "i")) == 0);
  const auto ingest = nlohmann::json::parse(slurp(w.root / "i" / "ingest.json"));
  CHECK(ingest["dedup"]["deduplicated"] == truth["n_trades"]);
  CHECK(ingest["row_errors"] == 0);
  REQUIRE(run("detect --trades " + trades + " --supply " + (w.root / "s" / "supply.csv").string() + " --out " +
              (w / "d")) == 0);
  const auto summary = nlohmann::json::parse(slurp(w.root / "d" / "summary.json"));
  CHECK(summary["wash_count"] == truth["n_wash"]);
  CHECK(summary["trades"] == truth["n_trades"]);
  CHECK(summary["marketcap_share"]["mean_percent"].get<double>() > 0);
  REQUIRE(run("bars --trades " + trades + " --window 2011-06-26..2011-07-16 --out " + (w / "b")) == 0);
  const std::string csv = slurp(w.root / "b" / "bars.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21 * 48 + 1);
  REQUIRE(run("bars --trades " + trades + " --out " + (w / "full")) == 0);
  const std::string full = slurp(w.root / "full" / "bars.csv");
  CHECK(std::count(full.begin(), full.end(), '\n') == 695 * 48 + 1);
}

TEST_CASE("analyze writes identical reports on identical inputs") {
  Workspace w("analyze");
  write_spec(w);
  REQUIRE(run("synth --spec " + (w / "spec.json") + " --seed 5 --out " + (w / "s")) == 0);
  REQUIRE(run("bars --trades " + (w.root / "s" / "trades.csv").string() + " --out " + (w / "b")) == 0);
  const std::string bars = (w.root / "b" / "bars.csv").string();
  const std::string market = " --aux market_daily=" + (w.root / "s" / "market_daily.csv").string();
  REQUIRE(run("analyze market --bars " + bars + market + " --out " + (w / "m1")) == 0);
  REQUIRE(run("analyze market --bars " + bars + market + " --out " + (w / "m2")) == 0);
  CHECK(slurp(w.root / "m1" / "report.json") == slurp(w.root / "m2" / "report.json"));
  CHECK(fs::exists(w.root / "m1" / "ols.csv"));
}

TEST_CASE("exit codes distinguish usage, data and analysis failures") {
  Workspace w("codes");
  CHECK(run("") == 1);
  CHECK(run("detect --out " + (w / "x")) == 1);
  CHECK(run("analyze nonsense --bars x --out " + (w / "x")) == 1);
  CHECK(run("ml --bars x --out " + (w / "x")) == 1);
  CHECK(run("--help") == 0);

  CHECK(run("ingest --trades " + (w / "missing.csv") + " --out " + (w / "x")) == 2);
  spit(w.root / "bad.csv", "not,a,trade,log\n1,2,3,4\n");
  CHECK(run("ingest --trades " + (w / "bad.csv") + " --out " + (w / "x")) == 2);

  write_spec(w);
  REQUIRE(run("synth --spec " + (w / "spec.json") + " --seed 2 --out " + (w / "s")) == 0);
  REQUIRE(run("bars --trades " + (w.root / "s" / "trades.csv").string() + " --out " + (w / "b")) == 0);
  CHECK(run("analyze event --bars " + (w / "b/bars.csv") + " --out " + (w / "e")) == 3);
  REQUIRE(run("bars --trades " + (w.root / "s" / "trades.csv").string() + " --window 2011-06-26..2011-07-16 --out " +
              (w / "short")) == 0);
  CHECK(run("analyze event --bars " + (w / "short/bars.csv") + " --out " + (w / "e")) == 3);
  CHECK(run("analyze timing --bars " + (w / "short/bars.csv") + " --out " + (w / "t")) == 1);
}
