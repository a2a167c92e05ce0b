#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "support.hpp"
#include "valuecast/ingest.hpp"
#include "valuecast/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("valuecast_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// Runs the CLI with stdout/stderr discarded and returns its exit status.
int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + VALUECAST_CLI + "' " + args +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& path) {
  const auto s = slurp(path);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2, data errors exit 1") {
    TempDir d("codes");
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("synth --n 10 --out " + d / "s") == 2);  // no seed
    CHECK(run("ingest --sofifa nope.csv --whoscored nope.csv --out " + d / "i") == 2);
    CHECK(run("train --seed 1 --out " + d / "t") == 2);  // no input
    CHECK(run("correlate --threshold 2 --matrix x --out " + d / "c") == 2);

    std::ofstream(d / "bad.csv") << "Name,Age\nA,20\n";
    CHECK(run("ingest --sofifa " + d / "bad.csv" + " --whoscored " + d / "bad.csv" + " --out " +
              d / "i") == 1);
    CHECK(run("features --players " + d / "bad.csv" + " --out " + d / "f") == 1);
  }

  TEST_CASE("seed comes from the flag or the environment") {
    TempDir d("seed");
    CHECK(run("synth --n 55 --out " + d / "a", "VALUECAST_SEED=5") == 0);
    CHECK(run("synth --n 55 --seed 5 --out " + d / "b") == 0);
    CHECK(slurp(d / "a/sofifa.csv") == slurp(d / "b/sofifa.csv"));
    CHECK(run("synth --n 55 --seed 6 --out " + d / "c") == 0);
    CHECK(slurp(d / "a/sofifa.csv") != slurp(d / "c/sofifa.csv"));
  }

  TEST_CASE("synthetic data runs through the whole pipeline without dropped rows") {
    TempDir d("pipe");
    REQUIRE(run("synth --n 50 --seed 3 --out " + d / "raw") == 0);
    REQUIRE(run("ingest --sofifa " + d / "raw/sofifa.csv" + " --whoscored " + d / "raw/whoscored.csv" +
                " --out " + d / "clean") == 0);
    CHECK(line_count(d / "clean/players.csv") == 51);
    CHECK(slurp(d / "clean/ingest_issues.txt").empty());
    REQUIRE(run("features --players " + d / "clean/players.csv" + " --out " + d / "feat") == 0);
    CHECK(line_count(d / "feat/features.csv") == 51);
    CHECK(run("correlate --matrix " + d / "feat/features.csv" + " --out " + d / "corr") == 0);
    CHECK(fs::exists(d / "corr/correlation.svg"));
    REQUIRE(run("train --seed 1 --model leafwise --params \"n_estimators=50\" --matrix " +
                d / "feat/features.csv" + " --out " + d / "train") == 0);
    CHECK(fs::exists(d / "train/model.txt"));
    CHECK(fs::exists(d / "train/metrics.csv"));
    REQUIRE(run("explain --matrix " + d / "feat/features.csv" + " --model-file " +
                d / "train/model.txt" + " --top 5 --out " + d / "shap") == 0);
    CHECK(line_count(d / "shap/shap.csv") == 51);
    CHECK(line_count(d / "shap/shap_summary.csv") == 6);
    CHECK(fs::exists(d / "shap/shap_effects.svg"));
  }

  TEST_CASE("a one-trial study logs exactly one trial, and reruns are byte-identical") {
    TempDir d("tune");
    REQUIRE(run("synth --n 60 --seed 4 --out " + d / "raw") == 0);
    REQUIRE(run("ingest --sofifa " + d / "raw/sofifa.csv" + " --whoscored " + d / "raw/whoscored.csv" +
                " --out " + d / "clean") == 0);
    const std::string base = "tune --seed 9 --model lasso --folds 3 --players " + d / "clean/players.csv";
    REQUIRE(run(base + " --trials 1 --out " + d / "one") == 0);
    CHECK(line_count(d / "one/study.jsonl") == 1);

    REQUIRE(run(base + " --trials 4 --out " + d / "a") == 0);
    REQUIRE(run(base + " --trials 4 --out " + d / "b") == 0);
    CHECK(line_count(d / "a/study.jsonl") == 4);
    CHECK(slurp(d / "a/study.jsonl") == slurp(d / "b/study.jsonl"));
    CHECK(slurp(d / "a/best_params.txt") == slurp(d / "b/best_params.txt"));
  }

  TEST_CASE("config file supplies defaults that flags override") {
    TempDir d("config");
    std::ofstream(d / "run.cfg") << "# defaults\nseed = 5\nn = 60\n";
    REQUIRE(run("synth --config " + d / "run.cfg" + " --out " + d / "a") == 0);
    CHECK(line_count(d / "a/sofifa.csv") == 61);
    REQUIRE(run("synth --config " + d / "run.cfg" + " --n 52 --out " + d / "b") == 0);
    CHECK(line_count(d / "b/sofifa.csv") == 53);
    REQUIRE(run("synth --n 60 --seed 5 --out " + d / "c") == 0);
    CHECK(slurp(d / "a/sofifa.csv") == slurp(d / "c/sofifa.csv"));
    std::ofstream(d / "broken.cfg") << "no equals sign\n";
    CHECK(run("synth --config " + d / "broken.cfg" + " --out " + d / "x") == 2);
  }

  TEST_CASE("small benchmark writes reproducible reports") {
    TempDir d("bench");
    const std::string args =
        "benchmark --seed 2 --synthetic 80 --models LM,lasso,leafwise+pruning --conditions default,itpe"
        " --trials 4 --folds 3 --repeat 1 --out ";
    REQUIRE(run(args + d / "a") == 0);
    REQUIRE(run(args + d / "b") == 0);
    CHECK(slurp(d / "a/report.csv") == slurp(d / "b/report.csv"));
    CHECK(slurp(d / "a/report.txt") == slurp(d / "b/report.txt"));
    // LM/default, lasso/default, lasso/itpe, leafwise+pruning/itpe
    CHECK(line_count(d / "a/report.csv") == 5);
    CHECK(fs::exists(d / "a/report_timing.csv"));
  }

  TEST_CASE("bundled dataset is the reference synthetic draw") {
    const auto data = valuecast::synth::generate(valuecast::synth::kReferenceSize,
                                                 valuecast::synth::kReferenceSeed);
    std::ostringstream s, w;
    valuecast::ingest::write_sofifa_csv(s, data.sofifa);
    valuecast::ingest::write_whoscored_csv(w, data.whoscored);
    CHECK(s.str() == slurp(support::data_file("synthetic/sofifa.csv").string()));
    CHECK(w.str() == slurp(support::data_file("synthetic/whoscored.csv").string()));
  }
}
