#include <filesystem>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <gtest/gtest.h>

#include "colim/cli.hpp"
#include "colim/io.hpp"

namespace colim {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "colim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("colim_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    io::write_atomic(dir_ / name, content);
    return path(name);
  }

  fs::path dir_;
};

TEST_F(Cli, ColoredPipeline) {
  const std::string cfg = write("sys.json", R"({"A": [[-1.0]], "Q": [[1.0]], "tau": 0.05})");
  const auto sim = run({"simulate", "--config", cfg, "--t1", "400", "--seed", "3", "--out", path("x.csv")});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto est = run({"estimate-colored", "--in", path("x.csv"), "--tau", "0.05", "--out", path("est.json")});
  ASSERT_EQ(est.code, 0) << est.err;
  const io::json rep = io::parse_json(io::read_file(path("est.json")), "report");
  EXPECT_NEAR(rep["A_hat"][0][0].get<double>(), -1.0, 0.3);
  EXPECT_NEAR(rep["Q_hat"][0][0].get<double>(), 1.0, 0.3);
  EXPECT_EQ(rep["q_method"], "fdr");
  EXPECT_EQ(rep["stencil"], "cusp2");

  const auto lim = run({"estimate-lim", "--in", path("x.csv"), "--rho", "0.5"});
  ASSERT_EQ(lim.code, 0) << lim.err;
  EXPECT_NEAR(io::parse_json(lim.out, "lim")["rho"].get<double>(), 0.5, 1e-12);
}

TEST_F(Cli, SimulateIsDeterministicAndFlagsBeatConfig) {
  const std::string cfg =
      write("sys.json", R"({"A": [[-1.0, 0.2], [0.0, -0.5]], "Q": [[1.0, 0.0], [0.0, 1.0]], "t1": 5, "seed": 1})");
  const auto a = run({"simulate", "--config", cfg});
  const auto b = run({"simulate", "--config", cfg});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const TimeSeries ts = io::parse_trajectory_csv(a.out);
  EXPECT_EQ(ts.count(), 501);
  EXPECT_EQ(ts.dim(), 2);

  const auto longer = run({"simulate", "--config", cfg, "--t1", "10"});
  EXPECT_EQ(io::parse_trajectory_csv(longer.out).count(), 1001);
  const auto reseeded = run({"simulate", "--config", cfg, "--seed", "2"});
  EXPECT_NE(reseeded.out, a.out);
}

TEST_F(Cli, EstimateIsIdempotent) {
  const std::string cfg = write("sys.json", R"({"A": [[-1.0]], "Q": [[0.5]], "tau": 0.1})");
  ASSERT_EQ(run({"simulate", "--config", cfg, "--t1", "50", "--out", path("x.csv")}).code, 0);
  const auto first = run({"estimate-colored", "--in", path("x.csv"), "--tau", "0.1"});
  const auto second = run({"estimate-colored", "--in", path("x.csv"), "--tau", "0.1"});
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, second.out);
}

TEST_F(Cli, OracleAndSweep) {
  const std::string cfg = write("sys.json", R"({"A": [[-1.0]], "Q": [[1.0]]})");
  const auto orc = run({"oracle", "--config", cfg, "--tau", "0.05", "--max-lag", "3"});
  ASSERT_EQ(orc.code, 0) << orc.err;
  const io::json j = io::parse_json(orc.out, "oracle");
  EXPECT_NEAR(j["C"][0][0].get<double>(), 1.0 / 1.05, 1e-12);
  EXPECT_NEAR(j["ucna"]["a_eff"].get<double>(), -1.0 / 1.05, 1e-12);

  const auto white = run({"sweep", "--config", cfg, "--k-min", "1", "--k-max", "20"});
  ASSERT_EQ(white.code, 0) << white.err;
  const io::json s = io::parse_json(white.out, "sweep");
  ASSERT_EQ(s.size(), 20U);
  for (const auto& e : s) EXPECT_NEAR(e["A_hat"][0][0].get<double>(), -1.0, 1e-9);
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"estimate-colored", "--tau", "0.1"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"estimate-colored", "--in", path("missing.csv"), "--tau", "0.1"}).code, cli::kExitUsage);
  const std::string bad = write("bad.json", R"({"A": [[-1.0]], "Q": [[1.0]], "tua": 0.1})");
  const auto r = run({"simulate", "--config", bad});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("tua"), std::string::npos);
  const std::string unstable = write("unstable.json", R"({"A": [[1.0]], "Q": [[1.0]]})");
  EXPECT_EQ(run({"simulate", "--config", unstable}).code, cli::kExitUsage);
  const std::string cfg = write("sys.json", R"({"A": [[-1.0]], "Q": [[1.0]]})");
  EXPECT_EQ(run({"simulate", "--config", cfg, "--out", path("nodir/x.csv")}).code, cli::kExitUsage);
}

TEST_F(Cli, NumericalFailureExitsTwo) {
  std::string csv = "t,x0,x1\n";
  for (int i = 0; i < 50; ++i) csv += std::to_string(i * 0.01) + ",0,0\n";
  const std::string flat = write("flat.csv", csv);
  const auto c = run({"estimate-colored", "--in", flat, "--tau", "0.1"});
  EXPECT_EQ(c.code, cli::kExitNumerical) << c.err;
  EXPECT_EQ(run({"estimate-lim", "--in", flat, "--rho-lag", "5"}).code, cli::kExitNumerical);
}

TEST_F(Cli, BenchWritesTables) {
  const std::string cfg = write("bench.json", R"({"dims": [1, 2], "t1": 20, "trials": 2, "rho_lag": 10})");
  const fs::path out = dir_ / "bench";
  fs::create_directories(out);
  const auto r = run({"bench", "--config", cfg, "--tau", "0.1", "--out-dir", out.string(), "--threads", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"records.csv", "table.csv", "diagnostics.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const io::json summary = io::parse_json(io::read_file(out / "summary.json"), "summary");
  EXPECT_EQ(summary["config"]["tau"].get<double>(), 0.1);
  EXPECT_EQ(summary["config"]["trials"].get<int>(), 2);
  const std::string records = io::read_file(out / "records.csv");
  EXPECT_EQ(std::count(records.begin(), records.end(), '\n'), 5);
  EXPECT_NE(r.err.find("4/4"), std::string::npos);

  const std::string typo = write("typo.json", R"({"trails": 2})");
  EXPECT_EQ(run({"bench", "--config", typo, "--out-dir", out.string()}).code, cli::kExitUsage);
}

}  // namespace
}  // namespace colim
