#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <gtest/gtest.h>

#include "colim/io.hpp"

namespace colim {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("colim_io_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(FormatDouble, RoundTripsAndNonFinite) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(std::nan("")), "nan");
  EXPECT_EQ(io::format_double(HUGE_VAL), "inf");
  EXPECT_EQ(io::format_double(-HUGE_VAL), "-inf");
}

TEST(Trajectory, CsvRoundTrip) {
  TimeSeries x{0.01, 2.0, Matrix::Random(20, 3)};
  TimeSeries eta{0.01, 2.0, Matrix::Random(20, 3)};
  const std::string text = io::trajectory_csv(x, &eta);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x0,x1,x2,eta0,eta1,eta2");
  const TimeSeries back = io::parse_trajectory_csv(text);
  EXPECT_EQ(back.values, x.values);
  EXPECT_NEAR(back.dt, 0.01, 1e-15);
  EXPECT_NEAR(back.start_time, 2.0, 1e-15);

  const TimeSeries plain = io::parse_trajectory_csv(io::trajectory_csv(x));
  EXPECT_EQ(plain.values, x.values);
}

TEST(Trajectory, RejectsMalformedInput) {
  EXPECT_THROW((void)io::parse_trajectory_csv(""), io::ConfigError);
  EXPECT_THROW((void)io::parse_trajectory_csv("time,x0\n0,1\n1,2\n"), io::ConfigError);
  EXPECT_THROW((void)io::parse_trajectory_csv("t,x0\n0,1\n"), io::ConfigError);
  EXPECT_THROW((void)io::parse_trajectory_csv("t,x0\n0,1\n0.1,abc\n"), io::ConfigError);
  EXPECT_THROW((void)io::parse_trajectory_csv("t,x0\n0,1\n0.1,2,3\n"), io::ConfigError);
  EXPECT_THROW((void)io::parse_trajectory_csv("t,x0\n0,1\n0.1,2\n0.3,2\n"), io::ConfigError);
}

TEST(MatrixJson, NestedRowsAndScalars) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const io::json j = io::to_json(m);
  EXPECT_EQ(j.dump(), "[[1.0,2.0,3.0],[4.0,5.0,6.0]]");
  EXPECT_EQ(io::matrix_from_json(j, "m"), m);
  EXPECT_EQ(io::matrix_from_json(io::json(-1.5), "m")(0, 0), -1.5);
  EXPECT_THROW((void)io::matrix_from_json(io::json::parse("[[1,2],[3]]"), "m"), io::ConfigError);
  EXPECT_THROW((void)io::matrix_from_json(io::json::parse("[[1,\"a\"]]"), "m"), io::ConfigError);
  EXPECT_TRUE(io::double_to_json(std::nan("")).is_null());
}

TEST(Config, SystemParsing) {
  const auto sys = io::system_from_json(io::parse_json(R"({"A": [[-1]], "Q": 2, "tau": 0.1})", "cfg"));
  EXPECT_EQ(sys.A(0, 0), -1.0);
  EXPECT_EQ(sys.Q(0, 0), 2.0);
  EXPECT_EQ(sys.tau, 0.1);
  EXPECT_THROW((void)io::system_from_json(io::parse_json(R"({"A": -1})", "cfg")), io::ConfigError);
  EXPECT_THROW((void)io::parse_json("{not json", "cfg"), io::ConfigError);
}

TEST(Config, BenchRoundTripAndUnknownKeys) {
  bench::BenchConfig cfg;
  cfg.dims = {1, 3, 5};
  cfg.tau = 0.1;
  cfg.trials = 7;
  cfg.stencil = Stencil::central4;
  cfg.seed = 42;
  cfg.q_method = colored::QMethod::kprime;
  cfg.quantiles = {10.0, 50.0};
  const auto back = io::bench_config_from_json(io::to_json(cfg));
  EXPECT_EQ(back.dims, cfg.dims);
  EXPECT_EQ(back.tau, cfg.tau);
  EXPECT_EQ(back.trials, 7);
  EXPECT_EQ(back.stencil, Stencil::central4);
  EXPECT_EQ(back.seed, 42U);
  EXPECT_EQ(back.q_method, colored::QMethod::kprime);
  EXPECT_EQ(back.quantiles, cfg.quantiles);

  EXPECT_EQ(io::bench_config_from_json(io::parse_json(R"({"stencil_order": 2})", "c")).stencil, Stencil::central2);
  EXPECT_THROW((void)io::bench_config_from_json(io::parse_json(R"({"trails": 3})", "c")), io::ConfigError);
  EXPECT_THROW((void)io::bench_config_from_json(io::parse_json(R"({"trials": "many"})", "c")), io::ConfigError);
  EXPECT_THROW((void)io::bench_config_from_json(io::parse_json(R"({"stencil": "central6"})", "c")),
               std::invalid_argument);
}

TEST(Tables, Headers) {
  EXPECT_EQ(io::quantile_label(5.0), "p5");
  EXPECT_EQ(io::quantile_label(12.5), "p12_5");
  EXPECT_EQ(io::quantile_label(87.5), "p87_5");

  bench::BenchRecord r;
  r.n = 2;
  r.trial = 1;
  r.seed = 9;
  r.e_K1 = std::nan("");
  r.warnings = {"a, b", "c"};
  const std::string rec = io::records_csv({r});
  EXPECT_EQ(rec.substr(0, rec.find('\n')), "n,trial,seed,e_A,e_Q,e_K0,e_K1,e_K2,e_K3,cond_A,cond_Q,min_re,min_im,warnings");
  EXPECT_NE(rec.find("2,1,9,0,0,0,nan,"), std::string::npos);
  EXPECT_NE(rec.find(",a  b; c\n"), std::string::npos);

  const auto table = bench::percentile_table({r}, {12.5, 50.0});
  const std::string t = io::table_csv(table, {12.5, 50.0});
  EXPECT_EQ(t.substr(0, t.find('\n')), "n,field,p12_5,p50");
  EXPECT_NE(t.find("2,e_K1,nan,nan\n"), std::string::npos);

  const std::string d = io::diagnostics_csv(bench::diagnostics_export({r}));
  EXPECT_EQ(d.substr(0, d.find('\n')), "n,trial,min_re,min_im,e_K,e_Q,cond_Q");
}

TEST_F(TempDir, AtomicWriteReplacesContent) {
  const fs::path p = dir_ / "out.json";
  io::write_atomic(p, "first\n");
  io::write_atomic(p, "second\n");
  EXPECT_EQ(io::read_file(p), "second\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++entries;
  EXPECT_EQ(entries, 1U);
  EXPECT_THROW(io::write_atomic(dir_ / "missing" / "x.txt", "x"), std::runtime_error);
  EXPECT_THROW((void)io::read_file(dir_ / "absent.csv"), io::ConfigError);
}

}  // namespace
}  // namespace colim
