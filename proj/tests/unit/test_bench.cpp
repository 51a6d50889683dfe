#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "colim/bench.hpp"
#include "test_util.hpp"

namespace colim {
namespace {

using bench::BenchRecord;

TEST(GenSystem, OneDimensionalRanges) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SystemParams s = bench::gen_system(1, seed);
    EXPECT_GE(s.A(0, 0), -1.2);
    EXPECT_LE(s.A(0, 0), -0.2);
    EXPECT_GE(s.Q(0, 0), 0.2);
    EXPECT_LE(s.Q(0, 0), 1.2);
  }
}

TEST(GenSystem, StableSpdAndDeterministic) {
  for (int n : {2, 3, 5, 8}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const SystemParams s = bench::gen_system(n, seed);
      ASSERT_EQ(s.A.rows(), n);
      EXPECT_TRUE(is_stable(s.A));
      EXPECT_TRUE(is_symmetric(s.Q));
      EXPECT_TRUE(is_positive_definite(s.Q, 1e-12)) << "n=" << n << " seed=" << seed;
      EXPECT_NO_THROW(s.validate());
      const SystemParams again = bench::gen_system(n, seed);
      EXPECT_EQ(s.A, again.A);
      EXPECT_EQ(s.Q, again.Q);
    }
  }
  EXPECT_NE(bench::gen_system(3, 1).A, bench::gen_system(3, 2).A);
  EXPECT_THROW((void)bench::gen_system(0, 1), std::invalid_argument);
}

TEST(GenSystem, EigenvaluesAreReflectedNotShifted) {
  // Reflection keeps |Re| and Im, so eigenvalues spread over a Gaussian-sized range.
  double max_im = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) max_im = std::max(max_im, testing::max_imag_eigenvalue(bench::gen_system(5, seed).A));
  EXPECT_GT(max_im, 0.5);
}

TEST(RelError, Examples) {
  const Matrix truth = Matrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ(bench::rel_error(truth, truth), 0.0);
  EXPECT_NEAR(bench::rel_error(1.1 * truth, truth), 0.1, 1e-15);
  Matrix est = truth;
  est(0, 1) = 1.0;
  EXPECT_NEAR(bench::rel_error(est, truth), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW((void)bench::rel_error(truth, Matrix::Zero(2, 2)), std::invalid_argument);
}

TEST(Quantile, LinearInterpolation) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_DOUBLE_EQ(bench::quantile_sorted(v, 50.0), 50.5);
  EXPECT_DOUBLE_EQ(bench::quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(bench::quantile_sorted(v, 100.0), 100.0);
  EXPECT_DOUBLE_EQ(bench::quantile_sorted(v, 25.0), 25.75);
  EXPECT_DOUBLE_EQ(bench::quantile_sorted({7.0}, 12.5), 7.0);
  EXPECT_TRUE(std::isnan(bench::quantile_sorted({}, 50.0)));
}

BenchRecord record(int n, int trial, double e) {
  BenchRecord r;
  r.n = n;
  r.trial = trial;
  r.e_A = r.e_Q = r.e_K0 = e;
  r.e_K1 = r.e_K2 = r.e_K3 = std::nan("");
  r.cond_Q = 2.0 * e * 100.0;
  r.min_re = e;
  return r;
}

TEST(PercentileTable, ShapeAndMissingCells) {
  std::vector<BenchRecord> recs;
  for (int t = 0; t < 5; ++t) recs.push_back(record(3, t, 0.01 * (t + 1)));
  recs.push_back(record(1, 0, 0.5));
  BenchRecord bad = record(3, 5, 99.0);
  bad.failed = true;
  recs.push_back(bad);

  const auto table = bench::percentile_table(recs, {25.0, 50.0});
  ASSERT_EQ(table.size(), 2 * bench::kErrorFields.size());
  EXPECT_EQ(table[0].n, 3);
  EXPECT_EQ(table[0].field, "e_A");
  EXPECT_EQ(table[0].count, 5);
  EXPECT_NEAR(table[0].values[1], 0.03, 1e-15);
  EXPECT_NEAR(table[0].values[0], 0.02, 1e-15);
  EXPECT_EQ(table[3].field, "e_K1");
  EXPECT_EQ(table[3].count, 0);
  EXPECT_TRUE(std::isnan(table[3].values[0]));
  EXPECT_EQ(table[6].n, 1);
  EXPECT_DOUBLE_EQ(table[6].values[0], 0.5);
  EXPECT_NEAR(bench::median_of(recs, 3, "e_Q"), 0.03, 1e-15);
}

TEST(PercentileTable, SingleRecord) {
  const auto table = bench::percentile_table({record(2, 0, 0.1)});
  ASSERT_EQ(table.size(), bench::kErrorFields.size());
  for (double v : table[0].values) EXPECT_DOUBLE_EQ(v, 0.1);
}

TEST(Spearman, RanksAndTies) {
  EXPECT_NEAR(bench::spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(bench::spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_NEAR(bench::spearman({1, 2, 3, 4}, {1, 8, 27, 64}), 1.0, 1e-15);
  // Ties get average ranks: x ranks 1, 2.5, 2.5, 4 against y ranks 1..4.
  const double r = bench::spearman({1, 2, 2, 3}, {1, 2, 3, 4});
  EXPECT_NEAR(r, 4.5 / std::sqrt(4.5 * 5.0), 1e-12);
  EXPECT_TRUE(std::isnan(bench::spearman({1, 2}, {1, 2})));
  EXPECT_NEAR(bench::spearman({1, 2, std::nan(""), 3}, {3, 2, 0, 1}), -1.0, 1e-15);
  EXPECT_THROW((void)bench::spearman({1}, {1, 2}), std::invalid_argument);
}

TEST(Diagnostics, Counts) {
  std::vector<BenchRecord> recs{record(2, 0, 0.05), record(2, 1, 0.2), record(2, 2, 0.3)};
  recs[1].e_Q = 0.01;
  BenchRecord bad = record(2, 3, 0.0);
  bad.failed = true;
  recs.push_back(bad);
  const auto d = bench::diagnostics_export(recs, 20.0);
  ASSERT_EQ(d.rows.size(), 4U);
  ASSERT_EQ(d.summary.size(), 1U);
  const auto& s = d.summary[0];
  EXPECT_EQ(s.records, 4);
  EXPECT_EQ(s.failed, 1);
  EXPECT_EQ(s.ek_high, 2);
  EXPECT_EQ(s.ek_high_eq_high, 1);
  EXPECT_EQ(s.condq_high, 2);  // cond_Q = 40 and 60
  EXPECT_EQ(s.condq_high_eq_high, 1);
  EXPECT_NEAR(s.spearman_min_re_ek, 1.0, 1e-15);
}

bench::BenchConfig small_config(double tau) {
  bench::BenchConfig cfg;
  cfg.dims = {1, 2};
  cfg.tau = tau;
  cfg.t1 = 20.0;
  cfg.trials = 3;
  cfg.rho_lag = 10;
  cfg.seed = 5;
  return cfg;
}

TEST(RunBatch, SerialEqualsParallel) {
  for (double tau : {0.0, 0.1}) {
    const auto cfg = small_config(tau);
    int calls = 0;
    const auto s = bench::run_batch(cfg, corr::Exec::serial, [&](int done, int total) {
      ++calls;
      EXPECT_EQ(total, 6);
      EXPECT_LE(done, total);
    });
    EXPECT_EQ(calls, 6);
    const auto p = bench::run_batch(cfg, corr::Exec::parallel);
    ASSERT_EQ(s.size(), 6U);
    ASSERT_EQ(p.size(), 6U);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s[i].n, p[i].n);
      EXPECT_EQ(s[i].trial, p[i].trial);
      EXPECT_EQ(s[i].seed, p[i].seed);
      EXPECT_EQ(s[i].e_A, p[i].e_A);
      EXPECT_EQ(s[i].e_Q, p[i].e_Q);
      EXPECT_FALSE(s[i].failed);
    }
    EXPECT_EQ(s[0].n, 1);
    EXPECT_EQ(s[3].n, 2);
    EXPECT_EQ(s[4].trial, 1);
  }
}

TEST(RunBatch, WhiteAndColoredRecordFields) {
  const auto white = bench::run_trial(small_config(0.0), 2, 0);
  EXPECT_TRUE(std::isnan(white.e_K1));
  EXPECT_TRUE(std::isnan(white.cond_Q));
  EXPECT_TRUE(std::isfinite(white.e_A));
  EXPECT_GE(white.cond_A, 1.0);

  const auto colored = bench::run_trial(small_config(0.1), 1, 0);
  EXPECT_EQ(colored.e_K1, 0.0);
  EXPECT_EQ(colored.e_K3, 0.0);
  EXPECT_TRUE(std::isfinite(colored.e_K2));
  EXPECT_TRUE(std::isfinite(colored.cond_Q));
  EXPECT_EQ(colored.seed, bench::trial_seed(5, 1, 0));
}

TEST(RunBatch, FailuresAreMarkedNotThrown) {
  auto cfg = small_config(0.0);
  cfg.t1 = 0.05;  // fewer samples than the lag needs
  const auto r = bench::run_trial(cfg, 2, 0);
  EXPECT_TRUE(r.failed);
  EXPECT_TRUE(std::isnan(r.e_A));
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.warnings.back().rfind("failed: ", 0), 0U);
}

TEST(BenchConfig, Validation) {
  bench::BenchConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_DOUBLE_EQ(cfg.sample_dt(), 0.01);
  auto bad = cfg;
  bad.dims = {};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.quantiles = {50.0, 25.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.quantiles = {100.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.tau = -0.1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.trials = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace colim
