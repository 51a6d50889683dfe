#include <cmath>

#include <gtest/gtest.h>

#include "colim/corr.hpp"
#include "colim/oracle.hpp"
#include "colim/sde.hpp"
#include "test_util.hpp"

namespace colim {
namespace {

SystemParams scalar_system(double a, double q, double tau) {
  SystemParams p;
  p.A = Matrix::Constant(1, 1, a);
  p.Q = Matrix::Constant(1, 1, q);
  p.tau = tau;
  return p;
}

SystemParams rotating_system(double tau) {
  SystemParams p;
  p.A.resize(2, 2);
  p.A << -0.6, 1.0, -0.8, -0.9;
  p.Q.resize(2, 2);
  p.Q << 1.0, 0.3, 0.3, 0.6;
  p.tau = tau;
  return p;
}

TEST(Simulate, LayoutAndTimes) {
  sde::SimConfig cfg;
  cfg.t1 = 10.0;
  const TimeSeries ts = sde::simulate_white(scalar_system(-1.0, 1.0, 0.0), cfg);
  EXPECT_EQ(ts.count(), 1001);
  EXPECT_DOUBLE_EQ(ts.dt, 0.01);
  EXPECT_DOUBLE_EQ(ts.start_time, 0.0);
}

TEST(Simulate, DeterministicPerSeedAndStream) {
  sde::SimConfig cfg;
  cfg.t1 = 5.0;
  cfg.seed = 99;
  const SystemParams p = rotating_system(0.1);
  const Matrix a = sde::simulate_colored(p, cfg).x.values;
  const Matrix b = sde::simulate_colored(p, cfg).x.values;
  EXPECT_EQ(a, b);
  cfg.stream = 1;
  EXPECT_NE(a, sde::simulate_colored(p, cfg).x.values);
}

TEST(Simulate, NoiselessHeunTracksExponential) {
  SystemParams p = rotating_system(0.0);
  p.Q.setZero();
  sde::SimConfig cfg;
  cfg.t1 = 2.0;
  cfg.x0 = Vector::Ones(2);
  cfg.burn_in_time = 0.0;
  const Vector exact = matrix_exp(p.A, 2.0) * Vector::Ones(2);

  const TimeSeries heun = sde::simulate_white(p, cfg);
  const double heun_err = (heun.values.bottomRows(1).transpose() - exact).norm();
  EXPECT_LT(heun_err, 1e-5);
  EXPECT_GT(heun_err, 1e-12);

  cfg.scheme = sde::Scheme::exact_exponential;
  const TimeSeries ex = sde::simulate_white(p, cfg);
  EXPECT_LT((ex.values.bottomRows(1).transpose() - exact).norm(), 1e-12);
}

TEST(Simulate, HeunGlobalErrorIsSecondOrder) {
  SystemParams p = rotating_system(0.0);
  p.Q.setZero();
  const Vector exact = matrix_exp(p.A, 1.0) * Vector::Ones(2);
  double errs[2];
  int i = 0;
  for (double dt : {0.02, 0.01}) {
    sde::SimConfig cfg;
    cfg.dt = dt;
    cfg.t1 = 1.0;
    cfg.subsample_every = 1;
    cfg.x0 = Vector::Ones(2);
    cfg.burn_in_time = 0.0;
    errs[i++] = (sde::simulate_white(p, cfg).values.bottomRows(1).transpose() - exact).norm();
  }
  EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.2);
}

TEST(Simulate, WhiteStationaryCovariance) {
  const SystemParams p = rotating_system(0.0);
  sde::SimConfig cfg;
  cfg.t1 = 4000.0;
  cfg.seed = 3;
  const TimeSeries ts = sde::simulate_white(p, cfg);
  const Matrix c = oracle::stationary_covariance_white(p.A, p.Q);
  EXPECT_LT(testing::rel(corr::corr_at_lag(corr::demean(ts), 0), c), 0.1);
}

TEST(Simulate, ColoredStationaryStatistics) {
  const SystemParams p = scalar_system(-1.0, 1.0, 0.05);
  sde::SimConfig cfg;
  cfg.t1 = 2000.0;
  cfg.seed = 4;
  const sde::ColoredTrajectory traj = sde::simulate_colored(p, cfg);
  const oracle::AugmentedSystem aug = oracle::build_augmented(p);
  const CorrSet est = corr::estimate_derivatives(traj.x);
  EXPECT_NEAR(est.K0(0, 0), aug.Cxx()(0, 0), 0.1 * aug.Cxx()(0, 0));
  EXPECT_NEAR(est.K2(0, 0) / est.K0(0, 0), -20.0, 1.0);
  const TimeSeries eta = corr::demean(traj.eta);
  EXPECT_NEAR(corr::corr_at_lag(eta, 0)(0, 0), 10.0, 0.5);
}

TEST(Simulate, ExplicitInitialStateUsesDefaultBurnIn) {
  const SystemParams p = scalar_system(-2.0, 1.0, 0.0);
  sde::SimConfig cfg;
  cfg.t1 = 20.0;
  cfg.x0 = Vector::Constant(1, 50.0);
  const TimeSeries ts = sde::simulate_white(p, cfg);
  EXPECT_DOUBLE_EQ(ts.start_time, 10.0);
  EXPECT_LT(std::abs(ts.values(0, 0)), 5.0);
}

TEST(Simulate, RejectsBadInput) {
  sde::SimConfig cfg;
  EXPECT_THROW((void)sde::simulate_white(scalar_system(1.0, 1.0, 0.0), cfg), std::invalid_argument);
  EXPECT_THROW((void)sde::simulate_white(scalar_system(-1.0, 1.0, 0.1), cfg), std::invalid_argument);
  EXPECT_THROW((void)sde::simulate_colored(scalar_system(-1.0, 1.0, 0.0), cfg), std::invalid_argument);
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW((void)sde::parse_scheme("euler"), std::invalid_argument);
  EXPECT_EQ(sde::parse_scheme("exact"), sde::Scheme::exact_exponential);
}

TEST(SeriesOps, DiscardBurnInAndSubsample) {
  TimeSeries ts;
  ts.dt = 0.5;
  ts.start_time = 1.0;
  ts.values = Vector::LinSpaced(10, 0.0, 9.0);
  const TimeSeries cut = sde::discard_burn_in(ts, 1.2);
  EXPECT_EQ(cut.count(), 7);
  EXPECT_DOUBLE_EQ(cut.start_time, 2.5);
  EXPECT_DOUBLE_EQ(cut.values(0, 0), 3.0);
  EXPECT_THROW((void)sde::discard_burn_in(ts, 4.5), std::invalid_argument);

  const TimeSeries sub = sde::subsample(ts, 3);
  EXPECT_EQ(sub.count(), 4);
  EXPECT_DOUBLE_EQ(sub.dt, 1.5);
  EXPECT_DOUBLE_EQ(sub.values(3, 0), 9.0);
}

TEST(DefaultBurnIn, TwentyEFoldings) {
  EXPECT_DOUBLE_EQ(sde::default_burn_in(Matrix::Constant(1, 1, -0.5)), 40.0);
}

}  // namespace
}  // namespace colim
