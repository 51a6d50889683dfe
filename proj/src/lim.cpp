#include "colim/lim.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "colim/errors.hpp"

namespace colim::lim {

LimResult lim_from_corr(const Matrix& k0, const Matrix& k_rho, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("lim_from_corr: rho must be > 0");
  if (!is_square(k0) || k0.rows() != k_rho.rows() || k0.cols() != k_rho.cols()) {
    throw std::invalid_argument("lim_from_corr: K(0) and K(rho) must be square and of equal size");
  }
  const Matrix c = symmetric_part(k0);
  Eigen::FullPivLU<Matrix> lu(c);
  if (!lu.isInvertible() || !(lu.rcond() > 1e-15)) {
    const double rc = lu.rcond();
    throw SingularSystemError("lim_from_corr: K(0) is singular",
                              rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
  }
  // G = K(rho) K(0)^{-1}  <=>  G^T = K(0)^{-1} K(rho)^T for symmetric K(0).
  const Matrix propagator = lu.solve(k_rho.transpose()).transpose();

  LimResult out;
  out.rho = rho;
  out.A_hat = matrix_log_principal(propagator) / rho;
  const Matrix ac = out.A_hat * c;
  out.Q_hat = -0.5 * (ac + ac.transpose());
  if (!is_positive_definite(out.Q_hat)) {
    out.warnings.emplace_back("Q_hat is not positive definite");
  }
  if (!is_stable(out.A_hat)) {
    out.warnings.emplace_back("A_hat is not stable");
  }
  return out;
}

LimResult lim_estimate(const TimeSeries& ts, int k, bool subtract_mean) {
  ts.validate();
  if (k < 1) throw std::invalid_argument("lim_estimate: lag index must be >= 1");
  const TimeSeries centered = subtract_mean ? corr::demean(ts) : ts;
  const Matrix k0 = corr::corr_at_lag(centered, 0);
  const Matrix k_rho = corr::corr_at_lag(centered, k);
  return lim_from_corr(k0, k_rho, k * ts.dt);
}

std::vector<SweepEntry> lim_sweep_lags(std::span<const Matrix> lags, double dt, int k_min, int k_max,
                                       corr::Exec exec) {
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("lim_sweep: need 1 <= k_min <= k_max");
  if (static_cast<std::size_t>(k_max) >= lags.size()) {
    throw std::invalid_argument("lim_sweep: k_max exceeds the available lags");
  }
  const int count = k_max - k_min + 1;
  std::vector<SweepEntry> out(static_cast<std::size_t>(count));
  auto one = [&](int i) {
    SweepEntry& e = out[static_cast<std::size_t>(i)];
    e.k = k_min + i;
    e.rho = e.k * dt;
    try {
      e.A_hat = lim_from_corr(lags[0], lags[static_cast<std::size_t>(e.k)], e.rho).A_hat;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  };
  if (exec == corr::Exec::serial) {
    for (int i = 0; i < count; ++i) one(i);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) one(i);
  }
  return out;
}

std::vector<SweepEntry> lim_sweep(const TimeSeries& ts, int k_min, int k_max, corr::Exec exec,
                                  bool subtract_mean) {
  ts.validate();
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("lim_sweep: need 1 <= k_min <= k_max");
  const TimeSeries centered = subtract_mean ? corr::demean(ts) : ts;
  const std::vector<Matrix> lags = corr::corr_lags(centered, k_max, exec);
  return lim_sweep_lags(lags, ts.dt, k_min, k_max, exec);
}

}  // namespace colim::lim
