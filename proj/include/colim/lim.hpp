#pragma once

// Classical linear inverse model for white-noise driven data:
//   A = log(K(rho) K(0)^{-1}) / rho,  Q = -(A K(0) + K(0) A^T) / 2.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colim/corr.hpp"
#include "colim/types.hpp"

namespace colim::lim {

inline constexpr double kDefaultRho = 0.5;

struct LimResult {
  Matrix A_hat;
  Matrix Q_hat;
  double rho = 0.0;
  std::vector<std::string> warnings;
};

/// Core inversion on given K(0), K(rho). Throws SingularSystemError for singular K(0)
/// and BranchCutError when rho is too large for the rotation rate of the data.
[[nodiscard]] LimResult lim_from_corr(const Matrix& k0, const Matrix& k_rho, double rho);

/// Algorithm on a series with lag index k >= 1 (rho = k dt). The series mean is removed
/// first unless subtract_mean is false.
[[nodiscard]] LimResult lim_estimate(const TimeSeries& ts, int k, bool subtract_mean = true);

struct SweepEntry {
  int k = 0;
  double rho = 0.0;
  std::optional<Matrix> A_hat;  // empty when the estimate failed at this lag
  std::string error;
};

/// lim_estimate at every lag k_min..k_max. Per-lag failures become entries with an error.
[[nodiscard]] std::vector<SweepEntry> lim_sweep(const TimeSeries& ts, int k_min, int k_max,
                                                corr::Exec exec = corr::Exec::parallel,
                                                bool subtract_mean = true);

/// Same sweep on given lag values lags[k] = K(k dt), e.g. from the analytic oracle.
[[nodiscard]] std::vector<SweepEntry> lim_sweep_lags(std::span<const Matrix> lags, double dt, int k_min,
                                                     int k_max, corr::Exec exec = corr::Exec::parallel);

}  // namespace colim::lim
