#pragma once

#include <span>
#include <vector>

#include "colim/types.hpp"

namespace colim::corr {

enum class Parity { even, odd };

/// Execution policy for the lag kernel. `serial` is the reference path; both
/// produce bit-identical results because each lag is an independent reduction.
enum class Exec { serial, parallel };

/// sum_{t=0}^{N-k} x(t+k) x(t)^T / (N-k+1), with N+1 samples. Requires k <= N-1.
[[nodiscard]] Matrix corr_at_lag(const TimeSeries& ts, int k);

/// corr_at_lag for k = 0..max_lag.
[[nodiscard]] std::vector<Matrix> corr_lags(const TimeSeries& ts, int max_lag, Exec exec = Exec::parallel);

/// (M + M^T)/2 for even, (M - M^T)/2 for odd.
[[nodiscard]] Matrix project_symmetry(const Matrix& m, Parity parity);

/// Copy of the series with its sample mean removed.
[[nodiscard]] TimeSeries demean(const TimeSeries& ts);

/// sum (x(t+k) - x(t)) (x(t+k) - x(t))^T / (N-k+1), the matrix variogram at lag k.
[[nodiscard]] Matrix increment_moment(const TimeSeries& ts, int k);

/// Lag values with the even part taken from increments, sym K(k) = K(0) - V(k)/2, and
/// the odd part from corr_at_lag. Identical to corr_lags in expectation, but the even
/// differences K(k) - K(0) no longer carry the O(|x|^2 / N) end-effects of separate
/// averages, which dominate K'' once divided by dt^2.
[[nodiscard]] std::vector<Matrix> increment_lags(const TimeSeries& ts, int max_lag, Exec exec = Exec::parallel);

enum class LagEstimator { literal, increments };

struct EstimateOptions {
  Stencil stencil = kDefaultStencil;
  bool subtract_mean = true;
  LagEstimator lags = LagEstimator::increments;
  Exec exec = Exec::parallel;
};

/// K^{(m)}(0), m = 0..3, from lags 0..stencil_width; negative lags use K(-s) = K(s)^T.
[[nodiscard]] CorrSet estimate_derivatives(const TimeSeries& ts, const EstimateOptions& opts = {});

/// Applies a stencil to given lag values lags[k] = K(k dt). Used for both empirical
/// lags and exact analytic ones.
[[nodiscard]] CorrSet derivatives_from_lags(std::span<const Matrix> lags, double dt, Stencil stencil,
                                            CorrSource source = CorrSource::empirical);

}  // namespace colim::corr
