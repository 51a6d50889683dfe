#include "colim/corr.hpp"

#include <stdexcept>
#include <string>

namespace colim::corr {

Matrix corr_at_lag(const TimeSeries& ts, int k) {
  const Eigen::Index samples = ts.count();
  const Eigen::Index last = samples - 1;  // N
  if (k < 0 || k > last - 1) {
    throw std::invalid_argument("corr_at_lag: lag " + std::to_string(k) + " out of range for " +
                                std::to_string(samples) + " samples");
  }
  const Eigen::Index terms = last - k + 1;
  const auto lead = ts.values.middleRows(k, terms);
  const auto base = ts.values.topRows(terms);
  Matrix out = lead.transpose() * base;
  out /= static_cast<double>(terms);
  return out;
}

std::vector<Matrix> corr_lags(const TimeSeries& ts, int max_lag, Exec exec) {
  if (max_lag < 0) throw std::invalid_argument("corr_lags: max_lag must be >= 0");
  if (max_lag > ts.count() - 2) {
    throw std::invalid_argument("corr_lags: series of " + std::to_string(ts.count()) +
                                " samples is too short for lag " + std::to_string(max_lag));
  }
  std::vector<Matrix> out(static_cast<std::size_t>(max_lag) + 1);
  if (exec == Exec::serial) {
    for (int k = 0; k <= max_lag; ++k) out[static_cast<std::size_t>(k)] = corr_at_lag(ts, k);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k <= max_lag; ++k) out[static_cast<std::size_t>(k)] = corr_at_lag(ts, k);
  }
  return out;
}

Matrix increment_moment(const TimeSeries& ts, int k) {
  const Eigen::Index last = ts.count() - 1;
  if (k < 1 || k > last - 1) {
    throw std::invalid_argument("increment_moment: lag " + std::to_string(k) + " out of range for " +
                                std::to_string(ts.count()) + " samples");
  }
  const Eigen::Index terms = last - k + 1;
  const Matrix inc = ts.values.middleRows(k, terms) - ts.values.topRows(terms);
  Matrix out = inc.transpose() * inc;
  out /= static_cast<double>(terms);
  return out;
}

std::vector<Matrix> increment_lags(const TimeSeries& ts, int max_lag, Exec exec) {
  std::vector<Matrix> out = corr_lags(ts, max_lag, exec);
  const Matrix k0 = symmetric_part(out[0]);
  auto one = [&](int k) {
    Matrix& m = out[static_cast<std::size_t>(k)];
    m = k0 - 0.5 * symmetric_part(increment_moment(ts, k)) + skew_part(m);
  };
  if (exec == Exec::serial) {
    for (int k = 1; k <= max_lag; ++k) one(k);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 1; k <= max_lag; ++k) one(k);
  }
  return out;
}

Matrix project_symmetry(const Matrix& m, Parity parity) {
  if (!is_square(m)) throw std::invalid_argument("project_symmetry: matrix must be square");
  return parity == Parity::even ? symmetric_part(m) : skew_part(m);
}

TimeSeries demean(const TimeSeries& ts) {
  TimeSeries out = ts;
  const Eigen::RowVectorXd mean = ts.values.colwise().mean();
  out.values.rowwise() -= mean;
  return out;
}

CorrSet derivatives_from_lags(std::span<const Matrix> lags, double dt, Stencil stencil, CorrSource source) {
  const int width = stencil_width(stencil);
  if (static_cast<int>(lags.size()) < width + 1) {
    throw std::invalid_argument("derivatives_from_lags: stencil " + std::string(to_string(stencil)) + " needs " +
                                std::to_string(width + 1) + " lags");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("derivatives_from_lags: dt must be > 0");

  const double h = dt;
  const double h2 = h * h;
  const double h3 = h2 * h;
  auto plus = [&](int k) -> const Matrix& { return lags[static_cast<std::size_t>(k)]; };
  auto minus = [&](int k) -> Matrix { return lags[static_cast<std::size_t>(k)].transpose(); };

  CorrSet out;
  out.dt = dt;
  out.stencil = stencil;
  out.source = source;
  out.K0 = symmetric_part(plus(0));

  switch (stencil) {
    case Stencil::central2:
      out.K1 = (plus(1) - minus(1)) / (2.0 * h);
      out.K2 = (plus(1) - 2.0 * plus(0) + minus(1)) / h2;
      out.K3 = (plus(2) - 2.0 * plus(1) + 2.0 * minus(1) - minus(2)) / (2.0 * h3);
      break;
    case Stencil::central4:
      out.K1 = (-plus(2) + 8.0 * plus(1) - 8.0 * minus(1) + minus(2)) / (12.0 * h);
      out.K2 = (-plus(2) + 16.0 * plus(1) - 30.0 * plus(0) + 16.0 * minus(1) - minus(2)) / (12.0 * h2);
      out.K3 = (-plus(3) + 8.0 * plus(2) - 13.0 * plus(1) + 13.0 * minus(1) - 8.0 * minus(2) + minus(3)) /
               (8.0 * h3);
      break;
    case Stencil::cusp2: {
      // Even part E(s) = E0 + e2 s^2/2 + e3 |s|^3/6 + ...; the |s|^3 term is the jump
      // in K''' at the origin. Fitting it out leaves an O(h^2) error in e2.
      const Matrix e0 = symmetric_part(plus(0));
      const Matrix e1 = symmetric_part(plus(1));
      const Matrix e2 = symmetric_part(plus(2));
      out.K2 = (8.0 * e1 - e2 - 7.0 * e0) / (2.0 * h2);
      // Odd part O(s) = o1 s + o3 s^3/6 + o4 s|s|^3/24 + ...; exact fit on lags 1..3.
      const Matrix o1 = skew_part(plus(1));
      const Matrix o2 = skew_part(plus(2));
      const Matrix o3 = skew_part(plus(3));
      out.K1 = (108.0 * o1 - 27.0 * o2 + 4.0 * o3) / (66.0 * h);
      out.K3 = (-57.0 * o1 + 39.0 * o2 - 7.0 * o3) / (11.0 * h3);
      break;
    }
  }

  out.K1 = skew_part(out.K1);
  out.K2 = symmetric_part(out.K2);
  out.K3 = skew_part(out.K3);
  for (int k = 0; k <= width; ++k) out.lagged.emplace(k, plus(k));
  return out;
}

CorrSet estimate_derivatives(const TimeSeries& ts, const EstimateOptions& opts) {
  ts.validate();
  const int width = stencil_width(opts.stencil);
  if (ts.count() < width + 2) {
    throw std::invalid_argument("estimate_derivatives: insufficient samples for stencil " +
                                std::string(to_string(opts.stencil)));
  }
  const TimeSeries centered = opts.subtract_mean ? demean(ts) : ts;
  const std::vector<Matrix> lags = opts.lags == LagEstimator::increments ? increment_lags(centered, width, opts.exec)
                                                                         : corr_lags(centered, width, opts.exec);
  return derivatives_from_lags(lags, ts.dt, opts.stencil, CorrSource::empirical);
}

}  // namespace colim::corr
