#pragma once

// Colored linear inverse model. With X = K'(0) + K(0)/tau and Y = K''(0) - K(0)/tau^2,
// the dynamical matrix solves the stacked linear system
//   K''(0)                = (A X + X^T A^T) / 2
//   K'''(0) - K'(0)/tau^2 = (A Y - Y A^T) / 2
// and Q then follows from either the generalized fluctuation-dissipation relation
//   0 = A K(0) + K(0) A^T + Q B^T + B Q,   B = (I - tau A)^{-1}
// or the first-derivative identity K'(0) = A K(0) + Q B^T.
// tau is an input; it is never estimated.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "colim/corr.hpp"
#include "colim/types.hpp"

namespace colim::colored {

enum class QMethod { automatic, fdr, kprime };

[[nodiscard]] std::string_view to_string(QMethod m) noexcept;
[[nodiscard]] QMethod parse_q_method(std::string_view name);

/// fdr for n <= 6 and tau < 0.5, kprime otherwise, unless the caller fixed one.
[[nodiscard]] QMethod resolve_q_method(QMethod requested, Eigen::Index n, double tau) noexcept;

inline constexpr double kDefaultCondQThreshold = 20.0;

struct ASolve {
  Matrix A;
  double condition = 1.0;  // 2-norm condition of the stacked system
};

struct QSolve {
  Matrix Q;
  double condition = 1.0;
  double asymmetry = 0.0;  // ||skew(Q_raw)||_F, kprime only
};

/// Least-squares solve of the stacked 2n^2 x n^2 system. When use_third_derivative is
/// false only the K'' block is used and A is sought among symmetric matrices, the
/// negative definite case.
/// Throws SingularSystemError when the system is numerically rank deficient.
[[nodiscard]] ASolve solve_A(const CorrSet& corr, double tau, bool use_third_derivative = true);

/// Generalized FDR, solved for symmetric Q over the n(n+1)/2 upper-triangle unknowns.
[[nodiscard]] QSolve solve_Q_fdr(const Matrix& a_hat, const Matrix& k0, double tau);

/// Q_raw = (K'(0) - A K(0)) B^{-T}, returned as its symmetric part.
[[nodiscard]] QSolve solve_Q_kprime(const Matrix& a_hat, const Matrix& k0, const Matrix& k1, double tau);

struct ColoredOptions {
  QMethod q_method = QMethod::automatic;
  Stencil stencil = kDefaultStencil;
  bool subtract_mean = true;
  bool negative_definite = false;  // drop the K''' block
  double cond_q_threshold = kDefaultCondQThreshold;
  corr::Exec exec = corr::Exec::parallel;
};

struct EstimationReport {
  Matrix A_hat;
  Matrix Q_hat;
  Matrix B_hat;
  double tau = 0.0;
  QMethod q_method = QMethod::fdr;  // the method actually used
  Stencil stencil = kDefaultStencil;
  double cond_A = 1.0;
  double cond_Q = 1.0;
  std::map<std::string, double> residuals;
  std::vector<std::string> warnings;
};

/// Runs the estimator on a prepared correlation set.
[[nodiscard]] EstimationReport colored_lim_from_corr(const CorrSet& corr, double tau,
                                                     const ColoredOptions& opts = {});

/// estimate_derivatives -> solve_A -> resolvent -> Q solver.
[[nodiscard]] EstimationReport colored_lim_estimate(const TimeSeries& ts, double tau,
                                                    const ColoredOptions& opts = {});

}  // namespace colim::colored
