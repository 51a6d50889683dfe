#pragma once

// Exact second-order statistics of the white and colored linear systems, built from
// the augmented 2n-dimensional state (x, eta). These are the reference values every
// estimator is checked against.

#include <utility>
#include <vector>

#include "colim/types.hpp"

namespace colim::oracle {

/// Drift M = [[A, sqrt(2Q)], [0, -I/tau]], noise covariance D = diag(0, I/tau^2) and
/// stationary covariance Sigma solving M Sigma + Sigma M^T + D = 0.
struct AugmentedSystem {
  Matrix M;
  Matrix D;
  Matrix Sigma;
  double tau = 0.0;

  [[nodiscard]] Eigen::Index n() const noexcept { return M.rows() / 2; }
  [[nodiscard]] Matrix Cxx() const { return Sigma.topLeftCorner(n(), n()); }
  /// <x eta^T>
  [[nodiscard]] Matrix Cxeta() const { return Sigma.topRightCorner(n(), n()); }
  [[nodiscard]] Matrix Cetaeta() const { return Sigma.bottomRightCorner(n(), n()); }
};

/// Solves A C + C A^T + 2Q = 0.
[[nodiscard]] Matrix stationary_covariance_white(const Matrix& a, const Matrix& q);

/// Solves A C + C A^T + Q B^T + B Q = 0 with B = (I - tau A)^{-1}, directly in n
/// dimensions. Independent of the augmented construction.
[[nodiscard]] Matrix stationary_covariance_colored(const Matrix& a, const Matrix& q, double tau);

/// Requires tau > 0.
[[nodiscard]] AugmentedSystem build_augmented(const SystemParams& params);

/// K(s) = <x(t+s) x(t)^T> for s >= 0: top-left block of e^{Ms} Sigma.
[[nodiscard]] Matrix analytic_corr(const AugmentedSystem& aug, double s);

/// K(s) = e^{As} C for the white system.
[[nodiscard]] Matrix analytic_corr_white(const Matrix& a, const Matrix& cov, double s);

/// K(k dt) for k = 0..max_lag, using one propagator power per step.
[[nodiscard]] std::vector<Matrix> analytic_lags(const AugmentedSystem& aug, double dt, int max_lag);
[[nodiscard]] std::vector<Matrix> analytic_lags_white(const Matrix& a, const Matrix& cov, double dt,
                                                      int max_lag);

/// K^{(m)}(0) = top-left block of M^m Sigma, projected to the parity of m.
[[nodiscard]] CorrSet analytic_derivs(const AugmentedSystem& aug);

/// S_{jl} = sum_{k,m} p_m^{lk} Q_{jk} / (1 - tau lambda_m), p_m^{lk} = U_{lm} U^{-1}_{mk},
/// assembled from the eigendecomposition of A.
[[nodiscard]] Matrix effective_diffusion(const Matrix& a, const Matrix& q, double tau);

/// || A C + C A^T + S + S^T ||_F
[[nodiscard]] double approx_fdr_residual(const Matrix& a, const Matrix& c, const Matrix& s);

/// Residual norms of the four identities linking (A, Q, tau) to K^{(m)}(0).
struct IdentityResiduals {
  double fdr = 0.0;       // 0 = A C + C A^T + Q B^T + B Q
  double k_prime = 0.0;   // K' = (A C - C A^T + Q B^T - B Q) / 2
  double k_second = 0.0;  // K'' = (A (K' + C/tau) + (K'^T + C/tau) A^T) / 2
  double k_third = 0.0;   // K''' = K'/tau^2 + (A Y - Y A^T) / 2, Y = K'' - C/tau^2
};

[[nodiscard]] IdentityResiduals identity_residuals(const Matrix& a, const Matrix& q, double tau,
                                                   const CorrSet& corr);

struct UcnaPair {
  double a_eff = 0.0;
  double q_eff = 0.0;
};

/// One-dimensional unified colored-noise approximation:
/// a_eff = a / (1 - tau a), q_eff = sqrt(2q) / (1 - tau a).
[[nodiscard]] UcnaPair ucna_1d(double a, double q, double tau);

}  // namespace colim::oracle
