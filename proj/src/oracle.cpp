#include "colim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "colim/errors.hpp"

namespace colim::oracle {

namespace {

// Residual of an identity lhs = rhs, scaled by the size of its terms so the
// tolerance is meaningful for both small and stiff (tiny tau) systems.
double scaled_residual(const Matrix& lhs, const Matrix& rhs, double term_scale) {
  return (lhs - rhs).norm() / std::max({1.0, lhs.norm(), rhs.norm(), term_scale});
}

}  // namespace

Matrix stationary_covariance_white(const Matrix& a, const Matrix& q) {
  return symmetric_part(solve_sylvester_like(a, a.transpose(), -2.0 * q));
}

Matrix stationary_covariance_colored(const Matrix& a, const Matrix& q, double tau) {
  const Matrix b = resolvent(a, tau);
  const Matrix rhs = -(q * b.transpose() + b * q);
  return symmetric_part(solve_sylvester_like(a, a.transpose(), rhs));
}

AugmentedSystem build_augmented(const SystemParams& params) {
  params.validate();
  if (!(params.tau > 0.0)) throw std::invalid_argument("build_augmented: tau must be > 0");
  const Eigen::Index n = params.dim();
  const double tau = params.tau;

  AugmentedSystem aug;
  aug.tau = tau;
  aug.M = Matrix::Zero(2 * n, 2 * n);
  aug.M.topLeftCorner(n, n) = params.A;
  aug.M.topRightCorner(n, n) = matrix_sqrt_spd(2.0 * params.Q);
  aug.M.bottomRightCorner(n, n) = -Matrix::Identity(n, n) / tau;
  aug.D = Matrix::Zero(2 * n, 2 * n);
  aug.D.bottomRightCorner(n, n) = Matrix::Identity(n, n) / (tau * tau);

  aug.Sigma = symmetric_part(solve_sylvester_like(aug.M, aug.M.transpose(), -aug.D));
  return aug;
}

Matrix analytic_corr(const AugmentedSystem& aug, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("analytic_corr: lag must be >= 0");
  const Eigen::Index n = aug.n();
  return (matrix_exp(aug.M, s) * aug.Sigma).topLeftCorner(n, n);
}

Matrix analytic_corr_white(const Matrix& a, const Matrix& cov, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("analytic_corr_white: lag must be >= 0");
  return matrix_exp(a, s) * cov;
}

std::vector<Matrix> analytic_lags(const AugmentedSystem& aug, double dt, int max_lag) {
  if (max_lag < 0 || !(dt > 0.0)) throw std::invalid_argument("analytic_lags: need dt > 0, max_lag >= 0");
  const Eigen::Index n = aug.n();
  const Matrix step = matrix_exp(aug.M, dt);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(max_lag) + 1);
  Matrix z = aug.Sigma;
  for (int k = 0; k <= max_lag; ++k) {
    out.emplace_back(z.topLeftCorner(n, n));
    z = step * z;
  }
  return out;
}

std::vector<Matrix> analytic_lags_white(const Matrix& a, const Matrix& cov, double dt, int max_lag) {
  if (max_lag < 0 || !(dt > 0.0)) throw std::invalid_argument("analytic_lags_white: need dt > 0, max_lag >= 0");
  const Matrix step = matrix_exp(a, dt);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(max_lag) + 1);
  Matrix z = cov;
  for (int k = 0; k <= max_lag; ++k) {
    out.push_back(z);
    z = step * z;
  }
  return out;
}

CorrSet analytic_derivs(const AugmentedSystem& aug) {
  const Eigen::Index n = aug.n();
  CorrSet out;
  out.source = CorrSource::analytic;
  Matrix z = aug.Sigma;
  Matrix blocks[4];
  for (int m = 0; m < 4; ++m) {
    blocks[m] = z.topLeftCorner(n, n);
    z = aug.M * z;
  }
  out.K0 = symmetric_part(blocks[0]);
  out.K1 = skew_part(blocks[1]);
  out.K2 = symmetric_part(blocks[2]);
  out.K3 = skew_part(blocks[3]);
  return out;
}

Matrix effective_diffusion(const Matrix& a, const Matrix& q, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("effective_diffusion: tau must be >= 0");
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw std::invalid_argument("effective_diffusion: Q must match A");
  }
  const EigenDecomposition eig = eigen_decompose(a);
  const Eigen::Index n = a.rows();
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index m = 0; m < n; ++m) {
          const std::complex<double> p = eig.vectors(l, m) * eig.inverse_vectors(m, k);
          acc += p * q(j, k) / (1.0 - tau * eig.values(m));
        }
      }
      s(j, l) = acc;
    }
  }
  const Matrix real = s.real();
  const double residue = s.imag().norm();
  if (residue > 1e-8 * std::max(1.0, real.norm())) {
    throw DecompositionError("effective_diffusion: imaginary residue " + std::to_string(residue));
  }
  return real;
}

double approx_fdr_residual(const Matrix& a, const Matrix& c, const Matrix& s) {
  return (a * c + c * a.transpose() + s + s.transpose()).norm();
}

IdentityResiduals identity_residuals(const Matrix& a, const Matrix& q, double tau, const CorrSet& corr) {
  if (!(tau > 0.0)) throw std::invalid_argument("identity_residuals: tau must be > 0");
  const Matrix& c = corr.K0;
  const Matrix b = resolvent(a, tau);
  const Matrix ac = a * c;
  const Matrix qbt = q * b.transpose();

  IdentityResiduals r;
  r.fdr = scaled_residual(ac + ac.transpose(), -(qbt + qbt.transpose()), std::max(ac.norm(), qbt.norm()));

  const Matrix k1_rhs = 0.5 * (ac - ac.transpose() + qbt - qbt.transpose());
  r.k_prime = scaled_residual(corr.K1, k1_rhs, std::max(ac.norm(), qbt.norm()));

  const Matrix x = corr.K1 + c / tau;
  const Matrix ax = a * x;
  r.k_second = scaled_residual(corr.K2, 0.5 * (ax + ax.transpose()), ax.norm());

  const Matrix y = corr.K2 - c / (tau * tau);
  const Matrix ay = a * y;
  const Matrix k3_rhs = corr.K1 / (tau * tau) + 0.5 * (ay - ay.transpose());
  r.k_third = scaled_residual(corr.K3, k3_rhs, std::max(ay.norm(), corr.K1.norm() / (tau * tau)));
  return r;
}

UcnaPair ucna_1d(double a, double q, double tau) {
  if (!(tau >= 0.0) || !(q >= 0.0)) throw std::invalid_argument("ucna_1d: need q >= 0, tau >= 0");
  const double denom = 1.0 - tau * a;
  return {a / denom, std::sqrt(2.0 * q) / denom};
}

}  // namespace colim::oracle
