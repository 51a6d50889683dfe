#pragma once

// Dense real matrix primitives and the Kronecker-vectorized structured solvers
// used by every estimator. Dimensions are small (n <= ~12), so the solvers form
// the full vectorized systems explicitly.

#include <complex>

#include <Eigen/Dense>

namespace colim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct EigenDecomposition {
  ComplexVector values;
  ComplexMatrix vectors;
  ComplexMatrix inverse_vectors;
  double vector_condition = 1.0;  // 2-norm condition number of `vectors`
};

struct SymmetricSolve {
  Matrix solution;
  double condition = 1.0;  // of the reduced n(n+1)/2 system
};

/// Eigenvector matrices with condition above this are treated as defective.
inline constexpr double kDefectiveConditionLimit = 1e12;

[[nodiscard]] bool is_square(const Matrix& m);
[[nodiscard]] bool all_finite(const Matrix& m);
[[nodiscard]] bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);
/// Every eigenvalue has strictly negative real part.
[[nodiscard]] bool is_stable(const Matrix& m);
/// Symmetric with smallest eigenvalue > rel_tol * largest |eigenvalue|.
[[nodiscard]] bool is_positive_definite(const Matrix& m, double rel_tol = 0.0);
[[nodiscard]] double max_real_eigenvalue(const Matrix& m);

[[nodiscard]] Matrix symmetric_part(const Matrix& m);
[[nodiscard]] Matrix skew_part(const Matrix& m);

/// e^{Mt}, scaling-and-squaring Pade.
[[nodiscard]] Matrix matrix_exp(const Matrix& m, double t = 1.0);

/// Complex eigendecomposition M = U diag(values) U^{-1}.
/// Throws DecompositionError when cond(U) exceeds kDefectiveConditionLimit.
[[nodiscard]] EigenDecomposition eigen_decompose(const Matrix& m);

/// Principal logarithm of a real matrix through its eigendecomposition.
/// Throws BranchCutError for eigenvalues on (-inf, 0] and DecompositionError
/// for defective input or a non-negligible imaginary residue.
[[nodiscard]] Matrix matrix_log_principal(const Matrix& m);

/// Symmetric square root of a symmetric positive semidefinite matrix.
[[nodiscard]] Matrix matrix_sqrt_spd(const Matrix& q);

/// Solves coeff_left * X + X * coeff_right = rhs through the n^2 Kronecker system.
/// Throws SingularSystemError when the system is numerically rank deficient.
[[nodiscard]] Matrix solve_sylvester_like(const Matrix& coeff_left, const Matrix& coeff_right,
                                          const Matrix& rhs);

/// Solves Q * coeff^T + coeff * Q = rhs for symmetric Q, parameterized by its upper
/// triangle. The rhs is symmetrized first. Rank-deficient systems get the minimum-norm
/// least-squares solution; the caller decides what to do with the reported condition.
[[nodiscard]] SymmetricSolve solve_symmetric_unknown(const Matrix& coeff, const Matrix& rhs);

/// Largest over smallest singular value; +infinity when the smallest is zero.
[[nodiscard]] double condition_number(const Matrix& m);

/// B = (I - tau * A)^{-1}; identity when tau == 0.
[[nodiscard]] Matrix resolvent(const Matrix& a, double tau);

/// Frobenius norm of (est - truth) relative to truth. Throws on zero-norm truth.
[[nodiscard]] double relative_frobenius_error(const Matrix& est, const Matrix& truth);

}  // namespace colim
