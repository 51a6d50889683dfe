#include "colim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "colim/errors.hpp"

namespace colim {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (!is_square(m) || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) {
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
  }
}

// Column-major vec() index of entry (i, j) in an n x n matrix.
constexpr Eigen::Index vec_index(Eigen::Index n, Eigen::Index i, Eigen::Index j) { return j * n + i; }

}  // namespace

bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (!is_square(m)) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.transpose()).norm() <= rel_tol * scale;
}

bool is_stable(const Matrix& m) { return max_real_eigenvalue(m) < 0.0; }

double max_real_eigenvalue(const Matrix& m) {
  require_square(m, "max_real_eigenvalue");
  Eigen::EigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw DecompositionError("max_real_eigenvalue: eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().real().maxCoeff();
}

bool is_positive_definite(const Matrix& m, double rel_tol) {
  if (!is_symmetric(m, 1e-12)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_part(m), Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() > rel_tol * largest;
}

Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix skew_part(const Matrix& m) { return 0.5 * (m - m.transpose()); }

Matrix matrix_exp(const Matrix& m, double t) {
  require_square(m, "matrix_exp");
  require_finite(m, "matrix_exp");
  const Matrix scaled = m * t;
  return scaled.exp();
}

EigenDecomposition eigen_decompose(const Matrix& m) {
  require_square(m, "eigen_decompose");
  require_finite(m, "eigen_decompose");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m.cast<std::complex<double>>());
  if (solver.info() != Eigen::Success) {
    throw DecompositionError("eigen_decompose: eigenvalue iteration did not converge");
  }
  EigenDecomposition out;
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();

  Eigen::JacobiSVD<ComplexMatrix> svd(out.vectors);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  out.vector_condition = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  if (!(out.vector_condition <= kDefectiveConditionLimit)) {
    throw DecompositionError("eigen_decompose: eigenvector matrix condition " +
                             std::to_string(out.vector_condition) + " exceeds limit; input is defective");
  }
  out.inverse_vectors = out.vectors.partialPivLu().inverse();
  return out;
}

Matrix matrix_log_principal(const Matrix& m) {
  require_square(m, "matrix_log_principal");
  const EigenDecomposition eig = eigen_decompose(m);
  const double scale = eig.values.cwiseAbs().maxCoeff();

  ComplexVector logs(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const std::complex<double> lambda = eig.values(k);
    const bool on_real_axis = std::abs(lambda.imag()) <= 1e-12 * std::max(scale, 1e-300);
    if (std::abs(lambda) == 0.0 || (on_real_axis && lambda.real() <= 0.0)) {
      throw BranchCutError("matrix_log_principal: eigenvalue (" + std::to_string(lambda.real()) + ", " +
                           std::to_string(lambda.imag()) + ") lies on the branch cut");
    }
    logs(k) = std::log(lambda);
  }

  const ComplexMatrix reconstructed = eig.vectors * logs.asDiagonal() * eig.inverse_vectors;
  const Matrix result = reconstructed.real();
  const double imag_residue = reconstructed.imag().norm();
  if (imag_residue > 1e-8 * std::max(1.0, result.norm())) {
    throw DecompositionError("matrix_log_principal: imaginary residue " + std::to_string(imag_residue) +
                             " too large for a real logarithm");
  }
  const double round_trip = (result.exp() - m).norm() / std::max(1e-300, m.norm());
  if (!(round_trip <= 1e-8)) {
    throw DecompositionError("matrix_log_principal: exp(log(M)) residual " + std::to_string(round_trip));
  }
  return result;
}

Matrix matrix_sqrt_spd(const Matrix& q) {
  require_square(q, "matrix_sqrt_spd");
  require_finite(q, "matrix_sqrt_spd");
  if (!is_symmetric(q, 1e-10)) {
    throw std::invalid_argument("matrix_sqrt_spd: input is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_part(q));
  Vector ev = solver.eigenvalues();
  const double largest = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  if (ev.minCoeff() < -1e-12 * std::max(largest, 1.0)) {
    throw std::invalid_argument("matrix_sqrt_spd: input is not positive semidefinite (min eigenvalue " +
                                std::to_string(ev.minCoeff()) + ")");
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const Matrix& u = solver.eigenvectors();
  return symmetric_part(u * ev.asDiagonal() * u.transpose());
}

Matrix solve_sylvester_like(const Matrix& coeff_left, const Matrix& coeff_right, const Matrix& rhs) {
  require_square(coeff_left, "solve_sylvester_like");
  require_square(coeff_right, "solve_sylvester_like");
  const Eigen::Index n = coeff_left.rows();
  const Eigen::Index m = coeff_right.rows();
  if (rhs.rows() != n || rhs.cols() != m) {
    throw std::invalid_argument("solve_sylvester_like: rhs shape does not match coefficients");
  }

  // vec(L X) = (I kron L) vec X ; vec(X R) = (R^T kron I) vec X
  const Eigen::Index dim = n * m;
  Matrix system = Matrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < m; ++col) {
    system.block(col * n, col * n, n, n) += coeff_left;
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const double r_ba = coeff_right(b, a);  // (R^T)(a, b)
      if (r_ba == 0.0) continue;
      for (Eigen::Index i = 0; i < n; ++i) {
        system(a * n + i, b * n + i) += r_ba;
      }
    }
  }

  const Vector b = Eigen::Map<const Vector>(rhs.data(), dim);
  Eigen::FullPivLU<Matrix> lu(system);
  const double rcond = lu.rcond();
  if (!lu.isInvertible() || !(rcond > 1e-15)) {
    throw SingularSystemError("solve_sylvester_like: system is singular",
                              rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
  }
  Vector x = lu.solve(b);
  // One step of iterative refinement tightens the residual on mildly ill-conditioned inputs.
  const Vector r = b - system * x;
  x += lu.solve(r);

  Matrix out(n, m);
  Eigen::Map<Vector>(out.data(), dim) = x;
  return out;
}

SymmetricSolve solve_symmetric_unknown(const Matrix& coeff, const Matrix& rhs) {
  require_square(coeff, "solve_symmetric_unknown");
  const Eigen::Index n = coeff.rows();
  if (rhs.rows() != n || rhs.cols() != n) {
    throw std::invalid_argument("solve_symmetric_unknown: rhs shape does not match coefficient");
  }
  const Matrix target = symmetric_part(rhs);
  const Eigen::Index unknowns = n * (n + 1) / 2;

  // Unknown p <-> upper-triangle entry (i, j), i <= j, row-major order.
  Matrix reduced(unknowns, unknowns);
  Vector b(unknowns);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++col) {
      Matrix basis = Matrix::Zero(n, n);
      basis(i, j) = 1.0;
      basis(j, i) = 1.0;
      const Matrix image = basis * coeff.transpose() + coeff * basis;
      Eigen::Index row = 0;
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = r; c < n; ++c, ++row) {
          reduced(row, col) = image(r, c);
        }
      }
    }
  }
  {
    Eigen::Index row = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = r; c < n; ++c, ++row) b(row) = target(r, c);
    }
  }

  Eigen::JacobiSVD<Matrix> svd(reduced, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  SymmetricSolve out;
  const double smallest = sv(sv.size() - 1);
  out.condition = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  const Vector p = svd.solve(b);

  out.solution = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) {
      out.solution(i, j) = p(k);
      out.solution(j, i) = p(k);
    }
  }
  return out;
}

double condition_number(const Matrix& m) {
  require_square(m, "condition_number");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

Matrix resolvent(const Matrix& a, double tau) {
  require_square(a, "resolvent");
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("resolvent: tau must be finite and >= 0");
  }
  const Eigen::Index n = a.rows();
  if (tau == 0.0) return Matrix::Identity(n, n);
  const Matrix shifted = Matrix::Identity(n, n) - tau * a;
  Eigen::FullPivLU<Matrix> lu(shifted);
  if (!lu.isInvertible()) {
    throw SingularSystemError("resolvent: I - tau*A is singular", std::numeric_limits<double>::infinity());
  }
  return lu.inverse();
}

double relative_frobenius_error(const Matrix& est, const Matrix& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw std::invalid_argument("relative_frobenius_error: shape mismatch");
  }
  const double denom = truth.norm();
  if (denom == 0.0) {
    throw std::invalid_argument("relative_frobenius_error: truth has zero norm");
  }
  return (est - truth).norm() / denom;
}

}  // namespace colim
