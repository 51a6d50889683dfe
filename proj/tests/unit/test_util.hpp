#pragma once

#include <cstdint>
#include <random>

#include <gtest/gtest.h>

#include "colim/linalg.hpp"

namespace colim::testing {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  }
  return m;
}

/// Gaussian matrix shifted so that its rightmost eigenvalue sits at -margin.
inline Matrix random_stable(Eigen::Index n, std::mt19937_64& rng, double margin = 0.3) {
  const Matrix g = gaussian_matrix(n, n, rng) / std::sqrt(static_cast<double>(n));
  const double shift = Eigen::ComplexEigenSolver<Matrix>(g, false).eigenvalues().real().maxCoeff() + margin;
  return g - shift * Matrix::Identity(n, n);
}

inline Matrix random_spd(Eigen::Index n, std::mt19937_64& rng, double floor = 0.2) {
  const Matrix g = gaussian_matrix(n, n, rng);
  return g * g.transpose() / static_cast<double>(n) + floor * Matrix::Identity(n, n);
}

/// Largest |Im lambda| of a.
inline double max_imag_eigenvalue(const Matrix& a) {
  return Eigen::ComplexEigenSolver<Matrix>(a, false).eigenvalues().imag().cwiseAbs().maxCoeff();
}

inline double rel(const Matrix& est, const Matrix& truth) {
  return (est - truth).norm() / truth.norm();
}

}  // namespace colim::testing
