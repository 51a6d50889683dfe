#pragma once

#include <map>
#include <string_view>

#include "colim/linalg.hpp"

namespace colim {

/// Ground truth for dx = A x dt + sqrt(2Q) dW (tau == 0) or the colored system
/// dx = (A x + sqrt(2Q) eta) dt, d eta = -eta/tau dt + dW/tau (tau > 0).
struct SystemParams {
  Matrix A;
  Matrix Q;
  double tau = 0.0;

  [[nodiscard]] Eigen::Index dim() const noexcept { return A.rows(); }
  [[nodiscard]] bool white() const noexcept { return tau == 0.0; }

  /// Throws std::invalid_argument unless A is square and stable, Q is symmetric
  /// positive semidefinite of the same size, and tau is finite and >= 0.
  void validate() const;
};

/// Uniformly sampled multivariate series. Row i is the state at start_time + i * dt.
struct TimeSeries {
  double dt = 0.0;
  double start_time = 0.0;
  Matrix values;  // count x n

  [[nodiscard]] Eigen::Index count() const noexcept { return values.rows(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return values.cols(); }
  [[nodiscard]] double time(Eigen::Index i) const noexcept { return start_time + static_cast<double>(i) * dt; }
  [[nodiscard]] double span() const noexcept { return static_cast<double>(count() - 1) * dt; }

  /// dt > 0, at least two samples, all entries finite.
  void validate() const;
};

/// Finite-difference stencil family for K^{(m)}(0).
///  central2 - standard second-order central differences.
///  central4 - standard fourth-order central differences.
///  cusp2    - second-order differences that also cancel the |s|^3 (even part) and
///             s|s|^3 (odd part) terms of a correlation function that is only C^2 at
///             the origin, which is the case for every colored-noise driven process.
enum class Stencil { central2, central4, cusp2 };

[[nodiscard]] int stencil_order(Stencil s) noexcept;
/// Largest lag index the stencil reads.
[[nodiscard]] int stencil_width(Stencil s) noexcept;
[[nodiscard]] std::string_view to_string(Stencil s) noexcept;
/// Accepts "central2", "central4", "cusp2" and the bare orders "2" (central2) and "4".
[[nodiscard]] Stencil parse_stencil(std::string_view name);

inline constexpr Stencil kDefaultStencil = Stencil::cusp2;

enum class CorrSource { empirical, analytic };

/// Correlation function derivatives at the origin, K^{(m)}(0) for m = 0..3, plus the
/// lagged values K(k dt) they were computed from (empty for exact analytic sets).
struct CorrSet {
  Matrix K0, K1, K2, K3;
  std::map<int, Matrix> lagged;
  double dt = 0.0;
  Stencil stencil = kDefaultStencil;
  CorrSource source = CorrSource::empirical;

  [[nodiscard]] Eigen::Index dim() const noexcept { return K0.rows(); }
  [[nodiscard]] const Matrix& derivative(int m) const;
};

}  // namespace colim
