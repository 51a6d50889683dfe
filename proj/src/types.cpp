#include "colim/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace colim {

void SystemParams::validate() const {
  if (A.rows() == 0 || !is_square(A)) throw std::invalid_argument("SystemParams: A must be square and non-empty");
  if (Q.rows() != A.rows() || Q.cols() != A.cols()) {
    throw std::invalid_argument("SystemParams: Q must match the shape of A");
  }
  if (!all_finite(A) || !all_finite(Q)) throw std::invalid_argument("SystemParams: non-finite entries");
  if (!std::isfinite(tau) || tau < 0.0) throw std::invalid_argument("SystemParams: tau must be finite and >= 0");
  if (!is_stable(A)) {
    throw std::invalid_argument("SystemParams: A is not stable (max Re lambda = " +
                                std::to_string(max_real_eigenvalue(A)) + ")");
  }
  if (!is_symmetric(Q, 1e-12)) throw std::invalid_argument("SystemParams: Q is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_part(Q), Eigen::EigenvaluesOnly);
  const double largest = solver.eigenvalues().cwiseAbs().maxCoeff();
  if (solver.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, largest)) {
    throw std::invalid_argument("SystemParams: Q is not positive semidefinite");
  }
}

void TimeSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeSeries: dt must be > 0");
  if (count() < 2) throw std::invalid_argument("TimeSeries: need at least two samples");
  if (dim() < 1) throw std::invalid_argument("TimeSeries: need at least one coordinate");
  if (!values.allFinite()) throw std::invalid_argument("TimeSeries: non-finite sample");
}

int stencil_order(Stencil s) noexcept {
  switch (s) {
    case Stencil::central2: return 2;
    case Stencil::central4: return 4;
    case Stencil::cusp2: return 2;
  }
  return 2;
}

int stencil_width(Stencil s) noexcept {
  switch (s) {
    case Stencil::central2: return 2;
    case Stencil::central4: return 3;
    case Stencil::cusp2: return 3;
  }
  return 3;
}

std::string_view to_string(Stencil s) noexcept {
  switch (s) {
    case Stencil::central2: return "central2";
    case Stencil::central4: return "central4";
    case Stencil::cusp2: return "cusp2";
  }
  return "?";
}

Stencil parse_stencil(std::string_view name) {
  if (name == "central2" || name == "2") return Stencil::central2;
  if (name == "central4" || name == "4") return Stencil::central4;
  if (name == "cusp2") return Stencil::cusp2;
  throw std::invalid_argument("unknown stencil '" + std::string(name) + "' (expected central2, central4, cusp2)");
}

const Matrix& CorrSet::derivative(int m) const {
  switch (m) {
    case 0: return K0;
    case 1: return K1;
    case 2: return K2;
    case 3: return K3;
    default: throw std::out_of_range("CorrSet::derivative: order must be 0..3");
  }
}

}  // namespace colim
