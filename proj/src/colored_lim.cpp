#include "colim/colored_lim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "colim/errors.hpp"
#include "colim/oracle.hpp"

namespace colim::colored {

namespace {

void require_tau(double tau, const char* what) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument(std::string(what) + ": tau must be > 0");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string_view to_string(QMethod m) noexcept {
  switch (m) {
    case QMethod::automatic: return "auto";
    case QMethod::fdr: return "fdr";
    case QMethod::kprime: return "kprime";
  }
  return "?";
}

QMethod parse_q_method(std::string_view name) {
  if (name == "auto") return QMethod::automatic;
  if (name == "fdr") return QMethod::fdr;
  if (name == "kprime") return QMethod::kprime;
  throw std::invalid_argument("unknown q-method '" + std::string(name) + "' (expected auto, fdr, kprime)");
}

QMethod resolve_q_method(QMethod requested, Eigen::Index n, double tau) noexcept {
  if (requested != QMethod::automatic) return requested;
  return (n >= 7 || tau >= 0.5) ? QMethod::kprime : QMethod::fdr;
}

ASolve solve_A(const CorrSet& corr, double tau, bool use_third_derivative) {
  require_tau(tau, "solve_A");
  const Eigen::Index n = corr.dim();
  const Eigen::Index nn = n * n;
  const Matrix x = corr.K1 + corr.K0 / tau;
  const Matrix y = corr.K2 - corr.K0 / (tau * tau);
  const Eigen::Index blocks = use_third_derivative ? 2 : 1;
  // Unknown entries (i, j); without the K''' block A is sought among symmetric matrices.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> unknowns;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = use_third_derivative ? 0 : j; i < n; ++i) unknowns.emplace_back(i, j);
  }
  const auto cols = static_cast<Eigen::Index>(unknowns.size());

  Matrix system(blocks * nn, cols);
  Vector rhs(blocks * nn);
  for (Eigen::Index col = 0; col < cols; ++col) {
    const auto [i, j] = unknowns[static_cast<std::size_t>(col)];
    Matrix e = Matrix::Zero(n, n);
    e(i, j) = 1.0;
    if (!use_third_derivative) e(j, i) = 1.0;
    const Matrix ex = e * x;
    const Matrix second = 0.5 * (ex + ex.transpose());
    system.col(col).head(nn) = Eigen::Map<const Vector>(second.data(), nn);
    if (use_third_derivative) {
      const Matrix ey = e * y;
      const Matrix third = 0.5 * (ey - ey.transpose());
      system.col(col).tail(nn) = Eigen::Map<const Vector>(third.data(), nn);
    }
  }
  rhs.head(nn) = Eigen::Map<const Vector>(corr.K2.data(), nn);
  if (use_third_derivative) {
    const Matrix target = corr.K3 - corr.K1 / (tau * tau);
    rhs.tail(nn) = Eigen::Map<const Vector>(target.data(), nn);
  }

  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  ASolve out;
  out.condition = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  if (!(smallest > 1e-12 * sv(0))) {
    throw SingularSystemError("solve_A: stacked derivative system is rank deficient", out.condition);
  }
  const Vector a = svd.solve(rhs);
  out.A = Matrix::Zero(n, n);
  for (Eigen::Index col = 0; col < cols; ++col) {
    const auto [i, j] = unknowns[static_cast<std::size_t>(col)];
    out.A(i, j) = a(col);
    if (!use_third_derivative) out.A(j, i) = a(col);
  }
  return out;
}

QSolve solve_Q_fdr(const Matrix& a_hat, const Matrix& k0, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("solve_Q_fdr: tau must be >= 0");
  const Matrix b = resolvent(a_hat, tau);
  const Matrix ac = a_hat * k0;
  const SymmetricSolve s = solve_symmetric_unknown(b, -(ac + ac.transpose()));
  return {s.solution, s.condition, 0.0};
}

QSolve solve_Q_kprime(const Matrix& a_hat, const Matrix& k0, const Matrix& k1, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("solve_Q_kprime: tau must be >= 0");
  const Eigen::Index n = a_hat.rows();
  // B^{-T} = (I - tau A)^T, so no inverse is formed.
  const Matrix b_inv_t = (Matrix::Identity(n, n) - tau * a_hat).transpose();
  const Matrix raw = (k1 - a_hat * k0) * b_inv_t;
  QSolve out;
  out.Q = symmetric_part(raw);
  out.asymmetry = skew_part(raw).norm();
  out.condition = condition_number(resolvent(a_hat, tau));
  return out;
}

EstimationReport colored_lim_from_corr(const CorrSet& corr, double tau, const ColoredOptions& opts) {
  require_tau(tau, "colored_lim");
  const Eigen::Index n = corr.dim();

  EstimationReport rep;
  rep.tau = tau;
  rep.stencil = corr.stencil;
  rep.q_method = resolve_q_method(opts.q_method, n, tau);

  const ASolve a = solve_A(corr, tau, !opts.negative_definite);
  rep.A_hat = a.A;
  rep.cond_A = a.condition;
  rep.B_hat = resolvent(rep.A_hat, tau);

  const QSolve q = rep.q_method == QMethod::fdr ? solve_Q_fdr(rep.A_hat, corr.K0, tau)
                                                : solve_Q_kprime(rep.A_hat, corr.K0, corr.K1, tau);
  rep.Q_hat = q.Q;
  rep.cond_Q = q.condition;

  const oracle::IdentityResiduals r = oracle::identity_residuals(rep.A_hat, rep.Q_hat, tau, corr);
  rep.residuals = {{"fdr", r.fdr}, {"k1", r.k_prime}, {"k2", r.k_second}, {"k3", r.k_third}};
  if (rep.q_method == QMethod::kprime) {
    rep.residuals["kprime_asymmetry"] = q.asymmetry;
    rep.warnings.push_back("kprime: discarded asymmetric part of norm " + format_number(q.asymmetry));
  }

  if (!is_stable(rep.A_hat)) rep.warnings.emplace_back("A_hat is not stable");
  if (!is_positive_definite(rep.Q_hat)) rep.warnings.emplace_back("Q_hat is not positive definite");
  if (rep.cond_Q > opts.cond_q_threshold) {
    rep.warnings.push_back("cond_Q " + format_number(rep.cond_Q) + " exceeds " + format_number(opts.cond_q_threshold));
  }
  return rep;
}

EstimationReport colored_lim_estimate(const TimeSeries& ts, double tau, const ColoredOptions& opts) {
  require_tau(tau, "colored_lim_estimate");
  corr::EstimateOptions eo;
  eo.stencil = opts.stencil;
  eo.subtract_mean = opts.subtract_mean;
  eo.exec = opts.exec;
  return colored_lim_from_corr(corr::estimate_derivatives(ts, eo), tau, opts);
}

}  // namespace colim::colored
