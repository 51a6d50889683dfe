#include "colim/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "colim/errors.hpp"
#include "colim/lim.hpp"
#include "colim/oracle.hpp"
#include "colim/rng.hpp"

namespace colim::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kGenPurpose = 0x67656E;  // "gen"
constexpr std::uint64_t kSimPurpose = 0x73696D;  // "sim"

// Error of a derivative estimate whose truth may vanish (odd derivatives in 1-d).
double derivative_error(const Matrix& est, const Matrix& truth) {
  if (truth.norm() == 0.0) return est.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return rel_error(est, truth);
}

void eigen_gaps(const Matrix& a, double& min_re, double& min_im) {
  const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Matrix>(a, false).eigenvalues();
  min_re = ev.real().cwiseAbs().minCoeff();
  min_im = ev.imag().cwiseAbs().minCoeff();
}

BenchRecord failed_record(BenchRecord rec, const std::string& what) {
  rec.failed = true;
  rec.e_A = rec.e_Q = kNaN;
  rec.e_K0 = rec.e_K1 = rec.e_K2 = rec.e_K3 = kNaN;
  rec.cond_A = rec.cond_Q = kNaN;
  rec.warnings.push_back("failed: " + what);
  return rec;
}

void fill_white(const BenchConfig& cfg, const SystemParams& sys, const TimeSeries& ts, BenchRecord& rec) {
  const TimeSeries centered = corr::demean(ts);
  const Matrix k0 = corr::corr_at_lag(centered, 0);
  const Matrix k_rho = corr::corr_at_lag(centered, cfg.rho_lag);
  const lim::LimResult res = lim::lim_from_corr(k0, k_rho, cfg.rho_lag * ts.dt);
  rec.e_A = rel_error(res.A_hat, sys.A);
  rec.e_Q = rel_error(res.Q_hat, sys.Q);
  rec.e_K0 = rel_error(k0, oracle::stationary_covariance_white(sys.A, sys.Q));
  rec.e_K1 = rec.e_K2 = rec.e_K3 = kNaN;
  rec.cond_A = condition_number(symmetric_part(k0));
  rec.cond_Q = kNaN;
  rec.warnings = res.warnings;
}

void fill_colored(const BenchConfig& cfg, const SystemParams& sys, const TimeSeries& ts, BenchRecord& rec) {
  corr::EstimateOptions eo;
  eo.stencil = cfg.stencil;
  eo.exec = corr::Exec::serial;
  const CorrSet est = corr::estimate_derivatives(ts, eo);
  const CorrSet truth = oracle::analytic_derivs(oracle::build_augmented(sys));

  colored::ColoredOptions co;
  co.q_method = cfg.q_method;
  co.stencil = cfg.stencil;
  co.exec = corr::Exec::serial;
  const colored::EstimationReport rep = colored::colored_lim_from_corr(est, sys.tau, co);

  rec.e_A = rel_error(rep.A_hat, sys.A);
  rec.e_Q = rel_error(rep.Q_hat, sys.Q);
  rec.e_K0 = rel_error(est.K0, truth.K0);
  rec.e_K1 = derivative_error(est.K1, truth.K1);
  rec.e_K2 = derivative_error(est.K2, truth.K2);
  rec.e_K3 = derivative_error(est.K3, truth.K3);
  rec.cond_A = rep.cond_A;
  rec.cond_Q = rep.cond_Q;
  rec.warnings = rep.warnings;
}

}  // namespace

void BenchConfig::validate() const {
  if (dims.empty()) throw std::invalid_argument("BenchConfig: dims is empty");
  for (int n : dims) {
    if (n < 1) throw std::invalid_argument("BenchConfig: dims must be >= 1");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("BenchConfig: tau must be finite and >= 0");
  if (trials < 1) throw std::invalid_argument("BenchConfig: trials must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("BenchConfig: dt must be > 0");
  if (subsample_every < 1) throw std::invalid_argument("BenchConfig: subsample_every must be >= 1");
  if (!(t1 > 0.0)) throw std::invalid_argument("BenchConfig: t1 must be > 0");
  if (rho_lag < 1) throw std::invalid_argument("BenchConfig: rho_lag must be >= 1");
  if (quantiles.empty()) throw std::invalid_argument("BenchConfig: quantiles is empty");
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    const double p = quantiles[i];
    if (!(p > 0.0 && p < 100.0)) throw std::invalid_argument("BenchConfig: quantiles must lie in (0, 100)");
    if (i > 0 && !(p > quantiles[i - 1])) {
      throw std::invalid_argument("BenchConfig: quantiles must be strictly increasing");
    }
  }
}

SystemParams gen_system(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_system: n must be >= 1");
  NormalStream rng(derive_seed(seed, kGenPurpose), 0);
  SystemParams out;
  if (n == 1) {
    out.A = Matrix::Constant(1, 1, -1.2 + rng.uniform());
    out.Q = Matrix::Constant(1, 1, 0.2 + rng.uniform());
    return out;
  }

  bool accepted = false;
  for (int attempt = 0; attempt < kGenMaxAttempts && !accepted; ++attempt) {
    Matrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) a(i, j) = rng.normal();
    }
    Eigen::ComplexEigenSolver<Matrix> es(a);
    const Eigen::VectorXcd gamma = es.eigenvalues();
    if (!(gamma.real().cwiseAbs().minCoeff() > 1e-4)) continue;
    Eigen::VectorXcd flipped(n);
    for (Eigen::Index k = 0; k < n; ++k) flipped(k) = {-std::abs(gamma(k).real()), gamma(k).imag()};
    const Eigen::MatrixXcd& u = es.eigenvectors();
    out.A = (u * flipped.asDiagonal() * u.inverse()).real();
    accepted = is_stable(out.A);
  }
  if (!accepted) throw NumericalError("gen_system: rejection loop exceeded its attempt cap");

  Matrix q(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = rng.uniform();
  }
  const Matrix upper = q.triangularView<Eigen::Upper>();
  q = upper + upper.transpose();
  q.diagonal() /= 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> qs(q);
  out.Q = qs.eigenvectors() * qs.eigenvalues().cwiseAbs().asDiagonal() * qs.eigenvectors().transpose();
  out.Q = symmetric_part(out.Q);
  return out;
}

double rel_error(const Matrix& est, const Matrix& truth) { return relative_frobenius_error(est, truth); }

std::uint64_t trial_seed(std::uint64_t master, int n, int trial) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
}

BenchRecord run_trial(const BenchConfig& cfg, int n, int trial) {
  BenchRecord rec;
  rec.n = n;
  rec.trial = trial;
  rec.seed = trial_seed(cfg.seed, n, trial);
  try {
    SystemParams sys = gen_system(n, rec.seed);
    sys.tau = cfg.tau;
    eigen_gaps(sys.A, rec.min_re, rec.min_im);

    sde::SimConfig sim;
    sim.dt = cfg.dt;
    sim.t1 = cfg.t1;
    sim.subsample_every = cfg.subsample_every;
    sim.seed = derive_seed(rec.seed, kSimPurpose);
    sim.scheme = cfg.scheme;
    if (sys.white()) {
      fill_white(cfg, sys, sde::simulate_white(sys, sim), rec);
    } else {
      fill_colored(cfg, sys, sde::simulate_colored(sys, sim).x, rec);
    }
  } catch (const std::exception& ex) {
    return failed_record(std::move(rec), ex.what());
  }
  return rec;
}

std::vector<BenchRecord> run_batch(const BenchConfig& cfg, corr::Exec exec, const Progress& progress) {
  cfg.validate();
  const int per_dim = cfg.trials;
  const int total = static_cast<int>(cfg.dims.size()) * per_dim;
  std::vector<BenchRecord> out(static_cast<std::size_t>(total));
  int done = 0;
  auto one = [&](int idx) {
    out[static_cast<std::size_t>(idx)] = run_trial(cfg, cfg.dims[static_cast<std::size_t>(idx / per_dim)], idx % per_dim);
    if (progress) {
#pragma omp critical(colim_bench_progress)
      progress(++done, total);
    }
  };
  if (exec == corr::Exec::serial) {
    for (int i = 0; i < total; ++i) one(i);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < total; ++i) one(i);
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return kNaN;
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double field_value(const BenchRecord& r, const std::string& field) {
  if (field == "e_A") return r.e_A;
  if (field == "e_Q") return r.e_Q;
  if (field == "e_K0") return r.e_K0;
  if (field == "e_K1") return r.e_K1;
  if (field == "e_K2") return r.e_K2;
  if (field == "e_K3") return r.e_K3;
  if (field == "cond_A") return r.cond_A;
  if (field == "cond_Q") return r.cond_Q;
  throw std::invalid_argument("unknown record field '" + field + "'");
}

namespace {

std::vector<int> dims_in_order(const std::vector<BenchRecord>& records) {
  std::vector<int> dims;
  for (const auto& r : records) {
    if (std::find(dims.begin(), dims.end(), r.n) == dims.end()) dims.push_back(r.n);
  }
  return dims;
}

std::vector<double> finite_sorted(const std::vector<BenchRecord>& records, int n, const std::string& field) {
  std::vector<double> v;
  for (const auto& r : records) {
    if (r.n != n || r.failed) continue;
    const double x = field_value(r, field);
    if (std::isfinite(x)) v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

std::vector<TableRow> percentile_table(const std::vector<BenchRecord>& records, const std::vector<double>& quantiles) {
  std::vector<TableRow> rows;
  for (int n : dims_in_order(records)) {
    for (const auto& field : kErrorFields) {
      const std::vector<double> v = finite_sorted(records, n, field);
      TableRow row;
      row.n = n;
      row.field = field;
      row.count = static_cast<int>(v.size());
      for (double p : quantiles) row.values.push_back(quantile_sorted(v, p));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double median_of(const std::vector<BenchRecord>& records, int n, const std::string& field) {
  return quantile_sorted(finite_sorted(records, n, field), 50.0);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(x[i]) && std::isfinite(y[i])) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  }
  if (xs.size() < 3) return kNaN;
  const Eigen::VectorXd rx = Eigen::Map<const Eigen::VectorXd>(ranks(xs).data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::VectorXd ry = Eigen::Map<const Eigen::VectorXd>(ranks(ys).data(), static_cast<Eigen::Index>(ys.size()));
  const Eigen::VectorXd cx = rx.array() - rx.mean();
  const Eigen::VectorXd cy = ry.array() - ry.mean();
  const double denom = cx.norm() * cy.norm();
  return denom > 0.0 ? cx.dot(cy) / denom : kNaN;
}

Diagnostics diagnostics_export(const std::vector<BenchRecord>& records, double cond_q_threshold) {
  Diagnostics out;
  out.rows.reserve(records.size());
  for (const auto& r : records) out.rows.push_back({r.n, r.trial, r.min_re, r.min_im, r.e_K0, r.e_Q, r.cond_Q});

  for (int n : dims_in_order(records)) {
    DimensionSummary s;
    s.n = n;
    std::vector<double> re, ek;
    for (const auto& r : records) {
      if (r.n != n) continue;
      ++s.records;
      if (r.failed) {
        ++s.failed;
        continue;
      }
      const bool eq_high = r.e_Q >= kErrorThreshold;
      if (r.e_K0 >= kErrorThreshold) {
        ++s.ek_high;
        if (eq_high) ++s.ek_high_eq_high;
      }
      if (r.cond_Q > cond_q_threshold) {
        ++s.condq_high;
        if (eq_high) ++s.condq_high_eq_high;
      }
      re.push_back(r.min_re);
      ek.push_back(r.e_K0);
    }
    s.spearman_min_re_ek = spearman(re, ek);
    out.summary.push_back(s);
  }
  return out;
}

}  // namespace colim::bench
