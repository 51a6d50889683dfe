#pragma once

// Monte Carlo benchmark: random systems, simulated observations, relative errors of
// the estimates and percentile tables over trials.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "colim/colored_lim.hpp"
#include "colim/corr.hpp"
#include "colim/sde.hpp"
#include "colim/types.hpp"

namespace colim::bench {

inline const std::vector<double> kDefaultQuantiles{5.0, 12.5, 25.0, 50.0, 75.0, 87.5, 95.0};

struct BenchConfig {
  std::vector<int> dims{1};
  double tau = 0.0;  // 0 selects the classical LIM
  double t1 = 1000.0;
  int trials = 256;
  double dt = 0.001;
  int subsample_every = 10;
  Stencil stencil = kDefaultStencil;
  int rho_lag = 50;  // rho = rho_lag * dt * subsample_every
  std::uint64_t seed = 0;
  colored::QMethod q_method = colored::QMethod::automatic;
  sde::Scheme scheme = sde::Scheme::heun2;
  std::vector<double> quantiles = kDefaultQuantiles;

  [[nodiscard]] double sample_dt() const noexcept { return dt * subsample_every; }
  void validate() const;
};

struct BenchRecord {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double e_A = 0.0, e_Q = 0.0;
  double e_K0 = 0.0, e_K1 = 0.0, e_K2 = 0.0, e_K3 = 0.0;  // NaN where not estimated
  double cond_A = 0.0, cond_Q = 0.0;
  double min_re = 0.0, min_im = 0.0;  // min_k |Re lambda_k(A)|, min_k |Im lambda_k(A)|
  bool failed = false;
  std::vector<std::string> warnings;
};

/// Algorithm 3. n = 1: A ~ U[-1.2, -0.2], Q ~ U[0.2, 1.2]. n > 1: Gaussian A with its
/// eigenvalue real parts reflected to -|Re|, Q from uniform [0,1] entries, symmetrized
/// from the upper triangle and replaced by its matrix absolute value.
[[nodiscard]] SystemParams gen_system(int n, std::uint64_t seed);

inline constexpr int kGenMaxAttempts = 1000;

/// ||est - truth||_F / ||truth||_F. Throws std::invalid_argument for zero truth.
[[nodiscard]] double rel_error(const Matrix& est, const Matrix& truth);

/// Seed of trial (n, trial) under master seed.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t master, int n, int trial) noexcept;

/// Never throws on numerical trouble; failures are returned with failed = true.
[[nodiscard]] BenchRecord run_trial(const BenchConfig& cfg, int n, int trial);

using Progress = std::function<void(int done, int total)>;

/// All (n, trial) pairs, ordered by cfg.dims then trial. The parallel path spreads
/// trials over OpenMP threads and returns the same records as the serial one.
[[nodiscard]] std::vector<BenchRecord> run_batch(const BenchConfig& cfg, corr::Exec exec = corr::Exec::parallel,
                                                 const Progress& progress = {});

/// Linear interpolation between order statistics at p/100 * (N - 1). sorted must be ascending.
[[nodiscard]] double quantile_sorted(const std::vector<double>& sorted, double p);

struct TableRow {
  int n = 0;
  std::string field;
  std::vector<double> values;  // one per quantile; NaN when missing
  int count = 0;               // finite samples in the cell
};

inline const std::vector<std::string> kErrorFields{"e_A", "e_Q", "e_K0", "e_K1", "e_K2", "e_K3"};

[[nodiscard]] double field_value(const BenchRecord& r, const std::string& field);

[[nodiscard]] std::vector<TableRow> percentile_table(const std::vector<BenchRecord>& records,
                                                     const std::vector<double>& quantiles = kDefaultQuantiles);

/// Median of one field over the successful records of dimension n.
[[nodiscard]] double median_of(const std::vector<BenchRecord>& records, int n, const std::string& field);

struct DiagnosticRow {
  int n = 0;
  int trial = 0;
  double min_re = 0.0, min_im = 0.0, e_K = 0.0, e_Q = 0.0, cond_Q = 0.0;
};

struct DimensionSummary {
  int n = 0;
  int records = 0;
  int failed = 0;
  int ek_high = 0;           // e_K0 >= 15%
  int ek_high_eq_high = 0;   // ... and e_Q >= 15%
  int condq_high = 0;        // cond_Q > 20
  int condq_high_eq_high = 0;
  double spearman_min_re_ek = 0.0;  // NaN when fewer than 3 records
};

struct Diagnostics {
  std::vector<DiagnosticRow> rows;
  std::vector<DimensionSummary> summary;
};

inline constexpr double kErrorThreshold = 0.15;

[[nodiscard]] Diagnostics diagnostics_export(const std::vector<BenchRecord>& records,
                                             double cond_q_threshold = colored::kDefaultCondQThreshold);

/// Spearman rank correlation with average ranks for ties; NaN pairs are dropped.
[[nodiscard]] double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace colim::bench
