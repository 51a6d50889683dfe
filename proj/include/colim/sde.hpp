#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "colim/types.hpp"

namespace colim::sde {

enum class Scheme {
  heun2,              // stochastic Heun; weak order two for additive noise
  exact_exponential,  // exact Gaussian transition over each step
};

[[nodiscard]] std::string_view to_string(Scheme s) noexcept;
[[nodiscard]] Scheme parse_scheme(std::string_view name);

struct SimConfig {
  double dt = 0.001;
  double t1 = 1000.0;
  int subsample_every = 10;
  /// Unset: 0 for stationary initial states, default_burn_in(A) when x0 is given.
  std::optional<double> burn_in_time;
  std::uint64_t seed = 0;
  /// Independent stream selector (trial index); same seed + stream => same path.
  std::uint64_t stream = 0;
  Scheme scheme = Scheme::heun2;
  /// Explicit initial x. Unset: drawn from the stationary law.
  std::optional<Vector> x0;

  void validate() const;
};

struct ColoredTrajectory {
  TimeSeries x;
  TimeSeries eta;
};

/// 20 e-folding times of the slowest mode: 20 / |max_k Re lambda_k(A)|.
[[nodiscard]] double default_burn_in(const Matrix& a);

/// dx = A x dt + sqrt(2Q) dW, recorded every cfg.subsample_every steps.
[[nodiscard]] TimeSeries simulate_white(const SystemParams& params, const SimConfig& cfg);

/// Joint (x, eta) trajectory of the colored system. eta is returned for validation only.
[[nodiscard]] ColoredTrajectory simulate_colored(const SystemParams& params, const SimConfig& cfg);

/// Drops leading samples whose time since the series start is below burn_in_time.
[[nodiscard]] TimeSeries discard_burn_in(const TimeSeries& ts, double burn_in_time);

/// Keeps rows 0, every, 2*every, ...; the new dt is dt * every.
[[nodiscard]] TimeSeries subsample(const TimeSeries& ts, int every);

}  // namespace colim::sde
