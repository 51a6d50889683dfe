#include "colim/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "colim/errors.hpp"
#include "colim/oracle.hpp"
#include "colim/rng.hpp"

namespace colim::sde {

namespace {

// Stream ids inside one (seed, stream) key.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kIncrementStream = 1;

// z_{k+1} = step * z_k + kick * xi_k with xi_k ~ N(0, I).
struct Propagator {
  Matrix step;
  Matrix kick;
};

// Stochastic Heun on a linear drift with additive noise collapses to a fixed
// linear update:
//   z~ = z + h M z + G dW,  z' = z + h/2 (M z + M z~) + G dW
//   => z' = (I + hM + h^2 M^2 / 2) z + (I + hM/2) G dW.
Propagator heun_propagator(const Matrix& drift, const Matrix& noise, double h) {
  const Eigen::Index d = drift.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix hm = h * drift;
  return {id + hm + 0.5 * hm * hm, (id + 0.5 * hm) * noise * std::sqrt(h)};
}

// Exact transition: step = e^{Mh}; the conditional covariance comes from the
// Van Loan block exponential of [[-M, G G^T], [0, M^T]] h.
Propagator exact_propagator(const Matrix& drift, const Matrix& noise, double h) {
  const Eigen::Index d = drift.rows();
  Matrix block = Matrix::Zero(2 * d, 2 * d);
  block.topLeftCorner(d, d) = -drift;
  block.topRightCorner(d, d) = noise * noise.transpose();
  block.bottomRightCorner(d, d) = drift.transpose();
  const Matrix e = matrix_exp(block, h);
  Propagator p;
  p.step = e.bottomRightCorner(d, d).transpose();
  const Matrix cov = symmetric_part(p.step * e.topRightCorner(d, d));
  p.kick = matrix_sqrt_spd(cov);
  return p;
}

Propagator make_propagator(Scheme scheme, const Matrix& drift, const Matrix& noise, double h) {
  return scheme == Scheme::heun2 ? heun_propagator(drift, noise, h) : exact_propagator(drift, noise, h);
}

struct RunLayout {
  long long total_steps = 0;
  long long first_step = 0;  // first recorded step (multiple of `every`)
  long long every = 1;
  Eigen::Index rows = 0;
};

RunLayout layout_for(const SimConfig& cfg, double burn_in) {
  RunLayout lay;
  lay.every = cfg.subsample_every;
  lay.total_steps = std::llround(cfg.t1 / cfg.dt);
  long long burn_steps = static_cast<long long>(std::ceil(burn_in / cfg.dt - 1e-9));
  if (burn_steps < 0) burn_steps = 0;
  lay.first_step = ((burn_steps + lay.every - 1) / lay.every) * lay.every;
  if (lay.first_step > lay.total_steps) {
    throw std::invalid_argument("simulate: burn-in leaves no samples before t1");
  }
  lay.rows = static_cast<Eigen::Index>((lay.total_steps - lay.first_step) / lay.every + 1);
  return lay;
}

// Integrates the linear SDE and returns the recorded states (rows x d).
Matrix integrate(const Propagator& prop, Vector z, const RunLayout& lay, NormalStream& rng, double dt) {
  const Eigen::Index d = prop.step.rows();
  const Eigen::Index p = prop.kick.cols();
  Matrix out(lay.rows, d);
  Vector xi(p);
  Vector next(d);
  Eigen::Index row = 0;
  for (long long s = 0; s <= lay.total_steps; ++s) {
    if (s >= lay.first_step && (s - lay.first_step) % lay.every == 0) {
      if (!z.allFinite()) {
        throw SimulationError("simulate: state became non-finite at t = " + std::to_string(s * dt));
      }
      out.row(row++) = z.transpose();
    }
    if (s == lay.total_steps) break;
    for (Eigen::Index j = 0; j < p; ++j) xi(j) = rng.normal();
    next.noalias() = prop.step * z;
    next.noalias() += prop.kick * xi;
    z.swap(next);
  }
  return out;
}

Vector draw_gaussian(const Matrix& cov, NormalStream& rng) {
  const Matrix root = matrix_sqrt_spd(cov);
  Vector xi(cov.rows());
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi(j) = rng.normal();
  return root * xi;
}

double resolve_burn_in(const SystemParams& params, const SimConfig& cfg) {
  if (cfg.burn_in_time) return *cfg.burn_in_time;
  return cfg.x0 ? default_burn_in(params.A) : 0.0;
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
  return s == Scheme::heun2 ? "heun2" : "exact_exponential";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "heun2") return Scheme::heun2;
  if (name == "exact_exponential" || name == "exact") return Scheme::exact_exponential;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected heun2, exact_exponential)");
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (subsample_every < 1) throw std::invalid_argument("SimConfig: subsample_every must be >= 1");
  if (!std::isfinite(t1)) throw std::invalid_argument("SimConfig: t1 must be finite");
  if (burn_in_time && !(*burn_in_time >= 0.0)) throw std::invalid_argument("SimConfig: burn_in_time must be >= 0");
  const double burn = burn_in_time.value_or(0.0);
  if (!(t1 > burn)) throw std::invalid_argument("SimConfig: t1 must exceed burn_in_time");
  if (x0 && !x0->allFinite()) throw std::invalid_argument("SimConfig: x0 has non-finite entries");
}

double default_burn_in(const Matrix& a) {
  const double slowest = max_real_eigenvalue(a);
  if (!(slowest < 0.0)) throw std::invalid_argument("default_burn_in: A is not stable");
  return 20.0 / std::abs(slowest);
}

TimeSeries simulate_white(const SystemParams& params, const SimConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!params.white()) throw std::invalid_argument("simulate_white: tau must be 0");
  const Eigen::Index n = params.dim();
  if (cfg.x0 && cfg.x0->size() != n) throw std::invalid_argument("simulate_white: x0 has wrong dimension");

  const std::uint64_t key = derive_seed(cfg.seed, cfg.stream);
  NormalStream init_rng(key, kInitStream);
  NormalStream rng(key, kIncrementStream);

  const Vector z0 = cfg.x0 ? *cfg.x0
                           : draw_gaussian(oracle::stationary_covariance_white(params.A, params.Q), init_rng);
  const Matrix noise = matrix_sqrt_spd(2.0 * params.Q);
  const Propagator prop = make_propagator(cfg.scheme, params.A, noise, cfg.dt);
  const RunLayout lay = layout_for(cfg, resolve_burn_in(params, cfg));

  TimeSeries ts;
  ts.dt = cfg.dt * static_cast<double>(cfg.subsample_every);
  ts.start_time = static_cast<double>(lay.first_step) * cfg.dt;
  ts.values = integrate(prop, z0, lay, rng, cfg.dt);
  return ts;
}

ColoredTrajectory simulate_colored(const SystemParams& params, const SimConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(params.tau > 0.0)) throw std::invalid_argument("simulate_colored: tau must be > 0");
  const Eigen::Index n = params.dim();
  if (cfg.x0 && cfg.x0->size() != n) throw std::invalid_argument("simulate_colored: x0 has wrong dimension");

  const std::uint64_t key = derive_seed(cfg.seed, cfg.stream);
  NormalStream init_rng(key, kInitStream);
  NormalStream rng(key, kIncrementStream);

  const oracle::AugmentedSystem aug = oracle::build_augmented(params);
  Vector z0(2 * n);
  if (cfg.x0) {
    z0.head(n) = *cfg.x0;
    z0.tail(n) = draw_gaussian(aug.Cetaeta(), init_rng);
  } else {
    z0 = draw_gaussian(aug.Sigma, init_rng);
  }

  // Only eta receives white forcing, with amplitude 1/tau.
  Matrix noise = Matrix::Zero(2 * n, n);
  noise.bottomRows(n) = Matrix::Identity(n, n) / params.tau;
  const Propagator prop = make_propagator(cfg.scheme, aug.M, noise, cfg.dt);
  const RunLayout lay = layout_for(cfg, resolve_burn_in(params, cfg));
  const Matrix joint = integrate(prop, z0, lay, rng, cfg.dt);

  ColoredTrajectory out;
  out.x.dt = out.eta.dt = cfg.dt * static_cast<double>(cfg.subsample_every);
  out.x.start_time = out.eta.start_time = static_cast<double>(lay.first_step) * cfg.dt;
  out.x.values = joint.leftCols(n);
  out.eta.values = joint.rightCols(n);
  return out;
}

TimeSeries discard_burn_in(const TimeSeries& ts, double burn_in_time) {
  if (!(burn_in_time >= 0.0)) throw std::invalid_argument("discard_burn_in: burn_in_time must be >= 0");
  if (!(burn_in_time < ts.span())) {
    throw std::invalid_argument("discard_burn_in: burn-in covers the whole series");
  }
  const auto drop = static_cast<Eigen::Index>(std::ceil(burn_in_time / ts.dt - 1e-9));
  if (drop >= ts.count()) throw std::invalid_argument("discard_burn_in: empty result");
  TimeSeries out;
  out.dt = ts.dt;
  out.start_time = ts.time(drop);
  out.values = ts.values.bottomRows(ts.count() - drop);
  return out;
}

TimeSeries subsample(const TimeSeries& ts, int every) {
  if (every < 1) throw std::invalid_argument("subsample: every must be >= 1");
  const Eigen::Index rows = (ts.count() + every - 1) / every;
  TimeSeries out;
  out.dt = ts.dt * every;
  out.start_time = ts.start_time;
  out.values.resize(rows, ts.dim());
  for (Eigen::Index i = 0; i < rows; ++i) out.values.row(i) = ts.values.row(i * every);
  return out;
}

}  // namespace colim::sde
