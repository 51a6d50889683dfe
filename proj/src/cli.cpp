#include "colim/cli.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "colim/bench.hpp"
#include "colim/colored_lim.hpp"
#include "colim/errors.hpp"
#include "colim/io.hpp"
#include "colim/lim.hpp"
#include "colim/oracle.hpp"
#include "colim/sde.hpp"

namespace colim::cli {

namespace {

namespace fs = std::filesystem;
using io::ConfigError;
using io::json;

constexpr const char* kGrammar =
    "usage: colim <subcommand> [--config PATH] [--seed N] [--out PATH | --out-dir DIR] [module-specific flags]\n"
    "subcommands: simulate, estimate-lim, estimate-colored, oracle, bench, sweep\n";

std::string key_of(const std::string& flag) {
  std::string key = flag;
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

// Registers flags on a subcommand and mirrors each one as a config-file key.
// Config values only fill flags that were not given on the command line.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* option(const std::string& flag, T& target, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + flag, target, help);
    const std::string key = key_of(flag);
    keys_.insert(key);
    fillers_.push_back([this, opt, key, &target](const json& j) {
      if (opt->count() > 0 || !j.contains(key)) return;
      try {
        target = j.at(key).get<T>();
      } catch (const json::exception& ex) {
        throw ConfigError("config: bad value for '" + key + "': " + ex.what());
      }
      from_config_.insert(key);
    });
    options_[key] = opt;
    return opt;
  }

  CLI::Option* flag(const std::string& flag, bool& target, const std::string& help) {
    return option(flag, target, help);
  }

  void config_only(std::initializer_list<const char*> keys) { keys_.insert(keys.begin(), keys.end()); }

  /// Loads the --config file, if any, and fills unset flags from it.
  json load(const std::string& path) {
    json j = json::object();
    if (!path.empty()) {
      j = io::parse_json(io::read_file(path), path);
      io::reject_unknown_keys(j, keys_, path);
    }
    for (auto& fill : fillers_) fill(j);
    return j;
  }

  /// True when the value came from the command line or the config file.
  [[nodiscard]] bool given(const std::string& flag) const {
    const std::string key = key_of(flag);
    const auto it = options_.find(key);
    return (it != options_.end() && it->second->count() > 0) || from_config_.count(key) > 0;
  }

 private:
  CLI::App* app_;
  std::set<std::string> keys_;
  std::set<std::string> from_config_;
  std::map<std::string, CLI::Option*> options_;
  std::vector<std::function<void(const json&)>> fillers_;
};

void require_input(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string("missing required ") + flag);
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(flag) + " " + path + " does not exist");
}

void check_output(const std::string& path) {
  if (path.empty()) return;
  const fs::path p(path);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) throw ConfigError("--out directory " + dir.string() + " does not exist");
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    io::write_atomic(path, content);
  }
}

SystemParams system_from_config(const json& j, const std::string& config_path) {
  if (!j.contains("A") || !j.contains("Q")) {
    throw ConfigError("a system config with keys A and Q is required (--config " +
                      (config_path.empty() ? std::string("missing") : config_path) + ")");
  }
  return io::system_from_json(j);
}

Stencil stencil_choice(const Binder& b, const std::string& name, int order) {
  if (b.given("stencil-order")) {
    if (order != 2 && order != 4) throw ConfigError("--stencil-order must be 2 or 4");
    return parse_stencil(std::to_string(order));
  }
  return parse_stencil(name);
}

// --- subcommands ------------------------------------------------------------

struct Common {
  std::string config;
  std::string out;
};

struct SimulateArgs {
  Common c;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double tau = 0.0;
  double dt = 0.001;
  double t1 = 1000.0;
  int subsample_every = 10;
  double burn_in_time = 0.0;
  std::string scheme = "heun2";
  bool with_eta = false;
};

int do_simulate(SimulateArgs& a, Binder& b, std::ostream& out) {
  const json j = b.load(a.c.config);
  check_output(a.c.out);
  SystemParams sys = system_from_config(j, a.c.config);
  if (b.given("tau")) sys.tau = a.tau;
  sys.validate();

  sde::SimConfig cfg;
  cfg.dt = a.dt;
  cfg.t1 = a.t1;
  cfg.subsample_every = a.subsample_every;
  if (b.given("burn-in-time")) cfg.burn_in_time = a.burn_in_time;
  cfg.seed = a.seed;
  cfg.stream = a.stream;
  cfg.scheme = sde::parse_scheme(a.scheme);
  if (j.contains("x0")) {
    const Matrix x0 = io::matrix_from_json(j.at("x0"), "x0");
    cfg.x0 = Eigen::Map<const Vector>(x0.data(), x0.size());
  }
  cfg.validate();

  if (sys.white()) {
    emit(a.c.out, io::trajectory_csv(sde::simulate_white(sys, cfg)), out);
  } else {
    const sde::ColoredTrajectory traj = sde::simulate_colored(sys, cfg);
    emit(a.c.out, io::trajectory_csv(traj.x, a.with_eta ? &traj.eta : nullptr), out);
  }
  return kExitOk;
}

struct EstimateLimArgs {
  Common c;
  std::string in;
  int rho_lag = 50;
  double rho = 0.0;
  bool keep_mean = false;
};

int do_estimate_lim(EstimateLimArgs& a, Binder& b, std::ostream& out) {
  b.load(a.c.config);
  require_input(a.in, "--in");
  check_output(a.c.out);
  const TimeSeries ts = io::parse_trajectory_csv(io::read_file(a.in));
  int k = a.rho_lag;
  if (b.given("rho")) {
    const double steps = a.rho / ts.dt;
    k = static_cast<int>(std::lround(steps));
    if (k < 1 || std::abs(steps - k) > 1e-6 * std::max(1.0, steps)) {
      throw ConfigError("--rho must be a positive multiple of the series spacing " + io::format_double(ts.dt));
    }
  }
  emit(a.c.out, io::dump(io::to_json(lim::lim_estimate(ts, k, !a.keep_mean))), out);
  return kExitOk;
}

struct EstimateColoredArgs {
  Common c;
  std::string in;
  double tau = 0.0;
  std::string q_method = "auto";
  std::string stencil = std::string(to_string(kDefaultStencil));
  int stencil_order = 2;
  bool negative_definite = false;
  double cond_q_threshold = colored::kDefaultCondQThreshold;
  std::string lag_estimator = "increments";
  bool keep_mean = false;
};

int do_estimate_colored(EstimateColoredArgs& a, Binder& b, std::ostream& out) {
  b.load(a.c.config);
  require_input(a.in, "--in");
  check_output(a.c.out);
  if (!b.given("tau")) throw ConfigError("estimate-colored needs --tau");
  if (!(a.tau > 0.0)) throw ConfigError("--tau must be > 0");
  if (a.lag_estimator != "increments" && a.lag_estimator != "literal") {
    throw ConfigError("--lag-estimator must be increments or literal");
  }

  colored::ColoredOptions opts;
  opts.q_method = colored::parse_q_method(a.q_method);
  opts.stencil = stencil_choice(b, a.stencil, a.stencil_order);
  opts.negative_definite = a.negative_definite;
  opts.cond_q_threshold = a.cond_q_threshold;
  opts.subtract_mean = !a.keep_mean;

  const TimeSeries ts = io::parse_trajectory_csv(io::read_file(a.in));
  corr::EstimateOptions eo;
  eo.stencil = opts.stencil;
  eo.subtract_mean = opts.subtract_mean;
  eo.lags = a.lag_estimator == "literal" ? corr::LagEstimator::literal : corr::LagEstimator::increments;
  const CorrSet corr = corr::estimate_derivatives(ts, eo);
  emit(a.c.out, io::dump(io::to_json(colored::colored_lim_from_corr(corr, a.tau, opts))), out);
  return kExitOk;
}

struct OracleArgs {
  Common c;
  double tau = 0.0;
  double dt = 0.01;
  int max_lag = 10;
};

int do_oracle(OracleArgs& a, Binder& b, std::ostream& out) {
  const json j = b.load(a.c.config);
  check_output(a.c.out);
  SystemParams sys = system_from_config(j, a.c.config);
  if (b.given("tau")) sys.tau = a.tau;
  sys.validate();
  if (a.max_lag < 0 || !(a.dt > 0.0)) throw ConfigError("--max-lag must be >= 0 and --dt > 0");

  json r;
  r["tau"] = sys.tau;
  r["dim"] = sys.dim();
  std::vector<Matrix> lags;
  if (sys.white()) {
    const Matrix c = oracle::stationary_covariance_white(sys.A, sys.Q);
    r["C"] = io::to_json(c);
    lags = oracle::analytic_lags_white(sys.A, c, a.dt, a.max_lag);
  } else {
    const oracle::AugmentedSystem aug = oracle::build_augmented(sys);
    const CorrSet d = oracle::analytic_derivs(aug);
    r["C"] = io::to_json(d.K0);
    r["C_x_eta"] = io::to_json(aug.Cxeta());
    r["B"] = io::to_json(resolvent(sys.A, sys.tau));
    r["K1"] = io::to_json(d.K1);
    r["K2"] = io::to_json(d.K2);
    r["K3"] = io::to_json(d.K3);
    r["effective_diffusion"] = io::to_json(oracle::effective_diffusion(sys.A, sys.Q, sys.tau));
    if (sys.dim() == 1) {
      const oracle::UcnaPair u = oracle::ucna_1d(sys.A(0, 0), sys.Q(0, 0), sys.tau);
      r["ucna"] = {{"a_eff", u.a_eff}, {"q_eff", u.q_eff}};
    }
    lags = oracle::analytic_lags(aug, a.dt, a.max_lag);
  }
  json arr = json::array();
  for (std::size_t k = 0; k < lags.size(); ++k) {
    arr.push_back({{"k", k}, {"s", static_cast<double>(k) * a.dt}, {"K", io::to_json(lags[k])}});
  }
  r["lags"] = std::move(arr);
  emit(a.c.out, io::dump(r), out);
  return kExitOk;
}

struct SweepArgs {
  Common c;
  std::string in;
  double tau = 0.0;
  double dt = 0.01;
  int k_min = 1;
  int k_max = 100;
  bool keep_mean = false;
};

int do_sweep(SweepArgs& a, Binder& b, std::ostream& out) {
  const json j = b.load(a.c.config);
  check_output(a.c.out);
  const bool analytic = j.contains("A");
  if (analytic == !a.in.empty()) throw ConfigError("sweep needs exactly one of --in or a system config");

  std::vector<lim::SweepEntry> sweep;
  if (analytic) {
    SystemParams sys = system_from_config(j, a.c.config);
    if (b.given("tau")) sys.tau = a.tau;
    sys.validate();
    if (!(a.dt > 0.0)) throw ConfigError("--dt must be > 0");
    const std::vector<Matrix> lags =
        sys.white() ? oracle::analytic_lags_white(sys.A, oracle::stationary_covariance_white(sys.A, sys.Q), a.dt, a.k_max)
                    : oracle::analytic_lags(oracle::build_augmented(sys), a.dt, a.k_max);
    sweep = lim::lim_sweep_lags(lags, a.dt, a.k_min, a.k_max, corr::Exec::serial);
  } else {
    require_input(a.in, "--in");
    const TimeSeries ts = io::parse_trajectory_csv(io::read_file(a.in));
    sweep = lim::lim_sweep(ts, a.k_min, a.k_max, corr::Exec::serial, !a.keep_mean);
  }
  emit(a.c.out, io::dump(io::to_json(sweep)), out);
  return kExitOk;
}

struct BenchArgs {
  std::string config;
  std::string out_dir;
  bench::BenchConfig cfg;
  std::string stencil;
  int stencil_order = 2;
  std::string q_method;
  std::string scheme;
  int threads = 0;
  bool serial = false;
};

int resolve_threads(const BenchArgs& a, const CLI::App& app, const json& j) {
  if (app.count("--threads") > 0) return a.threads;
  if (const char* env = std::getenv("COLIM_THREADS"); env && *env) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("COLIM_THREADS is not an integer: ") + env);
    }
  }
  if (j.contains("threads")) return j.at("threads").get<int>();
  return omp_get_num_procs();
}

int do_bench(BenchArgs& a, CLI::App& app, std::ostream& err) {
  json j = json::object();
  if (!a.config.empty()) {
    j = io::parse_json(io::read_file(a.config), a.config);
    std::set<std::string> allowed = io::kBenchKeys;
    allowed.insert("out_dir");
    io::reject_unknown_keys(j, allowed, a.config);
  }
  if (a.out_dir.empty() && j.contains("out_dir")) a.out_dir = j.at("out_dir").get<std::string>();
  if (a.out_dir.empty()) throw ConfigError("bench needs --out-dir");
  json cfg_json = j;
  cfg_json.erase("out_dir");
  bench::BenchConfig cfg = io::bench_config_from_json(cfg_json);

  const auto set = [&](const char* flag) { return app.count(flag) > 0; };
  if (set("--dims")) cfg.dims = a.cfg.dims;
  if (set("--tau")) cfg.tau = a.cfg.tau;
  if (set("--t1")) cfg.t1 = a.cfg.t1;
  if (set("--trials")) cfg.trials = a.cfg.trials;
  if (set("--dt")) cfg.dt = a.cfg.dt;
  if (set("--subsample-every")) cfg.subsample_every = a.cfg.subsample_every;
  if (set("--rho-lag")) cfg.rho_lag = a.cfg.rho_lag;
  if (set("--seed")) cfg.seed = a.cfg.seed;
  if (set("--quantiles")) cfg.quantiles = a.cfg.quantiles;
  if (set("--stencil")) cfg.stencil = parse_stencil(a.stencil);
  if (set("--stencil-order")) {
    if (a.stencil_order != 2 && a.stencil_order != 4) throw ConfigError("--stencil-order must be 2 or 4");
    cfg.stencil = parse_stencil(std::to_string(a.stencil_order));
  }
  if (set("--q-method")) cfg.q_method = colored::parse_q_method(a.q_method);
  if (set("--scheme")) cfg.scheme = sde::parse_scheme(a.scheme);
  cfg.validate();

  const int threads = resolve_threads(a, app, j);
  if (threads < 1) throw ConfigError("worker count must be >= 1");
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  omp_set_num_threads(threads);

  const int total = cfg.trials * static_cast<int>(cfg.dims.size());
  const int every = std::max(1, total / 20);
  const auto progress = [&](int done, int all) {
    if (done % every == 0 || done == all) err << "bench: " << done << "/" << all << " trials\n" << std::flush;
  };
  const std::vector<bench::BenchRecord> records =
      bench::run_batch(cfg, a.serial ? corr::Exec::serial : corr::Exec::parallel, progress);

  const bench::Diagnostics diag = bench::diagnostics_export(records);
  io::write_atomic(dir / "records.csv", io::records_csv(records));
  io::write_atomic(dir / "table.csv", io::table_csv(bench::percentile_table(records, cfg.quantiles), cfg.quantiles));
  io::write_atomic(dir / "diagnostics.csv", io::diagnostics_csv(diag));
  json summary;
  summary["config"] = io::to_json(cfg);
  summary["dimensions"] = io::to_json(diag);
  io::write_atomic(dir / "summary.json", io::dump(summary));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear inverse models for white and colored-noise driven linear systems", "colim"};
  app.require_subcommand(1);

  auto common = [](CLI::App* sub, Binder& b, Common& c) {
    sub->add_option("--config", c.config, "JSON config; flags win over its values")->check(CLI::ExistingFile);
    b.option("out", c.out, "output file (default: standard output)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "simulate a trajectory from a system config");
  SimulateArgs sa;
  Binder sb(sim);
  common(sim, sb, sa.c);
  sb.option("seed", sa.seed, "master seed");
  sb.option("stream", sa.stream, "independent stream index");
  sb.option("tau", sa.tau, "noise correlation time (0 = white)");
  sb.option("dt", sa.dt, "integration step");
  sb.option("t1", sa.t1, "recorded time span");
  sb.option("subsample-every", sa.subsample_every, "record every k-th step");
  sb.option("burn-in-time", sa.burn_in_time, "discarded initial time");
  sb.option("scheme", sa.scheme, "heun2 or exact");
  sb.flag("with-eta", sa.with_eta, "also write the noise columns of a colored run");
  sb.config_only({"A", "Q", "x0"});

  CLI::App* el = app.add_subcommand("estimate-lim", "classical LIM on a trajectory CSV");
  EstimateLimArgs ea;
  Binder eb(el);
  common(el, eb, ea.c);
  eb.option("in", ea.in, "trajectory CSV");
  eb.option("rho-lag", ea.rho_lag, "lag index k, rho = k dt");
  eb.option("rho", ea.rho, "lag in time units (overrides --rho-lag)");
  eb.flag("keep-mean", ea.keep_mean, "do not subtract the sample mean");

  CLI::App* ec = app.add_subcommand("estimate-colored", "Colored-LIM on a trajectory CSV");
  EstimateColoredArgs ca;
  Binder cb(ec);
  common(ec, cb, ca.c);
  cb.option("in", ca.in, "trajectory CSV");
  cb.option("tau", ca.tau, "known noise correlation time");
  cb.option("q-method", ca.q_method, "auto, fdr or kprime");
  cb.option("stencil", ca.stencil, "central2, central4 or cusp2");
  cb.option("stencil-order", ca.stencil_order, "2 or 4 (central stencils)");
  cb.flag("negative-definite", ca.negative_definite, "drop the third-derivative block");
  cb.option("cond-q-threshold", ca.cond_q_threshold, "warn above this cond_Q");
  cb.option("lag-estimator", ca.lag_estimator, "increments or literal");
  cb.flag("keep-mean", ca.keep_mean, "do not subtract the sample mean");

  CLI::App* orc = app.add_subcommand("oracle", "exact covariance, lags and derivatives of a system");
  OracleArgs oa;
  Binder ob(orc);
  common(orc, ob, oa.c);
  ob.option("tau", oa.tau, "noise correlation time (0 = white)");
  ob.option("dt", oa.dt, "lag spacing");
  ob.option("max-lag", oa.max_lag, "largest lag index");
  ob.config_only({"A", "Q"});

  CLI::App* sw = app.add_subcommand("sweep", "LIM estimate across lags");
  SweepArgs wa;
  Binder wb(sw);
  common(sw, wb, wa.c);
  wb.option("in", wa.in, "trajectory CSV (omit to sweep the exact lags of --config)");
  wb.option("tau", wa.tau, "noise correlation time of the config system");
  wb.option("dt", wa.dt, "lag spacing for exact lags");
  wb.option("k-min", wa.k_min, "first lag index");
  wb.option("k-max", wa.k_max, "last lag index");
  wb.flag("keep-mean", wa.keep_mean, "do not subtract the sample mean");
  wb.config_only({"A", "Q"});

  CLI::App* bn = app.add_subcommand("bench", "Monte Carlo benchmark");
  BenchArgs ba;
  bn->add_option("--config", ba.config, "JSON bench config; flags win over its values")->check(CLI::ExistingFile);
  bn->add_option("--out-dir", ba.out_dir, "directory for records.csv, table.csv, diagnostics.csv");
  bn->add_option("--dims", ba.cfg.dims, "dimensions")->delimiter(',');
  bn->add_option("--tau", ba.cfg.tau, "noise correlation time (0 = classical LIM)");
  bn->add_option("--t1", ba.cfg.t1, "recorded time span");
  bn->add_option("--trials", ba.cfg.trials, "trials per dimension");
  bn->add_option("--dt", ba.cfg.dt, "integration step");
  bn->add_option("--subsample-every", ba.cfg.subsample_every, "record every k-th step");
  bn->add_option("--rho-lag", ba.cfg.rho_lag, "LIM lag index");
  bn->add_option("--seed", ba.cfg.seed, "master seed");
  bn->add_option("--quantiles", ba.cfg.quantiles, "percentiles")->delimiter(',');
  bn->add_option("--stencil", ba.stencil, "central2, central4 or cusp2");
  bn->add_option("--stencil-order", ba.stencil_order, "2 or 4 (central stencils)");
  bn->add_option("--q-method", ba.q_method, "auto, fdr or kprime");
  bn->add_option("--scheme", ba.scheme, "heun2 or exact");
  bn->add_option("--threads", ba.threads, "worker count (default: available parallelism)");
  bn->add_flag("--serial", ba.serial, "run trials on the serial reference path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << kGrammar;
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bn) return do_bench(ba, *bn, err);
    omp_set_num_threads(1);
    if (*sim) return do_simulate(sa, sb, out);
    if (*el) return do_estimate_lim(ea, eb, out);
    if (*ec) return do_estimate_colored(ca, cb, out);
    if (*orc) return do_oracle(oa, ob, out);
    if (*sw) return do_sweep(wa, wb, out);
  } catch (const NumericalError& ex) {
    err << "numerical failure: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << "\n" << kGrammar;
    return kExitUsage;
  } catch (const json::exception& ex) {
    err << "error: " << ex.what() << "\n" << kGrammar;
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "failure: " << ex.what() << "\n";
    return kExitNumerical;
  }
  err << kGrammar;
  return kExitUsage;
}

}  // namespace colim::cli
