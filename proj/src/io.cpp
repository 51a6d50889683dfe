#include "colim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace colim::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) throw std::runtime_error("output directory does not exist: " + dir.string());
  const fs::path tmp = dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(double_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json double_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a non-empty array of rows");
  const bool nested = j.front().is_array();
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = nested ? static_cast<Eigen::Index>(j.front().size()) : Eigen::Index{1};
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (nested) {
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw ConfigError(what + ": rows have unequal lengths");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        const json& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) throw ConfigError(what + ": entries must be numbers");
        m(i, c) = v.get<double>();
      }
    } else {
      if (!row.is_number()) throw ConfigError(what + ": entries must be numbers");
      m(i, 0) = row.get<double>();
    }
  }
  return m;
}

std::string trajectory_csv(const TimeSeries& x, const TimeSeries* eta) {
  const Eigen::Index n = x.dim();
  if (eta && (eta->count() != x.count() || eta->dim() != n)) {
    throw std::invalid_argument("trajectory_csv: eta does not match x");
  }
  std::string out = "t";
  for (Eigen::Index j = 0; j < n; ++j) out += ",x" + std::to_string(j);
  if (eta) {
    for (Eigen::Index j = 0; j < n; ++j) out += ",eta" + std::to_string(j);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < x.count(); ++i) {
    out += format_double(x.time(i));
    for (Eigen::Index j = 0; j < n; ++j) (out += ',') += format_double(x.values(i, j));
    if (eta) {
      for (Eigen::Index j = 0; j < n; ++j) (out += ',') += format_double(eta->values(i, j));
    }
    out += '\n';
  }
  return out;
}

TimeSeries parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trajectory csv: empty input");

  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "t") throw ConfigError("trajectory csv: header must start with t,x0");
  std::vector<std::size_t> x_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].rfind('x', 0) == 0) x_cols.push_back(c);
  }
  if (x_cols.empty()) throw ConfigError("trajectory csv: no x columns");

  std::vector<double> times;
  std::vector<double> flat;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ConfigError("trajectory csv: bad number on line " + std::to_string(line_no));
      cells.push_back(v);
    }
    if (cells.size() != header.size()) {
      throw ConfigError("trajectory csv: wrong column count on line " + std::to_string(line_no));
    }
    times.push_back(cells[0]);
    for (std::size_t c : x_cols) flat.push_back(cells[c]);
  }
  if (times.size() < 2) throw ConfigError("trajectory csv: need at least two rows");

  TimeSeries ts;
  ts.start_time = times.front();
  ts.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - ts.dt) > 1e-6 * ts.dt) throw ConfigError("trajectory csv: t column is not uniformly spaced");
  }
  const auto rows = static_cast<Eigen::Index>(times.size());
  const auto cols = static_cast<Eigen::Index>(x_cols.size());
  ts.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(),
                                                                                                      rows, cols);
  ts.validate();
  return ts;
}

json to_json(const CorrSet& corr) {
  json j;
  j["source"] = corr.source == CorrSource::analytic ? "analytic" : "empirical";
  j["dt"] = corr.dt;
  j["stencil"] = std::string(to_string(corr.stencil));
  j["K0"] = to_json(corr.K0);
  j["K1"] = to_json(corr.K1);
  j["K2"] = to_json(corr.K2);
  j["K3"] = to_json(corr.K3);
  json lagged = json::object();
  for (const auto& [k, m] : corr.lagged) lagged[std::to_string(k)] = to_json(m);
  j["lagged"] = std::move(lagged);
  return j;
}

json to_json(const colored::EstimationReport& rep) {
  json j;
  j["tau"] = rep.tau;
  j["q_method"] = std::string(colored::to_string(rep.q_method));
  j["stencil"] = std::string(to_string(rep.stencil));
  j["A_hat"] = to_json(rep.A_hat);
  j["Q_hat"] = to_json(rep.Q_hat);
  j["B_hat"] = to_json(rep.B_hat);
  j["cond_A"] = double_to_json(rep.cond_A);
  j["cond_Q"] = double_to_json(rep.cond_Q);
  json res = json::object();
  for (const auto& [k, v] : rep.residuals) res[k] = double_to_json(v);
  j["residuals"] = std::move(res);
  j["warnings"] = rep.warnings;
  return j;
}

json to_json(const lim::LimResult& res) {
  json j;
  j["rho"] = res.rho;
  j["A_hat"] = to_json(res.A_hat);
  j["Q_hat"] = to_json(res.Q_hat);
  j["warnings"] = res.warnings;
  return j;
}

json to_json(const std::vector<lim::SweepEntry>& sweep) {
  json arr = json::array();
  for (const auto& e : sweep) {
    json j;
    j["k"] = e.k;
    j["rho"] = e.rho;
    j["A_hat"] = e.A_hat ? to_json(*e.A_hat) : json(nullptr);
    if (!e.error.empty()) j["error"] = e.error;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace {

std::string join_warnings(const std::vector<std::string>& w) {
  std::string out;
  for (const auto& s : w) {
    if (!out.empty()) out += "; ";
    for (char c : s) out += (c == ',' || c == '\n' || c == '"') ? ' ' : c;
  }
  return out;
}

}  // namespace

std::string records_csv(const std::vector<bench::BenchRecord>& records) {
  std::string out = "n,trial,seed,e_A,e_Q,e_K0,e_K1,e_K2,e_K3,cond_A,cond_Q,min_re,min_im,warnings\n";
  for (const auto& r : records) {
    out += std::to_string(r.n) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed);
    for (double v : {r.e_A, r.e_Q, r.e_K0, r.e_K1, r.e_K2, r.e_K3, r.cond_A, r.cond_Q, r.min_re, r.min_im}) {
      (out += ',') += format_double(v);
    }
    (out += ',') += join_warnings(r.warnings);
    out += '\n';
  }
  return out;
}

std::string quantile_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%g", p);
  std::string s = buf;
  for (char& c : s) {
    if (c == '.') c = '_';
  }
  return s;
}

std::string table_csv(const std::vector<bench::TableRow>& rows, const std::vector<double>& quantiles) {
  std::string out = "n,field";
  for (double p : quantiles) out += ',' + quantile_label(p);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + r.field;
    for (double v : r.values) (out += ',') += format_double(v);
    out += '\n';
  }
  return out;
}

std::string diagnostics_csv(const bench::Diagnostics& diag) {
  std::string out = "n,trial,min_re,min_im,e_K,e_Q,cond_Q\n";
  for (const auto& r : diag.rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.trial);
    for (double v : {r.min_re, r.min_im, r.e_K, r.e_Q, r.cond_Q}) (out += ',') += format_double(v);
    out += '\n';
  }
  return out;
}

json to_json(const bench::Diagnostics& diag) {
  json arr = json::array();
  for (const auto& s : diag.summary) {
    json j;
    j["n"] = s.n;
    j["records"] = s.records;
    j["failed"] = s.failed;
    j["e_K_ge_15pct"] = s.ek_high;
    j["e_K_ge_15pct_and_e_Q_ge_15pct"] = s.ek_high_eq_high;
    j["cond_Q_gt_threshold"] = s.condq_high;
    j["cond_Q_gt_threshold_and_e_Q_ge_15pct"] = s.condq_high_eq_high;
    j["spearman_min_re_e_K"] = double_to_json(s.spearman_min_re_ek);
    arr.push_back(std::move(j));
  }
  return arr;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(what + ": " + ex.what());
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError(what + ": unknown key '" + item.key() + "'");
  }
}

namespace {

template <class T>
T get_as(const json& j, const char* key, const std::string& what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(what + ": bad value for '" + key + "': " + ex.what());
  }
}

}  // namespace

SystemParams system_from_json(const json& j) {
  if (!j.contains("A") || !j.contains("Q")) throw ConfigError("system: keys A and Q are required");
  SystemParams p;
  p.A = matrix_from_json(j.at("A"), "system.A");
  p.Q = matrix_from_json(j.at("Q"), "system.Q");
  p.tau = j.contains("tau") ? get_as<double>(j, "tau", "system") : 0.0;
  return p;
}

json to_json(const SystemParams& sys) {
  json j;
  j["A"] = to_json(sys.A);
  j["Q"] = to_json(sys.Q);
  j["tau"] = sys.tau;
  return j;
}

bench::BenchConfig bench_config_from_json(const json& j) {
  reject_unknown_keys(j, kBenchKeys, "bench config");
  const std::string what = "bench config";
  bench::BenchConfig c;
  if (j.contains("dims")) c.dims = get_as<std::vector<int>>(j, "dims", what);
  if (j.contains("tau")) c.tau = get_as<double>(j, "tau", what);
  if (j.contains("t1")) c.t1 = get_as<double>(j, "t1", what);
  if (j.contains("trials")) c.trials = get_as<int>(j, "trials", what);
  if (j.contains("dt")) c.dt = get_as<double>(j, "dt", what);
  if (j.contains("subsample_every")) c.subsample_every = get_as<int>(j, "subsample_every", what);
  if (j.contains("stencil_order")) c.stencil = parse_stencil(std::to_string(get_as<int>(j, "stencil_order", what)));
  if (j.contains("stencil")) c.stencil = parse_stencil(get_as<std::string>(j, "stencil", what));
  if (j.contains("rho_lag")) c.rho_lag = get_as<int>(j, "rho_lag", what);
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", what);
  if (j.contains("q_method")) c.q_method = colored::parse_q_method(get_as<std::string>(j, "q_method", what));
  if (j.contains("scheme")) c.scheme = sde::parse_scheme(get_as<std::string>(j, "scheme", what));
  if (j.contains("quantiles")) c.quantiles = get_as<std::vector<double>>(j, "quantiles", what);
  return c;
}

json to_json(const bench::BenchConfig& cfg) {
  json j;
  j["dims"] = cfg.dims;
  j["tau"] = cfg.tau;
  j["t1"] = cfg.t1;
  j["trials"] = cfg.trials;
  j["dt"] = cfg.dt;
  j["subsample_every"] = cfg.subsample_every;
  j["stencil"] = std::string(to_string(cfg.stencil));
  j["rho_lag"] = cfg.rho_lag;
  j["seed"] = cfg.seed;
  j["q_method"] = std::string(colored::to_string(cfg.q_method));
  j["scheme"] = std::string(sde::to_string(cfg.scheme));
  j["quantiles"] = cfg.quantiles;
  return j;
}

}  // namespace colim::io
