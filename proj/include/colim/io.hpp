#pragma once

// File formats: CSV for series and tables, JSON for configs and reports. Every writer
// goes through write_atomic (temp file + rename).

#include <filesystem>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "colim/bench.hpp"
#include "colim/colored_lim.hpp"
#include "colim/lim.hpp"
#include "colim/oracle.hpp"
#include "colim/types.hpp"

namespace colim::io {

using json = nlohmann::ordered_json;

/// Malformed or unknown configuration content.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void write_atomic(const std::filesystem::path& path, const std::string& content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// %.17g, so values round-trip exactly. Non-finite values print as nan / inf / -inf.
[[nodiscard]] std::string format_double(double v);

// --- matrices ---------------------------------------------------------------

/// Row-major nested arrays.
[[nodiscard]] json to_json(const Matrix& m);
[[nodiscard]] Matrix matrix_from_json(const json& j, const std::string& what);
[[nodiscard]] json double_to_json(double v);  // null for non-finite

// --- trajectories -----------------------------------------------------------

/// Header t,x0..x{n-1}[,eta0..eta{n-1}], one row per sample.
[[nodiscard]] std::string trajectory_csv(const TimeSeries& x, const TimeSeries* eta = nullptr);
/// Reads the t and x columns; eta columns are ignored. dt comes from the t column,
/// which must be uniform.
[[nodiscard]] TimeSeries parse_trajectory_csv(const std::string& text);

// --- reports ----------------------------------------------------------------

[[nodiscard]] json to_json(const CorrSet& corr);
[[nodiscard]] json to_json(const colored::EstimationReport& rep);
[[nodiscard]] json to_json(const lim::LimResult& res);
[[nodiscard]] json to_json(const std::vector<lim::SweepEntry>& sweep);
[[nodiscard]] std::string dump(const json& j);

// --- benchmark tables -------------------------------------------------------

[[nodiscard]] std::string records_csv(const std::vector<bench::BenchRecord>& records);
[[nodiscard]] std::string table_csv(const std::vector<bench::TableRow>& rows, const std::vector<double>& quantiles);
[[nodiscard]] std::string diagnostics_csv(const bench::Diagnostics& diag);
[[nodiscard]] json to_json(const bench::Diagnostics& diag);

/// Column label for a quantile: 5 -> p5, 12.5 -> p12_5.
[[nodiscard]] std::string quantile_label(double p);

// --- configs ----------------------------------------------------------------

[[nodiscard]] json parse_json(const std::string& text, const std::string& what);
/// Throws ConfigError naming the first key not in allowed.
void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& what);

/// Keys A, Q, tau (tau defaults to 0).
[[nodiscard]] SystemParams system_from_json(const json& j);
[[nodiscard]] json to_json(const SystemParams& sys);

/// Keys mirror the BenchConfig fields; stencil_order accepts 2 or 4 and stencil a name.
[[nodiscard]] bench::BenchConfig bench_config_from_json(const json& j);
[[nodiscard]] json to_json(const bench::BenchConfig& cfg);
inline const std::set<std::string> kBenchKeys{"dims",           "tau",      "t1",      "trials",   "dt",
                                              "subsample_every", "stencil", "stencil_order", "rho_lag",
                                              "seed",           "q_method", "scheme",  "quantiles", "threads"};

}  // namespace colim::io
