#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jgl/report.hpp"

namespace jgl::cli {

inline constexpr const char* kCommands[] = {"moments",   "recurrence",    "verify",    "painleve4",
                                             "softedge", "integrate-pii", "montecarlo"};

/// Reals are kept as the decimal text the user gave and parsed at the
/// working precision of the run.
struct RunConfig {
  std::string command;
  std::string A = "1", B1 = "-0.5", B2 = "0.3", s1 = "-0.7", s2 = "0.9";
  bool relaxed = false;
  int n_max = 8;
  int n = 6;  // degree for painleve4, matrix size for montecarlo
  int k = 0;
  std::optional<long> precision_bits;  // nullopt: auto
  std::optional<std::string> fd_step;  // nullopt: auto
  std::string tolerance = "1e-20";
  std::string t1 = "-1", t2 = "-0.5";
  std::vector<int> n_list = {32, 64, 128, 256};
  std::string xi_span = "0.3";
  std::string mode = "both";
  std::uint64_t seed = 0;
  long samples = 1000000;
  int threads = 1;
  std::string output_path;  // empty: stdout
  std::string csv_path;     // secondary CSV for softedge / integrate-pii
};

/// Parses argv (flags override --config JSON, which overrides defaults) and
/// applies JGL_PRECISION_BITS when precision is left on auto. Throws
/// ConfigInvalid; --help is reported as ConfigInvalid with the help text
/// unless `help` is given.
RunConfig parse_args(int argc, const char* const* argv, std::string* help = nullptr);

/// Checks cross-field consistency. Throws ConfigInvalid.
void validate(const RunConfig& config);

struct RunResult {
  int exit_code = 0;
  ReportList checks;
  /// Primary artifact (text, CSV or JSON) as written to output_path.
  std::string primary;
  std::string secondary;
};

/// Runs the command and writes its artifacts. Never throws; errors map to
/// exit codes 1 (check failure or numerical error), 2 (ConfigInvalid,
/// InvalidParams) and 3 (PrecisionExhausted) with a message on stderr.
RunResult run(const RunConfig& config);

/// JSON report with all reals as 40-digit decimal strings.
std::string report_json(const RunConfig& config, long precision_bits, const ReportList& checks);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

/// parse_args + run; the body of main().
int main(int argc, const char* const* argv);

}  // namespace jgl::cli
