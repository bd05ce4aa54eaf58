#pragma once

// GUE eigenvalue sampling (density proportional to exp(-Tr H^2)) and the
// probability that an interval holds none or all of the eigenvalues, both
// empirically and as D_n / C_n.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jgl/real.hpp"

namespace jgl {

struct MCConfig {
  int n = 1;
  long samples = 10000;
  std::uint64_t seed = 0;
  double s1 = -0.5;
  double s2 = 0.5;
  /// Worker threads. Results do not depend on it.
  int threads = 1;

  /// Throws InvalidParams.
  void validate() const;
};

enum class GapMode { none_in_interval, all_in_interval };

const char* to_string(GapMode mode);
/// "none" / "all" (or the full enum names). Throws ConfigInvalid.
GapMode parse_gap_mode(const std::string& text);

struct GapEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;  // sqrt(p_hat (1 - p_hat) / samples)
  GapMode mode = GapMode::none_in_interval;
  long samples = 0;
};

/// Samples are drawn in fixed chunks of this many matrices; chunk c uses
/// its own generator seeded from (seed, c), so the stream does not depend
/// on how chunks are spread over threads.
inline constexpr long kChunkSize = 4096;

/// Calls `visit` with the sorted eigenvalues of every sample, in sample
/// order. Single-threaded.
void for_each_gue_spectrum(const MCConfig& cfg, const std::function<void(const Eigen::VectorXd&)>& visit);

/// All spectra of a (small) run, one row per sample.
std::vector<std::vector<double>> sample_gue_spectrum(const MCConfig& cfg);

GapEstimate gap_probability_mc(const MCConfig& cfg, GapMode mode);

/// Both modes from one pass over the same stream.
struct GapPair {
  GapEstimate none, all;
};
GapPair gap_probabilities_mc(const MCConfig& cfg);

/// D_n(s1, s2) / C_n with (A, B1, B2) = (1, -1, 1) for none_in_interval and
/// (0, 1, -1) for all_in_interval.
Real gap_probability_det(int n, double s1, double s2, GapMode mode, const PrecisionContext& ctx);

/// |p_hat - p_det| in units of the estimate's standard error. When p_hat is 0
/// or 1 the plug-in error vanishes; the binomial error at p_det is used then.
double sigma_distance(const GapEstimate& estimate, double p_det);

struct MCRow {
  int n = 0;
  double s1 = 0.0, s2 = 0.0;
  GapEstimate estimate;
  Real p_det;
  /// |p_hat - p_det| / std_error.
  double sigma_distance = 0.0;
};

/// n,s1,s2,mode,p_hat,stderr,p_det,sigma_distance with a header row.
std::string mc_csv(const std::vector<MCRow>& rows);

}  // namespace jgl
