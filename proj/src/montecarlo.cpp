#include "jgl/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "jgl/errors.hpp"
#include "jgl/ortho.hpp"
#include "jgl/weight.hpp"

namespace jgl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, long chunk) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(chunk));
}

long chunk_count(const MCConfig& cfg) { return (cfg.samples + kChunkSize - 1) / kChunkSize; }

// Runs `visit` over the spectra of one chunk.
template <class Visit>
void run_chunk(const MCConfig& cfg, long chunk, Visit&& visit) {
  std::mt19937_64 gen(chunk_seed(cfg.seed, chunk));
  std::normal_distribution<double> diag(0.0, std::sqrt(0.5));
  std::normal_distribution<double> off(0.0, 0.5);
  const int n = cfg.n;
  Eigen::MatrixXcd H(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(n);
  const long first = chunk * kChunkSize;
  const long last = std::min(cfg.samples, first + kChunkSize);
  for (long s = first; s < last; ++s) {
    for (int i = 0; i < n; ++i) {
      H(i, i) = diag(gen);
      for (int j = i + 1; j < n; ++j) {
        const double re = off(gen);
        const double im = off(gen);
        H(i, j) = {re, im};
        H(j, i) = {re, -im};
      }
    }
    solver.compute(H, Eigen::EigenvaluesOnly);
    visit(solver.eigenvalues());
  }
}

struct Counts {
  long none = 0;
  long all = 0;
};

GapEstimate estimate(long hits, long samples, GapMode mode) {
  GapEstimate e;
  e.mode = mode;
  e.samples = samples;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(samples));
  return e;
}

}  // namespace

void MCConfig::validate() const {
  if (n < 1 || n > 64) throw InvalidParams("montecarlo: n must be in [1, 64]");
  if (samples < 1) throw InvalidParams("montecarlo: samples must be positive");
  if (!std::isfinite(s1) || !std::isfinite(s2) || !(s1 < s2)) throw InvalidParams("montecarlo: need s1 < s2");
  if (threads < 1) throw InvalidParams("montecarlo: threads must be positive");
}

const char* to_string(GapMode mode) { return mode == GapMode::none_in_interval ? "none" : "all"; }

GapMode parse_gap_mode(const std::string& text) {
  if (text == "none" || text == "none_in_interval") return GapMode::none_in_interval;
  if (text == "all" || text == "all_in_interval") return GapMode::all_in_interval;
  throw ConfigInvalid("unknown gap mode '" + text + "'");
}

void for_each_gue_spectrum(const MCConfig& cfg, const std::function<void(const Eigen::VectorXd&)>& visit) {
  cfg.validate();
  for (long c = 0; c < chunk_count(cfg); ++c) run_chunk(cfg, c, visit);
}

std::vector<std::vector<double>> sample_gue_spectrum(const MCConfig& cfg) {
  std::vector<std::vector<double>> out;
  out.reserve(cfg.samples);
  for_each_gue_spectrum(cfg, [&](const Eigen::VectorXd& ev) { out.emplace_back(ev.data(), ev.data() + ev.size()); });
  return out;
}

GapPair gap_probabilities_mc(const MCConfig& cfg) {
  cfg.validate();
  const long chunks = chunk_count(cfg);
  const int workers = static_cast<int>(std::min<long>(cfg.threads, chunks));
  std::vector<Counts> per_worker(workers);
  auto work = [&](int w) {
    Counts& c = per_worker[w];
    for (long k = w; k < chunks; k += workers) {
      run_chunk(cfg, k, [&](const Eigen::VectorXd& ev) {
        long inside = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) inside += (ev[i] > cfg.s1 && ev[i] < cfg.s2);
        c.none += inside == 0;
        c.all += inside == ev.size();
      });
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  Counts total;
  for (const auto& c : per_worker) {
    total.none += c.none;
    total.all += c.all;
  }
  return {estimate(total.none, cfg.samples, GapMode::none_in_interval),
          estimate(total.all, cfg.samples, GapMode::all_in_interval)};
}

GapEstimate gap_probability_mc(const MCConfig& cfg, GapMode mode) {
  const auto both = gap_probabilities_mc(cfg);
  return mode == GapMode::none_in_interval ? both.none : both.all;
}

Real gap_probability_det(int n, double s1, double s2, GapMode mode, const PrecisionContext& ctx) {
  if (n < 1 || n > 64) throw InvalidParams("gap_probability_det: n must be in [1, 64]");
  PrecisionScope scope(ctx.bits());
  const auto params = mode == GapMode::none_in_interval ? WeightParams::make(1, -1, 1, s1, s2)
                                                        : WeightParams::make(0, 1, -1, s1, s2);
  const auto sys = build_ortho_system_auto(params, n, ctx);
  const Precision p{sys.bits};
  PrecisionScope inner(p.bits);
  return exp(Real(sys.logD[n], p)) / partition_constant(n, ctx.with_bits(p.bits));
}

double sigma_distance(const GapEstimate& e, double p_det) {
  double se = e.std_error;
  if (se == 0.0) se = std::sqrt(p_det * (1.0 - p_det) / static_cast<double>(e.samples));
  const double d = std::abs(e.p_hat - p_det);
  if (d == 0.0) return 0.0;
  return se > 0.0 ? d / se : std::numeric_limits<double>::infinity();
}

std::string mc_csv(const std::vector<MCRow>& rows) {
  std::ostringstream os;
  os << "n,s1,s2,mode,p_hat,stderr,p_det,sigma_distance\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.n << ',' << num(r.s1) << ',' << num(r.s2) << ',' << to_string(r.estimate.mode) << ','
       << num(r.estimate.p_hat) << ',' << num(r.estimate.std_error) << ',' << r.p_det.to_string(40) << ','
       << num(r.sigma_distance) << '\n';
  }
  return os.str();
}

}  // namespace jgl
