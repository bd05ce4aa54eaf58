// Acceptance gate: one PASS/FAIL line per criterion. Tolerances are pinned
// here; the library thresholds they rely on are checked against them at
// compile time.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "jgl/cli.hpp"
#include "jgl/errors.hpp"
#include "jgl/identities.hpp"
#include "jgl/montecarlo.hpp"
#include "jgl/numerics.hpp"
#include "jgl/painleve2.hpp"
#include "jgl/painleve4.hpp"
#include "jgl/softedge.hpp"

using namespace jgl;
namespace fs = std::filesystem;

namespace {

namespace pinned {
constexpr double kDifferenceSystem = 1e-30;
constexpr double kSigmaRoutes = 1e-28;
constexpr double kCdAndLadder = 1e-25;
constexpr double kFirstDerivative = 1e-18;
constexpr double kOrderLo = 1.8, kOrderHi = 2.2;
constexpr double kSecondOrder = 1e-12;
constexpr double kHamilton = 1e-15;
constexpr double kHamiltonian = 1e-25;
constexpr double kRecurrenceMap = 1e-18;
constexpr double kAShift = 1e-25;
constexpr double kEdgeExponent = 0.2;
constexpr double kContraction = 0.15;
// Per-doubling decrease factor in (0.6, 1.0).
constexpr double kDecreaseCentre = 0.8, kDecreaseRadius = 0.2;
constexpr double kFlowFactor = 10.0;
constexpr double kDecadeFactor = 8.0;
constexpr double kSigmaDistance = 4.0;
constexpr double kClosedForm = 1e-30;
constexpr long kMcSamples = 1000000;
constexpr std::uint64_t kMcSeed = 20240601;
}  // namespace pinned

static_assert(thresholds::kFirstDerivative == pinned::kFirstDerivative);
static_assert(thresholds::kOrder == 0.2);
static_assert(thresholds::kSecondOrder == pinned::kSecondOrder);
static_assert(thresholds::kHamilton == pinned::kHamilton);
static_assert(thresholds::kRecurrenceMap == pinned::kRecurrenceMap);
static_assert(thresholds::kAShift == pinned::kAShift);
static_assert(thresholds::kEdgeExponent == pinned::kEdgeExponent);
static_assert(thresholds::kEdgeContraction == pinned::kContraction);
static_assert(thresholds::kDecreaseCentre == pinned::kDecreaseCentre);
static_assert(thresholds::kDecreaseRadius == pinned::kDecreaseRadius);

const WeightParams kStrict = WeightParams::make(1, -0.5, 0.3, -0.7, 0.9);
const WeightParams kAll = WeightParams::make(0, 1, -1, -0.7, 0.9);
const WeightParams kSingle = WeightParams::make(1, -0.5, 0, -0.7, 0.9, false);

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }
bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

// Collects judged checks for one criterion and prints the offenders.
class Tally {
 public:
  void judge(const ResidualReport& r, double limit) {
    const bool ok = r.rel_residual.is_finite() && r.rel_residual.to_double() < limit;
    note(ok, r.label + " (n=" + std::to_string(r.n) + "): rel " + r.rel_residual.to_string(4) + " vs " + fmt(limit));
    worst_ = std::max(worst_, r.rel_residual.is_finite() ? r.rel_residual.to_double() / limit : 1e300);
  }
  // Uses the report's own verdict; for windows and one-sided checks whose
  // bounds are pinned above through the library thresholds.
  void verdict(const ResidualReport& r) {
    note(r.pass, r.label + " (n=" + std::to_string(r.n) + "): value " + r.lhs.to_string(6) + ", rel " +
                     r.rel_residual.to_string(4) + " vs " + fmt(r.threshold));
  }
  void expect(bool ok, const std::string& what) { note(ok, what); }
  void info(const std::string& line) { std::printf("  info: %s\n", line.c_str()); }
  bool ok() const { return failed_ == 0 && total_ > 0; }
  std::string summary() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d checks, %d failed", total_, failed_);
    std::string s = buf;
    if (worst_ > 0) {
      std::snprintf(buf, sizeof buf, ", worst residual/limit %.3g", worst_);
      s += buf;
    }
    return s;
  }

 private:
  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }
  void note(bool ok, const std::string& what) {
    ++total_;
    if (!ok) {
      ++failed_;
      std::printf("  fail: %s\n", what.c_str());
    }
  }
  int total_ = 0;
  int failed_ = 0;
  double worst_ = 0;
};

struct Outcome {
  bool pass;
  std::string summary;
};

int g_failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  std::printf("criterion %d: %s\n", id, title.c_str());
  std::fflush(stdout);
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s criterion %d: %s [%s] (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.summary.c_str(),
              secs);
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

Outcome finite_n_identities() {
  Tally t;
  const PrecisionContext ctx(512);
  std::vector<Real> zs;
  for (const char* z : {"-2", "0.1", "3"}) zs.push_back(Real::parse(z, ctx.precision()));
  for (const auto& w : {kStrict, kAll}) {
    const auto sys = build_ortho_system(w, 21, ctx);
    for (const auto& r : check_difference_system(sys, 1, 20, ctx)) {
      t.judge(r, starts_with(r.label, "sigma_n") ? pinned::kSigmaRoutes : pinned::kDifferenceSystem);
    }
    for (const auto& r : check_christoffel_darboux(sys, 1, 20, 4, 1, ctx)) t.judge(r, pinned::kCdAndLadder);
    for (int n = 1; n <= 20; ++n) {
      for (const auto& r : check_ladder_compatibility(sys, n, zs, ctx)) t.judge(r, pinned::kCdAndLadder);
    }
  }
  return {t.ok(), t.summary()};
}

Outcome derivative_relations() {
  Tally t;
  const PrecisionContext ctx(512);
  const Real step = Real::parse("1e-10", ctx.precision());
  for (const auto& r : check_derivative_relations(kStrict, 8, ctx, step)) {
    if (contains(r.label, "fd order")) {
      const double order = r.lhs.to_double();
      t.expect(order > pinned::kOrderLo && order < pinned::kOrderHi, r.label + ": order " + r.lhs.to_string(4));
    } else {
      t.judge(r, pinned::kFirstDerivative);
    }
  }
  for (const auto& w : {kStrict, kAll}) {
    for (const auto& r : check_riccati(w, 8, ctx, step)) t.judge(r, pinned::kFirstDerivative);
  }
  return {t.ok(), t.summary()};
}

Outcome second_order() {
  Tally t;
  const PrecisionContext ctx(768);
  for (const auto& r : check_coupled_pde_R(kStrict, 8, ctx)) t.judge(r, pinned::kSecondOrder);
  t.judge(check_sigma_pde(kStrict, 8, ctx), pinned::kSecondOrder);
  t.judge(check_single_jump_ode(kSingle, 8, ctx), pinned::kSecondOrder);
  return {t.ok(), t.summary()};
}

Outcome painleve_iv() {
  Tally t;
  const PrecisionContext ctx(512);
  const Real step = Real::parse("1e-10", ctx.precision());
  for (int n : {4, 6, 8}) {
    for (const auto& r : check_hamilton_equations(kStrict, n, ctx, step)) t.judge(r, pinned::kHamilton);
    for (const auto& r : check_piv_state(kStrict, n, ctx)) {
      if (starts_with(r.label, "H_IV")) {
        t.judge(r, pinned::kHamiltonian);
      } else if (starts_with(r.label, "a_")) {
        t.judge(r, pinned::kAShift);
      } else {
        t.verdict(r);
      }
    }
    for (const auto& r : check_recurrence_maps(kStrict, n, ctx)) t.judge(r, pinned::kRecurrenceMap);
  }
  return {t.ok(), t.summary()};
}

// The soft-edge sweep is shared by criteria 5 and 6.
struct EdgeSweep {
  std::vector<EdgeStencil> stencils;
  EdgeExtract extract;
};

const EdgeWeights kEdge = EdgeWeights::make(1, -0.5, 0.3);
const std::vector<int> kEdgeN = {32, 64, 128, 256};

std::vector<EdgeStencil> sweep_at(const Real& t1, const Real& t2, const PrecisionContext& ctx) {
  std::vector<EdgeStencil> out;
  const Real dt = Real::parse("1e-3", ctx.precision());
  for (int n : kEdgeN) out.push_back(sample_stencil(kEdge, n, t1, t2, dt, ctx));
  return out;
}

EdgeExtract extract_of(const std::vector<EdgeStencil>& stencils) {
  ExtractOptions opts;
  opts.enforce_rate = false;  // judged below rather than thrown
  return extract_edge(stencils, opts);
}

Outcome soft_edge(const EdgeSweep& sw) {
  Tally t;
  for (const auto& r : check_edge_rates(sw.extract)) t.verdict(r);
  for (const auto& r : check_pii_residual(sw.stencils, sw.extract)) t.verdict(r);
  for (const auto& r : check_sigma_and_recurrence_asymptotics(sw.stencils, sw.extract)) t.verdict(r);
  for (const auto& r : check_mu_nu_pde(sw.stencils, sw.extract)) t.verdict(r);
  for (auto form : {HiiPdeForm::with_gradient_term, HiiPdeForm::as_published}) {
    for (const auto& r : check_hii_pde(sw.stencils, sw.extract, form)) {
      t.info(r.label + " (n=" + std::to_string(r.n) + "): value " + r.lhs.to_string(4) + " " +
             (r.pass ? "within" : "outside") + " its bound");
    }
  }
  return {t.ok(), t.summary()};
}

Outcome pii_integrator(const EdgeSweep& sw, const PrecisionContext& ctx) {
  Tally t;
  PrecisionScope scope(ctx.bits());
  const Precision p = ctx.precision();
  const Real tol = Real::parse("1e-20", p);
  const Real span = Real::parse("0.3", p);
  const PIIState start = pii_state_from_extract(sw.extract);
  for (int dir : {1, -1}) {
    for (const auto& r : check_pii_integrator(start, start.xi + dir * span, tol, ctx)) {
      if (starts_with(r.label, "flow identity")) {
        t.expect(r.lhs.is_finite() && abs(r.lhs - r.rhs).to_double() < pinned::kFlowFactor * tol.to_double(),
                 r.label + ": defect " + abs(r.lhs - r.rhs).to_string(4));
      } else if (starts_with(r.label, "flow defect reduction")) {
        t.expect(r.lhs.to_double() >= pinned::kDecadeFactor, r.label + ": factor " + r.lhs.to_string(4));
      } else if (starts_with(r.label, "v = 0")) {
        t.expect(r.lhs.is_zero() && r.rhs.is_zero(), r.label);
      } else {
        t.verdict(r);
      }
    }
  }
  // Fresh extractions at t1 -+ span with the same eta; the ceiling-128 match
  // reuses the first three sizes.
  std::vector<std::vector<EdgeStencil>> fresh_sweeps;
  for (int dir : {-1, 1}) {
    const Real t1 = sw.extract.t1 + dir * span;
    fresh_sweeps.push_back(sweep_at(t1, t1 + (sw.extract.t2 - sw.extract.t1), ctx));
  }
  std::vector<EdgeExtract> fresh256, fresh128;
  for (const auto& s : fresh_sweeps) {
    fresh256.push_back(extract_of(s));
    fresh128.push_back(extract_of(std::vector<EdgeStencil>(s.begin(), s.begin() + 3)));
  }
  const auto base128 = extract_of(std::vector<EdgeStencil>(sw.stencils.begin(), sw.stencils.begin() + 3));
  const auto m256 = match_against(sw.extract, fresh256, tol, ctx);
  const auto m128 = match_against(base128, fresh128, tol, ctx);
  t.verdict(m256);
  t.info("match deviation " + m128.lhs.to_string(4) + " (ceiling 128, envelope " + base128.envelope.to_string(4) +
         "), " + m256.lhs.to_string(4) + " (ceiling 256, envelope " + sw.extract.envelope.to_string(4) + ")");
  return {t.ok(), t.summary()};
}

Outcome monte_carlo() {
  Tally t;
  const PrecisionContext ctx(256);
  PrecisionScope scope(256);
  const int threads = static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
  auto run_n = [&](int n) {
    MCConfig cfg;
    cfg.n = n;
    cfg.samples = pinned::kMcSamples;
    cfg.seed = pinned::kMcSeed;
    cfg.s1 = -0.5;
    cfg.s2 = 0.5;
    cfg.threads = threads;
    return gap_probabilities_mc(cfg);
  };
  for (int n : {2, 3, 4}) {
    const auto est = run_n(n);
    for (auto [e, mode] : {std::pair{est.none, GapMode::none_in_interval}, std::pair{est.all, GapMode::all_in_interval}}) {
      const double p = gap_probability_det(n, -0.5, 0.5, mode, ctx).to_double();
      const double d = sigma_distance(e, p);
      char buf[200];
      std::snprintf(buf, sizeof buf, "n=%d %s: p_hat %.6g, p_det %.6g, %.2f sigma", n, to_string(mode), e.p_hat, p, d);
      t.expect(d <= pinned::kSigmaDistance, buf);
      t.info(buf);
    }
  }
  // n = 1: both routes against erfc(1/2).
  const Real closed = eval_erfc(Real::parse("0.5", ctx.precision()), ctx);
  const Real det = gap_probability_det(1, -0.5, 0.5, GapMode::none_in_interval, ctx);
  const Real det_all = gap_probability_det(1, -0.5, 0.5, GapMode::all_in_interval, ctx);
  t.expect((abs(det - closed) / closed).to_double() < pinned::kClosedForm, "n=1 none: D_1/C_1 vs erfc(1/2)");
  t.expect((abs(det_all - (1 - closed)) / closed).to_double() < pinned::kClosedForm, "n=1 all: D_1/C_1 vs erf(1/2)");
  const auto est1 = run_n(1);
  t.expect(sigma_distance(est1.none, closed.to_double()) <= pinned::kSigmaDistance, "n=1 none: MC vs erfc(1/2)");
  t.expect(sigma_distance(est1.all, 1 - closed.to_double()) <= pinned::kSigmaDistance, "n=1 all: MC vs erf(1/2)");
  return {t.ok(), t.summary()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Tally t;
  const fs::path dir = fs::temp_directory_path() / ("jgl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  // The commands' own FAIL diagnostics are not what is judged here.
  struct Quiet {
    std::ostringstream sink;
    std::streambuf* saved = std::cerr.rdbuf(sink.rdbuf());
    ~Quiet() { std::cerr.rdbuf(saved); }
  } quiet;
  const std::vector<std::vector<std::string>> commands = {
      {"moments", "--k", "5"},
      {"recurrence", "--n-max", "10"},
      {"verify", "--n-max", "8"},
      {"painleve4", "--n", "5"},
      {"softedge", "--n-list", "8,16,32"},
      {"integrate-pii", "--n-list", "8,16,32", "--xi-span", "0.1"},
      {"montecarlo", "--n", "3", "--samples", "50000", "--seed", "17"},
  };
  for (const auto& args : commands) {
    std::string files[2][2];
    int codes[2] = {0, 0};
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<std::string> argv = {"jgl"};
      argv.insert(argv.end(), args.begin(), args.end());
      const fs::path out = dir / (args[0] + std::to_string(rep) + ".out");
      const fs::path csv = dir / (args[0] + std::to_string(rep) + ".csv");
      argv.insert(argv.end(), {"--output", out.string(), "--csv", csv.string()});
      // The second run uses a different thread count.
      if (args[0] == "montecarlo") argv.insert(argv.end(), {"--threads", rep == 0 ? "1" : "3"});
      std::vector<const char*> cargv;
      for (const auto& a : argv) cargv.push_back(a.c_str());
      auto cfg = cli::parse_args(static_cast<int>(cargv.size()), cargv.data());
      codes[rep] = cli::run(cfg).exit_code;
      files[rep][0] = slurp(out);
      files[rep][1] = fs::exists(csv) ? slurp(csv) : "";
    }
    t.expect(codes[0] == codes[1], args[0] + ": same exit code");
    t.expect(!files[0][0].empty() && files[0][0] == files[1][0], args[0] + ": primary output identical");
    t.expect(files[0][1] == files[1][1], args[0] + ": secondary output identical");
  }
  fs::remove_all(dir);
  return {t.ok(), t.summary()};
}

}  // namespace

int main() {
  unsetenv("JGL_PRECISION_BITS");
  criterion(1, "finite-n identity suite", finite_n_identities);
  criterion(2, "derivative relations and Riccati analogs", derivative_relations);
  criterion(3, "second-order PDEs and single-jump ODE", second_order);
  criterion(4, "coupled Painleve IV", painleve_iv);

  const PrecisionContext edge_ctx(128);
  PrecisionScope scope(128);
  EdgeSweep sweep;
  bool have_sweep = false;
  criterion(5, "soft-edge scaling limits", [&]() -> Outcome {
    sweep.stencils = sweep_at(Real(-1.0), Real(-0.5), edge_ctx);
    sweep.extract = extract_of(sweep.stencils);
    have_sweep = true;
    return soft_edge(sweep);
  });
  criterion(6, "coupled Painleve II integrator", [&]() -> Outcome {
    if (!have_sweep) return {false, "no soft-edge extraction"};
    return pii_integrator(sweep, edge_ctx);
  });
  criterion(7, "Monte Carlo gap probabilities", monte_carlo);
  criterion(8, "determinism", determinism);

  std::printf("%d of 8 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
