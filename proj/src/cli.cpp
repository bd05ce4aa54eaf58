#include "jgl/cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jgl/errors.hpp"
#include "jgl/identities.hpp"
#include "jgl/montecarlo.hpp"
#include "jgl/ortho.hpp"
#include "jgl/painleve2.hpp"
#include "jgl/painleve4.hpp"
#include "jgl/softedge.hpp"
#include "jgl/weight.hpp"

namespace jgl::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr long kMinBits = 53;

std::optional<long> parse_bits(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const long bits = std::stol(text, &used);
    if (used != text.size() || bits < kMinBits) throw std::invalid_argument(text);
    return bits;
  } catch (const std::exception&) {
    throw ConfigInvalid("precision bits must be 'auto' or an integer >= " + std::to_string(kMinBits) + ", got '" +
                        text + "'");
  }
}

// Config-file values arrive as JSON scalars; reals may be numbers or strings.
std::string json_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw ConfigInvalid("unsupported config value " + v.dump());
}

void apply_config_file(const std::string& path, RunConfig& c, const CLI::App& app, std::string& precision,
                       std::string& fd_step) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigInvalid("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigInvalid("config file must hold a JSON object");

  auto as_int = [](const json& v) {
    if (!v.is_number_integer()) throw ConfigInvalid("expected an integer, got " + v.dump());
    return v.get<long long>();
  };
  using Setter = std::function<void(const json&)>;
  const std::map<std::string, Setter> setters = {
      {"command", [&](const json& v) { c.command = json_text(v); }},
      {"A", [&](const json& v) { c.A = json_text(v); }},
      {"B1", [&](const json& v) { c.B1 = json_text(v); }},
      {"B2", [&](const json& v) { c.B2 = json_text(v); }},
      {"s1", [&](const json& v) { c.s1 = json_text(v); }},
      {"s2", [&](const json& v) { c.s2 = json_text(v); }},
      {"relaxed", [&](const json& v) { c.relaxed = v.get<bool>(); }},
      {"n-max", [&](const json& v) { c.n_max = static_cast<int>(as_int(v)); }},
      {"n", [&](const json& v) { c.n = static_cast<int>(as_int(v)); }},
      {"k", [&](const json& v) { c.k = static_cast<int>(as_int(v)); }},
      {"precision-bits", [&](const json& v) { precision = json_text(v); }},
      {"fd-step", [&](const json& v) { fd_step = json_text(v); }},
      {"tolerance", [&](const json& v) { c.tolerance = json_text(v); }},
      {"t1", [&](const json& v) { c.t1 = json_text(v); }},
      {"t2", [&](const json& v) { c.t2 = json_text(v); }},
      {"n-list",
       [&](const json& v) {
         c.n_list.clear();
         for (const auto& e : v) c.n_list.push_back(static_cast<int>(as_int(e)));
       }},
      {"xi-span", [&](const json& v) { c.xi_span = json_text(v); }},
      {"mode", [&](const json& v) { c.mode = json_text(v); }},
      {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"samples", [&](const json& v) { c.samples = static_cast<long>(as_int(v)); }},
      {"threads", [&](const json& v) { c.threads = static_cast<int>(as_int(v)); }},
      {"output", [&](const json& v) { c.output_path = json_text(v); }},
      {"csv", [&](const json& v) { c.csv_path = json_text(v); }},
  };
  for (const auto& [raw_key, value] : doc.items()) {
    std::string key = raw_key;
    for (auto& ch : key) ch = ch == '_' ? '-' : ch;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigInvalid("unknown config key '" + raw_key + "'");
    // Command-line flags win over the file.
    const std::string flag = key == "command" ? "command" : "--" + key;
    if (app.count(flag) > 0) continue;
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigInvalid("config key '" + raw_key + "': " + e.what());
    }
  }
}

Real parse_real(const std::string& text, Precision p, const char* what) {
  try {
    return Real::parse(text, p);
  } catch (const std::exception&) {
    throw ConfigInvalid(std::string("cannot parse ") + what + " '" + text + "'");
  }
}

WeightParams weight_params(const RunConfig& c, Precision p) {
  WeightParams w{parse_real(c.A, p, "A"),   parse_real(c.B1, p, "B1"), parse_real(c.B2, p, "B2"),
                 parse_real(c.s1, p, "s1"), parse_real(c.s2, p, "s2"), !c.relaxed};
  w.validate();
  return w;
}

EdgeWeights edge_weights(const RunConfig& c, Precision p) {
  return EdgeWeights{parse_real(c.A, p, "A"), parse_real(c.B1, p, "B1"), parse_real(c.B2, p, "B2")};
}

std::optional<Real> fd_step(const RunConfig& c, Precision p) {
  if (!c.fd_step) return std::nullopt;
  return parse_real(*c.fd_step, p, "fd-step");
}

int digits_for(long bits) { return static_cast<int>(std::floor(static_cast<double>(bits) * std::log10(2.0))); }

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content << std::flush;
  } else {
    write_atomic(path, content);
  }
}

// Runs a group of checks that may hit a degenerate configuration; the
// group is skipped with a note rather than failing the run.
void guarded(ReportList& out, const std::string& what, const std::function<ReportList()>& body) {
  try {
    append(out, body());
  } catch (const DegenerateResidue& e) {
    std::cerr << "skipped " << what << ": " << e.what() << "\n";
  }
}

struct Outcome {
  long bits = 0;
  ReportList checks;
  std::string primary;
  std::string secondary;
  bool has_report = true;
};

Outcome run_moments(const RunConfig& c) {
  if (c.k < 0) throw ConfigInvalid("k must be non-negative");
  Outcome o;
  o.bits = c.precision_bits.value_or(128);
  const PrecisionContext ctx(o.bits);
  PrecisionScope scope(o.bits);
  const auto w = weight_params(c, ctx.precision());
  o.primary = moment(c.k, w, ctx).to_string(digits_for(o.bits)) + "\n";
  o.has_report = false;
  return o;
}

Outcome run_recurrence(const RunConfig& c) {
  Outcome o;
  const long start = c.precision_bits.value_or(default_bits(c.n_max));
  const PrecisionContext ctx(start);
  PrecisionScope scope(start);
  const auto w = weight_params(c, ctx.precision());
  const auto sys =
      c.precision_bits ? build_ortho_system(w, c.n_max, ctx) : build_ortho_system_auto(w, c.n_max, ctx);
  o.bits = sys.bits;
  std::ostringstream os;
  os << "n,alpha_n,beta_n,h_n,p_n,logD_n\n";
  for (int n = 0; n <= c.n_max; ++n) {
    os << n << ',' << sys.alpha[n].to_string(40) << ',' << sys.beta[n].to_string(40) << ','
       << sys.h[n].to_string(40) << ',' << sys.p[n].to_string(40) << ',' << sys.logD[n].to_string(40) << '\n';
  }
  o.primary = os.str();
  o.has_report = false;
  return o;
}

Outcome run_verify(const RunConfig& c) {
  if (c.n_max < 1) throw ConfigInvalid("verify needs n-max >= 1");
  Outcome o;
  o.bits = c.precision_bits.value_or(std::max(512L, default_bits(c.n_max + 1)));
  const long second_bits = c.precision_bits.value_or(std::max(768L, default_bits(c.n_max + 1)));
  const PrecisionContext ctx(o.bits);
  const PrecisionContext ctx2(second_bits);
  PrecisionScope scope(second_bits);
  const Precision p = ctx.precision();
  const auto w = weight_params(c, p);
  const auto sys = build_ortho_system(w, c.n_max + 1, ctx);

  guarded(o.checks, "difference system", [&] { return check_difference_system(sys, 1, c.n_max, ctx); });
  append(o.checks, check_christoffel_darboux(sys, 1, c.n_max, 4, c.seed, ctx));
  for (int n = 1; n <= c.n_max; ++n) {
    std::vector<Real> zs;
    for (const char* z : {"-1.3", "0.2", "1.1"}) {
      Real zr = Real::parse(z, p);
      if (zr != w.s1 && zr != w.s2) zs.push_back(std::move(zr));
    }
    append(o.checks, check_ladder_compatibility(sys, n, zs, ctx));
  }
  const int n = c.n_max;
  const auto step = fd_step(c, p);
  guarded(o.checks, "derivative relations", [&] { return check_derivative_relations(w, n, ctx, step); });
  guarded(o.checks, "Riccati analogs", [&] { return check_riccati(w, n, ctx, step); });
  const auto step2 = fd_step(c, ctx2.precision());
  const auto w2 = weight_params(c, ctx2.precision());
  guarded(o.checks, "coupled R PDEs", [&] { return check_coupled_pde_R(w2, n, ctx2, step2); });
  guarded(o.checks, "sigma PDE", [&] { return ReportList{check_sigma_pde(w2, n, ctx2, step2)}; });
  if (w2.B2.is_zero()) {
    guarded(o.checks, "single-jump ODE", [&] { return ReportList{check_single_jump_ode(w2, n, ctx2, step2)}; });
  }
  return o;
}

Outcome run_painleve4(const RunConfig& c) {
  if (c.n < 1) throw ConfigInvalid("painleve4 needs n >= 1");
  Outcome o;
  o.bits = c.precision_bits.value_or(std::max(512L, default_bits(c.n + 1)));
  const PrecisionContext ctx(o.bits);
  PrecisionScope scope(o.bits);
  const auto w = weight_params(c, ctx.precision());
  const auto step = fd_step(c, ctx.precision());
  append(o.checks, check_piv_state(w, c.n, ctx));
  append(o.checks, check_hamilton_equations(w, c.n, ctx, step));
  append(o.checks, check_recurrence_maps(w, c.n, ctx, step));
  return o;
}

std::vector<EdgeStencil> edge_stencils(const RunConfig& c, const PrecisionContext& ctx) {
  if (c.n_list.size() < 3) throw ConfigInvalid("n-list needs at least three sizes");
  for (std::size_t k = 1; k < c.n_list.size(); ++k) {
    if (c.n_list[k] != 2 * c.n_list[k - 1]) throw ConfigInvalid("n-list must double at each step");
  }
  const Precision p = ctx.precision();
  const auto weights = edge_weights(c, p);
  const Real t1 = parse_real(c.t1, p, "t1");
  const Real t2 = parse_real(c.t2, p, "t2");
  const Real dt = Real::parse("1e-3", p);
  std::vector<EdgeStencil> out;
  for (int n : c.n_list) out.push_back(sample_stencil(weights, n, t1, t2, dt, ctx));
  return out;
}

Outcome run_softedge(const RunConfig& c) {
  Outcome o;
  o.bits = c.precision_bits.value_or(128);
  const PrecisionContext ctx(o.bits);
  PrecisionScope scope(o.bits);
  const auto stencils = edge_stencils(c, ctx);
  ExtractOptions opts;
  opts.enforce_rate = false;
  const auto ex = extract_edge(stencils, opts);
  append(o.checks, check_edge_rates(ex));
  append(o.checks, check_mu_nu_pde(stencils, ex));
  append(o.checks, check_pii_residual(stencils, ex));
  append(o.checks, check_sigma_and_recurrence_asymptotics(stencils, ex));
  append(o.checks, check_hii_pde(stencils, ex, HiiPdeForm::with_gradient_term));
  append(o.checks, check_hii_pde(stencils, ex, HiiPdeForm::as_published));
  o.secondary = edge_csv(stencils);
  return o;
}

Outcome run_integrate_pii(const RunConfig& c) {
  Outcome o;
  o.bits = c.precision_bits.value_or(128);
  const PrecisionContext ctx(o.bits);
  PrecisionScope scope(o.bits);
  const Precision p = ctx.precision();
  const Real tol = parse_real(c.tolerance, p, "tolerance");
  const Real span = parse_real(c.xi_span, p, "xi-span");
  if (!(tol > 0)) throw ConfigInvalid("tolerance must be positive");
  if (span < 0) throw ConfigInvalid("xi-span must be non-negative");
  const auto stencils = edge_stencils(c, ctx);
  ExtractOptions opts;
  opts.enforce_rate = false;
  const auto ex = extract_edge(stencils, opts);
  const PIIState start = pii_state_from_extract(ex);

  constexpr int kSamplesPerSide = 30;
  std::vector<PIIState> trajectory;
  if (span > 0) {
    for (int dir : {-1, 1}) {
      std::vector<Real> pts;
      for (int k = 1; k < kSamplesPerSide; ++k) pts.push_back(start.xi + dir * span * k / kSamplesPerSide);
      const auto traj = integrate_pii(start, start.xi + dir * span, tol, ctx, pts);
      if (dir < 0) {
        trajectory.assign(traj.samples.rbegin(), traj.samples.rend());
      } else {
        trajectory.insert(trajectory.end(), traj.samples.begin() + 1, traj.samples.end());
      }
    }
    append(o.checks, check_pii_integrator(start, start.xi + span, tol, ctx));
  } else {
    trajectory.push_back(integrate_pii(start, start.xi, tol, ctx).samples.front());
  }
  o.checks.push_back(match_finite_n(ex, span, ctx, tol));
  o.secondary = trajectory_csv(trajectory);
  return o;
}

Outcome run_montecarlo(const RunConfig& c) {
  Outcome o;
  o.bits = c.precision_bits.value_or(128);
  const PrecisionContext ctx(o.bits);
  MCConfig mc;
  mc.n = c.n;
  mc.samples = c.samples;
  mc.seed = c.seed;
  mc.threads = c.threads;
  try {
    mc.s1 = std::stod(c.s1);
    mc.s2 = std::stod(c.s2);
  } catch (const std::exception&) {
    throw ConfigInvalid("cannot parse s1/s2");
  }
  mc.validate();
  std::vector<GapMode> modes;
  if (c.mode == "both") {
    modes = {GapMode::none_in_interval, GapMode::all_in_interval};
  } else {
    modes = {parse_gap_mode(c.mode)};
  }
  const auto both = gap_probabilities_mc(mc);
  std::vector<MCRow> rows;
  const Precision p = ctx.precision();
  for (GapMode m : modes) {
    MCRow r;
    r.n = mc.n;
    r.s1 = mc.s1;
    r.s2 = mc.s2;
    r.estimate = m == GapMode::none_in_interval ? both.none : both.all;
    r.p_det = gap_probability_det(mc.n, mc.s1, mc.s2, m, ctx);
    r.sigma_distance = sigma_distance(r.estimate, r.p_det.to_double());
    const auto w = m == GapMode::none_in_interval ? WeightParams::make(1, -1, 1, mc.s1, mc.s2)
                                                  : WeightParams::make(0, 1, -1, mc.s1, mc.s2);
    o.checks.push_back(ResidualReport::at_most(std::string("|p_hat - p_det| / stderr (") + to_string(m) + ")", mc.n,
                                               w, Real(r.sigma_distance, p), Real(4, p)));
    rows.push_back(std::move(r));
  }
  o.primary = mc_csv(rows);
  o.has_report = false;
  return o;
}

std::string threshold_text(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv, std::string* help) {
  RunConfig c;
  CLI::App app{"Gaussian weights with two jumps: Hankel determinants, Painleve IV/II checks, soft edge"};
  std::vector<std::string> commands(std::begin(kCommands), std::end(kCommands));
  std::string precision = "auto";
  std::string fd = "auto";
  std::string config_path;
  app.add_option("command", c.command, "moments | recurrence | verify | painleve4 | softedge | integrate-pii | montecarlo")
      ->check(CLI::IsMember(commands));
  app.add_option("--A", c.A, "weight on the whole line");
  app.add_option("--B1", c.B1, "jump at s1");
  app.add_option("--B2", c.B2, "jump at s2");
  app.add_option("--s1", c.s1, "first jump location (montecarlo: interval start)");
  app.add_option("--s2", c.s2, "second jump location (montecarlo: interval end)");
  app.add_flag("--relaxed", c.relaxed, "allow B_i = 0 and s1 >= s2");
  app.add_option("--n-max", c.n_max, "largest degree");
  app.add_option("--n", c.n, "degree (painleve4) or matrix size (montecarlo)");
  app.add_option("--k", c.k, "moment index");
  app.add_option("--precision-bits", precision, "working precision in bits, or auto");
  app.add_option("--fd-step", fd, "finite-difference step, or auto");
  app.add_option("--tolerance", c.tolerance, "integrator tolerance");
  app.add_option("--t1", c.t1, "soft-edge variable t1");
  app.add_option("--t2", c.t2, "soft-edge variable t2");
  app.add_option("--n-list", c.n_list, "doubling matrix sizes, comma separated")->delimiter(',');
  app.add_option("--xi-span", c.xi_span, "integrate-pii half-width around t1");
  app.add_option("--mode", c.mode, "montecarlo event: none, all or both");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--samples", c.samples, "montecarlo sample count");
  app.add_option("--threads", c.threads, "montecarlo worker threads");
  app.add_option("--output", c.output_path, "primary output file (default stdout)");
  app.add_option("--csv", c.csv_path, "secondary CSV (softedge samples, integrate-pii trajectory)");
  app.add_option("--config", config_path, "JSON file with any of the options above");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    if (help) {
      *help = app.help();
      return c;
    }
    throw ConfigInvalid(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigInvalid(e.what());
  }
  if (!config_path.empty()) apply_config_file(config_path, c, app, precision, fd);
  if (c.command.empty()) throw ConfigInvalid("no command given");
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end()) {
    throw ConfigInvalid("unknown command '" + c.command + "'");
  }
  c.precision_bits = parse_bits(precision);
  if (!c.precision_bits) {
    if (const char* env = std::getenv("JGL_PRECISION_BITS"); env && *env) c.precision_bits = parse_bits(env);
  }
  if (fd != "auto") c.fd_step = fd;
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  if (c.n_max < 0 || c.n_max > 200) throw ConfigInvalid("n-max must be in [0, 200]");
  if (c.n < 1 || c.n > 64) throw ConfigInvalid("n must be in [1, 64]");
  if (c.samples < 1) throw ConfigInvalid("samples must be positive");
  if (c.threads < 1) throw ConfigInvalid("threads must be positive");
  if (c.mode != "both" && c.mode != "none" && c.mode != "all") throw ConfigInvalid("mode must be none, all or both");
  for (int n : c.n_list) {
    if (n < 1) throw ConfigInvalid("n-list entries must be positive");
  }
}

std::string report_json(const RunConfig& c, long precision_bits, const ReportList& checks) {
  json doc;
  doc["command"] = c.command;
  json params;
  params["A"] = c.A;
  params["B1"] = c.B1;
  params["B2"] = c.B2;
  if (c.command == "softedge" || c.command == "integrate-pii") {
    params["t1"] = c.t1;
    params["t2"] = c.t2;
    params["n_list"] = c.n_list;
  } else {
    params["s1"] = c.s1;
    params["s2"] = c.s2;
    params["strict"] = !c.relaxed;
  }
  doc["params"] = params;
  doc["precision_bits"] = precision_bits;
  json list = json::array();
  for (const auto& r : checks) {
    json e;
    e["label"] = r.label;
    e["n"] = r.n;
    e["lhs"] = r.lhs.to_string(40);
    e["rhs"] = r.rhs.to_string(40);
    e["rel_residual"] = r.rel_residual.to_string(40);
    e["threshold"] = threshold_text(r.threshold);
    e["pass"] = r.pass;
    list.push_back(std::move(e));
  }
  doc["checks"] = std::move(list);
  return doc.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path + ": " + ec.message());
  }
}

RunResult run(const RunConfig& c) {
  RunResult result;
  try {
    validate(c);
    Outcome o;
    if (c.command == "moments") {
      o = run_moments(c);
    } else if (c.command == "recurrence") {
      o = run_recurrence(c);
    } else if (c.command == "verify") {
      o = run_verify(c);
    } else if (c.command == "painleve4") {
      o = run_painleve4(c);
    } else if (c.command == "softedge") {
      o = run_softedge(c);
    } else if (c.command == "integrate-pii") {
      o = run_integrate_pii(c);
    } else if (c.command == "montecarlo") {
      o = run_montecarlo(c);
    } else {
      throw ConfigInvalid("unknown command '" + c.command + "'");
    }
    result.checks = std::move(o.checks);
    result.primary = o.has_report ? report_json(c, o.bits, result.checks) : std::move(o.primary);
    result.secondary = std::move(o.secondary);
    emit(c.output_path, result.primary);
    if (!c.csv_path.empty() && !result.secondary.empty()) write_atomic(c.csv_path, result.secondary);
    for (const auto& r : result.checks) {
      if (!r.pass) {
        std::cerr << "FAIL " << r.label << " (n = " << r.n << "): rel_residual " << r.rel_residual.to_string(6)
                  << ", threshold " << threshold_text(r.threshold) << "\n";
      }
    }
    result.exit_code = all_pass(result.checks) ? 0 : 1;
  } catch (const ConfigInvalid& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    result.exit_code = 2;
  } catch (const InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    result.exit_code = 2;
  } catch (const PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    result.exit_code = 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    result.exit_code = 1;
  }
  return result;
}

int main(int argc, const char* const* argv) {
  RunConfig config;
  try {
    std::string help;
    config = parse_args(argc, argv, &help);
    if (!help.empty()) {
      std::cout << help;
      return 0;
    }
  } catch (const ConfigInvalid& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  }
  return run(config).exit_code;
}

}  // namespace jgl::cli
