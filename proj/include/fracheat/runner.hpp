#pragma once

// Config parsing, subcommand orchestration and artifact output.
// Exit codes: 0 all checks pass, 1 a check failed (or the run failed),
// 2 configuration or input error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fracheat/check_report.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/heat_kernel.hpp"
#include "fracheat/holder_estimator.hpp"
#include "fracheat/io.hpp"
#include "fracheat/lemma_verifier.hpp"
#include "fracheat/noise_field.hpp"
#include "fracheat/spde_solver.hpp"

namespace fracheat::runner {

namespace fs = std::filesystem;
using io::json;

/// Used whenever the config gives no seed_base.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

enum class Subcommand { kernel, noise, simulate, estimate, verify, report };

inline const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> n{"kernel", "noise", "simulate", "estimate", "verify", "report"};
  return n;
}

inline Subcommand parse_subcommand(const std::string& s) {
  const auto& n = subcommand_names();
  const auto it = std::find(n.begin(), n.end(), s);
  if (it == n.end()) throw UsageError("unknown subcommand '" + s + "'");
  return static_cast<Subcommand>(it - n.begin());
}

inline std::string subcommand_name(Subcommand s) { return subcommand_names()[static_cast<std::size_t>(s)]; }

struct KernelRun {
  double alpha = 1.5;
  std::vector<double> times{0.1, 1.0, 10.0};
  /// Rows written for |x| <= x_max t^{1/alpha}.
  double x_max = 10.0;
};

struct NoiseRun {
  double beta = 0.5;
  double length = 32.0;
  std::size_t points = 1024;
  double dt = 0.01;
  std::size_t draws = 10000;
  std::vector<double> lags{0.25, 0.5, 1.0, 2.0};
  noise::ZeroModeRule zero_mode = noise::ZeroModeRule::compensated();
  double tolerance = 0.05;
};

/// Lags in grid steps (dx for space, dt for time).
struct EstimatorRun {
  std::vector<double> k{2.0, 4.0};
  std::vector<long> space_lags;  // empty: geometric ladder over [4, N/8]
  std::vector<long> space_window{8, 64};
  std::vector<long> time_lags{4, 6, 8, 11, 16, 23, 32, 45, 64};
  std::vector<long> time_window{8, 64};
  std::optional<double> time_base;  // default: burn_in
  std::optional<double> burn_in;    // default: T/2
};

struct RunConfig {
  std::uint64_t seed_base = kDefaultSeed;
  unsigned threads = 0;
  solver::ModelSpec model;
  solver::SolverConfig solver;
  bool explicit_snapshots = false;
  EstimatorRun estimator;
  verifier::VerifierGrids verifier;
  KernelRun kernel;
  NoiseRun noise;
  std::size_t write_paths = 2;
  std::vector<std::string> runs;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("field '" + field + "': " + msg);
}

/// Reads the keys of one JSON object and rejects the ones nobody asked for.
class Fields {
public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(at(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(at(key), "must be finite");
    }
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(at(key), "expected a number");
      out = v->get<double>();
    }
  }
  template <class U>
  void unsigned_int(const std::string& key, U& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) fail(at(key), "expected a nonnegative integer");
      out = static_cast<U>(v->get<unsigned long long>());
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) fail(at(key), "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void integers(const std::string& key, std::vector<long>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) fail(at(key), "expected an array of integers");
        out.push_back(e.get<long>());
      }
    }
  }
  void strings(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) fail(at(key), "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(at(k), "unknown field");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline noise::ZeroModeRule parse_zero_mode(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "drop") return noise::ZeroModeRule::drop();
    if (s == "compensated") return noise::ZeroModeRule::compensated();
    fail(path, "expected drop, compensated or {\"kind\": \"finite\", \"value\": w}");
  }
  Fields f(j, path);
  std::string kind = "finite";
  double value = 0.0;
  f.string("kind", kind);
  f.number("value", value);
  f.finish();
  if (kind == "drop") return noise::ZeroModeRule::drop();
  if (kind == "compensated") return noise::ZeroModeRule::compensated();
  if (kind == "finite") {
    if (!(value >= 0.0)) fail(path + ".value", "finite zero-mode weight must be >= 0");
    return noise::ZeroModeRule::finite(value);
  }
  fail(path + ".kind", "unknown zero-mode rule '" + kind + "'");
}

inline json zero_mode_json(const noise::ZeroModeRule& z) {
  if (z.kind == noise::ZeroModeRule::Kind::finite) return {{"kind", "finite"}, {"value", z.value}};
  return z.name();
}

inline void parse_model(const json& j, solver::ModelSpec& m) {
  Fields f(j, "model");
  f.number("alpha", m.alpha);
  f.number("beta", m.beta);
  f.number("K", m.K);
  f.number("rho", m.rho);
  if (const json* s = f.find("sigma")) {
    Fields g(*s, "model.sigma");
    std::string kind = m.sigma.name();
    g.string("kind", kind);
    double a = kind == "affine" ? 1.0 : m.sigma.a, b = 0.0;
    g.number("a", a);
    g.number("b", b);
    g.finish();
    if (kind == "zero") m.sigma = solver::SigmaSpec::zero();
    else if (kind == "constant") m.sigma = solver::SigmaSpec::constant(a);
    else if (kind == "identity") m.sigma = solver::SigmaSpec::identity();
    else if (kind == "affine") m.sigma = solver::SigmaSpec::affine(a, b);
    else if (kind == "sine") m.sigma = solver::SigmaSpec::sine();
    else fail("model.sigma.kind", "unknown sigma '" + kind + "' (zero, constant, identity, affine, sine)");
  }
  if (const json* p = f.find("phi")) {
    Fields g(*p, "model.phi");
    std::string kind = m.phi.name();
    g.string("kind", kind);
    double value = m.phi.value, rho = m.phi.rho;
    long mode = m.phi.mode;
    std::vector<double> phases;
    g.number("value", value);
    if (const json* md = g.find("mode")) {
      if (!md->is_number_integer()) fail("model.phi.mode", "expected an integer");
      mode = md->get<long>();
    }
    g.number("rho", rho);
    g.numbers("phases", phases);
    g.finish();
    if (kind == "constant") m.phi = solver::PhiSpec::constant(value);
    else if (kind == "sinusoid") m.phi = solver::PhiSpec::sinusoid(value, mode);
    else if (kind == "rough_holder") {
      m.phi = solver::PhiSpec::rough_holder(rho);
      m.phi.phases = phases;
    } else {
      fail("model.phi.kind", "unknown phi '" + kind + "' (constant, sinusoid, rough_holder)");
    }
  }
  f.finish();
  try {
    m.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

inline void parse_solver(const json& j, RunConfig& c) {
  Fields f(j, "solver");
  auto& s = c.solver;
  f.number("length", s.grid.length);
  f.unsigned_int("points", s.grid.points);
  f.number("dt", s.grid.dt);
  f.number("horizon", s.grid.horizon);
  f.unsigned_int("paths", s.path_count);
  if (const json* z = f.find("zero_mode")) s.zero_mode = parse_zero_mode(*z, "solver.zero_mode");
  std::string scheme = solver::scheme_name(s.scheme);
  f.string("scheme", scheme);
  if (scheme == "exact_variance") s.scheme = solver::Scheme::exact_variance;
  else if (scheme == "left_point") s.scheme = solver::Scheme::left_point;
  else fail("solver.scheme", "expected exact_variance or left_point");
  f.boolean("dealias", s.dealias);
  if (f.find("snapshot_times")) {
    f.numbers("snapshot_times", s.snapshot_times);
    c.explicit_snapshots = true;
  }
  f.finish();
}

inline void parse_estimator(const json& j, EstimatorRun& e) {
  Fields f(j, "estimator");
  f.numbers("k", e.k);
  f.integers("space_lags", e.space_lags);
  f.integers("space_window", e.space_window);
  f.integers("time_lags", e.time_lags);
  f.integers("time_window", e.time_window);
  f.number("time_base", e.time_base);
  f.number("burn_in", e.burn_in);
  f.finish();
  for (double k : e.k)
    if (!(k >= 2.0)) fail("estimator.k", "moment orders must be >= 2");
  if (e.space_window.size() != 2) fail("estimator.space_window", "expected [lo, hi] in dx steps");
  if (e.time_window.size() != 2) fail("estimator.time_window", "expected [lo, hi] in dt steps");
}

inline void parse_verifier(const json& j, verifier::VerifierGrids& g) {
  Fields f(j, "verifier");
  f.numbers("kernel_alphas", g.kernel_alphas);
  f.numbers("kernel_times", g.kernel_times);
  f.number("kernel_sweep", g.kernel_sweep);
  f.numbers("modulus_alphas", g.modulus_alphas);
  f.numbers("modulus_times", g.modulus_times);
  f.numbers("x_sweep", g.x_sweep);
  f.numbers("eps_over_t", g.eps_over_t);
  f.number("smoothing_alpha", g.smoothing_alpha);
  f.numbers("smoothing_times", g.smoothing_times);
  f.numbers("smoothing_rhos", g.smoothing_rhos);
  f.numbers("identity_alphas", g.identity_alphas);
  f.numbers("identity_betas", g.identity_betas);
  f.numbers("identity_times", g.identity_times);
  f.unsigned_int("mu_points", g.mu_points);
  f.unsigned_int("r_points", g.r_points);
  f.finish();
}

inline void parse_kernel(const json& j, KernelRun& k) {
  Fields f(j, "kernel");
  f.number("alpha", k.alpha);
  f.numbers("times", k.times);
  f.number("x_max", k.x_max);
  f.finish();
  try {
    for (double t : k.times) kernel::validate(k.alpha, t);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  if (k.times.empty()) fail("kernel.times", "needs at least one time");
}

inline void parse_noise(const json& j, NoiseRun& n) {
  Fields f(j, "noise");
  f.number("beta", n.beta);
  f.number("length", n.length);
  f.unsigned_int("points", n.points);
  f.number("dt", n.dt);
  f.unsigned_int("draws", n.draws);
  f.numbers("lags", n.lags);
  if (const json* z = f.find("zero_mode")) n.zero_mode = parse_zero_mode(*z, "noise.zero_mode");
  f.number("tolerance", n.tolerance);
  f.finish();
  if (!(n.beta > 0.0 && n.beta < 1.0)) fail("noise.beta", "must lie in (0, 1), got " + std::to_string(n.beta));
  if (n.draws < 2) fail("noise.draws", "needs at least 2 draws");
}

}  // namespace detail

inline double burn_in(const RunConfig& c) { return c.estimator.burn_in.value_or(c.solver.grid.horizon / 2.0); }
inline double time_base(const RunConfig& c) { return c.estimator.time_base.value_or(burn_in(c)); }

/// Spatial lags in dx steps: the configured list, or a sqrt(2) ladder over [4, N/8].
inline std::vector<long> space_lag_steps(const RunConfig& c) {
  if (!c.estimator.space_lags.empty()) return c.estimator.space_lags;
  std::vector<long> m;
  const double top = static_cast<double>(c.solver.grid.points) / 8.0;
  for (double v = 4.0; v <= top + 1e-9; v *= std::sqrt(2.0)) {
    const long r = std::lround(v);
    if (m.empty() || r != m.back()) m.push_back(r);
  }
  return m;
}

/// Snapshot times: explicit, or the temporal base, base + lag dt, and T.
inline std::vector<double> snapshot_times(const RunConfig& c) {
  if (c.explicit_snapshots) return c.solver.snapshot_times;
  const double base = time_base(c), dt = c.solver.grid.dt, T = c.solver.grid.horizon;
  std::vector<double> t{base};
  for (long m : c.estimator.time_lags) t.push_back(base + static_cast<double>(m) * dt);
  t.push_back(T);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(), [&](double a, double b) { return std::abs(a - b) < 1e-9 * dt; }), t.end());
  return t;
}

/// Parses a config document; every problem is a ConfigError naming the field.
inline RunConfig parse_config(const json& j) {
  RunConfig c;
  detail::Fields f(j, "");
  std::string sub;
  f.string("subcommand", sub);
  f.unsigned_int("seed_base", c.seed_base);
  f.unsigned_int("threads", c.threads);
  if (const json* v = f.find("model")) detail::parse_model(*v, c.model);
  else c.model.validate();
  if (const json* v = f.find("solver")) detail::parse_solver(*v, c);
  if (const json* v = f.find("estimator")) detail::parse_estimator(*v, c.estimator);
  if (const json* v = f.find("verifier")) detail::parse_verifier(*v, c.verifier);
  if (const json* v = f.find("kernel")) detail::parse_kernel(*v, c.kernel);
  if (const json* v = f.find("noise")) detail::parse_noise(*v, c.noise);
  if (const json* v = f.find("output")) {
    detail::Fields o(*v, "output");
    o.unsigned_int("write_paths", c.write_paths);
    o.finish();
  }
  f.strings("runs", c.runs);
  f.finish();
  if (!sub.empty()) parse_subcommand(sub);
  c.solver.seed_base = c.seed_base;
  c.solver.threads = c.threads;
  return c;
}

/// Parses JSON text; syntax errors report line and column.
inline RunConfig parse_config_text(const std::string& text, const std::string& source = "config") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": invalid JSON (" << e.what() << ")";
    throw ConfigError(os.str());
  }
  return parse_config(j);
}

/// Every resolved parameter; parse_config(resolved_json(c)) reproduces c.
inline json resolved_json(const RunConfig& c) {
  const auto& m = c.model;
  json sigma = {{"kind", m.sigma.name()}, {"a", m.sigma.a}, {"b", m.sigma.b}};
  json phi = {{"kind", m.phi.name()}, {"value", m.phi.value}, {"mode", m.phi.mode}, {"rho", m.phi.rho}};
  if (!m.phi.phases.empty()) phi["phases"] = m.phi.phases;
  const auto& s = c.solver;
  const auto& e = c.estimator;
  const auto& g = c.verifier;
  return {
      {"seed_base", c.seed_base},
      {"threads", c.threads},
      {"model", {{"alpha", m.alpha}, {"beta", m.beta}, {"K", m.K}, {"rho", m.rho}, {"sigma", sigma}, {"phi", phi}}},
      {"solver",
       {{"length", s.grid.length},
        {"points", s.grid.points},
        {"dt", s.grid.dt},
        {"horizon", s.grid.horizon},
        {"paths", s.path_count},
        {"zero_mode", detail::zero_mode_json(s.zero_mode)},
        {"scheme", solver::scheme_name(s.scheme)},
        {"dealias", s.dealias},
        {"snapshot_times", snapshot_times(c)}}},
      {"estimator",
       {{"k", e.k},
        {"space_lags", space_lag_steps(c)},
        {"space_window", e.space_window},
        {"time_lags", e.time_lags},
        {"time_window", e.time_window},
        {"time_base", time_base(c)},
        {"burn_in", burn_in(c)}}},
      {"verifier",
       {{"kernel_alphas", g.kernel_alphas},
        {"kernel_times", g.kernel_times},
        {"kernel_sweep", g.kernel_sweep},
        {"modulus_alphas", g.modulus_alphas},
        {"modulus_times", g.modulus_times},
        {"x_sweep", g.x_sweep},
        {"eps_over_t", g.eps_over_t},
        {"smoothing_alpha", g.smoothing_alpha},
        {"smoothing_times", g.smoothing_times},
        {"smoothing_rhos", g.smoothing_rhos},
        {"identity_alphas", g.identity_alphas},
        {"identity_betas", g.identity_betas},
        {"identity_times", g.identity_times},
        {"mu_points", g.mu_points},
        {"r_points", g.r_points}}},
      {"kernel", {{"alpha", c.kernel.alpha}, {"times", c.kernel.times}, {"x_max", c.kernel.x_max}}},
      {"noise",
       {{"beta", c.noise.beta},
        {"length", c.noise.length},
        {"points", c.noise.points},
        {"dt", c.noise.dt},
        {"draws", c.noise.draws},
        {"lags", c.noise.lags},
        {"zero_mode", detail::zero_mode_json(c.noise.zero_mode)},
        {"tolerance", c.noise.tolerance}}},
      {"output", {{"write_paths", c.write_paths}}},
      {"runs", c.runs}};
}

/// What one subcommand produced.
struct RunResult {
  std::vector<CheckReport> checks;
  json results = json::object();
  json diagnostics = json::object();
  std::vector<std::string> artifacts;
  std::string summary;

  /// Reports flagged out of theorem (applicable = 0) do not decide the exit status.
  bool all_pass() const {
    for (const auto& r : checks)
      if (!r.pass && !(r.has_detail("applicable") && r.detail("applicable") == 0.0)) return false;
    return true;
  }
};

namespace detail {

inline void emit(RunResult& r, const fs::path& dir, const std::string& name, const std::string& text) {
  io::write_file(dir / name, text);
  r.artifacts.push_back(name);
}

inline json checks_json(const std::vector<CheckReport>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back(io::to_json(c));
  return a;
}

inline RunResult run_kernel(const RunConfig& c, const fs::path& dir) {
  RunResult r;
  const auto& k = c.kernel;
  io::Csv csv({"t", "x", "p", "bound_ratio"});
  json diag = json::array();
  CheckReport mass;
  mass.check_name = "kernel_mass";
  mass.tolerance = 1e-6;
  mass.parameter_grid = "alpha=" + io::format_double(k.alpha);
  double worst = 0.0;
  for (double t : k.times) {
    const auto tab = kernel::kernel_table({k.alpha, t, std::nullopt, {}});
    const double s = std::pow(t, 1.0 / k.alpha);
    for (std::size_t i = 0; i < tab.values.size(); ++i) {
      const double x = tab.abscissae[i];
      if (std::abs(x) > k.x_max * s) continue;
      csv.cell(t).cell(x).cell(tab.values[i]).cell(tab.values[i] * std::pow(s + std::abs(x), 1.0 + k.alpha) / t);
    }
    const auto& g = *tab.diagnostics.grid;
    worst = std::max(worst, std::abs(tab.mass() - 1.0));
    diag.push_back({{"t", t},
                    {"length", g.length},
                    {"points", g.points},
                    {"mass", tab.mass()},
                    {"min_value", tab.diagnostics.min_value},
                    {"fourier_tail", io::number(tab.diagnostics.fourier_tail)},
                    {"alias_estimate", io::number(tab.diagnostics.alias_estimate)},
                    {"central_value", kernel::kernel_central_value(k.alpha, t)}});
  }
  mass.fitted_constant = worst;
  mass.violations = worst > mass.tolerance ? 1 : 0;
  mass.pass = mass.violations == 0;
  mass.details = {{"max_mass_error", worst}};
  r.checks.push_back(mass);
  emit(r, dir, "kernel.csv", csv.text());
  r.results["grids"] = diag;
  std::ostringstream os;
  os << "kernel alpha=" << k.alpha << " times=" << k.times.size() << " max |mass-1|=" << worst
     << (mass.pass ? " PASS" : " FAIL") << "\n";
  r.summary = os.str();
  return r;
}

inline RunResult run_noise(const RunConfig& c, const fs::path& dir) {
  RunResult r;
  const auto& n = c.noise;
  noise::NoiseSpec spec{n.beta, {n.length, n.points, n.dt, 0.0}, n.dt, c.seed_base, n.zero_mode};
  try {
    spec.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  const auto rep = noise::covariance_report(spec, n.draws, n.lags);
  io::Csv csv({"lag", "estimate", "stderr", "target", "spectral", "rel_err"});
  CheckReport chk;
  chk.check_name = "noise_covariance";
  chk.tolerance = n.tolerance;
  chk.parameter_grid = "beta=" + io::format_double(n.beta) + " L=" + io::format_double(n.length) +
                       " N=" + std::to_string(n.points) + " draws=" + std::to_string(n.draws) +
                       " zero_mode=" + n.zero_mode.name();
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.lags.size(); ++i) {
    const double rel = rep.estimate[i] / rep.target[i] - 1.0;
    worst = std::max(worst, std::abs(rel));
    if (std::abs(rel) > n.tolerance) ++chk.violations;
    csv.cell(rep.lags[i]).cell(rep.estimate[i]).cell(rep.std_error[i]).cell(rep.target[i]).cell(rep.spectral[i]).cell(rel);
  }
  chk.fitted_constant = worst;
  chk.details = {{"max_rel_err", worst}, {"riesz_constant_half", noise::riesz_constant(0.5)}};
  chk.pass = chk.violations == 0;
  r.checks.push_back(chk);
  emit(r, dir, "noise_covariance.csv", csv.text());
  std::ostringstream os;
  os << "noise beta=" << n.beta << " draws=" << n.draws << " max rel err=" << worst << (chk.pass ? " PASS" : " FAIL")
     << "\n";
  r.summary = os.str();
  return r;
}

struct Ensemble {
  solver::SolverConfig config;
  std::vector<std::vector<FieldSnapshot>> paths;
  std::vector<double> space_lags, time_lags;
};

inline Ensemble simulate(const RunConfig& c, RunResult& r) {
  Ensemble e;
  e.config = c.solver;
  const double dx = e.config.grid.dx(), dt = e.config.grid.dt;
  for (long m : space_lag_steps(c)) e.space_lags.push_back(static_cast<double>(m) * dx);
  for (long m : c.estimator.time_lags) e.time_lags.push_back(static_cast<double>(m) * dt);
  const double base = time_base(c);
  if (base < burn_in(c) - 1e-12) throw ConfigError("field 'estimator.time_base': before the burn-in");
  if (!c.explicit_snapshots && !e.time_lags.empty() &&
      base + e.time_lags.back() > e.config.grid.horizon * (1.0 + 1e-12))
    throw ConfigError("field 'estimator.time_lags': base + largest lag exceeds solver.horizon");
  e.config.snapshot_times = snapshot_times(c);
  try {
    e.config.validate();
    c.model.validate();
  } catch (const ParameterError& ex) {
    throw ConfigError(std::string("solver: ") + ex.what());
  }
  e.paths = solver::simulate_ensemble(c.model, e.config);
  r.diagnostics["domain_truncation_mass"] =
      io::number(solver::domain_truncation_mass(c.model.alpha, e.config.grid.horizon, e.config.grid.length));
  return e;
}

inline std::vector<MomentTable> structure_tables(const RunConfig& c, const Ensemble& e) {
  std::vector<MomentTable> out;
  const double T = e.config.grid.horizon;
  for (double k : c.estimator.k)
    out.push_back(estimator::spatial_structure(e.paths, T, e.config.grid, k, e.space_lags, c.threads));
  for (double k : c.estimator.k)
    out.push_back(estimator::temporal_structure(e.paths, time_base(c), k, e.time_lags, burn_in(c), 1e-9,
                                                c.threads));
  return out;
}

inline std::string fields_csv(const Ensemble& e, std::size_t count) {
  io::Csv csv({"path", "t", "x", "u"});
  const double dx = e.config.grid.dx();
  for (std::size_t p = 0; p < std::min(count, e.paths.size()); ++p)
    for (const auto& s : e.paths[p])
      for (std::size_t i = 0; i < s.values.size(); ++i)
        csv.cell(p).cell(s.time).cell(static_cast<double>(i) * dx).cell(s.values[i]);
  return csv.text();
}

inline RunResult run_simulate(const RunConfig& c, const fs::path& dir) {
  RunResult r;
  const auto e = simulate(c, r);
  const auto tables = structure_tables(c, e);
  emit(r, dir, "fields.csv", fields_csv(e, c.write_paths));
  emit(r, dir, "moments.csv", io::moment_tables_csv(tables));
  json t = json::array();
  for (const auto& tab : tables) t.push_back(io::to_json(tab));
  r.results["tables"] = t;
  std::ostringstream os;
  os << "simulate paths=" << e.paths.size() << " N=" << e.config.grid.points << " steps=" << e.config.steps() << "\n";
  r.summary = os.str();
  return r;
}

inline RunResult run_estimate(const RunConfig& c, const fs::path& dir) {
  RunResult r;
  const auto e = simulate(c, r);
  const auto tables = structure_tables(c, e);
  emit(r, dir, "moments.csv", io::moment_tables_csv(tables));
  const double dx = e.config.grid.dx(), dt = e.config.grid.dt;
  const auto& w = c.estimator;
  const estimator::LagWindow space_win{static_cast<double>(w.space_window[0]) * dx,
                                       static_cast<double>(w.space_window[1]) * dx};
  const estimator::LagWindow time_win{static_cast<double>(w.time_window[0]) * dt,
                                      static_cast<double>(w.time_window[1]) * dt};
  json tj = json::array(), fj = json::array(), bj = json::array();
  std::ostringstream os;
  for (const auto& tab : tables) {
    tj.push_back(io::to_json(tab));
    const auto fit = estimator::fit_exponent(tab, tab.axis == Axis::space ? space_win : time_win);
    fj.push_back(io::to_json(fit));
    const auto bounds = estimator::theorem_bounds(c.model.alpha, c.model.beta, c.model.rho, tab.k);
    bj.push_back(io::to_json(bounds));
    auto rep = estimator::consistency_report(fit, bounds, tab.k, tab.axis);
    os << std::left << std::setw(24) << rep.check_name << " k=" << tab.k << " slope=" << fit.slope
       << " target=" << rep.detail("target_slope") << " margin=" << rep.detail("margin")
       << (rep.pass ? " PASS" : " FAIL") << (rep.note.empty() ? "" : " (" + rep.note + ")") << "\n";
    r.checks.push_back(std::move(rep));
  }
  if (c.model.sigma.additive()) {
    io::Csv oc({"axis", "k", "lag", "oracle"});
    const auto so = solver::gaussian_oracle_structure(c.model, e.config, e.config.grid.horizon, e.space_lags);
    const auto to = solver::gaussian_oracle_temporal(c.model, e.config, time_base(c), e.time_lags);
    for (const auto* o : {&so, &to})
      for (std::size_t i = 0; i < o->lags.size(); ++i) oc.cell(axis_name(o->axis)).cell(2.0).cell(o->lags[i]).cell(o->moments[i]);
    emit(r, dir, "oracle.csv", oc.text());
    r.results["oracle"] = json::array({io::to_json(so), io::to_json(to)});
  }
  r.results["tables"] = tj;
  r.results["fits"] = fj;
  r.results["bounds"] = bj;
  r.summary = os.str();
  return r;
}

inline RunResult run_verify(const RunConfig& c, const fs::path&) {
  RunResult r;
  r.checks = verifier::run_all(c.verifier, c.threads);
  r.summary = verifier::summary_table(r.checks);
  return r;
}

inline RunResult run_report(const RunConfig& c, const std::vector<std::string>& extra_runs, const fs::path& dir) {
  RunResult r;
  std::vector<std::string> runs = c.runs;
  runs.insert(runs.end(), extra_runs.begin(), extra_runs.end());
  std::set<std::string> seen;
  json merged = json::array();
  io::Csv plot({"run", "axis", "k", "lag", "moment", "stderr", "log_lag", "log_moment"});
  std::size_t passed = 0, total = 0;
  for (const auto& d : runs) {
    const fs::path mpath = fs::path(d) / "manifest.json";
    if (!fs::exists(mpath)) throw InputError("missing manifest: " + mpath.string());
    json manifest;
    try {
      manifest = json::parse(io::read_file(mpath));
    } catch (const json::parse_error& e) {
      throw InputError("unreadable manifest " + mpath.string() + ": " + e.what());
    }
    const std::string hash = manifest.value("config_hash", "");
    const std::string key = manifest.value("subcommand", "") + ":" + hash;
    if (!seen.insert(key).second) continue;
    json entry = {{"dir", d}, {"subcommand", manifest.value("subcommand", "")}, {"config_hash", hash}};
    const fs::path rpath = fs::path(d) / "results.json";
    if (fs::exists(rpath)) {
      const json res = json::parse(io::read_file(rpath));
      for (const char* k : {"checks", "fits", "bounds"})
        if (res.contains(k)) entry[k] = res[k];
      if (res.contains("checks"))
        for (const auto& ch : res["checks"]) {
          ++total;
          if (ch.value("pass", false)) ++passed;
          if (ch.contains("details") && ch["details"].contains("margin"))
            entry["margins"][ch.value("check_name", "") + "_k=" + io::format_double(ch["details"].value("k", 0.0))] =
                ch["details"]["margin"];
        }
      if (res.contains("tables"))
        for (const auto& tj : res["tables"]) {
          const auto t = io::moment_table_from(tj);
          for (std::size_t i = 0; i < t.lags.size(); ++i) {
            const bool pos = t.lags[i] > 0 && t.moments[i] > 0;
            plot.cell(hash).cell(axis_name(t.axis)).cell(t.k).cell(t.lags[i]).cell(t.moments[i]).cell(t.stderrs[i]);
            if (pos) plot.cell(std::log(t.lags[i])).cell(std::log(t.moments[i]));
            else plot.cell("").cell("");
          }
        }
    }
    merged.push_back(entry);
  }
  r.results["runs"] = merged;
  r.results["checks_passed"] = passed;
  r.results["checks_total"] = total;
  emit(r, dir, "plot.csv", plot.text());
  io::write_json(dir / "summary.json", r.results);
  r.artifacts.push_back("summary.json");
  std::ostringstream os;
  os << "report runs=" << merged.size() << " checks " << passed << "/" << total << " passed\n";
  r.summary = os.str();
  return r;
}

}  // namespace detail

struct CliArgs {
  std::string subcommand;
  std::optional<std::string> config;
  std::string out = "fracheat_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::vector<std::string> runs;
};

/// Runs one subcommand end to end: artifacts, results.json and manifest.json in args.out.
inline int run(const CliArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Subcommand sub;
  RunConfig cfg;
  try {
    sub = parse_subcommand(args.subcommand);
    if (args.config) {
      cfg = parse_config_text(io::read_file(*args.config), *args.config);
    } else if (sub != Subcommand::report) {
      throw ConfigError("--config is required for '" + args.subcommand + "'");
    }
    if (args.seed) {
      cfg.seed_base = *args.seed;
      cfg.solver.seed_base = *args.seed;
    }
    if (args.paths) {
      if (*args.paths == 0) throw ConfigError("field 'solver.paths': must be >= 1");
      cfg.solver.path_count = *args.paths;
    }
  } catch (const Error& e) {
    err << "fracheat: " << e.what() << "\n";
    return 2;
  }
  const fs::path dir(args.out);
  RunResult res;
  try {
    fs::create_directories(dir);
    switch (sub) {
      case Subcommand::kernel: res = detail::run_kernel(cfg, dir); break;
      case Subcommand::noise: res = detail::run_noise(cfg, dir); break;
      case Subcommand::simulate: res = detail::run_simulate(cfg, dir); break;
      case Subcommand::estimate: res = detail::run_estimate(cfg, dir); break;
      case Subcommand::verify: res = detail::run_verify(cfg, dir); break;
      case Subcommand::report: res = detail::run_report(cfg, args.runs, dir); break;
    }
  } catch (const ConfigError& e) {
    err << "fracheat: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "fracheat: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "fracheat: run failed: " << e.what() << "\n";
    return 1;
  }
  if (sub != Subcommand::report) {
    json results = res.results;
    results["checks"] = detail::checks_json(res.checks);
    io::write_json(dir / "results.json", results);
    res.artifacts.push_back("results.json");
    if (sub == Subcommand::verify) {
      detail::emit(res, dir, "summary.txt", res.summary);
      io::write_json(dir / "checks.json", detail::checks_json(res.checks));
      res.artifacts.push_back("checks.json");
    }
    const json resolved = resolved_json(cfg);
    json artifacts = json::object();
    for (const auto& a : res.artifacts) artifacts[a] = io::hex64(io::fnv1a(io::read_file(dir / a)));
    const json manifest = {{"tool", "fracheat"},
                           {"format", 1},
                           {"subcommand", subcommand_name(sub)},
                           {"config", resolved},
                           {"config_hash", io::hex64(io::fnv1a(resolved.dump()))},
                           {"seed_base", cfg.seed_base},
                           {"diagnostics", res.diagnostics},
                           {"artifacts", artifacts},
                           {"all_pass", res.all_pass()}};
    io::write_json(dir / "manifest.json", manifest);
  }
  out << res.summary;
  return res.all_pass() ? 0 : 1;
}

}  // namespace fracheat::runner
