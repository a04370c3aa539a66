#pragma once

// Spectral exponential-Euler integration of
//   du = -(-Delta)^{alpha/2} u dt + sigma(u) dW_beta
// on the periodic grid. Per Fourier mode, with lambda_k = (2 pi |k| / L)^alpha,
//   u_k <- e^{-lambda_k dt} u_k + F_k * transform(sigma(u) dW)_k
// where F_k = e^{-lambda_k dt} (left_point) or
// F_k = sqrt((1 - e^{-2 lambda_k dt}) / (2 lambda_k dt)) (exact_variance, the
// exact one-step law of each mode when sigma is constant).
//
// Spectra are normalized coefficients: u(m dx) = sum_j c_j e^{2 pi i j m / N}.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/fft.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/heat_kernel.hpp"
#include "fracheat/moment_table.hpp"
#include "fracheat/noise_field.hpp"
#include "fracheat/numeric.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat::solver {

struct SigmaSpec {
  enum class Kind { zero, constant, identity, affine, sine };
  Kind kind = Kind::constant;
  double a = 1.0;  // constant value, or slope for affine
  double b = 0.0;  // intercept for affine

  static SigmaSpec zero() { return {Kind::zero, 0.0, 0.0}; }
  static SigmaSpec constant(double c) { return {Kind::constant, c, 0.0}; }
  static SigmaSpec identity() { return {Kind::identity, 1.0, 0.0}; }
  static SigmaSpec affine(double slope, double intercept) { return {Kind::affine, slope, intercept}; }
  static SigmaSpec sine() { return {Kind::sine, 1.0, 0.0}; }

  double operator()(double u) const {
    switch (kind) {
      case Kind::zero: return 0.0;
      case Kind::constant: return a;
      case Kind::identity: return u;
      case Kind::affine: return a * u + b;
      case Kind::sine: return std::sin(u);
    }
    return 0.0;
  }

  /// Smallest K with |s(x)-s(y)| <= K|x-y| and |s(x)| <= K(1+|x|).
  double minimal_k() const {
    switch (kind) {
      case Kind::zero: return 0.0;
      case Kind::constant: return std::abs(a);
      case Kind::identity: return 1.0;
      case Kind::affine: return std::max(std::abs(a), std::abs(b));
      case Kind::sine: return 1.0;
    }
    return 0.0;
  }

  bool additive() const { return kind == Kind::zero || kind == Kind::constant; }
  double additive_value() const { return kind == Kind::constant ? a : 0.0; }

  std::string name() const {
    switch (kind) {
      case Kind::zero: return "zero";
      case Kind::constant: return "constant";
      case Kind::identity: return "identity";
      case Kind::affine: return "affine";
      case Kind::sine: return "sine";
    }
    return "?";
  }
};

struct PhiSpec {
  enum class Kind { constant, sinusoid, rough_holder };
  Kind kind = Kind::constant;
  double value = 0.0;  // constant value, or sinusoid amplitude
  long mode = 1;
  double rho = 1.0;  // rough_holder index
  /// Phases of the lacunary terms; empty means default_phases().
  std::vector<double> phases;

  static PhiSpec constant(double c) { return {Kind::constant, c, 0, 1.0, {}}; }
  static PhiSpec sinusoid(double amplitude, long mode) { return {Kind::sinusoid, amplitude, mode, 1.0, {}}; }
  static PhiSpec rough_holder(double rho) { return {Kind::rough_holder, 0.0, 0, rho, {}}; }

  std::string name() const {
    switch (kind) {
      case Kind::constant: return "constant";
      case Kind::sinusoid: return "sinusoid";
      case Kind::rough_holder: return "rough_holder";
    }
    return "?";
  }
};

/// theta_j = 2 pi frac(j * golden ratio conjugate)
inline std::vector<double> default_phases(std::size_t count) {
  std::vector<double> p(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double f = static_cast<double>(j) * 0.6180339887498949;
    p[j] = kTwoPi * (f - std::floor(f));
  }
  return p;
}

/// Number of lacunary terms 2^j below the Nyquist mode of an N-point grid.
inline std::size_t lacunary_terms(std::size_t n) {
  std::size_t j = 0;
  while ((std::size_t{1} << j) < n / 2) ++j;
  return j;
}

struct ModelSpec {
  double alpha = 1.5;
  double beta = 0.5;
  SigmaSpec sigma = SigmaSpec::constant(1.0);
  double K = 1.0;
  PhiSpec phi = PhiSpec::constant(0.0);
  double rho = 1.0;

  void validate() const {
    if (!(alpha > 1.0 && alpha <= 2.0))
      throw ParameterError("model.alpha must lie in (1, 2], got " + std::to_string(alpha));
    if (!(beta > 0.0 && beta < 1.0))
      throw ParameterError("model.beta must lie in (0, 1), got " + std::to_string(beta));
    if (!(rho > 0.0 && rho <= 1.0))
      throw ParameterError("model.rho must lie in (0, 1], got " + std::to_string(rho));
    if (phi.kind == PhiSpec::Kind::rough_holder) {
      if (!(phi.rho > 0.0 && phi.rho <= 1.0))
        throw ParameterError("phi.rho must lie in (0, 1], got " + std::to_string(phi.rho));
      if (rho > phi.rho)
        throw ParameterError("model.rho exceeds the Hoelder index of phi");
    }
    if (!(K >= 0.0) || !std::isfinite(K)) throw ParameterError("model.K must be finite and >= 0");
    // spot check on fixed pseudo-random pairs
    std::mt19937_64 gen(0x5eed);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 256; ++i) {
      const double x = u(gen), y = u(gen);
      const double tol = 1e-12 * (1.0 + std::abs(x) + std::abs(y));
      if (std::abs(sigma(x) - sigma(y)) > K * std::abs(x - y) + tol ||
          std::abs(sigma(x)) > K * (1.0 + std::abs(x)) + tol) {
        std::ostringstream os;
        os << "model.K=" << K << " is not a Lipschitz/growth bound for sigma=" << sigma.name()
           << " (needs K >= " << sigma.minimal_k() << ")";
        throw ParameterError(os.str());
      }
    }
  }
};

enum class Scheme { exact_variance, left_point };

inline std::string scheme_name(Scheme s) { return s == Scheme::exact_variance ? "exact_variance" : "left_point"; }

struct SolverConfig {
  GridSpec grid{4.0, 1024, 1e-3, 0.5};
  std::vector<double> snapshot_times{0.5};
  std::uint64_t seed_base = 0;
  std::size_t path_count = 1;
  noise::ZeroModeRule zero_mode = noise::ZeroModeRule::drop();
  Scheme scheme = Scheme::exact_variance;
  /// 2/3-rule truncation of transform(sigma(u) dW); meant for sigma = sine.
  bool dealias = false;
  unsigned threads = 0;

  std::size_t steps() const { return step_of(grid.horizon); }

  /// Index n with n dt = t; throws unless t is a multiple of dt.
  std::size_t step_of(double t) const {
    const double r = t / grid.dt;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
      std::ostringstream os;
      os << "time " << t << " is not a multiple of dt=" << grid.dt;
      throw ParameterError(os.str());
    }
    return static_cast<std::size_t>(n);
  }

  void validate() const {
    grid.validate_space();
    if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) throw ParameterError("solver.dt must be positive");
    if (!(grid.horizon >= 0.0)) throw ParameterError("solver.T must be >= 0");
    step_of(grid.horizon);
    double prev = -1.0;
    for (double t : snapshot_times) {
      if (!(t >= 0.0) || t > grid.horizon * (1.0 + 1e-12))
        throw ParameterError("snapshot time " + std::to_string(t) + " outside [0, T]");
      if (!(t > prev)) throw ParameterError("snapshot times must be strictly increasing");
      step_of(t);
      prev = t;
    }
    if (path_count == 0) throw ParameterError("solver.paths must be >= 1");
  }

  noise::NoiseSpec noise_spec(double beta) const {
    return {beta, grid, grid.dt, seed_base, zero_mode};
  }
};

struct PathState {
  std::size_t t_index = 0;
  FieldSnapshot field;
  std::uint64_t stream_id = 0;
  /// Normalized half spectrum, k = 0..N/2; field is its inverse transform.
  std::vector<fft::cplx> spectrum;
};

/// (2 pi |k| / L)^alpha for k = 0..N/2.
inline std::vector<double> torus_symbol(double alpha, const GridSpec& g) {
  std::vector<double> lam(g.points / 2 + 1);
  for (std::size_t k = 0; k < lam.size(); ++k)
    lam[k] = std::pow(kTwoPi * static_cast<double>(k) / g.length, alpha);
  return lam;
}

/// Half spectrum of the initial datum, set mode by mode (no transform).
inline std::vector<fft::cplx> initial_spectrum(const PhiSpec& phi, const GridSpec& g) {
  g.validate_space();
  const std::size_t h = g.points / 2;
  std::vector<fft::cplx> c(h + 1, fft::cplx{});
  switch (phi.kind) {
    case PhiSpec::Kind::constant:
      c[0] = phi.value;
      break;
    case PhiSpec::Kind::sinusoid: {
      const std::size_t k = static_cast<std::size_t>(std::labs(phi.mode));
      if (k >= h) throw ParameterError("sinusoid mode must be below the Nyquist mode N/2");
      c[k] += k == 0 ? fft::cplx(phi.value) : fft::cplx(phi.value / 2.0);
      break;
    }
    case PhiSpec::Kind::rough_holder: {
      if (!(phi.rho > 0.0 && phi.rho <= 1.0))
        throw ParameterError("rough_holder rho must lie in (0, 1], got " + std::to_string(phi.rho));
      const std::size_t terms = lacunary_terms(g.points);
      const auto theta = phi.phases.empty() ? default_phases(terms) : phi.phases;
      if (theta.size() < terms) throw ParameterError("rough_holder: too few phases for this grid");
      for (std::size_t j = 0; j < terms; ++j)
        c[std::size_t{1} << j] += std::pow(2.0, -phi.rho * static_cast<double>(j)) / 2.0 *
                                  std::polar(1.0, theta[j]);
      break;
    }
  }
  return c;
}

inline std::vector<double> field_from_spectrum(std::span<const fft::cplx> c, fft::RealDft& dft) {
  auto s = dft.spectrum();
  std::copy(c.begin(), c.end(), s.begin());
  dft.backward();
  auto r = dft.real();
  return {r.begin(), r.end()};
}

/// phi sampled on the grid: node m at x = m dx.
inline FieldSnapshot make_initial(const PhiSpec& phi, const GridSpec& g) {
  const auto c = initial_spectrum(phi, g);
  fft::RealDft dft(g.points);
  return {0.0, field_from_spectrum(c, dft)};
}

class Stepper {
public:
  Stepper(const ModelSpec& model, const SolverConfig& config)
      : model_(model), config_(config), nspec_(config.noise_spec(model.beta)),
        weights_(noise::half_spectral_weights(nspec_)), dft_(config.grid.points),
        noise_(config.grid.points / 2 + 1) {
    model_.validate();
    config_.validate();
    nspec_.validate();
    const auto lam = torus_symbol(model.alpha, config.grid);
    const double dt = config.grid.dt;
    decay_.resize(lam.size());
    gain_.resize(lam.size());
    for (std::size_t k = 0; k < lam.size(); ++k) {
      decay_[k] = std::exp(-lam[k] * dt);
      if (config.scheme == Scheme::left_point) {
        gain_[k] = decay_[k];
      } else {
        const double x = lam[k] * dt;
        // (1 - e^{-2x}) / (2x) via expm1 to keep small x accurate
        gain_[k] = x == 0.0 ? 1.0 : std::sqrt(-std::expm1(-2.0 * x) / (2.0 * x));
      }
    }
  }

  const ModelSpec& model() const { return model_; }
  const SolverConfig& config() const { return config_; }

  PathState initial(std::uint64_t stream_id) {
    PathState s;
    s.stream_id = stream_id;
    s.spectrum = initial_spectrum(model_.phi, config_.grid);
    s.field = {0.0, field_from_spectrum(s.spectrum, dft_)};
    return s;
  }

  /// Advances one dt. The noise for the step from n to n+1 is drawn at
  /// coordinates (seed_base, stream_id, n).
  void step(PathState& s) {
    const std::size_t h = config_.grid.points / 2;
    const std::size_t n = config_.grid.points;
    auto& c = s.spectrum;
    if (model_.sigma.kind == SigmaSpec::Kind::zero) {
      for (std::size_t k = 0; k <= h; ++k) c[k] *= decay_[k];
    } else if (model_.sigma.additive()) {
      noise::sample_increment_spectrum(nspec_, weights_, s.stream_id, s.t_index, noise_);
      const double amp = model_.sigma.additive_value();
      for (std::size_t k = 0; k <= h; ++k) c[k] = decay_[k] * c[k] + gain_[k] * amp * noise_[k];
    } else {
      noise::sample_increment_spectrum(nspec_, weights_, s.stream_id, s.t_index, dft_.spectrum());
      dft_.backward();
      auto dw = dft_.real();
      for (std::size_t m = 0; m < n; ++m) dw[m] *= model_.sigma(s.field.values[m]);
      dft_.forward();
      auto b = dft_.spectrum();
      const double inv_n = 1.0 / static_cast<double>(n);
      const std::size_t cutoff = config_.dealias ? n / 3 : h;
      for (std::size_t k = 0; k <= h; ++k) {
        const fft::cplx bk = k <= cutoff ? b[k] * inv_n : fft::cplx{};
        c[k] = decay_[k] * c[k] + gain_[k] * bk;
      }
    }
    c[h] = c[h].real();
    ++s.t_index;
    s.field.time = static_cast<double>(s.t_index) * config_.grid.dt;
    s.field.values = field_from_spectrum(c, dft_);
    for (double v : s.field.values) {
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite field at step " << s.t_index << " of path " << s.stream_id;
        throw BlowUpError(os.str(), s.t_index, s.stream_id);
      }
    }
  }

private:
  ModelSpec model_;
  SolverConfig config_;
  noise::NoiseSpec nspec_;
  std::vector<double> weights_;
  std::vector<double> decay_, gain_;
  fft::RealDft dft_;
  std::vector<fft::cplx> noise_;
};

inline PathState evolve_step(PathState state, const ModelSpec& model, const SolverConfig& config) {
  Stepper st(model, config);
  st.step(state);
  return state;
}

/// Snapshots at config.snapshot_times for one path.
inline std::vector<FieldSnapshot> simulate_path(Stepper& st, std::uint64_t stream_id) {
  const auto& cfg = st.config();
  std::vector<FieldSnapshot> out;
  out.reserve(cfg.snapshot_times.size());
  PathState s = st.initial(stream_id);
  for (double t : cfg.snapshot_times) {
    const std::size_t target = cfg.step_of(t);
    while (s.t_index < target) st.step(s);
    out.push_back(s.field);
    out.back().time = t;
  }
  return out;
}

inline std::vector<FieldSnapshot> simulate_path(const ModelSpec& model, const SolverConfig& config,
                                                std::uint64_t stream_id) {
  Stepper st(model, config);
  return simulate_path(st, stream_id);
}

/// config.path_count paths, streams 0..path_count-1, indexed by stream.
/// Paths are handed out in blocks, one Stepper per block; the result does
/// not depend on the thread count.
inline std::vector<std::vector<FieldSnapshot>> simulate_ensemble(const ModelSpec& model,
                                                                 const SolverConfig& config) {
  model.validate();
  config.validate();
  constexpr std::size_t block = 16;
  const std::size_t n = config.path_count;
  std::vector<std::vector<FieldSnapshot>> out(n);
  parallel_for((n + block - 1) / block, config.threads, [&](std::size_t b) {
    Stepper st(model, config);
    for (std::size_t p = b * block; p < std::min(n, (b + 1) * block); ++p) out[p] = simulate_path(st, p);
  });
  return out;
}

namespace detail {

struct ModeLaw {
  std::vector<double> lambda;  // k = 0..N/2
  std::vector<double> q;       // noise intensity per mode per unit time
  std::vector<fft::cplx> phi;  // initial coefficients
  std::vector<double> mult;    // 1 for k = 0 and N/2, else 2 (conjugate pair)
};

inline ModeLaw mode_law(const ModelSpec& model, const SolverConfig& config) {
  if (!model.sigma.additive())
    throw UsageError("the Gaussian oracle needs an additive sigma (zero or constant), got " +
                     model.sigma.name());
  model.validate();
  const auto nspec = config.noise_spec(model.beta);
  const auto w = noise::half_spectral_weights(nspec);
  ModeLaw m;
  m.lambda = torus_symbol(model.alpha, config.grid);
  const double s2 = model.sigma.additive_value() * model.sigma.additive_value();
  m.q.resize(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) m.q[k] = s2 * w[k] / config.grid.length;
  m.phi = initial_spectrum(model.phi, config.grid);
  m.mult.assign(w.size(), 2.0);
  m.mult.front() = 1.0;
  m.mult.back() = 1.0;
  return m;
}

/// Var of mode k at time t: q (1 - e^{-2 lambda t}) / (2 lambda), q t at lambda = 0.
inline double mode_variance(double q, double lambda, double t) {
  if (lambda == 0.0) return q * t;
  return q * -std::expm1(-2.0 * lambda * t) / (2.0 * lambda);
}

}  // namespace detail

/// Exact E|u(t, x+h) - u(t, x)|^2 (averaged over x) for the continuous-time
/// additive model on the torus, as a spectral sum.
inline MomentTable gaussian_oracle_structure(const ModelSpec& model, const SolverConfig& config, double t,
                                             const std::vector<double>& lags) {
  const auto m = detail::mode_law(model, config);
  MomentTable tab{Axis::space, 2.0, lags, {}, std::vector<double>(lags.size(), 0.0), 0, t};
  std::vector<double> terms(m.lambda.size());
  for (double h : lags) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double geo = 2.0 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) * h / config.grid.length));
      const double det = std::norm(m.phi[k]) * std::exp(-2.0 * m.lambda[k] * t);
      terms[k] = m.mult[k] * geo * (detail::mode_variance(m.q[k], m.lambda[k], t) + det);
    }
    tab.moments.push_back(pairwise_sum(terms));
  }
  return tab;
}

/// Exact E|u(t0 + delta, x) - u(t0, x)|^2 (averaged over x).
inline MomentTable gaussian_oracle_temporal(const ModelSpec& model, const SolverConfig& config, double t0,
                                            const std::vector<double>& deltas) {
  const auto m = detail::mode_law(model, config);
  MomentTable tab{Axis::time, 2.0, deltas, {}, std::vector<double>(deltas.size(), 0.0), 0, t0};
  std::vector<double> terms(m.lambda.size());
  for (double d : deltas) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double lam = m.lambda[k];
      const double shrink = -std::expm1(-lam * d);  // 1 - e^{-lambda delta}
      const double fresh = detail::mode_variance(m.q[k], lam, d);
      const double det = std::norm(m.phi[k]) * std::exp(-2.0 * lam * t0) * shrink * shrink;
      terms[k] = m.mult[k] * (shrink * shrink * detail::mode_variance(m.q[k], lam, t0) + fresh + det);
    }
    tab.moments.push_back(pairwise_sum(terms));
  }
  return tab;
}

/// Mass of p_T outside [-L/4, L/4]: how much of the kernel the torus cuts off.
inline double domain_truncation_mass(double alpha, double horizon, double length) {
  if (horizon <= 0.0) return 0.0;
  kernel::validate(alpha, horizon);
  // periodized p_T on a torus of length P >= 2 length, integrated exactly
  // over [-a, a]: 2a/P + sum_k 2 p^(k/P) sin(2 pi k a / P) / (pi k)
  const double a = length / 4.0;
  const double P = std::max(2.0 * length, 4.0 * kernel::required_half_length(alpha, horizon));
  const auto kmax = static_cast<std::size_t>(std::ceil(kernel::required_nyquist(alpha, horizon) * P)) + 1;
  std::vector<double> terms(kmax + 1);
  terms[0] = 2.0 * a / P;
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double kk = static_cast<double>(k);
    terms[k] = 2.0 * kernel::symbol(alpha, horizon, kk / P) * std::sin(kTwoPi * kk * a / P) /
               (std::numbers::pi * kk);
  }
  return std::max(0.0, 1.0 - pairwise_sum(terms));
}

}  // namespace fracheat::solver
