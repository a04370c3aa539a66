#pragma once

// Gaussian increments on the periodic grid, white in time and stationary in
// space with covariance dt * f_beta(x - y), f_beta(x) = c_{1-beta} |x|^{-beta}.
// The spectral density of f_beta is |xi|^{beta-1}; sampling is spectral.
//
// Normalization: with weights w_j (FFT order) the discrete covariance is
//   C(m dx) = (dt / L) sum_j w_j e^{2 pi i j m / N}.

#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/fft.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/numeric.hpp"
#include "fracheat/rng.hpp"

namespace fracheat::noise {

/// c_beta = 2 sin(beta pi / 2) Gamma(1 - beta) / (2 pi)^{1 - beta}
inline double riesz_constant(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ParameterError("riesz_constant needs beta in (0, 1), got " + std::to_string(beta));
  return 2.0 * std::sin(beta * std::numbers::pi / 2.0) * std::tgamma(1.0 - beta) /
         std::pow(kTwoPi, 1.0 - beta);
}

/// f_beta(x) = c_{1-beta} |x|^{-beta}
inline double riesz_kernel_value(double beta, double x) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ParameterError("riesz_kernel_value needs beta in (0, 1), got " + std::to_string(beta));
  if (x == 0.0) throw SingularityError("f_beta(0) = +inf");
  return riesz_constant(1.0 - beta) * std::pow(std::abs(x), -beta);
}

/// |xi|^{beta-1}. beta = 1 (flat, white in space) is accepted as a diagnostic limit.
inline double riesz_spectral_density(double beta, double xi) {
  if (beta == 1.0) return 1.0;
  return std::pow(std::abs(xi), beta - 1.0);
}

struct ZeroModeRule {
  enum class Kind { drop, finite, compensated };
  Kind kind = Kind::drop;
  double value = 0.0;  // weight used by `finite`

  static ZeroModeRule drop() { return {Kind::drop, 0.0}; }
  static ZeroModeRule finite(double v) { return {Kind::finite, v}; }
  /// w_0 = -2 zeta(1 - beta) L^{1 - beta}: the value that removes the
  /// leading lattice-sum error, so the torus covariance tracks f_beta at
  /// lags well below L.
  static ZeroModeRule compensated() { return {Kind::compensated, 0.0}; }

  std::string name() const {
    switch (kind) {
      case Kind::drop: return "drop";
      case Kind::finite: return "finite";
      case Kind::compensated: return "compensated";
    }
    return "?";
  }
};

struct NoiseSpec {
  double beta = 0.5;
  GridSpec grid;
  double dt = 0.01;
  std::uint64_t seed_base = 0;
  ZeroModeRule zero_mode;

  /// beta = 1 is let through only when allow_white is set.
  void validate(bool allow_white = false) const {
    const bool ok = (beta > 0.0 && beta < 1.0) || (allow_white && beta == 1.0);
    if (!ok) throw ParameterError("noise beta must lie in (0, 1), got " + std::to_string(beta));
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("noise dt must be positive");
    grid.validate_space();
    if (zero_mode.kind == ZeroModeRule::Kind::finite && !(zero_mode.value >= 0.0))
      throw ParameterError("finite zero-mode weight must be >= 0");
  }
};

struct NoiseIncrement {
  std::vector<double> values;
  std::uint64_t step_index = 0;
  std::uint64_t stream_id = 0;
};

inline double zero_mode_weight(const NoiseSpec& spec) {
  switch (spec.zero_mode.kind) {
    case ZeroModeRule::Kind::drop: return 0.0;
    case ZeroModeRule::Kind::finite: return spec.zero_mode.value;
    case ZeroModeRule::Kind::compensated:
      if (spec.beta == 1.0) return 1.0;
      return -2.0 * boost::math::zeta(1.0 - spec.beta) * std::pow(spec.grid.length, 1.0 - spec.beta);
  }
  return 0.0;
}

/// Weights for k = 0..N/2 (the other half is the mirror image).
inline std::vector<double> half_spectral_weights(const NoiseSpec& spec) {
  spec.validate(true);
  const std::size_t h = spec.grid.points / 2;
  std::vector<double> w(h + 1);
  w[0] = zero_mode_weight(spec);
  for (std::size_t k = 1; k <= h; ++k)
    w[k] = riesz_spectral_density(spec.beta, static_cast<double>(k) / spec.grid.length);
  return w;
}

/// Per-mode weights for all N bins in FFT order; even in the signed mode.
inline std::vector<double> spectral_weights(const NoiseSpec& spec) {
  const auto half = half_spectral_weights(spec);
  const std::size_t n = spec.grid.points;
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = half[static_cast<std::size_t>(std::labs(fft_mode(j, n)))];
  return w;
}

/// Fills a[k], k = 0..N/2, with the spectral coefficients of one increment:
/// the field is sum_j a_j e^{2 pi i j m / N} with a_{N-k} = conj(a_k).
/// Draw order is fixed: k = 0 (real), then (re, im) for 0 < k < N/2, then
/// k = N/2 (real).
inline void sample_increment_spectrum(const NoiseSpec& spec, const std::vector<double>& half_weights,
                                      std::uint64_t stream_id, std::uint64_t step_index,
                                      std::span<fft::cplx> a) {
  const std::size_t h = spec.grid.points / 2;
  rng::NormalStream z(spec.seed_base, stream_id, step_index);
  const double scale = spec.dt / spec.grid.length;
  a[0] = std::sqrt(scale * half_weights[0]) * z();
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t k = 1; k < h; ++k) {
    const double re = z();
    const double im = z();
    a[k] = std::sqrt(scale * half_weights[k]) * inv_sqrt2 * fft::cplx(re, im);
  }
  a[h] = std::sqrt(scale * half_weights[h]) * z();
}

/// Reusable sampler: holds the weights and an FFT for one spec.
class IncrementSampler {
public:
  explicit IncrementSampler(const NoiseSpec& spec)
      : spec_(spec), weights_(half_spectral_weights(spec)), dft_(spec.grid.points) {}

  const NoiseSpec& spec() const { return spec_; }
  const std::vector<double>& half_weights() const { return weights_; }

  void spectrum(std::uint64_t stream_id, std::uint64_t step_index, std::span<fft::cplx> a) const {
    sample_increment_spectrum(spec_, weights_, stream_id, step_index, a);
  }

  NoiseIncrement sample(std::uint64_t stream_id, std::uint64_t step_index) {
    spectrum(stream_id, step_index, dft_.spectrum());
    dft_.backward();
    auto r = dft_.real();
    return {{r.begin(), r.end()}, step_index, stream_id};
  }

private:
  NoiseSpec spec_;
  std::vector<double> weights_;
  fft::RealDft dft_;
};

inline NoiseIncrement sample_increment(const NoiseSpec& spec, std::uint64_t stream_id,
                                       std::uint64_t step_index) {
  IncrementSampler s(spec);
  return s.sample(stream_id, step_index);
}

/// Exact covariance of the discrete field at lags m dx, m = 0..N-1.
inline std::vector<double> spectral_covariance(const NoiseSpec& spec) {
  const auto w = half_spectral_weights(spec);
  fft::RealDft dft(spec.grid.points);
  auto s = dft.spectrum();
  const double scale = spec.dt / spec.grid.length;
  for (std::size_t k = 0; k < w.size(); ++k) s[k] = scale * w[k];
  dft.backward();
  auto r = dft.real();
  return {r.begin(), r.end()};
}

struct CovarianceEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

/// Cross moment (1/N) sum_i u_i u_{i+m}, averaged over draws, with the
/// standard error of the per-draw averages. The lag is canonicalized to |m|
/// so estimate(m) and estimate(-m) are the same computation.
inline CovarianceEstimate empirical_covariance(std::span<const NoiseIncrement> increments, long lag) {
  if (increments.empty()) throw InputError("empirical_covariance: no increments");
  const std::size_t n = increments.front().values.size();
  if (n == 0) throw InputError("empirical_covariance: empty field");
  const std::size_t m = static_cast<std::size_t>(std::labs(lag)) % n;
  std::vector<double> per_draw(increments.size());
  std::vector<double> prod(n);
  for (std::size_t d = 0; d < increments.size(); ++d) {
    const auto& u = increments[d].values;
    if (u.size() != n) throw InputError("empirical_covariance: fields differ in size");
    for (std::size_t i = 0; i < n; ++i) prod[i] = u[i] * u[(i + m) % n];
    per_draw[d] = pairwise_sum(prod) / static_cast<double>(n);
  }
  CovarianceEstimate e;
  e.draws = increments.size();
  e.estimate = pairwise_sum(per_draw) / static_cast<double>(e.draws);
  if (e.draws >= 2) {
    for (double& v : per_draw) v = (v - e.estimate) * (v - e.estimate);
    e.std_error = std::sqrt(pairwise_sum(per_draw) / static_cast<double>(e.draws - 1) /
                          static_cast<double>(e.draws));
  }
  return e;
}

/// Lag given as a position; it must be a multiple of dx.
inline CovarianceEstimate empirical_covariance(std::span<const NoiseIncrement> increments,
                                               const GridSpec& grid, double lag) {
  const double m = lag / grid.dx();
  if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m))) {
    std::ostringstream os;
    os << "lag " << lag << " is not a multiple of dx=" << grid.dx();
    throw InputError(os.str());
  }
  return empirical_covariance(increments, std::lround(m));
}

struct CovarianceReport {
  double beta = 0.0;
  double dt = 0.0;
  std::string zero_mode;
  std::size_t draws = 0;
  std::vector<double> lags, estimate, target, std_error, spectral;
};

/// Draws `draws` increments (stream 0, steps 0..draws-1) and compares the
/// empirical covariance with dt f_beta at each lag.
inline CovarianceReport covariance_report(const NoiseSpec& spec, std::size_t draws,
                                          const std::vector<double>& lags) {
  spec.validate();
  IncrementSampler sampler(spec);
  std::vector<NoiseIncrement> inc;
  inc.reserve(draws);
  for (std::size_t d = 0; d < draws; ++d) inc.push_back(sampler.sample(0, d));
  const auto exact = spectral_covariance(spec);
  CovarianceReport r{spec.beta, spec.dt, spec.zero_mode.name(), draws, {}, {}, {}, {}, {}};
  for (double lag : lags) {
    const auto e = empirical_covariance(inc, spec.grid, lag);
    r.lags.push_back(lag);
    r.estimate.push_back(e.estimate);
    r.std_error.push_back(e.std_error);
    r.target.push_back(spec.dt * riesz_kernel_value(spec.beta, lag));
    r.spectral.push_back(exact[static_cast<std::size_t>(std::lround(std::abs(lag) / spec.grid.dx())) %
                               spec.grid.points]);
  }
  return r;
}

}  // namespace fracheat::noise
