#pragma once

// The symmetric alpha-stable heat kernel p_t, the fundamental solution of
// v_t = -(-Delta)^{alpha/2} v on the line, with Fourier transform
//   (F p_t)(xi) = exp(-t (2 pi |xi|)^alpha),   (F f)(xi) = int e^{-2 pi i xi x} f(x) dx.
//
// Tables are produced by discrete inverse Fourier transform on a periodic grid
// that stands in for the real line. Two grid rules keep the truncation honest:
//   * Fourier tail   exp(-t (2 pi xi_nyq)^alpha)  < kFourierTailTol
//   * aliasing       p_t(L/2) (estimated from the tail asymptotics) < kAliasTol

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <span>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/fft.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/numeric.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat::kernel {

inline constexpr double kFourierTailTol = 1e-12;
inline constexpr double kAliasTol = 1e-12;
inline constexpr std::size_t kMaxPoints = std::size_t{1} << 26;

inline void validate(double alpha, double t) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw ParameterError("alpha must lie in (0, 2], got " + std::to_string(alpha));
  if (!(t > 0.0) || !std::isfinite(t))
    throw ParameterError("t must be positive, got " + std::to_string(t));
}

inline void validate_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ParameterError("beta must lie in (0, 1), got " + std::to_string(beta));
}

/// exp(-t (2 pi |xi|)^alpha)
inline double symbol(double alpha, double t, double xi) {
  const double w = kTwoPi * std::abs(xi);
  if (alpha == 1.0) return std::exp(-t * w);
  if (alpha == 2.0) return std::exp(-t * (w * w));
  return std::exp(-t * std::pow(w, alpha));
}

/// Gamma(1 + 1/alpha) / (pi t^{1/alpha}).
inline double kernel_central_value(double alpha, double t) {
  validate(alpha, t);
  return std::tgamma(1.0 + 1.0 / alpha) / (std::numbers::pi * std::pow(t, 1.0 / alpha));
}

/// Leading coefficient C with p_t(x) ~ C t / |x|^{1+alpha} as |x| -> inf (0 for alpha = 2).
inline double tail_coefficient(double alpha) {
  if (alpha >= 2.0) return 0.0;
  return std::tgamma(1.0 + alpha) * std::sin(std::numbers::pi * alpha / 2.0) / std::numbers::pi;
}

/// Estimate of p_t(x) far from the origin: power tail plus a Gaussian of the
/// kernel's own width (only that term survives at alpha = 2).
inline double far_field_estimate(double alpha, double t, double x) {
  x = std::abs(x);
  const double w2 = std::pow(t, 2.0 / alpha);
  const double gauss = std::exp(-x * x / (4.0 * w2)) / std::sqrt(4.0 * std::numbers::pi * w2);
  const double power = tail_coefficient(alpha) * t / std::pow(x, 1.0 + alpha);
  return gauss + power;
}

inline double fourier_tail(double alpha, double t, const GridSpec& grid) {
  return symbol(alpha, t, grid.nyquist());
}

/// Smallest Nyquist frequency meeting the Fourier-tail rule at time t.
inline double required_nyquist(double alpha, double t) {
  return std::pow(std::log(1.0 / kFourierTailTol) / t, 1.0 / alpha) / kTwoPi;
}

/// Smallest half-length meeting the aliasing rule at time t.
inline double required_half_length(double alpha, double t) {
  double lo = std::pow(t, 1.0 / alpha), hi = lo;
  while (far_field_estimate(alpha, t, hi) >= kAliasTol) hi *= 2.0;
  if (far_field_estimate(alpha, t, lo) < kAliasTol) return lo;
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
    const double mid = std::sqrt(lo * hi);
    (far_field_estimate(alpha, t, mid) >= kAliasTol ? lo : hi) = mid;
  }
  return hi;
}

inline std::size_t next_power_of_two(double v) {
  std::size_t n = 2;
  while (static_cast<double>(n) < v) n <<= 1;
  return n;
}

struct GridCheck {
  double fourier_tail = 0.0;
  double alias_estimate = 0.0;
};

/// Verifies both grid rules for every time in [t_min, t_max]; throws a
/// ResolutionError naming the point count (and length) that would suffice.
inline GridCheck check_grid(double alpha, double t_min, double t_max, const GridSpec& grid) {
  validate(alpha, t_min);
  validate(alpha, t_max);
  grid.validate_space();
  GridCheck c{fourier_tail(alpha, t_min, grid), far_field_estimate(alpha, t_max, grid.length / 2)};
  if (c.alias_estimate >= kAliasTol) {
    const double half = required_half_length(alpha, t_max);
    const double length = 2.0 * half;
    const std::size_t n = next_power_of_two(2.0 * length * required_nyquist(alpha, t_min));
    std::ostringstream os;
    os << "grid length " << grid.length << " too short for alpha=" << alpha << ", t=" << t_max
       << ": estimated p_t(L/2)=" << c.alias_estimate << " >= " << kAliasTol
       << "; need length >= " << 2 * half << " (e.g. L=" << length << ", N=" << n << ")";
    throw ResolutionError(os.str(), n, length);
  }
  if (c.fourier_tail >= kFourierTailTol) {
    const std::size_t n = next_power_of_two(2.0 * grid.length * required_nyquist(alpha, t_min));
    std::ostringstream os;
    os << "grid too coarse for alpha=" << alpha << ", t=" << t_min
       << ": Fourier tail " << c.fourier_tail << " >= " << kFourierTailTol
       << "; need N >= " << n << " at L=" << grid.length;
    throw ResolutionError(os.str(), n, grid.length);
  }
  return c;
}

/// Grid meeting both rules over [t_min, t_max] with L >= min_length. L is the
/// smallest integer multiple of base.length that is long enough (so periodic
/// test functions stay periodic); N starts at base.points and doubles until
/// the Nyquist rule holds.
inline GridSpec auto_grid(double alpha, double t_min, double t_max, double min_length = 0.0,
                          GridSpec base = {1.0, 64, 0.0, 0.0}) {
  validate(alpha, t_min);
  validate(alpha, t_max);
  GridSpec g = base;
  const double need = std::max(2.0 * required_half_length(alpha, t_max), min_length);
  g.length = base.length * std::max(1.0, std::ceil(need / base.length * (1.0 + 1e-12)));
  const double nyq = required_nyquist(alpha, t_min);
  while (g.nyquist() < nyq) g.points *= 2;
  if (g.points > kMaxPoints) {
    std::ostringstream os;
    os << "auto grid for alpha=" << alpha << ", t in [" << t_min << ", " << t_max
       << "] needs N=" << g.points << " > " << kMaxPoints;
    throw ResolutionError(os.str(), g.points, g.length);
  }
  return g;
}

/// One grid serving several times at once through self-similarity: the grid
/// returned is for t = t_ref, and scaled_grid() maps it to any t in the list
/// with the same node count. Every scaled grid satisfies both rules.
inline GridSpec scaled_reference_grid(double alpha, const std::vector<double>& times,
                                      double t_ref = 1.0) {
  double length = 0.0, dx = std::numeric_limits<double>::infinity();
  for (double t : times) {
    validate(alpha, t);
    const double s = std::pow(t_ref / t, 1.0 / alpha);
    length = std::max(length, 2.0 * required_half_length(alpha, t) * s);
    dx = std::min(dx, 0.5 / required_nyquist(alpha, t) * s);
  }
  GridSpec g{length, next_power_of_two(length / dx), 0.0, 0.0};
  if (g.points > kMaxPoints)
    throw ResolutionError("scaled reference grid needs too many points", g.points, g.length);
  return g;
}

inline GridSpec scaled_grid(const GridSpec& ref, double alpha, double t_ref, double t) {
  GridSpec g = ref;
  g.length = ref.length * std::pow(t / t_ref, 1.0 / alpha);
  return g;
}

/// Node positions (m - N/2) dx for m = 0..N-1.
inline std::vector<double> centered_abscissae(const GridSpec& g) {
  std::vector<double> x(g.points);
  const double dx = g.dx();
  const long half = static_cast<long>(g.points / 2);
  for (std::size_t i = 0; i < g.points; ++i) x[i] = static_cast<double>(static_cast<long>(i) - half) * dx;
  return x;
}

/// p_t at x = m dx, m = 0..N/2: inverse real DFT of the sampled symbol.
inline std::vector<double> half_line_values(double alpha, double t, const GridSpec& g) {
  const std::size_t h = g.points / 2;
  fft::RealDft dft(g.points);
  auto s = dft.spectrum();
  for (std::size_t k = 0; k <= h; ++k) s[k] = symbol(alpha, t, static_cast<double>(k) / g.length) / g.length;
  dft.backward();
  auto r = dft.real();
  return {r.begin(), r.begin() + static_cast<std::ptrdiff_t>(h + 1)};
}

namespace detail {

/// p_t at the centered nodes (m - N/2) dx. The c2r transform runs in place in
/// the returned vector, which is then rotated by N/2 and symmetrized.
inline std::vector<double> centered_values(double alpha, double t, const GridSpec& g) {
  const std::size_t n = g.points, h = n / 2;
  std::vector<double> v(n + 2, 0.0);
  for (std::size_t k = 0; k <= h; ++k) v[2 * k] = symbol(alpha, t, static_cast<double>(k) / g.length) / g.length;
  fftw_plan raw;
  {
    std::lock_guard lock(fft::planner_mutex());
    raw = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(v.data()), v.data(),
                               FFTW_ESTIMATE);
  }
  const fft::Plan plan(raw);
  fftw_execute(plan.get());
  v.resize(n);
  std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  for (std::size_t m = 1; m < h; ++m) v[h - m] = v[h + m];
  return v;
}

}  // namespace detail

/// dp_t/dx at x = m dx, m = 0..N/2, from the multiplier 2 pi i xi.
inline std::vector<double> half_line_gradient(double alpha, double t, const GridSpec& g) {
  const std::size_t h = g.points / 2;
  fft::RealDft dft(g.points);
  auto s = dft.spectrum();
  for (std::size_t k = 1; k < h; ++k) {
    const double xi = static_cast<double>(k) / g.length;
    s[k] = fft::cplx(0.0, kTwoPi * xi * symbol(alpha, t, xi) / g.length);
  }
  dft.backward();
  auto r = dft.real();
  std::vector<double> out(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(h + 1));
  out[0] = 0.0;
  out[h] = 0.0;
  return out;
}

struct KernelQuery {
  double alpha = 1.5;
  double t = 1.0;
  /// Periodic grid for the FFT route. When absent and `abscissae` is empty,
  /// a grid is chosen by auto_grid().
  std::optional<GridSpec> grid;
  /// Explicit positions, evaluated by quadrature of the inverse Fourier integral.
  std::vector<double> abscissae;
};

struct KernelDiagnostics {
  std::optional<GridSpec> grid;
  double fourier_tail = 0.0;
  double alias_estimate = 0.0;
  double min_value = 0.0;
  std::size_t negative_count = 0;
};

struct KernelTable {
  std::vector<double> abscissae;
  std::vector<double> values;
  double alpha = 0.0;
  double t = 0.0;
  KernelDiagnostics diagnostics;

  /// Values with discretization-level negatives set to zero (for sampling).
  std::vector<double> clamped_values() const {
    std::vector<double> v = values;
    for (double& x : v) x = std::max(x, 0.0);
    return v;
  }
  /// Trapezoidal mass on the grid (periodic rule).
  double mass() const {
    if (!diagnostics.grid) throw UsageError("mass() needs a grid-based table");
    return pairwise_sum(values) * diagnostics.grid->dx();
  }
};

namespace detail {

inline GridSpec resolve_grid(const KernelQuery& q) {
  if (q.grid) {
    check_grid(q.alpha, q.t, q.t, *q.grid);
    return *q.grid;
  }
  return auto_grid(q.alpha, q.t, q.t);
}

inline std::vector<double> mirror(std::span<const double> half, std::size_t n, double sign) {
  std::vector<double> full(n);
  const long h = static_cast<long>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const long m = static_cast<long>(i) - h;
    full[i] = m >= 0 ? half[static_cast<std::size_t>(m)] : sign * half[static_cast<std::size_t>(-m)];
  }
  return full;
}

inline void fill_diagnostics(KernelTable& tab) {
  auto& d = tab.diagnostics;
  d.min_value = tab.values.empty() ? 0.0 : *std::min_element(tab.values.begin(), tab.values.end());
  d.negative_count = static_cast<std::size_t>(
      std::count_if(tab.values.begin(), tab.values.end(), [](double v) { return v < 0; }));
}

}  // namespace detail

/// p_t(x) at one point by quadrature: t^{-1/alpha} p_1(x t^{-1/alpha}).
inline double kernel_value(double alpha, double t, double x) {
  validate(alpha, t);
  const double s = std::pow(t, 1.0 / alpha);
  return quad::reduced_fourier_integral(alpha, x / s, 0, false).value / s;
}

/// dp_t/dx at one point by quadrature.
inline double kernel_gradient_value(double alpha, double t, double x) {
  validate(alpha, t);
  const double s = std::pow(t, 1.0 / alpha);
  return -quad::reduced_fourier_integral(alpha, x / s, 1, true).value / (s * s);
}

inline KernelTable kernel_table(const KernelQuery& q) {
  validate(q.alpha, q.t);
  KernelTable tab;
  tab.alpha = q.alpha;
  tab.t = q.t;
  if (!q.grid && !q.abscissae.empty()) {
    tab.abscissae = q.abscissae;
    tab.values.reserve(q.abscissae.size());
    for (double x : q.abscissae) tab.values.push_back(kernel_value(q.alpha, q.t, x));
    detail::fill_diagnostics(tab);
    return tab;
  }
  const GridSpec g = detail::resolve_grid(q);
  tab.abscissae = centered_abscissae(g);
  tab.values = detail::centered_values(q.alpha, q.t, g);
  tab.diagnostics.grid = g;
  tab.diagnostics.fourier_tail = fourier_tail(q.alpha, q.t, g);
  tab.diagnostics.alias_estimate = far_field_estimate(q.alpha, q.t, g.length / 2);
  detail::fill_diagnostics(tab);
  return tab;
}

/// Same layout as kernel_table, values are dp_t/dx (odd in x).
inline KernelTable kernel_gradient_table(const KernelQuery& q) {
  validate(q.alpha, q.t);
  KernelTable tab;
  tab.alpha = q.alpha;
  tab.t = q.t;
  if (!q.grid && !q.abscissae.empty()) {
    tab.abscissae = q.abscissae;
    for (double x : q.abscissae) tab.values.push_back(kernel_gradient_value(q.alpha, q.t, x));
    return tab;
  }
  const GridSpec g = detail::resolve_grid(q);
  tab.abscissae = centered_abscissae(g);
  tab.values = detail::mirror(half_line_gradient(q.alpha, q.t, g), g.points, -1.0);
  tab.diagnostics.grid = g;
  tab.diagnostics.fourier_tail = fourier_tail(q.alpha, q.t, g);
  tab.diagnostics.alias_estimate = far_field_estimate(q.alpha, q.t, g.length / 2);
  return tab;
}

struct RatioTable {
  std::vector<double> abscissae;
  std::vector<double> ratios;
  double alpha = 0.0;
  double t = 0.0;
};

/// r(t, x) = p_t(x) (t^{1/alpha} + |x|)^{1+alpha} / t, the quantity the
/// two-sided kernel bound keeps between two alpha-dependent constants.
inline RatioTable kernel_bound_ratio(const KernelQuery& q) {
  const KernelTable tab = kernel_table(q);
  RatioTable r{tab.abscissae, {}, q.alpha, q.t};
  const double s = std::pow(q.t, 1.0 / q.alpha);
  r.ratios.resize(tab.values.size());
  for (std::size_t i = 0; i < tab.values.size(); ++i)
    r.ratios[i] = tab.values[i] * std::pow(s + std::abs(tab.abscissae[i]), 1.0 + q.alpha) / q.t;
  return r;
}

/// |dp_t/dx| (t^{1/alpha} + |x|)^{3+alpha} / (t |x|), x = 0 excluded.
inline RatioTable gradient_bound_ratio(const KernelQuery& q) {
  const KernelTable tab = kernel_gradient_table(q);
  RatioTable r{{}, {}, q.alpha, q.t};
  const double s = std::pow(q.t, 1.0 / q.alpha);
  for (std::size_t i = 0; i < tab.values.size(); ++i) {
    const double x = tab.abscissae[i];
    if (x == 0.0) continue;
    r.abscissae.push_back(x);
    r.ratios.push_back(std::abs(tab.values[i]) * std::pow(s + std::abs(x), 3.0 + q.alpha) /
                       (q.t * std::abs(x)));
  }
  return r;
}

namespace detail {

/// Real trigonometric polynomial f(y) = sum_k w_k Re(c_k e^{2 pi i k y / L}),
/// k = 0..N/2, with w_0 = w_{N/2} = 1 and 2 otherwise, and its mean-free
/// antiderivative.
class TrigSeries {
public:
  TrigSeries(std::vector<fft::cplx> c, const GridSpec& g) : c_(std::move(c)), g_(g) {}

  struct Eval {
    double f = 0.0, df = 0.0, anti = 0.0;
  };

  Eval at(double y) const {
    const std::size_t h = c_.size() - 1;
    const double theta = kTwoPi * y / g_.length;
    const fft::cplx step = std::polar(1.0, theta);
    fft::cplx rot{};
    Eval e{c_[0].real(), 0.0, 0.0};
    for (std::size_t k = 1; k <= h; ++k) {
      if ((k - 1) % 256 == 0) rot = std::polar(1.0, theta * static_cast<double>(k));
      const double w = k == h ? 1.0 : 2.0;
      const double omega = kTwoPi * static_cast<double>(k) / g_.length;
      const fft::cplx z = c_[k] * rot;
      e.f += w * z.real();
      e.df -= w * omega * z.imag();
      e.anti += w * z.imag() / omega;
      rot *= step;
    }
    return e;
  }

  /// Values at the N grid nodes y = m dx.
  std::vector<double> on_grid() const {
    fft::RealDft dft(g_.points);
    auto s = dft.spectrum();
    std::copy(c_.begin(), c_.end(), s.begin());
    s[g_.points / 2] = s[g_.points / 2].real();
    dft.backward();
    auto r = dft.real();
    return {r.begin(), r.end()};
  }

  /// Zero in [a, b] given f(a), f(b) of opposite sign: secant start, Newton
  /// polish, bisection fallback.
  double zero_in(double a, double b, double fa, double fb) const {
    double z = a + (b - a) * fa / (fa - fb);
    for (int it = 0; it < 40; ++it) {
      const Eval e = at(z);
      if (e.f == 0.0) return z;
      ((e.f > 0) == (fa > 0) ? a : b) = z;
      double next = e.df != 0.0 ? z - e.f / e.df : 0.5 * (a + b);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z))) return next;
      z = next;
    }
    return z;
  }

private:
  std::vector<fft::cplx> c_;
  GridSpec g_;
};

/// int over one period of |f| for a mean-free f. With sign changes z_j
/// (eps_j = +1 where f goes from + to -), the integral is 2 sum eps_j F(z_j),
/// F the periodic antiderivative, so the kinks of |f| cost nothing. Sign
/// changes in regions where |f| < 1e-12 max|f| are placed by linear
/// interpolation and left unpolished.
inline double l1_norm_mean_free(const TrigSeries& series, const GridSpec& g) {
  const std::vector<double> v = series.on_grid();
  const std::size_t n = v.size();
  double fmax = 0.0;
  for (double x : v) fmax = std::max(fmax, std::abs(x));
  if (fmax == 0.0) return 0.0;
  const double tau = 1e-12 * fmax;
  std::vector<std::size_t> sig;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(v[i]) > tau) sig.push_back(i);
  const double dx = g.dx();
  std::vector<double> terms;
  for (std::size_t j = 0; j < sig.size(); ++j) {
    const std::size_t i0 = sig[j];
    const std::size_t i1 = j + 1 < sig.size() ? sig[j + 1] : sig[0] + n;
    const double f0 = v[i0], f1 = v[i1 % n];
    if ((f0 > 0) == (f1 > 0)) continue;
    double z;
    if (i1 == i0 + 1) {
      z = series.zero_in(static_cast<double>(i0) * dx, static_cast<double>(i1) * dx, f0, f1);
    } else {
      std::size_t c = i0;
      while (c + 1 < i1 && (v[(c + 1) % n] > 0) == (f0 > 0)) ++c;
      const double a = v[c % n], b = v[(c + 1) % n];
      const double frac = a == b ? 0.5 : a / (a - b);
      z = (static_cast<double>(c) + std::clamp(frac, 0.0, 1.0)) * dx;
    }
    terms.push_back((f0 > 0 ? 2.0 : -2.0) * series.at(z).anti);
  }
  return pairwise_sum(terms);
}

}  // namespace detail

/// int |p_t(y - x) - p_t(y)| dy. The shift is applied as a Fourier phase, so
/// any real x is exact on the torus.
inline double l1_space_modulus(double alpha, double t, double x, std::optional<GridSpec> grid = {}) {
  validate(alpha, t);
  if (x == 0.0) return 0.0;
  GridSpec g;
  if (grid) {
    check_grid(alpha, t, t, *grid);
    if (grid->length < 4.0 * std::abs(x))
      throw ResolutionError("shift |x| exceeds a quarter of the grid length", grid->points,
                            4.0 * std::abs(x));
    g = *grid;
  } else {
    g = auto_grid(alpha, t, t, 4.0 * std::abs(x));
  }
  const std::size_t h = g.points / 2;
  std::vector<fft::cplx> c(h + 1);
  for (std::size_t k = 1; k <= h; ++k) {
    const double xi = static_cast<double>(k) / g.length;
    const fft::cplx phase = std::polar(1.0, -kTwoPi * xi * x);
    c[k] = symbol(alpha, t, xi) * (phase - 1.0) / g.length;
  }
  return detail::l1_norm_mean_free(detail::TrigSeries(std::move(c), g), g);
}

/// int |p_{t+eps}(y) - p_t(y)| dy.
inline double l1_time_modulus(double alpha, double t, double eps, std::optional<GridSpec> grid = {}) {
  validate(alpha, t);
  if (!(eps >= 0.0)) throw ParameterError("eps must be >= 0");
  if (eps == 0.0) return 0.0;
  GridSpec g;
  if (grid) {
    check_grid(alpha, t, t + eps, *grid);
    g = *grid;
  } else {
    g = auto_grid(alpha, t, t + eps);
  }
  const std::size_t h = g.points / 2;
  std::vector<fft::cplx> c(h + 1);
  for (std::size_t k = 1; k <= h; ++k) {
    const double xi = static_cast<double>(k) / g.length;
    c[k] = (symbol(alpha, t + eps, xi) - symbol(alpha, t, xi)) / g.length;
  }
  return detail::l1_norm_mean_free(detail::TrigSeries(std::move(c), g), g);
}

/// A bounded rho-Hoelder test function, with its declared constants.
struct HolderFunction {
  std::function<double(double)> f;
  double rho = 0.5;
  double holder_constant = 1.0;
  double sup_bound = 1.0;
  /// Period of f, if any; grids are then chosen as multiples of it.
  double period = 0.0;
  /// Exact Fourier coefficients c_n of f = sum_n c_n e^{2 pi i n y / period},
  /// n >= 0 (f real, so c_{-n} = conj(c_n)). When set, smoothing uses them
  /// instead of sampling f, which would alias a non-smooth f.
  std::function<std::vector<fft::cplx>(std::size_t)> coefficients;
};

/// |sin y|^rho: Hoelder index rho with constant 1, bounded by 1, period pi.
/// c_0 = Gamma(1 + rho) / (2^rho Gamma(1 + rho/2)^2),
/// c_{n+1} = c_n (n - rho/2) / (n + 1 + rho/2).
inline HolderFunction abs_sine_power(double rho) {
  HolderFunction w{[rho](double y) { return std::pow(std::abs(std::sin(y)), rho); }, rho, 1.0, 1.0,
                   std::numbers::pi, {}};
  w.coefficients = [rho](std::size_t count) {
    std::vector<fft::cplx> c(count);
    if (count == 0) return c;
    double v = std::exp(std::lgamma(1.0 + rho) - rho * std::log(2.0) - 2.0 * std::lgamma(1.0 + rho / 2.0));
    for (std::size_t n = 0; n < count; ++n) {
      c[n] = v;
      const double nn = static_cast<double>(n);
      v *= (nn - rho / 2.0) / (nn + 1.0 + rho / 2.0);
    }
    return c;
  };
  return w;
}

/// Convolutions p_t * w of one test function, evaluated spectrally.
class SmoothedField {
public:
  SmoothedField(const HolderFunction& w, const GridSpec& g) : grid_(g) {
    g.validate_space();
    const auto xs = centered_abscissae(g);
    origin_ = xs.front();
    for (std::size_t i = 0; i < g.points; ++i) {
      const double v = w.f(xs[i]);
      if (!std::isfinite(v) || std::abs(v) > w.sup_bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "test function exceeds its declared bound " << w.sup_bound << " at y=" << xs[i]
           << " (value " << v << ")";
        throw InputError(os.str());
      }
    }
    const std::size_t h = g.points / 2;
    const double m = w.period > 0 ? g.length / w.period : 0.0;
    const auto reps = static_cast<std::size_t>(std::llround(m));
    if (w.coefficients && reps >= 1 && std::abs(m - static_cast<double>(reps)) <= 1e-9 * m) {
      const auto c = w.coefficients(h / reps + 1);
      coef_.assign(h + 1, fft::cplx{});
      for (std::size_t n = 0; n * reps <= h; ++n) {
        const std::size_t k = n * reps;
        coef_[k] = c[n] * std::polar(1.0, kTwoPi * static_cast<double>(k) / g.length * origin_);
      }
      return;
    }
    fft::RealDft dft(g.points);
    auto r = dft.real();
    for (std::size_t i = 0; i < g.points; ++i) r[i] = w.f(xs[i]);
    dft.forward();
    auto s = dft.spectrum();
    coef_.assign(s.begin(), s.end());
    for (auto& c : coef_) c /= static_cast<double>(g.points);
  }

  const GridSpec& grid() const { return grid_; }

  /// sum_k m(xi_k) c_k e^{2 pi i xi_k (x - x_0)} for an even multiplier m.
  template <class Multiplier>
  double evaluate(double x, Multiplier&& m) const {
    const std::size_t h = grid_.points / 2;
    const double theta = kTwoPi * (x - origin_) / grid_.length;
    double acc = (m(0.0) * coef_[0]).real();
    std::vector<double> terms(h);
    fft::cplx rot{};
    fft::cplx step = std::polar(1.0, theta);
    for (std::size_t k = 1; k <= h; ++k) {
      if ((k - 1) % 256 == 0) rot = std::polar(1.0, theta * static_cast<double>(k));
      const double xi = static_cast<double>(k) / grid_.length;
      const double wgt = k == h ? 1.0 : 2.0;
      terms[k - 1] = wgt * (m(xi) * coef_[k] * rot).real();
      rot *= step;
    }
    return acc + pairwise_sum(terms);
  }

  /// p_t * w at every grid node (centered layout).
  template <class Multiplier>
  std::vector<double> on_grid(Multiplier&& m) const {
    fft::RealDft dft(grid_.points);
    auto s = dft.spectrum();
    for (std::size_t k = 0; k < s.size(); ++k)
      s[k] = m(static_cast<double>(k) / grid_.length) * coef_[k];
    dft.backward();
    auto r = dft.real();
    return {r.begin(), r.end()};
  }

private:
  GridSpec grid_;
  std::vector<fft::cplx> coef_;
  double origin_ = 0.0;
};

/// Grid for smoothing computations. For a periodic w the torus of one
/// period is exact (periodizing p_t does not change p_t * w), so only the
/// Fourier-tail rule applies; otherwise both kernel rules over [t_min, t_max].
inline GridSpec smoothing_grid(double alpha, double t_min, double t_max, const HolderFunction& w) {
  validate(alpha, t_min);
  validate(alpha, t_max);
  if (w.period <= 0) return auto_grid(alpha, t_min, t_max);
  GridSpec g{w.period, 64, 0.0, 0.0};
  const double nyq = required_nyquist(alpha, t_min);
  while (g.nyquist() < nyq) g.points *= 2;
  if (g.points > kMaxPoints) throw ResolutionError("smoothing grid needs too many points", g.points, g.length);
  return g;
}

namespace detail {

inline void check_smoothing_grid(double alpha, double t_min, double t_max, const HolderFunction& w,
                                 const GridSpec& g) {
  if (w.period <= 0) {
    check_grid(alpha, t_min, t_max, g);
    return;
  }
  g.validate_space();
  const double m = g.length / w.period;
  if (std::abs(m - std::round(m)) > 1e-9 * m || std::round(m) < 1)
    throw ResolutionError("smoothing grid length must be a multiple of the test function period", g.points,
                          w.period);
  const double tail = fourier_tail(alpha, t_min, g);
  if (tail >= kFourierTailTol) {
    std::ostringstream os;
    os << "smoothing grid too coarse for alpha=" << alpha << ", t=" << t_min << ": Fourier tail " << tail;
    throw ResolutionError(os.str(), next_power_of_two(2.0 * g.length * required_nyquist(alpha, t_min)),
                          g.length);
  }
}

}  // namespace detail

/// |int (p_t(x - y) - p_t(z - y)) w(y) dy|
inline double smoothing_space_gap(double alpha, double t, double x, double z, const HolderFunction& w,
                                  std::optional<GridSpec> grid = {}) {
  validate(alpha, t);
  if (x == z) return 0.0;
  const GridSpec g = grid ? *grid : smoothing_grid(alpha, t, t, w);
  if (grid) detail::check_smoothing_grid(alpha, t, t, w, g);
  const SmoothedField sf(w, g);
  auto m = [&](double xi) { return symbol(alpha, t, xi); };
  return std::abs(sf.evaluate(x, m) - sf.evaluate(z, m));
}

/// |int (p_{t+delta}(x - y) - p_t(x - y)) w(y) dy|
inline double smoothing_time_gap(double alpha, double t, double delta, double x, const HolderFunction& w,
                                 std::optional<GridSpec> grid = {}) {
  validate(alpha, t);
  if (!(delta >= 0.0)) throw ParameterError("delta must be >= 0");
  if (delta == 0.0) return 0.0;
  const GridSpec g = grid ? *grid : smoothing_grid(alpha, t, t + delta, w);
  if (grid) detail::check_smoothing_grid(alpha, t, t + delta, w, g);
  const SmoothedField sf(w, g);
  return std::abs(sf.evaluate(x, [&](double xi) {
    return symbol(alpha, t + delta, xi) - symbol(alpha, t, xi);
  }));
}

/// Quadrature value next to the closed form it should reproduce.
struct ClosedFormComparison {
  double alpha = 0.0;
  double beta = 0.0;
  double t = 0.0;
  double quadrature = 0.0;
  double closed_form = 0.0;
  double rel_err = 0.0;
};

/// 2 Gamma(beta/alpha) / (alpha ((2 pi)^alpha t)^{beta/alpha})
inline double riesz_smoothed_closed_form(double alpha, double beta, double t) {
  return 2.0 * std::tgamma(beta / alpha) /
         (alpha * std::pow(std::pow(kTwoPi, alpha) * t, beta / alpha));
}

/// 2 Gamma(beta/alpha) / (alpha (2^{alpha+1} pi^alpha t)^{beta/alpha})
inline double transform_energy_closed_form(double alpha, double beta, double t) {
  return 2.0 * std::tgamma(beta / alpha) /
         (alpha * std::pow(std::pow(2.0, alpha + 1.0) * std::pow(std::numbers::pi, alpha) * t,
                           beta / alpha));
}

/// (p_t * f_beta)(0) = int |xi|^{beta-1} exp(-t (2 pi |xi|)^alpha) dxi, by quadrature.
inline double riesz_smoothed_at_zero(double alpha, double beta, double t) {
  validate(alpha, t);
  validate_beta(beta);
  return 2.0 * quad::power_exp_integral(beta, alpha, t * std::pow(kTwoPi, alpha)).value;
}

inline ClosedFormComparison riesz_smoothed_comparison(double alpha, double beta, double t) {
  const double q = riesz_smoothed_at_zero(alpha, beta, t);
  const double c = riesz_smoothed_closed_form(alpha, beta, t);
  return {alpha, beta, t, q, c, std::abs(q - c) / std::abs(c)};
}

/// int |xi|^{beta-1} |F p_t(xi)|^2 dxi: quadrature against the closed form.
inline ClosedFormComparison weighted_transform_energy(double alpha, double beta, double t) {
  validate(alpha, t);
  validate_beta(beta);
  const double q = 2.0 * quad::power_exp_integral(beta, alpha, 2.0 * t * std::pow(kTwoPi, alpha)).value;
  const double c = transform_energy_closed_form(alpha, beta, t);
  return {alpha, beta, t, q, c, std::abs(q - c) / std::abs(c)};
}

}  // namespace fracheat::kernel
