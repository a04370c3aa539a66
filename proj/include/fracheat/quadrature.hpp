#pragma once

// Quadrature for the two integrand families that appear around the
// fractional heat kernel:
//   * power-law weighted Laplace-type integrals  int_0^inf xi^(b-1) exp(-c xi^a) dxi
//     (integrable singularity at 0 when b < 1), and
//   * the inverse Fourier integral of exp(-(2 pi |xi|)^a) at a fixed abscissa.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracheat/errors.hpp"
#include "fracheat/grid.hpp"

namespace fracheat::quad {

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

inline constexpr double kTailRelTol = 1e-13;

/// int_0^a u^(g-1) exp(-c u) du for c*a <= 1, by integrating the Taylor
/// series of exp(-c u) against the weight term by term (exact moments).
inline double weighted_taylor_panel(double g, double c, double a) {
  const double ca = c * a;
  double term = 1.0;  // (-ca)^n / n!
  double sum = 1.0 / g;
  for (int n = 1; n < 200; ++n) {
    term *= -ca / n;
    const double add = term / (g + n);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return std::pow(a, g) * sum;
}

}  // namespace detail

/// int_0^inf xi^(beta-1) exp(-rate * xi^alpha) dxi for beta > 0, alpha > 0, rate > 0.
///
/// Substituting u = xi^alpha gives (1/alpha) int_0^inf u^(g-1) e^(-rate u) du with
/// g = beta/alpha. The singular piece on [0, min(1, 1/rate)] is integrated in
/// closed form against the Taylor polynomial of the exponential; the smooth
/// remainder goes to adaptive Gauss-Kronrod.
inline Result power_exp_integral(double beta, double alpha, double rate) {
  if (!(beta > 0) || !(alpha > 0) || !(rate > 0))
    throw ParameterError("power_exp_integral needs beta, alpha, rate > 0");
  const double g = beta / alpha;
  const double split = std::min(1.0, 1.0 / rate);
  const double head = detail::weighted_taylor_panel(g, rate, split);

  // Tail in v = rate*u: rate^-g int_{rate*split}^inf v^(g-1) e^-v dv.
  const double v0 = rate * split;
  auto f = [g](double v) { return std::exp((g - 1.0) * std::log(v) - v); };
  double err = 0.0;
  double l1 = 0.0;
  const double tail_scaled = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, v0, std::numeric_limits<double>::infinity(), 20, detail::kTailRelTol, &err, &l1);
  const double tail = std::pow(rate, -g) * tail_scaled;
  const double tail_err = std::pow(rate, -g) * err;

  const double value = (head + tail) / alpha;
  const double abs_err = tail_err / alpha;
  if (!std::isfinite(value) || abs_err > 1e-9 * std::abs(value)) {
    std::ostringstream os;
    os << "power_exp_integral did not converge (beta=" << beta << ", alpha=" << alpha
       << ", rate=" << rate << ", estimate=" << value << ", error=" << abs_err << ")";
    throw NumericalError(os.str());
  }
  return {value, abs_err};
}

/// (1/pi) int_0^inf s^m exp(-s^alpha) {cos|sin}(s z) ds, the reduced kernel
/// integrals. m = 0 with cos gives p_1(z); m = 1 with sin gives -d/dz p_1(z).
inline Result reduced_fourier_integral(double alpha, double z, int power, bool use_sine) {
  // exp(-s^alpha) < 1e-17 beyond s_max.
  const double s_max = std::pow(39.2, 1.0 / alpha) + 1.0;
  const double period = std::abs(z) > 0 ? kTwoPi / std::abs(z) : s_max;
  const double n_panels = std::ceil(s_max / std::min(1.0, period));
  const double panel = s_max / n_panels;
  auto f = [&](double s) {
    const double w = (power == 0 ? 1.0 : std::pow(s, power)) * std::exp(-std::pow(s, alpha));
    return w * (use_sine ? std::sin(s * z) : std::cos(s * z));
  };
  double total = 0.0, total_err = 0.0, scale = 0.0;
  // s^alpha is not smooth at 0, so the first panel goes to tanh-sinh.
  {
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    total += ts.integrate(f, 0.0, std::min(panel, s_max), 1e-14, &err, &l1);
    total_err += err;
    scale += l1;
  }
  for (double j = 1; j < n_panels; ++j) {
    const double a = j * panel, b = (j + 1) * panel;
    // remaining integrand is below roundoff of what has been accumulated
    if (std::pow(b, power) * std::exp(-std::pow(a, alpha)) * (s_max - a) < 1e-17 * scale) break;
    double err = 0.0, l1 = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14,
                                                                          &err, &l1);
    total_err += err;
    scale += l1;
  }
  if (total_err > 1e-10 * std::max(scale, 1e-300))
    throw NumericalError("reduced_fourier_integral did not converge");
  return {total / std::numbers::pi, total_err / std::numbers::pi};
}

}  // namespace fracheat::quad
