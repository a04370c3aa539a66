#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fracheat/errors.hpp"

namespace fracheat {

/// Pairwise (cascade) summation in index order. Fixed tree shape, so the
/// result depends only on the input sequence.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

/// |x|^k with an exact multiply chain for integer k.
inline double abs_pow(double x, double k) {
  x = std::abs(x);
  if (k == 2.0) return x * x;
  if (k == 4.0) {
    const double s = x * x;
    return s * s;
  }
  if (k == std::floor(k) && k > 0 && k <= 16) {
    double r = 1.0;
    for (int i = 0; i < static_cast<int>(k); ++i) r *= x;
    return r;
  }
  return std::pow(x, k);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double residual_sd = 0.0;
  std::vector<double> slope_weights;  // slope = sum_i slope_weights[i] * y[i]
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw InputError("least_squares needs >= 2 matched points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw DegenerateDataError("least_squares: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.slope_weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.slope_weights[i] = (x[i] - mx) / sxx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      ss += r * r;
    }
    const double s2 = ss / static_cast<double>(n - 2);
    f.residual_sd = std::sqrt(s2);
    f.slope_stderr = std::sqrt(s2 / sxx);
    f.intercept_stderr = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  }
  return f;
}

}  // namespace fracheat
