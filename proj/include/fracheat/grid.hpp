#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"

namespace fracheat {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

/// Periodic spatial grid of `points` nodes on a torus of side `length`,
/// plus the time step and horizon used by the solver.
struct GridSpec {
  double length = 1.0;
  std::size_t points = 64;
  double dt = 0.0;
  double horizon = 0.0;

  double dx() const { return length / static_cast<double>(points); }
  /// Largest resolved frequency (cycles per unit length).
  double nyquist() const { return 0.5 / dx(); }

  void validate_space() const {
    if (!(length > 0.0) || !std::isfinite(length))
      throw ParameterError("grid length must be positive, got " + std::to_string(length));
    if (!is_power_of_two(points))
      throw ParameterError("grid points must be a power of two, got " + std::to_string(points));
  }
};

/// Signed integer frequency of FFT bin j on an N-point grid.
inline long fft_mode(std::size_t j, std::size_t n) {
  return j <= n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

/// A real field over a periodic grid at one time. Node m sits at x = m*dx.
struct FieldSnapshot {
  double time = 0.0;
  std::vector<double> values;
};

}  // namespace fracheat
