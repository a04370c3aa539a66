#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fracheat {

enum class Axis { space, time };

inline std::string axis_name(Axis a) { return a == Axis::space ? "space" : "time"; }

/// E|Delta u|^k per lag, with standard errors over paths.
struct MomentTable {
  Axis axis = Axis::space;
  double k = 2.0;
  std::vector<double> lags;
  std::vector<double> moments;
  std::vector<double> stderrs;
  std::size_t paths = 0;
  /// Snapshot time for the spatial axis, base time for the temporal axis.
  double time = 0.0;
};

}  // namespace fracheat
