#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace fracheat {

/// Outcome of one numerical check.
struct CheckReport {
  std::string check_name;
  std::string parameter_grid;
  /// Best constant over the grid (largest ratio value/bound).
  double fitted_constant = 0.0;
  /// max fitted C / min fitted C across decades of the swept scale.
  double stability_ratio = 1.0;
  double stability_cap = 3.0;
  std::size_t violations = 0;
  bool pass = false;
  double tolerance = 0.0;
  /// Extra named numbers (margins, secondary fits, cross-check errors).
  std::vector<std::pair<std::string, double>> details;
  std::string note;

  double detail(const std::string& key) const {
    for (const auto& [k, v] : details)
      if (k == key) return v;
    return 0.0;
  }
  bool has_detail(const std::string& key) const {
    for (const auto& kv : details)
      if (kv.first == key) return true;
    return false;
  }
};

}  // namespace fracheat
