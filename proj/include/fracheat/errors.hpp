#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fracheat {

/// Base class for all library errors. The `kind()` tag is what the CLI
/// reports and what tests match on.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error("parameter error", w) {}
};

/// Grid cannot represent the requested quantity to tolerance.
struct ResolutionError : Error {
  ResolutionError(const std::string& w, std::size_t required_points, double required_length)
      : Error("resolution error", w), required_points(required_points),
        required_length(required_length) {}
  std::size_t required_points;
  double required_length;
};

/// A kernel evaluated at its singular point.
struct SingularityError : Error {
  explicit SingularityError(const std::string& w) : Error("singularity error", w) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error("numerical error", w) {}
};

struct InputError : Error {
  explicit InputError(const std::string& w) : Error("input error", w) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& w) : Error("usage error", w) {}
};

struct DegenerateDataError : Error {
  explicit DegenerateDataError(const std::string& w) : Error("degenerate data", w) {}
};

/// A parameter lies outside the hypotheses of one of the moment theorems.
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error("range error", w) {}
};

struct BlowUpError : Error {
  BlowUpError(const std::string& w, std::size_t t_index, std::uint64_t stream_id)
      : Error("blow-up", w), t_index(t_index), stream_id(stream_id) {}
  std::size_t t_index;
  std::uint64_t stream_id;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("config error", w) {}
};

}  // namespace fracheat
