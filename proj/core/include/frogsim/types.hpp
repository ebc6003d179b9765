#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace frogsim {

using Vertex = std::int32_t;
using Step = std::int64_t;

// Sentinel for "never" / unreached. Kept well below INT64_MAX so sums of a
// few sentinels cannot wrap; all time arithmetic must go through sat_add.
inline constexpr Step kNever = std::numeric_limits<Step>::max() / 4;

inline constexpr bool is_never(Step s) { return s >= kNever; }

inline constexpr Step sat_add(Step a, Step b) {
  return (a >= kNever || b >= kNever) ? kNever : a + b;
}

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : Error {
  using Error::Error;
};
struct GenerationFailed : Error {
  using Error::Error;
};
struct NotATorus : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct SingularSystem : Error {
  using Error::Error;
};
struct ConvergenceFailure : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct PartitionMismatch : Error {
  using Error::Error;
};
struct BudgetExceeded : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct NoCrossingWithinCap : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace frogsim
