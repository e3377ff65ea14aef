#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spiderlab {

// Thrown when a family parameter or operation argument is out of range.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when a construction would exceed the configured size caps.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a configuration violates the active admissibility rule.
struct RuleViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a linear solve fails to converge or a structural check
// (reversibility, irreducibility, reachability) fails.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Limits {
  int degree_cap = 64;
  std::size_t vertex_cap = 5'000'000;
};

inline constexpr double kLumpabilityTol = 1e-12;
inline constexpr double kStationaryTol = 1e-10;
inline constexpr double kSolveTol = 1e-10;
inline constexpr double kDetailedBalanceTol = 1e-12;

// Worker-count default; honors the SPIDERLAB_THREADS environment variable.
int default_threads();
void set_default_threads(int n);

}  // namespace spiderlab
