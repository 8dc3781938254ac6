#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cahn {

// Bad inputs: values outside a function's documented domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Bad run description: malformed config files, missing keys, infeasible
// run parameters (resolution too small, tube too wide, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal numerical contract broke (quadrature did not converge, a
// cross-check exceeded its tolerance).  Distinct from solver divergence.
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Growth certification found no admissible sigma.
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Newton/continuation divergence.  Carries the last iterate so callers can
// dump it for post-mortems.
struct SolverError : std::runtime_error {
  std::vector<double> last_iterate;
  SolverError(const std::string& what, std::vector<double> iterate)
      : std::runtime_error(what), last_iterate(std::move(iterate)) {}
};

}  // namespace cahn
