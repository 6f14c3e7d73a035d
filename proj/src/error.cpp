#include "philr/error.hpp"

namespace philr {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::non_finite_input: return "non-finite-input";
    case ErrorKind::rank_exceeded: return "rank-exceeded";
    case ErrorKind::convergence_failure: return "convergence-failure";
    case ErrorKind::singular_factor: return "singular-factor";
    case ErrorKind::io_failure: return "io-failure";
  }
  return "unknown";
}

ComputationError::ComputationError(ErrorKind kind, const std::string& context)
    : std::runtime_error(std::string(to_string(kind)) + ": " + context),
      kind_(kind),
      context_(context) {}

void fail(ErrorKind kind, const std::string& context) { throw ComputationError(kind, context); }

}  // namespace philr
