#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace philr {

enum class ErrorKind {
  dimension_mismatch,
  non_finite_input,
  rank_exceeded,
  convergence_failure,
  singular_factor,
  io_failure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single error type thrown by every failing operation in the library.
class ComputationError : public std::runtime_error {
 public:
  ComputationError(ErrorKind kind, const std::string& context);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorKind kind_;
  std::string context_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& context);

inline void require(bool condition, ErrorKind kind, const std::string& context) {
  if (!condition) fail(kind, context);
}

}  // namespace philr
