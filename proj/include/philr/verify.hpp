#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace philr::verify {

/// One checked inequality measured <= bound.
struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;  ///< bound - measured
  bool passed = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const noexcept;
};

/// Suites: identity, frechet, sandwich, bounds; "all" runs each in turn.
/// Deterministic for a given seed. Throws dimension_mismatch on an unknown name.
std::vector<SuiteResult> run(std::string_view suite, std::uint64_t seed);

const std::vector<std::string>& suite_names();

}  // namespace philr::verify
