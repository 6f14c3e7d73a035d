#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace philr {

inline constexpr const char* kToolVersion = "philr 0.1.0";

/// Machine-readable record of one CLI run. Timings live under
/// outputs.timings and are the only fields expected to differ between runs.
struct RunReport {
  std::string command;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  std::string tool_version = kToolVersion;

  void timing(const std::string& name, double seconds) { outputs["timings"][name] = seconds; }

  nlohmann::ordered_json to_json() const;
  /// Pretty-printed document; doubles round-trip exactly.
  std::string dump() const;
  void write(const std::filesystem::path& path) const;
};

/// Copy of a report document with outputs.timings removed.
nlohmann::ordered_json without_timings(nlohmann::ordered_json doc);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace philr
