#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "philr/report.hpp"

namespace philr::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kInputError = 2 };

/// Flag values shared by all subcommands; each command reads what it needs.
struct Options {
  std::string input;
  double tol = 1e-5;
  std::string tol_mode = "auto";  ///< auto | absolute | relative
  long max_rank = 0;              ///< 0: no cap
  int ell = 0;
  std::optional<int> p;           ///< defaults to ell
  std::string strategy = "both";  ///< one | two | both | exact | all
  std::string mode = "materialize";
  std::string vector;             ///< dense Matrix Market column for mode=apply
  std::string result;             ///< where phi writes the matrix or vector
  std::string factors_prefix;     ///< scr and eda write factor files with this prefix
  std::uint64_t seed = 7;
  std::string suite = "all";
  int label_column = -1;
  std::string label_name;
  bool scale_columns = true;
  long bench_size = 2000;
  std::string out;                ///< report path; stdout when empty
};

struct Outcome {
  RunReport report;
  int exit_code = kSuccess;
};

Outcome cmd_scr(const Options& o);
Outcome cmd_phi(const Options& o);
Outcome cmd_cond(const Options& o);
Outcome cmd_eda(const Options& o);
Outcome cmd_verify(const Options& o);
Outcome cmd_bench(const Options& o);

/// Runs `command`, converting library errors into an error report with exit 2.
Outcome dispatch(const std::string& command, const Options& o);

}  // namespace philr::cli
