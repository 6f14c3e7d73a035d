#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "philr/cli.hpp"
#include "philr/error.hpp"

int main(int argc, char** argv) {
  using philr::cli::Options;
  Options o;
  CLI::App app{"phi-functions of sparse low-rank matrices and their condition numbers", "philr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", philr::kToolVersion);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--in", o.input, "Input Matrix Market file (CSV for eda)");
    sub->add_option("--out", o.out, "Write the JSON report here instead of stdout");
  };
  auto scr_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "Residual tolerance for column and row selection");
    sub->add_option("--tol-mode", o.tol_mode, "auto, absolute or relative")
        ->check(CLI::IsMember({"auto", "absolute", "relative"}));
    sub->add_option("--max-rank", o.max_rank, "Cap on the SCR rank (0: none)")
        ->check(CLI::NonNegativeNumber);
  };

  auto* scr = app.add_subcommand("scr", "Sparse column-row approximation A ~ X T Y^T");
  common(scr);
  scr_flags(scr);
  scr->add_option("--factors-prefix", o.factors_prefix, "Write <prefix>X.mtx, Y.mtx, T.mtx");

  auto* phi = app.add_subcommand("phi", "phi_ell of the SCR approximation");
  common(phi);
  scr_flags(phi);
  phi->add_option("--ell", o.ell, "phi index")->check(CLI::NonNegativeNumber);
  phi->add_option("--p", o.p, "Highest index in the family (default: ell)")
      ->check(CLI::NonNegativeNumber);
  phi->add_option("--mode", o.mode, "materialize or apply")
      ->check(CLI::IsMember({"materialize", "apply"}));
  phi->add_option("--vector", o.vector, "n x 1 array file for --mode apply");
  phi->add_option("--result", o.result, "Write the matrix or vector here");

  auto* cond = app.add_subcommand("cond", "Condition number estimates of phi_ell");
  common(cond);
  scr_flags(cond);
  cond->add_option("--ell", o.ell, "phi index")->check(CLI::NonNegativeNumber);
  cond->add_option("--strategy", o.strategy, "one, two, both, exact or all")
      ->check(CLI::IsMember({"one", "two", "both", "exact", "all"}));
  cond->add_option("--seed", o.seed, "Seed for the power iteration start");

  auto* eda = app.add_subcommand("eda", "Scatter-matrix exponentials for labeled CSV data");
  common(eda);
  eda->add_option("--label-column", o.label_column, "Label column index (negative: from end)");
  eda->add_option("--label", o.label_name, "Label column by header name");
  eda->add_flag("!--no-scale", o.scale_columns, "Skip scaling samples to unit 2-norm");
  eda->add_option("--factors-prefix", o.factors_prefix, "Write factor files with this prefix");

  auto* verify = app.add_subcommand("verify", "Run the property suites on seeded inputs");
  verify->add_option("--suite", o.suite, "identity, frechet, sandwich, bounds or all")
      ->check(CLI::IsMember({"identity", "frechet", "sandwich", "bounds", "all"}));
  verify->add_option("--seed", o.seed, "Seed");
  verify->add_option("--out", o.out, "Write the JSON report here instead of stdout");

  auto* bench = app.add_subcommand("bench", "Time serial and parallel kernels once");
  bench->add_option("--size", o.bench_size, "Matrix dimension");
  bench->add_option("--seed", o.seed, "Seed");
  bench->add_option("--out", o.out, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? philr::cli::kSuccess : philr::cli::kInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto outcome = philr::cli::dispatch(command, o);
  if (outcome.exit_code == philr::cli::kInputError) {
    std::cerr << "philr " << command << ": "
              << outcome.report.outputs["error"]["kind"].get<std::string>() << ": "
              << outcome.report.outputs["error"]["message"].get<std::string>() << '\n';
  }
  try {
    if (o.out.empty()) {
      std::cout << outcome.report.dump();
    } else {
      outcome.report.write(o.out);
    }
  } catch (const philr::ComputationError& e) {
    std::cerr << "philr: " << e.context() << '\n';
    return philr::cli::kInputError;
  }
  return outcome.exit_code;
}
