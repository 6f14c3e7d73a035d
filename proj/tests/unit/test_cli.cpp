#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <sys/wait.h>
#include <unistd.h>

#include "philr/cli.hpp"
#include "philr/io.hpp"
#include "philr/phikernel.hpp"
#include "philr/synthetic.hpp"

using namespace philr;
using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("philr_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_sparse(const std::string& name, const SparseMatrix& m) {
  const auto p = scratch() / name;
  io::write_matrix_market(p, m);
  return p.string();
}

std::string write_text(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(PHILR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("scr on a diagonal rank-3 file") {
    cli::Options o;
    o.input = write_sparse("diag3.mtx", SparseMatrix::from_triplets(6, 6, {{0, 0, 3}, {1, 1, 2}, {2, 2, 1}}));
    o.factors_prefix = (scratch() / "diag3_").string();
    const auto out = cli::dispatch("scr", o);
    CHECK(out.exit_code == 0);
    CHECK(out.report.outputs["rank"] == 3);
    CHECK(out.report.outputs["residual"].get<double>() < 1e-12);
    CHECK(fs::exists(o.factors_prefix + "T.mtx"));
    const auto t = io::as_dense(io::read_matrix_market(fs::path(o.factors_prefix + "T.mtx")));
    CHECK(t.rows() == 3);
  }

  TEST_CASE("scr failure modes") {
    cli::Options o;
    o.input = write_text("bad.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n9 9 1\n");
    auto out = cli::dispatch("scr", o);
    CHECK(out.exit_code == 2);
    CHECK(out.report.outputs["error"]["kind"] == "io-failure");
    CHECK(run_binary("scr --in " + o.input) == 2);

    o.input = write_sparse("small.mtx", SparseMatrix::from_triplets(2, 2, {{0, 0, 0.1}, {1, 1, 0.05}}));
    o.tol = 10.0;
    out = cli::dispatch("scr", o);
    CHECK(out.exit_code == 2);
    CHECK(out.report.outputs["error"]["kind"] == "rank-exceeded");
    CHECK(run_binary("scr --in " + o.input + " --tol 10") == 2);
    CHECK(run_binary("scr --bogus-flag") == 2);
  }

  TEST_CASE("phi on the zero matrix and on e1 e1^T") {
    cli::Options o;
    o.input = write_sparse("zero.mtx", SparseMatrix(4, 4, {0, 0, 0, 0, 0}, {}, {}));
    o.ell = 2;
    o.result = (scratch() / "zero_phi.mtx").string();
    auto out = cli::dispatch("phi", o);
    REQUIRE(out.exit_code == 0);
    const auto phi = io::as_dense(io::read_matrix_market(fs::path(o.result)));
    CHECK((phi.eigen() - 0.5 * MatrixXd::Identity(4, 4)).norm() == 0.0);

    cli::Options a;
    a.input = write_sparse("e1.mtx", SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}}));
    a.mode = "apply";
    a.vector = (scratch() / "e1vec.mtx").string();
    io::write_matrix_market(fs::path(a.vector), DenseMatrix(MatrixXd(Eigen::Vector3d(1, 0, 0))));
    out = cli::dispatch("phi", a);
    REQUIRE(out.exit_code == 0);
    const auto& r = out.report.outputs["result"];
    CHECK(r[0].get<double>() == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(r[1].get<double>() == 0.0);
    CHECK(r[2].get<double>() == 0.0);
  }

  TEST_CASE("phi accuracy on a decaying spectrum is capped by the SCR tolerance") {
    cli::Options o;
    o.input = write_sparse("decay.mtx", synthetic::sparse_decaying(300, {synthetic::Decay::geometric, 2.0, 1.0, 0}, 300, 3));
    o.tol = 1e-5;
    for (int ell = 0; ell <= 4; ++ell) {
      o.ell = ell;
      const auto out = cli::dispatch("phi", o);
      REQUIRE(out.exit_code == 0);
      CHECK(out.report.outputs["rel_err_f"].get<double>() <= 1e-6);
    }
  }

  TEST_CASE("cond: strategies versus exact at n = 8") {
    cli::Options o;
    o.input = write_sparse("rand8.mtx", SparseMatrix::from_dense(synthetic::gaussian(8, 8, 4, 0.3)));
    o.strategy = "all";
    o.ell = 1;
    const auto out = cli::dispatch("cond", o);
    REQUIRE(out.exit_code == 0);
    const auto& est = out.report.outputs["estimates"];
    REQUIRE(est.size() == 3);
    const double exact = est[2]["absolute"].get<double>();
    CHECK(est[2]["strategy"] == "exact");
    for (int i = 0; i < 2; ++i) {
      const double v = est[i]["absolute"].get<double>();
      CHECK(v >= exact / 100);
      CHECK(v <= exact * 100);
    }
  }

  TEST_CASE("cond: exact mode guard and degenerate input") {
    cli::Options o;
    o.input = write_sparse("rand20.mtx", SparseMatrix::from_dense(synthetic::gaussian(20, 20, 5)));
    o.strategy = "exact";
    auto out = cli::dispatch("cond", o);
    CHECK(out.exit_code == 2);
    CHECK(out.report.outputs["error"]["kind"] == "dimension-mismatch");
    CHECK(run_binary("cond --strategy exact --in " + o.input) == 2);

    o.input = write_sparse("zero5.mtx", SparseMatrix(5, 5, {0, 0, 0, 0, 0, 0}, {}, {}));
    o.strategy = "both";
    out = cli::dispatch("cond", o);
    REQUIRE(out.exit_code == 0);
    for (const auto& e : out.report.outputs["estimates"]) {
      CHECK(e["absolute"].get<double>() == 0.0);
      CHECK(e["relative"].get<double>() == 0.0);
    }
  }

  TEST_CASE("eda on a toy set, a single class and a missing label column") {
    const auto b = synthetic::labeled_blobs(10, 9, 3, 6);
    std::string csv;
    for (Index s = 0; s < 9; ++s) {
      for (Index i = 0; i < 10; ++i) csv += std::to_string(b.samples(i, s)) + ",";
      csv += std::to_string(b.labels[static_cast<std::size_t>(s)]) + "\n";
    }
    cli::Options o;
    o.input = write_text("toy.csv", csv);
    auto out = cli::dispatch("eda", o);
    REQUIRE(out.exit_code == 0);
    CHECK(out.report.outputs["classes"] == 3);
    CHECK(out.report.outputs["err_b"].get<double>() <= 1e-13);
    CHECK(out.report.outputs["err_w"].get<double>() <= 1e-13);

    o.input = write_text("one.csv", "1,2,0\n3,4,0\n5,7,0\n");
    out = cli::dispatch("eda", o);
    REQUIRE(out.exit_code == 0);
    CHECK(out.report.outputs["exp_sb_identity"] == true);

    o.input = write_text("nolabel.csv", "1.5\n2.5\n");
    out = cli::dispatch("eda", o);
    CHECK(out.exit_code == 2);
    CHECK(out.report.outputs["error"]["kind"] == "io-failure");
  }

  TEST_CASE("verify suites pass and are deterministic") {
    cli::Options o;
    o.suite = "identity";
    CHECK(cli::dispatch("verify", o).exit_code == 0);
    o.suite = "sandwich";
    const auto s = cli::dispatch("verify", o);
    CHECK(s.exit_code == 0);
    o.suite = "all";
    o.seed = 7;
    const auto r1 = cli::dispatch("verify", o);
    const auto r2 = cli::dispatch("verify", o);
    CHECK(r1.exit_code == 0);
    CHECK(without_timings(r1.report.to_json()).dump() == without_timings(r2.report.to_json()).dump());
  }
}
