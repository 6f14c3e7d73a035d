#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "philr/error.hpp"
#include "philr/scr.hpp"
#include "philr/synthetic.hpp"

using namespace philr;
using Eigen::MatrixXd;

namespace {

SparseMatrix diag(std::initializer_list<double> d) {
  std::vector<Triplet> t;
  Index i = 0;
  for (double v : d) {
    t.push_back({i, i, v});
    ++i;
  }
  return SparseMatrix::from_triplets(i, i, std::move(t));
}

MatrixXd reconstruct(const ScrFactors& f) {
  return f.x.to_dense() * f.t.eigen() * f.y.to_dense().transpose();
}

}  // namespace

TEST_SUITE("scr") {
  TEST_CASE("orthogonal columns are picked largest first") {
    QgsOptions o;
    o.tol = 0.5;
    o.mode = ToleranceMode::absolute;
    const auto q = quasi_gram_schmidt(diag({5, 3, 1}), o);
    CHECK(q.selected == std::vector<Index>{0, 1, 2});
    CHECK(q.residual == 0.0);
    CHECK(q.converged);
    CHECK((q.r.eigen() - MatrixXd(Eigen::Vector3d(5, 3, 1).asDiagonal())).norm() <= 1e-15);
  }

  TEST_CASE("a duplicated column is never selected twice") {
    MatrixXd a = synthetic::gaussian(20, 6, 1);
    a.col(4) = a.col(1);
    const auto q = quasi_gram_schmidt(SparseMatrix::from_dense(a), {1e-12});
    const auto& s = q.selected;
    CHECK_FALSE((std::find(s.begin(), s.end(), 1) != s.end() && std::find(s.begin(), s.end(), 4) != s.end()));
    CHECK(q.rank() == 5);
    CHECK(q.converged);
  }

  TEST_CASE("decaying spectrum: residual target, rank and Gram-Schmidt oracle") {
    const SparseMatrix a = SparseMatrix::from_dense(
        synthetic::decaying_matrix(100, {synthetic::Decay::geometric, 2.0, 1.0, 0}, 3));
    const auto q = quasi_gram_schmidt(a, {1e-5});
    CHECK(q.converged);
    CHECK(q.residual <= 1e-5 * a.frobenius_norm());
    CHECK(q.rank() >= 15);
    CHECK(q.rank() <= 19);

    const MatrixXd dense = a.to_dense();
    const MatrixXd qq = oracle::gram_schmidt(dense, q.selected);
    const double oracle_resid = (dense - qq * (qq.transpose() * dense)).norm();
    CHECK(std::abs(oracle_resid - q.residual) <= 1e-8);

    // X = Q R with the implicit Q.
    MatrixXd x(100, q.rank());
    for (Index k = 0; k < q.rank(); ++k) x.col(k) = dense.col(q.selected[static_cast<std::size_t>(k)]);
    CHECK((qq * q.r.eigen() - x).norm() <= 1e-10 * x.norm());

    for (std::size_t k = 1; k < q.residual_history.size(); ++k) {
      CHECK(q.residual_history[k] <= q.residual_history[k - 1] * (1.0 + 1e-12));
    }
  }

  TEST_CASE("rank cap flags or throws") {
    const SparseMatrix a = SparseMatrix::from_dense(synthetic::gaussian(30, 30, 4));
    QgsOptions o;
    o.max_rank = 3;
    const auto q = quasi_gram_schmidt(a, o);
    CHECK(q.rank() == 3);
    CHECK_FALSE(q.converged);
    o.strict = true;
    CHECK_THROWS_AS(quasi_gram_schmidt(a, o), ComputationError);
  }

  TEST_CASE("exact low rank is recovered") {
    const auto f0 = synthetic::random_factored(50, 3, 0.2, 5.0, 5);
    const SparseMatrix a = SparseMatrix::from_dense(f0.x.to_dense() * f0.t.eigen() * f0.y.to_dense().transpose());
    const auto f = scr_approximate(a);
    CHECK(f.rank == 3);
    const double rel = (reconstruct(f) - a.to_dense()).norm() / a.frobenius_norm();
    CHECK(rel <= 1e-12);
    CHECK(scr_residual(a, f) <= 1e-10 * a.frobenius_norm());
  }

  TEST_CASE("dropped singular value is the residual") {
    const auto f = scr_approximate(diag({1.0, 1e-8}));
    CHECK(f.rank == 1);
    CHECK(f.eps_col >= 1e-8 * (1 - 1e-6));
    CHECK(f.eps_col <= 1e-8 * (1 + 1e-6));
    CHECK(f.eps_row >= 1e-8 * (1 - 1e-6));
    CHECK(f.eps_row <= 1e-8 * (1 + 1e-6));
  }

  TEST_CASE("symmetric input selects the same rows and columns") {
    const MatrixXd g = synthetic::decaying_matrix(40, {synthetic::Decay::geometric, 3.0, 1.0, 0}, 6);
    const SparseMatrix a = SparseMatrix::from_dense(g + g.transpose());
    const auto f = scr_approximate(a);
    CHECK(f.column_indices == f.row_indices);
  }

  TEST_CASE("factors are verbatim columns and rows of A") {
    const SparseMatrix a = synthetic::sparse_decaying(60, {synthetic::Decay::algebraic, 2.0, 1.0, 0}, 60, 7);
    const auto f = scr_approximate(a, {1e-3, 1e-3});
    const MatrixXd d = a.to_dense();
    for (Index k = 0; k < f.rank; ++k) {
      CHECK((f.x.to_dense().col(k).array() == d.col(f.column_indices[static_cast<std::size_t>(k)]).array()).all());
      CHECK((f.y.to_dense().col(k).transpose().array() == d.row(f.row_indices[static_cast<std::size_t>(k)]).array()).all());
    }
    CHECK(f.x.nnz() <= static_cast<Index>(f.rank) * 60);
  }

  TEST_CASE("residual: streamed, Gram and materialized agree; bound holds") {
    const SparseMatrix a = synthetic::sparse_decaying(200, {synthetic::Decay::algebraic, 1.5, 1.0, 0}, 200, 8);
    ScrOptions o;
    o.tol_col = o.tol_row = 1e-2;
    const auto f = scr_approximate(a, o);
    const double exact = (a.to_dense() - reconstruct(f)).norm();
    const double streamed = scr_residual(a, f);
    CHECK(std::abs(streamed - exact) <= 1e-9 * exact);
    CHECK(std::abs(scr_residual_gram(a, f) - exact) <= 1e-6 * a.frobenius_norm());
    CHECK(streamed <= std::hypot(f.eps_col, f.eps_row) + 1e-10 * a.frobenius_norm());
    CHECK(scr_residual(a, f, Exec::serial) == streamed);
  }

  TEST_CASE("selection is deterministic") {
    const SparseMatrix a = synthetic::sparse_decaying(80, {synthetic::Decay::geometric, 1.5, 1.0, 0}, 80, 9);
    const auto f1 = scr_approximate(a);
    const auto f2 = scr_approximate(a);
    CHECK(f1.column_indices == f2.column_indices);
    CHECK(f1.row_indices == f2.row_indices);
    CHECK((f1.t.eigen().array() == f2.t.eigen().array()).all());
  }

  TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(scr_approximate(SparseMatrix(3, 3, {0, 0, 0, 0}, {}, {})), ComputationError);
    try {
      scr_approximate(diag({0.1, 0.05}), {10.0, 10.0});
      FAIL("expected rank-exceeded");
    } catch (const ComputationError& e) {
      CHECK(e.kind() == ErrorKind::rank_exceeded);
    }
  }
}
