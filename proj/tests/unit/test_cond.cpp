#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "philr/cond.hpp"
#include "philr/error.hpp"
#include "philr/linalg.hpp"
#include "philr/phikernel.hpp"
#include "philr/synthetic.hpp"

using namespace philr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd scaled(Index n, double norm, std::uint64_t seed) {
  const MatrixXd g = synthetic::gaussian(n, n, seed);
  return g * (norm / norm2_exact_small(g));
}

MatrixXd scalar(double v) { return (MatrixXd(1, 1) << v).finished(); }

double rel(const MatrixXd& a, const MatrixXd& b) { return (a - b).norm() / b.norm(); }

VectorXd vec(const MatrixXd& m) { return Eigen::Map<const VectorXd>(m.data(), m.size()); }

}  // namespace

TEST_SUITE("cond") {
  TEST_CASE("Frechet derivative: trivial cases") {
    const DenseMatrix a(scaled(4, 1.0, 1));
    CHECK(frechet_augmented(a, DenseMatrix::zeros(4, 4), 2).eigen().isZero(0.0));
    const DenseMatrix e(synthetic::gaussian(4, 4, 2));
    CHECK(rel(frechet_augmented(DenseMatrix::zeros(4, 4), e, 0).eigen(), e.eigen()) <= 1e-15);
    CHECK(frechet_quadrature(a, DenseMatrix::zeros(4, 4), 1, 32).eigen().isZero(0.0));
    CHECK(frechet_quadrature(DenseMatrix(scalar(0)), DenseMatrix(scalar(1)), 1, 16)(0, 0) ==
          doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("augmented block agrees with quadrature") {
    for (int i = 0; i < 6; ++i) {
      const Index n = 2 + i % 5;
      const DenseMatrix a(scaled(n, 0.5 + i, 10 + i));
      const DenseMatrix e(synthetic::gaussian(n, n, 20 + i));
      for (int ell = 0; ell <= 4; ++ell) {
        CHECK(rel(frechet_quadrature(a, e, ell, 48).eigen(), frechet_augmented(a, e, ell).eigen()) <= 1e-9);
      }
    }
  }

  TEST_CASE("quadrature self-convergence") {
    const DenseMatrix a(scaled(4, 2.0, 3));
    const DenseMatrix e(synthetic::gaussian(4, 4, 4));
    const MatrixXd q32 = frechet_quadrature(a, e, 2, 32).eigen();
    const MatrixXd q48 = frechet_quadrature(a, e, 2, 48).eigen();
    CHECK((q32 - q48).norm() <= 1e-12 * q48.norm());
    const auto ad = frechet_quadrature_adaptive(a, e, 2);
    CHECK(ad.converged);
    CHECK(rel(ad.value.eigen(), frechet_augmented(a, e, 2).eigen()) <= 1e-12);
  }

  TEST_CASE("linearity") {
    const DenseMatrix a(scaled(5, 2.0, 5));
    const MatrixXd e1 = synthetic::gaussian(5, 5, 6), e2 = synthetic::gaussian(5, 5, 7);
    for (int ell = 0; ell <= 3; ++ell) {
      const MatrixXd lhs = frechet_phi(a.eigen(), 2.0 * e1 - 3.0 * e2, ell);
      const MatrixXd rhs = 2.0 * frechet_phi(a.eigen(), e1, ell) - 3.0 * frechet_phi(a.eigen(), e2, ell);
      CHECK(rel(lhs, rhs) <= 1e-11);
    }
  }

  TEST_CASE("finite-difference ratio test") {
    const MatrixXd a = scaled(4, 1.5, 8);
    const MatrixXd e = synthetic::gaussian(4, 4, 9);
    for (int ell = 0; ell <= 4; ++ell) {
      const MatrixXd l = frechet_phi(a, e, ell);
      const MatrixXd base = phi_family(a, ell).back();
      auto err = [&](double h) { return ((phi_family(MatrixXd(a + h * e), ell).back() - base) / h - l).norm(); };
      const double ratio = err(1e-4) / err(1e-5);
      CHECK(ratio >= 8.0);
      CHECK(ratio <= 12.0);
    }
  }

  TEST_CASE("perturbation identity is exact") {
    for (int i = 0; i < 3; ++i) {
      const DenseMatrix a(scaled(4, 1.0 + i, 30 + i));
      const DenseMatrix e(scaled(4, 0.3, 40 + i));
      CHECK(perturbation_identity_check(a, DenseMatrix::zeros(4, 4), 1) <= 1e-15);
      for (int ell = 0; ell <= 3; ++ell) {
        CHECK(perturbation_identity_check(a, e, ell) <= 1e-10 * (1 + phi_family(a.eigen(), ell).back().norm()));
      }
    }
  }

  TEST_CASE("Kronecker form") {
    CHECK((kronecker_form(DenseMatrix::zeros(3, 3), 0).entries.eigen() - MatrixXd::Identity(9, 9)).norm() <= 1e-15);
    for (int ell = 0; ell <= 3; ++ell) {
      for (double a : {-1.3, 0.7, 2.0}) {
        const double k = kronecker_form(DenseMatrix(scalar(a)), ell).entries(0, 0);
        CHECK(k == doctest::Approx(oracle::phi_scalar_derivative(ell, a)).epsilon(1e-8));
        if (ell > 0) {
          const double rec = (oracle::phi_scalar(ell - 1, a) - ell * oracle::phi_scalar(ell, a)) / a;
          CHECK(k == doctest::Approx(rec).epsilon(1e-12));
        }
      }
    }
    const DenseMatrix a(scaled(4, 2.0, 50));
    const auto k = kronecker_form(a, 2);
    for (int s = 0; s < 10; ++s) {
      const MatrixXd e = synthetic::gaussian(4, 4, 60 + s);
      const VectorXd kv = k.entries.eigen() * vec(e);
      CHECK((kv - vec(frechet_phi(a.eigen(), e, 2))).norm() <= 1e-11 * kv.norm());
    }
    CHECK((k.entries.eigen() - kronecker_form(a, 2, Exec::serial).entries.eigen()).norm() == 0.0);
    CHECK_THROWS_AS(kronecker_form(DenseMatrix::zeros(13, 13), 0), ComputationError);
  }

  TEST_CASE("quadrature Kronecker family matches the column-built form") {
    const DenseMatrix a(scaled(6, 2.5, 70));
    int nodes = 0;
    const auto fam = kronecker_family_quadrature(a, 4, Exec::parallel, &nodes);
    CHECK(nodes >= 32);
    for (int ell = 0; ell <= 4; ++ell) {
      const MatrixXd col = kronecker_form(a, ell).entries.eigen();
      CHECK(rel(fam[static_cast<std::size_t>(ell)].entries.eigen(), col) <= 1e-11);
    }
  }

  TEST_CASE("series assembly of the low-rank Kronecker form") {
    // f(z) = 1 + z: the Frechet derivative is the identity map.
    const auto f1 = synthetic::random_factored(4, 2, 0.5, 1.0, 80);
    const std::vector<double> lin{1.0, 1.0};
    const auto k1 = kronecker_form_lowrank_series(f1.x, f1.t, f1.y, lin, 1);
    CHECK((k1.entries.eigen() - MatrixXd::Identity(16, 16)).norm() <= 1e-15);

    // Only alpha_3: Psi_3's inner sum is the single term I kron I.
    const std::vector<double> cubic{0.0, 0.0, 0.0, 1.0};
    const auto k3 = kronecker_form_lowrank_series(f1.x, f1.t, f1.y, cubic, 3);
    const MatrixXd a1 = f1.x.to_dense() * f1.t.eigen() * f1.y.to_dense().transpose();
    CHECK(rel(k3.entries.eigen(), oracle::kronecker_series(a1, cubic)) <= 1e-13);

    for (int i = 0; i < 6; ++i) {
      const Index n = 3 + i % 4;
      const Index r = 1 + i % 3;
      const auto f = synthetic::random_factored(n, r, 0.5, 1.0 + 0.5 * i, 90 + i);
      const MatrixXd a = f.x.to_dense() * f.t.eigen() * f.y.to_dense().transpose();
      for (int ell = 0; ell <= 2; ++ell) {
        const auto coeffs = phi_series_coefficients(ell, 20);
        const MatrixXd series = kronecker_form_lowrank_series(f.x, f.t, f.y, coeffs, 20).entries.eigen();
        CHECK(rel(series, oracle::kronecker_series(a, coeffs)) <= 1e-12);
        CHECK(rel(series, kronecker_form(DenseMatrix(a), ell).entries.eigen()) <= 1e-10);
      }
    }
  }

  TEST_CASE("exact condition numbers") {
    const auto z = cond_exact_small(DenseMatrix::zeros(3, 3), 0);
    CHECK(z.absolute == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z.strategy == CondStrategy::exact);
    for (double a : {-0.8, 1.2}) {
      for (int ell = 0; ell <= 2; ++ell) {
        const auto c = cond_exact_small(DenseMatrix(scalar(a)), ell);
        CHECK(c.absolute == doctest::Approx(std::abs(oracle::phi_scalar_derivative(ell, a))).epsilon(1e-8));
        CHECK(c.relative == doctest::Approx(c.absolute * c.norm_a / c.phi_norm).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(cond_exact_small(DenseMatrix::zeros(20, 20), 0), ComputationError);
    const DenseMatrix a(scaled(7, 2.0, 100));
    const auto fam = cond_exact_family(a, 3);
    for (int ell = 0; ell <= 3; ++ell) {
      CHECK(fam[static_cast<std::size_t>(ell)].absolute ==
            doctest::Approx(cond_exact_small(a, ell).absolute).epsilon(1e-10));
    }
  }

  TEST_CASE("1-norm sandwich of the Kronecker form") {
    for (int i = 0; i < 5; ++i) {
      const Index n = 2 + i;
      const DenseMatrix a(scaled(n, 1.0 + i, 110 + i));
      for (int ell = 0; ell <= 2; ++ell) {
        const MatrixXd k = kronecker_form(a, ell).entries.eigen();
        const double l1 = oracle::l1_unit_search(k, n);
        const double k1 = oracle::norm1(k);
        CHECK(l1 / static_cast<double>(n) <= k1);
        CHECK(k1 <= static_cast<double>(n) * l1 * (1 + 1e-12));
      }
    }
  }

  TEST_CASE("2-norm sandwich") {
    const auto zero = norm_sandwich_check(DenseMatrix::zeros(3, 3), 0, 10);
    CHECK(zero.kron_norm == doctest::Approx(1.0));
    CHECK(zero.l2_search == doctest::Approx(1.0));
    const auto one = norm_sandwich_check(DenseMatrix(scalar(0.7)), 1, 5);
    CHECK(one.kron_norm == doctest::Approx(one.l2_search).epsilon(1e-12));
    CHECK(one.lower_ok);
    CHECK(one.upper_ok);
    for (int i = 0; i < 3; ++i) {
      const auto s = norm_sandwich_check(DenseMatrix(scaled(5, 1.0 + i, 120 + i)), i, 200);
      CHECK(s.lower_ok);
      CHECK(s.upper_ok);
    }
  }

  TEST_CASE("Strategy I") {
    // Z = [1], T = [1], R1 = R2 = [1]: (e - 1)^2 at ell = 0.
    const auto e1 = SparseMatrix::from_triplets(3, 1, {{0, 0, 1.0}});
    const auto fam = build_phi_family(e1, DenseMatrix::identity(1), e1, 2);
    const auto s = strategy_one(fam, 0, 1.0);
    CHECK(s.absolute == doctest::Approx(std::pow(std::exp(1.0) - 1.0, 2)).epsilon(1e-14));
    CHECK(s.strategy == CondStrategy::strategy_one);
    CHECK(s.relative == doctest::Approx(s.absolute * s.norm_a / s.phi_norm).epsilon(1e-12));

    const auto f = synthetic::random_factored(20, 3, 0.2, 1.0, 130);
    const auto tiny = build_phi_family(f.x, DenseMatrix(MatrixXd(1e-12 * f.t.eigen())), f.y, 2);
    CHECK(strategy_one(tiny, 1, 1.0).absolute <= 1e-20);
    const auto zero = build_phi_family(f.x, DenseMatrix::zeros(3, 3), f.y, 2);
    const auto s0 = strategy_one(zero, 1, 1.0);
    CHECK(s0.absolute == 0.0);
    CHECK(s0.relative == 0.0);
    CHECK(s0.diagnostics.count("degenerate") == 1);
  }

  TEST_CASE("Strategy II") {
    const auto f = synthetic::random_factored(20, 3, 0.2, 1.0, 140);
    const auto zero = build_phi_family(f.x, DenseMatrix::zeros(3, 3), f.y, 2);
    CHECK(strategy_two(zero, 1, 1.0).absolute == 0.0);

    // Scalar: |r1 phi'_{ell+1}(z) t r2|.
    const double xv = 2.0, yv = 0.5, tv = 0.8;
    const auto x = SparseMatrix::from_triplets(4, 1, {{1, 0, xv}});
    const auto y = SparseMatrix::from_triplets(4, 1, {{1, 0, yv}});
    const auto fam = build_phi_family(x, DenseMatrix(scalar(tv)), y, 3);
    const double z = tv * yv * xv;
    for (int ell = 0; ell <= 3; ++ell) {
      const auto s = strategy_two(fam, ell, 1.0);
      CHECK(s.converged);
      const double expect = std::abs(xv * oracle::phi_scalar_derivative(ell + 1, z) * tv * yv);
      CHECK(s.absolute == doctest::Approx(expect).epsilon(1e-8));
    }

    // Doubling T with Y^T X halved keeps Z fixed and doubles the estimate.
    const auto g = synthetic::random_factored(30, 4, 0.2, 1.0, 150);
    MatrixXd yhalf = 0.5 * g.y.to_dense();
    const auto base = build_phi_family(g.x, g.t, g.y, 2);
    const auto twice = build_phi_family(g.x, DenseMatrix(MatrixXd(2.0 * g.t.eigen())),
                                        SparseMatrix::from_dense(yhalf), 2);
    CHECK(rel(twice.z().eigen(), base.z().eigen()) <= 1e-15);
    PowerMethodOptions tight;
    tight.tol = 1e-12;
    tight.max_iter = 500;
    const NormReport nb = reduced_frechet_norm(base.z().eigen(), base.t().eigen(), base.r1().eigen(), base.r2().eigen(), 2, tight);
    const NormReport n2 = reduced_frechet_norm(base.z().eigen(), MatrixXd(2.0 * base.t().eigen()), base.r1().eigen(), base.r2().eigen(), 2, tight);
    CHECK(n2.value == doctest::Approx(2.0 * nb.value).epsilon(1e-9));

    // Inner norm cross-checked against the SVD of the explicit r^2 x r^2 map.
    const Index r = 4;
    MatrixXd op(r * r, r * r);
    for (Index c = 0; c < r * r; ++c) {
      MatrixXd e = MatrixXd::Zero(r, r);
      e(c % r, c / r) = 1.0;
      op.col(c) = vec(MatrixXd(base.r1().eigen() * frechet_phi(base.z().eigen(), e, 2) * base.t().eigen() * base.r2().eigen().transpose()));
    }
    CHECK(nb.value == doctest::Approx(norm2_exact_small(op)).epsilon(1e-8));

    PowerMethodOptions strict;
    strict.max_iter = 1;
    strict.strict = true;
    CHECK_THROWS_AS(strategy_two(base, 1, 1.0, strict), ComputationError);
    strict.strict = false;
    CHECK_FALSE(strategy_two(base, 1, 1.0, strict).converged);
  }

  TEST_CASE("strategies are within two orders of magnitude of the exact value") {
    for (int i = 0; i < 3; ++i) {
      const SparseMatrix a = SparseMatrix::from_dense(
          synthetic::decaying_matrix(10, {synthetic::Decay::geometric, 3.0, 1.0, 0}, 160 + i));
      ScrOptions o;
      o.max_rank = 4;
      const auto f = scr_approximate(a, o);
      const auto fam = build_phi_family(f, 4);
      const MatrixXd approx = f.x.to_dense() * f.t.eigen() * f.y.to_dense().transpose();
      for (int ell = 0; ell <= 4; ++ell) {
        const double exact = cond_exact_small(DenseMatrix(approx), ell).absolute;
        for (double est : {strategy_one(fam, ell, 1.0).absolute, strategy_two(fam, ell, 1.0).absolute}) {
          CHECK(est >= exact / 100.0);
          CHECK(est <= exact * 100.0);
        }
      }
    }
  }
}
