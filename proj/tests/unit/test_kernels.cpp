#include <doctest.h>

#include <omp.h>

#include "oracles.hpp"
#include "philr/error.hpp"
#include "philr/kernels.hpp"
#include "philr/synthetic.hpp"

using namespace philr;
using Eigen::MatrixXd;

// The parallel paths must reproduce the serial reference bit for bit, for
// any thread count, because each output entry is owned by one thread.
TEST_SUITE("kernels") {
  const SparseMatrix a = synthetic::sparsify(synthetic::gaussian(150, 120, 1), 0.1);
  const MatrixXd b = synthetic::gaussian(120, 17, 2);
  const MatrixXd bt = synthetic::gaussian(150, 9, 3);

  TEST_CASE("spmm matches the serial reference and the naive product") {
    const MatrixXd serial = kernels::spmm(a, b, Exec::serial);
    for (int threads : {1, 2, 3, 4}) {
      omp_set_num_threads(threads);
      CHECK((kernels::spmm(a, b, Exec::parallel).array() == serial.array()).all());
    }
    const MatrixXd ref = oracle::naive_matmul(a.to_dense(), b);
    CHECK((serial - ref).norm() <= 1e-14 * ref.norm());
  }

  TEST_CASE("spmm_transposed") {
    const MatrixXd serial = kernels::spmm_transposed(a, bt, Exec::serial);
    for (int threads : {1, 3}) {
      omp_set_num_threads(threads);
      CHECK((kernels::spmm_transposed(a, bt, Exec::parallel).array() == serial.array()).all());
    }
    const MatrixXd ref = oracle::naive_matmul(a.to_dense().transpose(), bt);
    CHECK((serial - ref).norm() <= 1e-14 * ref.norm());
  }

  TEST_CASE("lowrank_outer") {
    const MatrixXd left = synthetic::gaussian(80, 6, 4);
    const SparseMatrix y = synthetic::sparsify(synthetic::gaussian(80, 6, 5), 0.3);
    const MatrixXd serial = kernels::lowrank_outer(left, y, 0.5, Exec::serial);
    for (int threads : {1, 4}) {
      omp_set_num_threads(threads);
      CHECK((kernels::lowrank_outer(left, y, 0.5, Exec::parallel).array() == serial.array()).all());
    }
    const MatrixXd ref = 0.5 * MatrixXd::Identity(80, 80) + oracle::naive_matmul(left, y.to_dense().transpose());
    CHECK((serial - ref).norm() <= 1e-14 * ref.norm());
  }

  TEST_CASE("lowrank_residual_sq") {
    const SparseMatrix x = synthetic::sparsify(synthetic::gaussian(150, 5, 6), 0.4);
    const MatrixXd w = synthetic::gaussian(5, 120, 7);
    const double serial = kernels::lowrank_residual_sq(a, x, w, Exec::serial);
    for (int threads : {1, 2, 4}) {
      omp_set_num_threads(threads);
      CHECK(kernels::lowrank_residual_sq(a, x, w, Exec::parallel) == serial);
    }
    const double ref = (a.to_dense() - oracle::naive_matmul(x.to_dense(), w)).squaredNorm();
    CHECK(serial == doctest::Approx(ref).epsilon(1e-13));
  }

  TEST_CASE("kron_accumulate") {
    std::vector<MatrixXd> p, q;
    std::vector<double> wts;
    MatrixXd ref = MatrixXd::Zero(16, 16);
    for (int g = 0; g < 3; ++g) {
      p.push_back(synthetic::gaussian(4, 4, 10 + g));
      q.push_back(synthetic::gaussian(4, 4, 20 + g));
      wts.push_back(0.3 + g);
      for (Index r = 0; r < 4; ++r)
        for (Index c = 0; c < 4; ++c) ref.block(r * 4, c * 4, 4, 4) += wts.back() * p.back()(c, r) * q.back();
    }
    const MatrixXd serial = kernels::kron_accumulate(p, q, wts, Exec::serial);
    omp_set_num_threads(3);
    CHECK((kernels::kron_accumulate(p, q, wts, Exec::parallel).array() == serial.array()).all());
    CHECK((serial - ref).norm() <= 1e-14 * ref.norm());
  }

  TEST_CASE("dimension checks") {
    CHECK_THROWS_AS(kernels::spmm(a, bt), ComputationError);
    CHECK_THROWS_AS(kernels::spmm_transposed(a, b), ComputationError);
  }
}
