#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP path and a serial
// reference; tests pin the two against each other and the benchmark target
// compares their timings. Each output entry is produced by exactly one thread,
// so results do not depend on the thread count.

#include <Eigen/Dense>

#include "philr/exec.hpp"
#include "philr/sparse.hpp"

namespace philr::kernels {

/// A * B for sparse A.
Eigen::MatrixXd spmm(const SparseMatrix& a, const Eigen::MatrixXd& b, Exec exec = Exec::parallel);

/// A^T * B for sparse A.
Eigen::MatrixXd spmm_transposed(const SparseMatrix& a, const Eigen::MatrixXd& b,
                                Exec exec = Exec::parallel);

/// diag * I + L * Y^T, with L dense n x r and Y sparse n x r.
Eigen::MatrixXd lowrank_outer(const Eigen::MatrixXd& left, const SparseMatrix& y, double diag,
                              Exec exec = Exec::parallel);

/// Squared Frobenius norm of A - X * W, where W = T * Y^T is supplied column-wise
/// as the r x m dense matrix `w`. Never materialises the n x m difference.
double lowrank_residual_sq(const SparseMatrix& a, const SparseMatrix& x, const Eigen::MatrixXd& w,
                           Exec exec = Exec::parallel);

/// Sum_g weights[g] * kron(P_g^T, Q_g) accumulated into an n^2 x n^2 matrix.
Eigen::MatrixXd kron_accumulate(const std::vector<Eigen::MatrixXd>& p_factors,
                                const std::vector<Eigen::MatrixXd>& q_factors,
                                const std::vector<double>& weights, Exec exec = Exec::parallel);

}  // namespace philr::kernels
