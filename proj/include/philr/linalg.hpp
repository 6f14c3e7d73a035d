#pragma once

#include <cstdint>

#include "philr/dense.hpp"
#include "philr/exec.hpp"
#include "philr/sparse.hpp"

namespace philr {

inline constexpr Index kDenseLimit = 2000;

enum class NormKind { two, one, frobenius };
enum class NormMethod { exact, power_iteration, lanczos };

struct NormReport {
  double value = 0.0;
  NormKind kind = NormKind::two;
  NormMethod method = NormMethod::exact;
  int iterations = 0;
  bool converged = true;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const SparseMatrix& a, const DenseMatrix& b, Exec exec = Exec::parallel);

struct ThinQr {
  DenseMatrix q;
  DenseMatrix r;
};

/// Householder thin QR with the sign convention diag(R) >= 0.
ThinQr qr_thin(const DenseMatrix& m);
ThinQr qr_thin(const Eigen::MatrixXd& m);

struct PowerOptions {
  double tol = 1e-8;
  int max_iter = 500;
  bool strict = false;  ///< throw convergence_failure instead of flagging
  std::uint64_t fallback_seed = 0x5eedULL;
};

/// Largest singular value by power iteration on A^T A.
NormReport norm2_estimate(const SparseMatrix& a, const PowerOptions& options = {});

/// Largest singular value via dense SVD; rows, cols <= kDenseLimit.
double norm2_exact_small(const DenseMatrix& m);
double norm2_exact_small(const Eigen::MatrixXd& m);

/// Largest singular value of a dense matrix too large for a full SVD:
/// Golub-Kahan bidiagonalisation with full reorthogonalisation, run until the
/// Ritz value is stationary to machine precision.
NormReport norm2_lanczos(const Eigen::MatrixXd& m, double tol = 1e-14, int max_steps = 300);

double norm1(const Eigen::MatrixXd& m);

}  // namespace philr
