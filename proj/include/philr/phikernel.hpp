#pragma once

#include <vector>

#include "philr/dense.hpp"

namespace philr {

/// phi_0(M), ..., phi_p(M) for a square M.
struct PhiFamilyDense {
  int order = 0;
  std::vector<DenseMatrix> matrices;

  const DenseMatrix& operator[](int ell) const { return matrices.at(static_cast<std::size_t>(ell)); }
};

/// Matrix exponential by scaling and squaring with diagonal Pade approximants
/// (degrees 3, 5, 7, 9, 13, chosen by the 1-norm).
DenseMatrix expm_dense(const DenseMatrix& m);
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

/// Whole phi family from a single exponential of the block matrix
///   [[M, I, 0, ..., 0], [0, 0, I, ...], ..., [0, ..., 0]]   (r(p+1) square)
/// whose first block row holds phi_0(M), ..., phi_p(M).
PhiFamilyDense phi_family_dense(const DenseMatrix& m, int p);
std::vector<Eigen::MatrixXd> phi_family(const Eigen::MatrixXd& m, int p);

/// Truncated power series sum_{k=ell}^{ell+terms} M^{k-ell}/k!, Kahan-compensated,
/// with early exit once terms stop contributing. Test witness only: it shares no
/// code with the Pade path.
DenseMatrix phi_taylor_oracle(const DenseMatrix& m, int ell, int terms);

/// Upper bound on the dropped tail: norm^(terms+1) / (terms+ell+1)!.
double taylor_truncation_bound(double norm, int ell, int terms);

/// 1/k!
double inverse_factorial(int k);

}  // namespace philr
