#pragma once

#include <vector>

#include "philr/dense.hpp"
#include "philr/exec.hpp"
#include "philr/scr.hpp"
#include "philr/sparse.hpp"

namespace philr {

/// Factored phi family of A~ = X T Y^T:
///   phi_ell(A~) = I/ell! + X C_ell Y^T,   C_ell = phi_{ell+1}(Z) T,   Z = T (Y^T X),
/// for ell = 0..p. Nothing n x n is stored.
class LowRankPhiFamily {
 public:
  LowRankPhiFamily() = default;

  int order() const noexcept { return p_; }
  Index dimension() const noexcept { return x_.rows(); }
  Index rank() const noexcept { return x_.cols(); }

  const SparseMatrix& x() const noexcept { return x_; }
  const SparseMatrix& y() const noexcept { return y_; }
  const DenseMatrix& t() const noexcept { return t_; }
  const DenseMatrix& z() const noexcept { return z_; }
  /// C_ell = phi_{ell+1}(Z) T
  const DenseMatrix& coefficient(int ell) const;
  /// phi_k(Z) for k = 0..p+1
  const DenseMatrix& phi_z(int k) const;
  const DenseMatrix& r1() const noexcept { return r1_; }
  const DenseMatrix& r2() const noexcept { return r2_; }

 private:
  friend LowRankPhiFamily build_phi_family(const SparseMatrix&, const DenseMatrix&,
                                           const SparseMatrix&, int);
  int p_ = 0;
  SparseMatrix x_;
  SparseMatrix y_;
  DenseMatrix t_;
  DenseMatrix z_;
  std::vector<DenseMatrix> phi_z_;
  std::vector<DenseMatrix> coefficients_;
  DenseMatrix r1_;
  DenseMatrix r2_;
};

/// Builds the family for A~ = X T Y^T. Rank zero (X, Y with no columns) is
/// allowed and yields phi_ell(A~) = I/ell!.
LowRankPhiFamily build_phi_family(const SparseMatrix& x, const DenseMatrix& t,
                                  const SparseMatrix& y, int p);
LowRankPhiFamily build_phi_family(const ScrFactors& f, int p);

/// Family for the n x n zero matrix (rank 0).
LowRankPhiFamily zero_phi_family(Index n, int p);

/// Dense phi_ell(A~); n <= kDenseLimit.
DenseMatrix materialize(const LowRankPhiFamily& fam, int ell, Exec exec = Exec::parallel);

/// phi_ell(A~) v = v/ell! + X (C_ell (Y^T v)).
Eigen::VectorXd apply(const LowRankPhiFamily& fam, int ell, const Eigen::VectorXd& v);

struct EtaBounds {
  double eta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// eta_ell = ||R1 C_ell R2^T||_2 with | eta - 1/ell! | <= ||phi_ell(A~)||_2 <= eta + 1/ell!.
EtaBounds norm_estimate_eta(const LowRankPhiFamily& fam, int ell);

}  // namespace philr
