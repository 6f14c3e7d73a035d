#include "philr/lowrank.hpp"

#include "philr/error.hpp"
#include "philr/kernels.hpp"
#include "philr/linalg.hpp"
#include "philr/phikernel.hpp"

#include <Eigen/QR>

namespace philr {

using Eigen::MatrixXd;

const DenseMatrix& LowRankPhiFamily::coefficient(int ell) const {
  require(ell >= 0 && ell <= p_, ErrorKind::dimension_mismatch,
          "coefficient: ell outside 0..p");
  return coefficients_[static_cast<std::size_t>(ell)];
}

const DenseMatrix& LowRankPhiFamily::phi_z(int k) const {
  require(k >= 0 && k <= p_ + 1, ErrorKind::dimension_mismatch, "phi_z: index outside 0..p+1");
  return phi_z_[static_cast<std::size_t>(k)];
}

namespace {

// R with X = QR, Q orthonormal columns. Wide X (r > n) keeps min(n, r) rows.
DenseMatrix norm_factor(const MatrixXd& x) {
  if (x.rows() >= x.cols()) return qr_thin(x).r;
  const Eigen::HouseholderQR<MatrixXd> qr(x);
  return DenseMatrix(MatrixXd(qr.matrixQR().triangularView<Eigen::Upper>()));
}

}  // namespace

LowRankPhiFamily build_phi_family(const SparseMatrix& x, const DenseMatrix& t,
                                  const SparseMatrix& y, int p) {
  require(p >= 0, ErrorKind::dimension_mismatch, "build_phi_family: p must be >= 0");
  require(x.rows() == y.rows(), ErrorKind::dimension_mismatch,
          "build_phi_family: X and Y must have the same row count");
  require(t.rows() == x.cols() && t.cols() == y.cols() && t.is_square(),
          ErrorKind::dimension_mismatch, "build_phi_family: T must be r x r matching X and Y");
  const Index r = x.cols();
  LowRankPhiFamily fam;
  fam.p_ = p;
  fam.x_ = x;
  fam.y_ = y;
  fam.t_ = t;
  const MatrixXd z = t.eigen() * sparse_gram(y, x);
  fam.z_ = DenseMatrix(z);
  if (r == 0) {
    for (int k = 0; k <= p + 1; ++k) fam.phi_z_.emplace_back(0, 0);
    for (int k = 0; k <= p; ++k) fam.coefficients_.emplace_back(0, 0);
    fam.r1_ = DenseMatrix(0, 0);
    fam.r2_ = DenseMatrix(0, 0);
    return fam;
  }
  auto phis = phi_family(z, p + 1);
  fam.phi_z_.reserve(phis.size());
  for (auto& m : phis) fam.phi_z_.emplace_back(std::move(m));
  for (int ell = 0; ell <= p; ++ell) {
    fam.coefficients_.emplace_back(MatrixXd(fam.phi_z_[static_cast<std::size_t>(ell) + 1].eigen() *
                                            t.eigen()));
  }
  // R factors from densified copies; a sparse QR would avoid the n x r buffers.
  fam.r1_ = norm_factor(x.to_dense());
  fam.r2_ = norm_factor(y.to_dense());
  return fam;
}

LowRankPhiFamily build_phi_family(const ScrFactors& f, int p) {
  return build_phi_family(f.x, f.t, f.y, p);
}

LowRankPhiFamily zero_phi_family(Index n, int p) {
  const SparseMatrix empty(n, 0, std::vector<Index>{0}, {}, {});
  return build_phi_family(empty, DenseMatrix(0, 0), empty, p);
}

DenseMatrix materialize(const LowRankPhiFamily& fam, int ell, Exec exec) {
  require(ell >= 0 && ell <= fam.order(), ErrorKind::dimension_mismatch,
          "materialize: ell outside 0..p");
  const Index n = fam.dimension();
  require(n <= kDenseLimit, ErrorKind::dimension_mismatch,
          "materialize: n = " + std::to_string(n) + " exceeds the dense threshold");
  const double diag = inverse_factorial(ell);
  if (fam.rank() == 0) return DenseMatrix(MatrixXd(diag * MatrixXd::Identity(n, n)));
  const MatrixXd left = kernels::spmm(fam.x(), fam.coefficient(ell).eigen(), exec);
  return DenseMatrix(kernels::lowrank_outer(left, fam.y(), diag, exec));
}

Eigen::VectorXd apply(const LowRankPhiFamily& fam, int ell, const Eigen::VectorXd& v) {
  require(ell >= 0 && ell <= fam.order(), ErrorKind::dimension_mismatch,
          "apply: ell outside 0..p");
  require(v.size() == fam.dimension(), ErrorKind::dimension_mismatch,
          "apply: vector length does not match n");
  Eigen::VectorXd out = v * inverse_factorial(ell);
  if (fam.rank() == 0) return out;
  const Eigen::VectorXd inner = fam.coefficient(ell).eigen() * fam.y().multiply_transposed(v);
  out += fam.x().multiply(inner);
  return out;
}

EtaBounds norm_estimate_eta(const LowRankPhiFamily& fam, int ell) {
  require(ell >= 0 && ell <= fam.order(), ErrorKind::dimension_mismatch,
          "norm_estimate_eta: ell outside 0..p");
  const double inv = inverse_factorial(ell);
  EtaBounds b;
  if (fam.rank() > 0) {
    b.eta = norm2_exact_small(
        MatrixXd(fam.r1().eigen() * fam.coefficient(ell).eigen() * fam.r2().eigen().transpose()));
  }
  b.lower = std::abs(b.eta - inv);
  b.upper = b.eta + inv;
  return b;
}

}  // namespace philr
