#include "philr/linalg.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "philr/error.hpp"
#include "philr/kernels.hpp"

namespace philr {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), ErrorKind::dimension_mismatch,
          "matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
              std::to_string(b.rows()) + " differ");
  return DenseMatrix(Eigen::MatrixXd(a.eigen() * b.eigen()));
}

DenseMatrix matmul(const SparseMatrix& a, const DenseMatrix& b, Exec exec) {
  return DenseMatrix(kernels::spmm(a, b.eigen(), exec));
}

ThinQr qr_thin(const Eigen::MatrixXd& m) {
  require(m.allFinite(), ErrorKind::non_finite_input, "qr_thin: non-finite input");
  require(m.rows() >= m.cols(), ErrorKind::dimension_mismatch, "qr_thin: requires rows >= cols");
  const Index n = m.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), n);
  Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) {
      r.row(k) *= -1.0;
      q.col(k) *= -1.0;
    }
  }
  return {DenseMatrix(std::move(q)), DenseMatrix(std::move(r))};
}

ThinQr qr_thin(const DenseMatrix& m) { return qr_thin(m.eigen()); }

NormReport norm2_estimate(const SparseMatrix& a, const PowerOptions& options) {
  require(options.tol > 0.0, ErrorKind::dimension_mismatch, "norm2_estimate: tol must be > 0");
  NormReport report;
  report.kind = NormKind::two;
  report.method = NormMethod::power_iteration;
  report.converged = false;
  if (a.nnz() == 0) {
    report.converged = true;
    return report;
  }
  // Start from A^T (row sums of A); fall back to a seeded random vector.
  Eigen::VectorXd v = a.multiply_transposed(a.multiply(Eigen::VectorXd::Ones(a.cols())));
  if (!(v.norm() > 0.0)) {
    std::mt19937_64 rng(options.fallback_seed);
    std::normal_distribution<double> normal;
    for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  }
  v.normalize();
  double sigma = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::VectorXd w = a.multiply(v);
    const double next = w.norm();
    report.iterations = it;
    const bool settled = it > 1 && std::abs(next - sigma) <= options.tol * next;
    sigma = next;
    if (settled || next == 0.0) {
      report.converged = true;
      break;
    }
    v = a.multiply_transposed(w);
    const double vn = v.norm();
    if (vn == 0.0) {
      report.converged = true;
      break;
    }
    v /= vn;
  }
  report.value = sigma;
  if (!report.converged && options.strict) {
    fail(ErrorKind::convergence_failure,
         "norm2_estimate: no convergence after " + std::to_string(options.max_iter) + " steps");
  }
  return report;
}

double norm2_exact_small(const Eigen::MatrixXd& m) {
  require(m.rows() <= kDenseLimit && m.cols() <= kDenseLimit, ErrorKind::dimension_mismatch,
          "norm2_exact_small: matrix exceeds the dense threshold");
  require(m.allFinite(), ErrorKind::non_finite_input, "norm2_exact_small: non-finite input");
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 32) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double norm2_exact_small(const DenseMatrix& m) { return norm2_exact_small(m.eigen()); }

NormReport norm2_lanczos(const Eigen::MatrixXd& m, double tol, int max_steps) {
  require(m.allFinite(), ErrorKind::non_finite_input, "norm2_lanczos: non-finite input");
  NormReport report;
  report.method = NormMethod::lanczos;
  report.converged = true;
  if (m.size() == 0) return report;
  const Index kmax = std::min<Index>({m.rows(), m.cols(), static_cast<Index>(max_steps)});

  std::mt19937_64 rng(0x1a2c05ULL);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd v(m.cols(), kmax + 1);
  Eigen::MatrixXd u(m.rows(), kmax);
  for (Index i = 0; i < m.cols(); ++i) v(i, 0) = normal(rng);
  v.col(0).normalize();

  std::vector<double> alpha;
  std::vector<double> beta;
  double prev = -1.0;
  int stable = 0;
  double sigma = 0.0;
  for (Index k = 0; k < kmax; ++k) {
    Eigen::VectorXd uk = m * v.col(k);
    if (k > 0) uk -= beta.back() * u.col(k - 1);
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i < k; ++i) uk -= u.col(i).dot(uk) * u.col(i);
    const double a = uk.norm();
    alpha.push_back(a);
    if (a > 0.0) u.col(k) = uk / a;
    else u.col(k).setZero();

    Eigen::VectorXd vk = m.transpose() * u.col(k) - a * v.col(k);
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i <= k; ++i) vk -= v.col(i).dot(vk) * v.col(i);
    const double b = vk.norm();
    beta.push_back(b);

    const Index dim = k + 1;
    Eigen::MatrixXd bidiag = Eigen::MatrixXd::Zero(dim + 1, dim);
    for (Index i = 0; i < dim; ++i) {
      bidiag(i, i) = alpha[static_cast<std::size_t>(i)];
      bidiag(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    // Upper-bidiagonal Ritz values of m^T m: sigma(B_k) with B_k (k+1) x k lower form.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bidiag);
    sigma = svd.singularValues()(0);
    report.iterations = static_cast<int>(dim);
    const bool breakdown = a <= 1e-300 || b <= 1e-14 * sigma;
    if (prev >= 0.0 && std::abs(sigma - prev) <= tol * sigma) ++stable;
    else stable = 0;
    prev = sigma;
    if (breakdown || stable >= 3) break;
    v.col(k + 1) = vk / b;
    if (k + 1 == kmax) report.converged = false;
  }
  report.value = sigma;
  return report;
}

double norm1(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace philr
