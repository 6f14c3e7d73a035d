#include "philr/kernels.hpp"

#include <omp.h>

#include "philr/error.hpp"

namespace philr::kernels {

namespace {

void spmm_column(const SparseMatrix& a, const Eigen::MatrixXd& b, Index k, Eigen::MatrixXd& out) {
  const auto ptr = a.col_ptr();
  const auto rows = a.row_indices();
  const auto vals = a.values();
  for (Index j = 0; j < a.cols(); ++j) {
    const double bjk = b(j, k);
    if (bjk == 0.0) continue;
    for (Index p = ptr[j]; p < ptr[j + 1]; ++p) out(rows[p], k) += vals[p] * bjk;
  }
}

double sparse_dot(const SparseMatrix::Column& c, const double* dense) {
  double s = 0.0;
  for (std::size_t p = 0; p < c.rows.size(); ++p) s += c.values[p] * dense[c.rows[p]];
  return s;
}

// Column j of diag*I + L*Y^T, given yt = Y^T in CSC form.
void lowrank_column(const Eigen::MatrixXd& left, const SparseMatrix& yt, double diag, Index j,
                    Eigen::MatrixXd& out) {
  auto col = out.col(j);
  col.setZero();
  const auto c = yt.column(j);
  for (std::size_t p = 0; p < c.rows.size(); ++p) col.noalias() += c.values[p] * left.col(c.rows[p]);
  col(j) += diag;
}

double residual_column_sq(const SparseMatrix& a, const SparseMatrix& x, const Eigen::MatrixXd& w,
                          Index j, Eigen::VectorXd& buffer) {
  buffer.setZero();
  const auto aj = a.column(j);
  for (std::size_t p = 0; p < aj.rows.size(); ++p) buffer(aj.rows[p]) = aj.values[p];
  for (Index k = 0; k < x.cols(); ++k) {
    const double coeff = w(k, j);
    if (coeff == 0.0) continue;
    const auto xk = x.column(k);
    for (std::size_t p = 0; p < xk.rows.size(); ++p) buffer(xk.rows[p]) -= coeff * xk.values[p];
  }
  return buffer.squaredNorm();
}

void kron_column(const std::vector<Eigen::MatrixXd>& p, const std::vector<Eigen::MatrixXd>& q,
                 const std::vector<double>& weights, Index col, Eigen::MatrixXd& out) {
  const Index n = q.front().rows();
  const Index b = col / n;
  const Index j = col % n;
  auto dst = out.col(col);
  for (std::size_t g = 0; g < p.size(); ++g) {
    for (Index a = 0; a < n; ++a) {
      const double s = weights[g] * p[g](b, a);
      if (s == 0.0) continue;
      dst.segment(a * n, n).noalias() += s * q[g].col(j);
    }
  }
}

}  // namespace

Eigen::MatrixXd spmm(const SparseMatrix& a, const Eigen::MatrixXd& b, Exec exec) {
  require(a.cols() == b.rows(), ErrorKind::dimension_mismatch, "spmm: inner dimensions differ");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  const Index ncols = b.cols();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < ncols; ++k) spmm_column(a, b, k, out);
  } else {
    for (Index k = 0; k < ncols; ++k) spmm_column(a, b, k, out);
  }
  return out;
}

Eigen::MatrixXd spmm_transposed(const SparseMatrix& a, const Eigen::MatrixXd& b, Exec exec) {
  require(a.rows() == b.rows(), ErrorKind::dimension_mismatch,
          "spmm_transposed: row counts differ");
  Eigen::MatrixXd out(a.cols(), b.cols());
  const Index m = a.cols();
  auto body = [&](Index j) {
    const auto c = a.column(j);
    for (Index k = 0; k < b.cols(); ++k) out(j, k) = sparse_dot(c, b.col(k).data());
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < m; ++j) body(j);
  } else {
    for (Index j = 0; j < m; ++j) body(j);
  }
  return out;
}

Eigen::MatrixXd lowrank_outer(const Eigen::MatrixXd& left, const SparseMatrix& y, double diag,
                              Exec exec) {
  require(left.cols() == y.cols(), ErrorKind::dimension_mismatch,
          "lowrank_outer: factor ranks differ");
  require(left.rows() == y.rows(), ErrorKind::dimension_mismatch,
          "lowrank_outer: result must be square");
  const Index n = left.rows();
  const SparseMatrix yt = y.transpose();
  Eigen::MatrixXd out(n, n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j) lowrank_column(left, yt, diag, j, out);
  } else {
    for (Index j = 0; j < n; ++j) lowrank_column(left, yt, diag, j, out);
  }
  return out;
}

double lowrank_residual_sq(const SparseMatrix& a, const SparseMatrix& x, const Eigen::MatrixXd& w,
                           Exec exec) {
  require(a.rows() == x.rows() && w.rows() == x.cols() && w.cols() == a.cols(),
          ErrorKind::dimension_mismatch, "lowrank_residual_sq: shapes disagree");
  const Index m = a.cols();
  std::vector<double> per_column(static_cast<std::size_t>(m), 0.0);
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      Eigen::VectorXd buffer(a.rows());
#pragma omp for schedule(static)
      for (Index j = 0; j < m; ++j)
        per_column[static_cast<std::size_t>(j)] = residual_column_sq(a, x, w, j, buffer);
    }
  } else {
    Eigen::VectorXd buffer(a.rows());
    for (Index j = 0; j < m; ++j)
      per_column[static_cast<std::size_t>(j)] = residual_column_sq(a, x, w, j, buffer);
  }
  double total = 0.0;
  for (double v : per_column) total += v;
  return total;
}

Eigen::MatrixXd kron_accumulate(const std::vector<Eigen::MatrixXd>& p_factors,
                                const std::vector<Eigen::MatrixXd>& q_factors,
                                const std::vector<double>& weights, Exec exec) {
  require(!p_factors.empty() && p_factors.size() == q_factors.size() &&
              p_factors.size() == weights.size(),
          ErrorKind::dimension_mismatch, "kron_accumulate: factor lists disagree");
  const Index n = q_factors.front().rows();
  const Index n2 = n * n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n2, n2);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < n2; ++c) kron_column(p_factors, q_factors, weights, c, out);
  } else {
    for (Index c = 0; c < n2; ++c) kron_column(p_factors, q_factors, weights, c, out);
  }
  return out;
}

}  // namespace philr::kernels
