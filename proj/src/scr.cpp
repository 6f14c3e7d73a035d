#include "philr/scr.hpp"

#include <algorithm>
#include <cmath>

#include "philr/error.hpp"
#include "philr/kernels.hpp"

namespace philr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double frobenius_target(double tol, ToleranceMode mode, double fro) {
  switch (mode) {
    case ToleranceMode::absolute: return tol;
    case ToleranceMode::relative: return tol * fro;
    case ToleranceMode::automatic: break;
  }
  return fro <= 1.0 ? tol : tol * fro;
}

// Implicit Q = X R^{-1} built from the selected sparse columns.
class ImplicitBasis {
 public:
  explicit ImplicitBasis(Index n) : n_(n) {}

  Index size() const noexcept { return static_cast<Index>(cols_.size()); }

  // Q^T w = R^{-T} X^T w
  VectorXd project(const VectorXd& w) const {
    const Index k = size();
    VectorXd c(k);
    for (Index i = 0; i < k; ++i) {
      const auto& col = cols_[static_cast<std::size_t>(i)];
      double s = 0.0;
      for (std::size_t p = 0; p < col.rows.size(); ++p) s += col.values[p] * w(col.rows[p]);
      c(i) = s;
    }
    if (k > 0) r_.topLeftCorner(k, k).triangularView<Eigen::Upper>().transpose().solveInPlace(c);
    return c;
  }

  // w -= Q c = X (R^{-1} c)
  void subtract(const VectorXd& c, VectorXd& w) const {
    const Index k = size();
    if (k == 0) return;
    VectorXd coeff = c;
    r_.topLeftCorner(k, k).triangularView<Eigen::Upper>().solveInPlace(coeff);
    for (Index i = 0; i < k; ++i) {
      const auto& col = cols_[static_cast<std::size_t>(i)];
      for (std::size_t p = 0; p < col.rows.size(); ++p) w(col.rows[p]) -= coeff(i) * col.values[p];
    }
  }

  // Residual of column `a` against the basis, with one reorthogonalisation pass.
  // Returns the residual vector; `coeff` receives Q^T a.
  VectorXd orthogonalise(const SparseMatrix::Column& a, VectorXd& coeff) const {
    VectorXd w = VectorXd::Zero(n_);
    for (std::size_t p = 0; p < a.rows.size(); ++p) w(a.rows[p]) = a.values[p];
    coeff = project(w);
    subtract(coeff, w);
    const VectorXd delta = project(w);
    subtract(delta, w);
    coeff += delta;
    return w;
  }

  void append(const SparseMatrix::Column& col, const VectorXd& coeff, double diag) {
    const Index k = size();
    MatrixXd grown = MatrixXd::Zero(k + 1, k + 1);
    grown.topLeftCorner(k, k) = r_;
    grown.col(k).head(k) = coeff;
    grown(k, k) = diag;
    r_ = std::move(grown);
    cols_.push_back(col);
  }

  const MatrixXd& r() const noexcept { return r_; }

 private:
  Index n_;
  MatrixXd r_ = MatrixXd(0, 0);
  std::vector<SparseMatrix::Column> cols_;
};

}  // namespace

QgsResult quasi_gram_schmidt(const SparseMatrix& a, const QgsOptions& options) {
  require(options.tol > 0.0, ErrorKind::dimension_mismatch, "quasi_gram_schmidt: tol must be > 0");
  require(options.max_rank >= 0, ErrorKind::dimension_mismatch,
          "quasi_gram_schmidt: max_rank must be >= 0");
  const Index m = a.cols();
  const Index limit = options.max_rank > 0 ? std::min({options.max_rank, a.rows(), m})
                                           : std::min(a.rows(), m);

  VectorXd norm_sq(m);
  VectorXd reference(m);
  double max_col = 0.0;
  for (Index j = 0; j < m; ++j) {
    const double c = a.column_norm(j);
    norm_sq(j) = c * c;
    reference(j) = c;
    max_col = std::max(max_col, c);
  }
  const double fro = a.frobenius_norm();

  QgsResult result;
  result.target = frobenius_target(options.tol, options.mode, fro);
  std::vector<char> picked(static_cast<std::size_t>(m), 0);
  ImplicitBasis basis(a.rows());

  auto remaining = [&] {
    double s = 0.0;
    for (Index j = 0; j < m; ++j)
      if (!picked[static_cast<std::size_t>(j)]) s += std::max(norm_sq(j), 0.0);
    return std::sqrt(s);
  };

  double residual = remaining();
  result.residual_history.push_back(residual);
  const double dependent = 1e-13 * max_col;

  while (true) {
    if (residual <= result.target) {
      result.converged = true;
      break;
    }
    Index pivot = -1;
    double best = -1.0;
    for (Index j = 0; j < m; ++j) {
      if (picked[static_cast<std::size_t>(j)]) continue;
      if (norm_sq(j) > best) {
        best = norm_sq(j);
        pivot = j;
      }
    }
    if (pivot < 0 || std::sqrt(std::max(best, 0.0)) <= dependent) {
      result.exhausted = true;
      result.converged = true;
      break;
    }
    if (basis.size() >= limit) break;

    const auto col = a.column(pivot);
    VectorXd coeff;
    const VectorXd u = basis.orthogonalise(col, coeff);
    const double rho = u.norm();
    if (!(rho > dependent)) {
      // Downdated norm was stale; the column is dependent after all.
      norm_sq(pivot) = rho * rho;
      residual = remaining();
      continue;
    }
    basis.append(col, coeff, rho);
    picked[static_cast<std::size_t>(pivot)] = 1;
    result.selected.push_back(pivot);

    // q_k^T a_j for every column, q_k = u / rho.
    const VectorXd row = kernels::spmm_transposed(a, u, options.exec).col(0) / rho;

    for (Index j = 0; j < m; ++j) {
      if (picked[static_cast<std::size_t>(j)]) continue;
      norm_sq(j) -= row(j) * row(j);
      const double floor = options.reorth_threshold * reference(j);
      if (norm_sq(j) < floor * floor) {
        VectorXd cj;
        const VectorXd w = basis.orthogonalise(a.column(j), cj);
        const double fresh = w.norm();
        norm_sq(j) = fresh * fresh;
        reference(j) = fresh;
      }
    }
    norm_sq(pivot) = 0.0;
    residual = remaining();
    result.residual_history.push_back(residual);
  }

  result.residual = residual;
  result.r = DenseMatrix(basis.r());
  if (!result.converged && options.strict) {
    fail(ErrorKind::rank_exceeded, "quasi_gram_schmidt: rank limit " + std::to_string(limit) +
                                       " reached with residual " + std::to_string(residual) +
                                       " above target " + std::to_string(result.target));
  }
  return result;
}

ScrFactors scr_approximate(const SparseMatrix& a, const ScrOptions& options) {
  require(a.nnz() > 0, ErrorKind::rank_exceeded, "scr_approximate: input matrix is zero");
  QgsOptions col_opts;
  col_opts.tol = options.tol_col;
  col_opts.max_rank = options.max_rank;
  col_opts.mode = options.mode;
  col_opts.exec = options.exec;
  QgsOptions row_opts = col_opts;
  row_opts.tol = options.tol_row;

  const SparseMatrix at = a.transpose();
  const QgsResult cols = quasi_gram_schmidt(a, col_opts);
  const QgsResult rows = quasi_gram_schmidt(at, row_opts);

  const Index r = std::min(cols.rank(), rows.rank());
  require(r > 0, ErrorKind::rank_exceeded,
          "scr_approximate: tolerance exceeds ||A||_F, no columns selected (r = 0)");

  ScrFactors f;
  f.rank = r;
  f.column_indices.assign(cols.selected.begin(), cols.selected.begin() + r);
  f.row_indices.assign(rows.selected.begin(), rows.selected.begin() + r);
  f.eps_col = cols.residual_history[static_cast<std::size_t>(r)];
  f.eps_row = rows.residual_history[static_cast<std::size_t>(r)];
  f.converged = (r == cols.rank() ? cols.converged : false) && (r == rows.rank() ? rows.converged : false);
  if (options.strict && !f.converged) {
    fail(ErrorKind::rank_exceeded, "scr_approximate: residual above tolerance at rank " +
                                       std::to_string(r));
  }

  const MatrixXd rx = cols.r.eigen().topLeftCorner(r, r);
  const MatrixXd sy = rows.r.eigen().topLeftCorner(r, r);
  for (const MatrixXd* tri : {&rx, &sy}) {
    const double big = tri->diagonal().cwiseAbs().maxCoeff();
    require(tri->diagonal().cwiseAbs().minCoeff() >= 1e-14 * big, ErrorKind::singular_factor,
            "scr_approximate: triangular factor is numerically singular");
  }

  f.x = a.select_columns(f.column_indices);
  f.y = at.select_columns(f.row_indices);

  // X^T A Y, then T = R^{-1} R^{-T} (X^T A Y) S^{-1} S^{-T} by triangular solves.
  const MatrixXd ay = kernels::spmm(a, f.y.to_dense(), options.exec);
  MatrixXd t = kernels::spmm_transposed(f.x, ay, options.exec);
  const auto r_up = rx.triangularView<Eigen::Upper>();
  const auto s_up = sy.triangularView<Eigen::Upper>();
  r_up.transpose().solveInPlace(t);
  r_up.solveInPlace(t);
  s_up.solveInPlace<Eigen::OnTheRight>(t);
  s_up.transpose().solveInPlace<Eigen::OnTheRight>(t);
  f.t = DenseMatrix(std::move(t));
  return f;
}

double scr_residual(const SparseMatrix& a, const ScrFactors& f, Exec exec) {
  require(f.x.rows() == a.rows() && f.y.rows() == a.cols() && f.t.rows() == f.x.cols() &&
              f.t.cols() == f.y.cols(),
          ErrorKind::dimension_mismatch, "scr_residual: factor shapes do not match A");
  // W = T Y^T (r x m), formed column by column from the sparse Y.
  const MatrixXd w = kernels::spmm(f.y, f.t.eigen().transpose(), exec).transpose();
  return std::sqrt(kernels::lowrank_residual_sq(a, f.x, w, exec));
}

double scr_residual_gram(const SparseMatrix& a, const ScrFactors& f) {
  require(f.x.rows() == a.rows() && f.y.rows() == a.cols(), ErrorKind::dimension_mismatch,
          "scr_residual_gram: factor shapes do not match A");
  const double fro = a.frobenius_norm();
  const MatrixXd xay = kernels::spmm_transposed(f.x, kernels::spmm(a, f.y.to_dense()));
  const MatrixXd gx = sparse_gram(f.x, f.x);
  const MatrixXd gy = sparse_gram(f.y, f.y);
  const MatrixXd& t = f.t.eigen();
  const double value = fro * fro - 2.0 * (t.cwiseProduct(xay)).sum() +
                       ((gx * t * gy).cwiseProduct(t)).sum();
  return std::sqrt(std::max(value, 0.0));
}

}  // namespace philr
