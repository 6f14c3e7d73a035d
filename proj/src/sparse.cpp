#include "philr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "philr/error.hpp"

namespace philr {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr,
                           std::vector<Index> row_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  require(rows >= 0 && cols >= 0, ErrorKind::dimension_mismatch, "negative sparse dimensions");
  require(static_cast<Index>(col_ptr_.size()) == cols + 1, ErrorKind::dimension_mismatch,
          "column pointer array must have cols+1 entries");
  require(row_idx_.size() == values_.size(), ErrorKind::dimension_mismatch,
          "row index and value arrays differ in length");
  require(col_ptr_.front() == 0 && col_ptr_.back() == static_cast<Index>(values_.size()),
          ErrorKind::dimension_mismatch, "column pointers do not span the value array");
  for (Index j = 0; j < cols; ++j) {
    require(col_ptr_[j] <= col_ptr_[j + 1], ErrorKind::dimension_mismatch,
            "column pointers are not monotone");
    for (Index k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
      require(row_idx_[k] >= 0 && row_idx_[k] < rows, ErrorKind::dimension_mismatch,
              "row index out of range in column " + std::to_string(j));
      require(k == col_ptr_[j] || row_idx_[k - 1] < row_idx_[k], ErrorKind::dimension_mismatch,
              "row indices not strictly increasing in column " + std::to_string(j));
      require(std::isfinite(values_[k]), ErrorKind::non_finite_input,
              "non-finite stored value in column " + std::to_string(j));
      require(values_[k] != 0.0, ErrorKind::dimension_mismatch,
              "explicit zero stored in column " + std::to_string(j));
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols,
            ErrorKind::dimension_mismatch, "triplet index out of range");
    require(std::isfinite(t.value), ErrorKind::non_finite_input, "non-finite triplet value");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  std::vector<Index> col_ptr(static_cast<std::size_t>(cols) + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> values;
  row_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size();) {
    const Index r = triplets[k].row;
    const Index c = triplets[k].col;
    double sum = 0.0;
    for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) {
      sum += triplets[k].value;
    }
    if (sum != 0.0) {
      row_idx.push_back(r);
      values.push_back(sum);
      ++col_ptr[static_cast<std::size_t>(c) + 1];
    }
  }
  std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
  return SparseMatrix(rows, cols, std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense, double drop_tol) {
  require(dense.allFinite(), ErrorKind::non_finite_input, "dense input has NaN or Inf");
  std::vector<Index> col_ptr(static_cast<std::size_t>(dense.cols()) + 1, 0);
  std::vector<Index> row_idx;
  std::vector<double> values;
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      const double v = dense(i, j);
      if (v != 0.0 && std::abs(v) > drop_tol) {
        row_idx.push_back(i);
        values.push_back(v);
      }
    }
    col_ptr[static_cast<std::size_t>(j) + 1] = static_cast<Index>(values.size());
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(col_ptr), std::move(row_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> col_ptr(static_cast<std::size_t>(n) + 1);
  std::iota(col_ptr.begin(), col_ptr.end(), Index{0});
  std::vector<Index> row_idx(static_cast<std::size_t>(n));
  std::iota(row_idx.begin(), row_idx.end(), Index{0});
  return SparseMatrix(n, n, std::move(col_ptr), std::move(row_idx),
                      std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> count(static_cast<std::size_t>(rows_) + 1, 0);
  for (Index r : row_idx_) ++count[static_cast<std::size_t>(r) + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<Index> col_ptr = count;
  std::vector<Index> row_idx(values_.size());
  std::vector<double> values(values_.size());
  for (Index j = 0; j < cols_; ++j) {
    for (Index k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
      const auto dst = static_cast<std::size_t>(count[static_cast<std::size_t>(row_idx_[k])]++);
      row_idx[dst] = j;
      values[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(col_ptr), std::move(row_idx), std::move(values));
}

SparseMatrix SparseMatrix::select_columns(std::span<const Index> columns) const {
  std::vector<Index> col_ptr{0};
  std::vector<Index> row_idx;
  std::vector<double> values;
  for (Index j : columns) {
    require(j >= 0 && j < cols_, ErrorKind::dimension_mismatch, "selected column out of range");
    const auto c = column(j);
    row_idx.insert(row_idx.end(), c.rows.begin(), c.rows.end());
    values.insert(values.end(), c.values.begin(), c.values.end());
    col_ptr.push_back(static_cast<Index>(values.size()));
  }
  return SparseMatrix(rows_, static_cast<Index>(columns.size()), std::move(col_ptr),
                      std::move(row_idx), std::move(values));
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (Index j = 0; j < cols_; ++j) {
    for (Index k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) d(row_idx_[k], j) = values_[k];
  }
  return d;
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double SparseMatrix::column_norm(Index j) const {
  double s = 0.0;
  for (double v : column(j).values) s += v * v;
  return std::sqrt(s);
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  require(x.size() == cols_, ErrorKind::dimension_mismatch, "sparse matvec length mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
  for (Index j = 0; j < cols_; ++j) {
    const double xj = x(j);
    if (xj == 0.0) continue;
    for (Index k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) y(row_idx_[k]) += values_[k] * xj;
  }
  return y;
}

Eigen::VectorXd SparseMatrix::multiply_transposed(const Eigen::VectorXd& x) const {
  require(x.size() == rows_, ErrorKind::dimension_mismatch,
          "sparse transposed matvec length mismatch");
  Eigen::VectorXd y(cols_);
  for (Index j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (Index k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) s += values_[k] * x(row_idx_[k]);
    y(j) = s;
  }
  return y;
}

Eigen::MatrixXd sparse_gram(const SparseMatrix& lhs, const SparseMatrix& rhs) {
  require(lhs.rows() == rhs.rows(), ErrorKind::dimension_mismatch,
          "sparse_gram: row counts differ");
  Eigen::MatrixXd g(lhs.cols(), rhs.cols());
  Eigen::VectorXd scatter = Eigen::VectorXd::Zero(lhs.rows());
  for (Index j = 0; j < rhs.cols(); ++j) {
    const auto cj = rhs.column(j);
    for (std::size_t k = 0; k < cj.rows.size(); ++k) scatter(cj.rows[k]) = cj.values[k];
    for (Index i = 0; i < lhs.cols(); ++i) {
      const auto ci = lhs.column(i);
      double s = 0.0;
      for (std::size_t k = 0; k < ci.rows.size(); ++k) s += ci.values[k] * scatter(ci.rows[k]);
      g(i, j) = s;
    }
    for (Index r : cj.rows) scatter(r) = 0.0;
  }
  return g;
}

}  // namespace philr
