#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "philr/dense.hpp"

namespace philr {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse column matrix.
///
/// Invariants (checked on construction): col_ptr has cols+1 monotone entries,
/// row indices strictly increase within a column and are < rows, and every
/// stored value is finite and nonzero.
class SparseMatrix {
 public:
  struct Column {
    std::span<const Index> rows;
    std::span<const double> values;
  };

  SparseMatrix() : col_ptr_(1, 0) {}
  SparseMatrix(Index rows, Index cols, std::vector<Index> col_ptr, std::vector<Index> row_idx,
               std::vector<double> values);

  /// Duplicates are summed; entries that sum to zero are dropped.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  /// Keeps entries with |a_ij| > drop_tol.
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense, double drop_tol = 0.0);
  static SparseMatrix identity(Index n);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

  std::span<const Index> col_ptr() const noexcept { return col_ptr_; }
  std::span<const Index> row_indices() const noexcept { return row_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  Column column(Index j) const {
    const auto b = static_cast<std::size_t>(col_ptr_[j]);
    const auto e = static_cast<std::size_t>(col_ptr_[j + 1]);
    return {std::span<const Index>(row_idx_).subspan(b, e - b),
            std::span<const double>(values_).subspan(b, e - b)};
  }

  SparseMatrix transpose() const;
  SparseMatrix select_columns(std::span<const Index> columns) const;
  Eigen::MatrixXd to_dense() const;

  double frobenius_norm() const;
  double column_norm(Index j) const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd multiply_transposed(const Eigen::VectorXd& x) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

/// Sparse-times-sparse product returned dense (used for r x r Gram blocks).
Eigen::MatrixXd sparse_gram(const SparseMatrix& lhs, const SparseMatrix& rhs);

}  // namespace philr
