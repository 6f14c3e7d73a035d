#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace philr {

using Index = Eigen::Index;

/// Column-major real matrix with finite entries. Immutable once built; all
/// numerical work happens on the underlying Eigen storage.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols);
  /// Throws ComputationError(non_finite_input) on NaN/Inf.
  explicit DenseMatrix(Eigen::MatrixXd values);

  static DenseMatrix identity(Index n);
  static DenseMatrix zeros(Index rows, Index cols);
  static DenseMatrix from_column_major(Index rows, Index cols, std::span<const double> entries);

  Index rows() const noexcept { return m_.rows(); }
  Index cols() const noexcept { return m_.cols(); }
  bool is_square() const noexcept { return m_.rows() == m_.cols(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  std::span<const double> column_major() const noexcept {
    return {m_.data(), static_cast<std::size_t>(m_.size())};
  }
  const Eigen::MatrixXd& eigen() const noexcept { return m_; }

  double frobenius_norm() const { return m_.norm(); }

 private:
  Eigen::MatrixXd m_;
};

bool all_finite(const Eigen::MatrixXd& m) noexcept;

}  // namespace philr
