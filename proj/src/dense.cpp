#include "philr/dense.hpp"

#include "philr/error.hpp"

namespace philr {

bool all_finite(const Eigen::MatrixXd& m) noexcept { return m.allFinite(); }

DenseMatrix::DenseMatrix(Index rows, Index cols) : m_(Eigen::MatrixXd::Zero(rows, cols)) {}

DenseMatrix::DenseMatrix(Eigen::MatrixXd values) : m_(std::move(values)) {
  require(m_.allFinite(), ErrorKind::non_finite_input,
          "dense matrix has NaN or Inf entries (" + std::to_string(m_.rows()) + "x" +
              std::to_string(m_.cols()) + ")");
}

DenseMatrix DenseMatrix::identity(Index n) {
  return DenseMatrix(Eigen::MatrixXd::Identity(n, n));
}

DenseMatrix DenseMatrix::zeros(Index rows, Index cols) { return DenseMatrix(rows, cols); }

DenseMatrix DenseMatrix::from_column_major(Index rows, Index cols,
                                           std::span<const double> entries) {
  require(static_cast<Index>(entries.size()) == rows * cols, ErrorKind::dimension_mismatch,
          "column-major buffer length does not equal rows*cols");
  return DenseMatrix(Eigen::Map<const Eigen::MatrixXd>(entries.data(), rows, cols));
}

}  // namespace philr
