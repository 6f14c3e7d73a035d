#include "philr/eda.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "philr/error.hpp"
#include "philr/linalg.hpp"

namespace philr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void normalise_columns(MatrixXd& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const double nrm = m.col(j).norm();
    if (nrm > 0.0) m.col(j) /= nrm;
  }
}

}  // namespace

LabeledData::LabeledData(MatrixXd data, const std::vector<long>& labels, bool scale_columns)
    : data_(std::move(data)) {
  require(static_cast<Index>(labels.size()) == data_.cols(), ErrorKind::dimension_mismatch,
          "LabeledData: one label per sample (column) required");
  require(data_.cols() > 0, ErrorKind::dimension_mismatch, "LabeledData: no samples");
  require(data_.allFinite(), ErrorKind::non_finite_input, "LabeledData: non-finite sample");
  std::map<long, int> index;
  for (long l : labels) index.emplace(l, 0);
  for (auto& [label, j] : index) {
    j = classes_++;
    originals_.push_back(label);
  }
  labels_.reserve(labels.size());
  for (long l : labels) labels_.push_back(index[l]);
  if (scale_columns) normalise_columns(data_);
}

LabeledData::LabeledData(MatrixXd data, const std::vector<int>& labels, int classes,
                         bool scale_columns)
    : data_(std::move(data)), labels_(labels), classes_(classes) {
  require(static_cast<Index>(labels.size()) == data_.cols(), ErrorKind::dimension_mismatch,
          "LabeledData: one label per sample (column) required");
  require(data_.allFinite(), ErrorKind::non_finite_input, "LabeledData: non-finite sample");
  require(classes >= 1, ErrorKind::dimension_mismatch, "LabeledData: need at least one class");
  for (int l : labels) {
    require(l >= 0 && l < classes, ErrorKind::dimension_mismatch,
            "LabeledData: label " + std::to_string(l) + " outside [0, " + std::to_string(classes) + ")");
  }
  for (int j = 0; j < classes; ++j) originals_.push_back(j);
  if (scale_columns) normalise_columns(data_);
}

ScatterFactors scatter_factors(const LabeledData& d) {
  const Index n = d.features();
  const Index m = d.samples();
  const int k = d.classes();
  MatrixXd centroids = MatrixXd::Zero(n, k);
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < m; ++i) {
    const int c = d.labels()[static_cast<std::size_t>(i)];
    centroids.col(c) += d.data().col(i);
    ++sizes[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    require(sizes[static_cast<std::size_t>(c)] > 0, ErrorKind::dimension_mismatch,
            "scatter_factors: class " + std::to_string(d.original_label(c)) + " is empty");
    centroids.col(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
  }
  const VectorXd global = d.data().rowwise().mean();

  MatrixXd hb(n, k);
  for (int c = 0; c < k; ++c) {
    hb.col(c) = std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(c)])) *
                (centroids.col(c) - global);
  }
  MatrixXd hw(n, m);
  Index out = 0;
  for (int c = 0; c < k; ++c) {
    for (Index i = 0; i < m; ++i) {
      if (d.labels()[static_cast<std::size_t>(i)] != c) continue;
      hw.col(out++) = d.data().col(i) - centroids.col(c);
    }
  }
  return {DenseMatrix(std::move(hb)), DenseMatrix(std::move(hw)), std::move(sizes)};
}

LowRankPhiFamily exp_scatter(const DenseMatrix& h) {
  require(h.cols() <= kDenseLimit, ErrorKind::dimension_mismatch,
          "exp_scatter: factor has more columns than the dense threshold");
  const SparseMatrix hs = SparseMatrix::from_dense(h.eigen());
  return build_phi_family(hs, DenseMatrix::identity(h.cols()), hs, 0);
}

}  // namespace philr
