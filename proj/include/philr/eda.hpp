#pragma once

#include <vector>

#include "philr/dense.hpp"
#include "philr/lowrank.hpp"

namespace philr {

/// Samples as columns of an n x m matrix with one class label per sample.
class LabeledData {
 public:
  /// Labels may be any integers; they are remapped to 0..K-1 in increasing
  /// order. With `scale_columns` every sample is divided by its 2-norm
  /// (zero columns are left alone).
  LabeledData(Eigen::MatrixXd data, const std::vector<long>& labels, bool scale_columns = true);
  /// Labels used as given; each must lie in [0, classes). Classes may be empty.
  LabeledData(Eigen::MatrixXd data, const std::vector<int>& labels, int classes,
              bool scale_columns = true);

  const Eigen::MatrixXd& data() const noexcept { return data_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int classes() const noexcept { return classes_; }
  /// Original label of class j.
  long original_label(int j) const { return originals_.at(static_cast<std::size_t>(j)); }
  Index features() const noexcept { return data_.rows(); }
  Index samples() const noexcept { return data_.cols(); }

 private:
  Eigen::MatrixXd data_;
  std::vector<int> labels_;
  std::vector<long> originals_;
  int classes_ = 0;
};

/// S_B = H_B H_B^T and S_W = H_W H_W^T.
struct ScatterFactors {
  DenseMatrix h_b;  ///< n x K, column j = sqrt(m_j) (c_j - c)
  DenseMatrix h_w;  ///< n x m, samples minus their class centroid, grouped by class
  std::vector<Index> class_sizes;
};

ScatterFactors scatter_factors(const LabeledData& d);

/// exp(H H^T) = I + H phi_1(H^T H) H^T as a rank-k family with X = Y = H, T = I, p = 0.
LowRankPhiFamily exp_scatter(const DenseMatrix& h);

}  // namespace philr
