#pragma once

#include <cstdint>
#include <vector>

#include "philr/dense.hpp"
#include "philr/sparse.hpp"

namespace philr::synthetic {

enum class Decay { geometric, algebraic };

struct SpectrumSpec {
  Decay decay = Decay::geometric;
  double rate = 2.0;   ///< rho for sigma_j = scale * rho^-(j-1), alpha for scale * j^-alpha
  double scale = 1.0;  ///< sigma_1
  Index rank = 0;      ///< number of nonzero singular values; 0 means n
};

/// sigma_1 >= ... >= sigma_rank > 0.
std::vector<double> spectrum(const SpectrumSpec& spec, Index n);

/// Q factor of a Gaussian n x k matrix (diag(R) >= 0 convention).
Eigen::MatrixXd random_orthonormal(Index n, Index k, std::uint64_t seed);

/// U diag(sigma) V^T with Haar-like orthonormal U, V.
Eigen::MatrixXd decaying_matrix(Index n, const SpectrumSpec& spec, std::uint64_t seed);

/// Independent N(0, sd^2) entries.
Eigen::MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed, double sd = 1.0);

/// Sparse orthogonal matrix: a random permutation followed by `rotations`
/// random Givens rotations.
Eigen::MatrixXd sparse_orthogonal(Index n, Index rotations, std::uint64_t seed);

/// U diag(sigma) V^T with sparse orthogonal U, V, so the singular values are
/// exactly the prescribed spectrum while most entries stay zero.
SparseMatrix sparse_decaying(Index n, const SpectrumSpec& spec, Index rotations,
                             std::uint64_t seed);

/// Keeps entries with |a_ij| at or above the quantile that leaves roughly
/// `density` of them (density in (0, 1]).
SparseMatrix sparsify(const Eigen::MatrixXd& a, double density);

/// Random factors for A~ = X T Y^T: X, Y sparse n x r with `density` nonzeros
/// per column (at least one, full column rank with probability one), T Gaussian
/// scaled so that ||A~||_2 is about `norm`.
struct Factored {
  SparseMatrix x;
  DenseMatrix t;
  SparseMatrix y;
};
Factored random_factored(Index n, Index r, double density, double norm, std::uint64_t seed);

/// Labeled Gaussian blobs: n features, m samples spread evenly over k classes
/// (every class nonempty when m >= k).
struct Blobs {
  Eigen::MatrixXd samples;  ///< n x m
  std::vector<long> labels;
};
Blobs labeled_blobs(Index n, Index m, int k, std::uint64_t seed);

}  // namespace philr::synthetic
