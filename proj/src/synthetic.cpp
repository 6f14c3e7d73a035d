#include "philr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "philr/error.hpp"
#include "philr/linalg.hpp"

namespace philr::synthetic {

using Eigen::MatrixXd;

std::vector<double> spectrum(const SpectrumSpec& spec, Index n) {
  const Index k = spec.rank > 0 ? std::min(spec.rank, n) : n;
  require(spec.rate > 0.0 && spec.scale > 0.0, ErrorKind::dimension_mismatch,
          "spectrum: rate and scale must be positive");
  std::vector<double> s(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    const double jj = static_cast<double>(j);
    s[static_cast<std::size_t>(j)] = spec.decay == Decay::geometric
                                         ? spec.scale * std::pow(spec.rate, -jj)
                                         : spec.scale * std::pow(jj + 1.0, -spec.rate);
  }
  return s;
}

MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed, double sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  MatrixXd g(rows, cols);
  for (Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  return g;
}

MatrixXd random_orthonormal(Index n, Index k, std::uint64_t seed) {
  return qr_thin(gaussian(n, k, seed)).q.eigen();
}

MatrixXd decaying_matrix(Index n, const SpectrumSpec& spec, std::uint64_t seed) {
  const auto sigma = spectrum(spec, n);
  const auto k = static_cast<Index>(sigma.size());
  const MatrixXd u = random_orthonormal(n, k, seed);
  const MatrixXd v = random_orthonormal(n, k, seed ^ 0x9e3779b97f4a7c15ULL);
  const Eigen::Map<const Eigen::VectorXd> s(sigma.data(), k);
  return u * s.asDiagonal() * v.transpose();
}

MatrixXd sparse_orthogonal(Index n, Index rotations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  MatrixXd q = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) q(perm[static_cast<std::size_t>(i)], i) = 1.0;
  if (n < 2) return q;
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));
  for (Index g = 0; g < rotations; ++g) {
    const Index i = pick(rng);
    Index j = pick(rng);
    while (j == i) j = pick(rng);
    const double th = angle(rng);
    const double c = std::cos(th);
    const double s = std::sin(th);
    for (Index k = 0; k < n; ++k) {
      const double a = q(i, k);
      const double b = q(j, k);
      q(i, k) = c * a - s * b;
      q(j, k) = s * a + c * b;
    }
  }
  return q;
}

SparseMatrix sparse_decaying(Index n, const SpectrumSpec& spec, Index rotations,
                             std::uint64_t seed) {
  const auto sigma = spectrum(spec, n);
  const auto k = static_cast<Index>(sigma.size());
  const MatrixXd u = sparse_orthogonal(n, rotations, seed).leftCols(k);
  const MatrixXd v = sparse_orthogonal(n, rotations, seed ^ 0x9e3779b97f4a7c15ULL).leftCols(k);
  const Eigen::Map<const Eigen::VectorXd> s(sigma.data(), k);
  return SparseMatrix::from_dense(u * s.asDiagonal() * v.transpose());
}

SparseMatrix sparsify(const MatrixXd& a, double density) {
  require(density > 0.0 && density <= 1.0, ErrorKind::dimension_mismatch,
          "sparsify: density must lie in (0, 1]");
  if (density >= 1.0 || a.size() == 0) return SparseMatrix::from_dense(a);
  std::vector<double> mags(a.data(), a.data() + a.size());
  for (double& v : mags) v = std::abs(v);
  const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(density * mags.size()));
  std::nth_element(mags.begin(), mags.begin() + static_cast<long>(mags.size() - keep), mags.end());
  const double cut = mags[mags.size() - keep];
  MatrixXd b = a;
  for (Index i = 0; i < b.size(); ++i) {
    if (std::abs(b.data()[i]) < cut) b.data()[i] = 0.0;
  }
  return SparseMatrix::from_dense(b);
}

Factored random_factored(Index n, Index r, double density, double norm, std::uint64_t seed) {
  require(r <= n, ErrorKind::dimension_mismatch, "random_factored: r must not exceed n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<Index> pick(0, n - 1);
  const Index per_col = std::max<Index>(1, static_cast<Index>(density * static_cast<double>(n)));

  auto factor = [&]() {
    std::vector<Triplet> t;
    for (Index j = 0; j < r; ++j) {
      // The diagonal entry keeps the factor full column rank.
      t.push_back({j, j, 1.0 + std::abs(normal(rng))});
      for (Index k = 1; k < per_col; ++k) t.push_back({pick(rng), j, normal(rng)});
    }
    return SparseMatrix::from_triplets(n, r, std::move(t));
  };
  Factored f;
  f.x = factor();
  f.y = factor();
  MatrixXd t(r, r);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = normal(rng);
  if (r > 0) {
    const double current = norm2_exact_small(MatrixXd(qr_thin(f.x.to_dense()).r.eigen() * t *
                                                      qr_thin(f.y.to_dense()).r.eigen().transpose()));
    if (current > 0.0) t *= norm / current;
  }
  f.t = DenseMatrix(std::move(t));
  return f;
}

Blobs labeled_blobs(Index n, Index m, int k, std::uint64_t seed) {
  require(k >= 1 && m >= k, ErrorKind::dimension_mismatch,
          "labeled_blobs: need at least one sample per class");
  const MatrixXd centers = gaussian(n, k, seed, 1.0);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> normal(0.0, 0.5);
  Blobs b;
  b.samples.resize(n, m);
  for (Index s = 0; s < m; ++s) {
    const int c = static_cast<int>(s % k);
    b.labels.push_back(c);
    for (Index i = 0; i < n; ++i) b.samples(i, s) = centers(i, c) + normal(rng);
  }
  return b;
}

}  // namespace philr::synthetic
