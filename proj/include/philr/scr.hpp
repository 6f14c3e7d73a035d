#pragma once

#include <vector>

#include "philr/dense.hpp"
#include "philr/exec.hpp"
#include "philr/sparse.hpp"

namespace philr {

/// How a residual tolerance is turned into a Frobenius target.
enum class ToleranceMode {
  automatic,  ///< absolute when ||A||_F <= 1, relative otherwise
  absolute,
  relative,
};

struct QgsOptions {
  double tol = 1e-5;
  Index max_rank = 0;  ///< 0 means min(rows, cols)
  ToleranceMode mode = ToleranceMode::automatic;
  bool strict = false;  ///< throw rank_exceeded instead of returning a flagged result
  double reorth_threshold = 0.1;
  Exec exec = Exec::parallel;
};

struct QgsResult {
  std::vector<Index> selected;  ///< pivot order
  DenseMatrix r;                ///< X = Q R, upper triangular with positive diagonal
  double residual = 0.0;        ///< ||A - Q Q^T A||_F after all selections
  std::vector<double> residual_history;  ///< residual_history[k] after k selections
  double target = 0.0;          ///< Frobenius residual the run aimed for
  bool converged = false;
  bool exhausted = false;       ///< stopped because every remaining column was dependent

  Index rank() const noexcept { return static_cast<Index>(selected.size()); }
};

/// Pivoted Gram-Schmidt on the columns of a sparse matrix that keeps only R and
/// the selected index set; Q = X R^{-1} is never formed.
QgsResult quasi_gram_schmidt(const SparseMatrix& a, const QgsOptions& options = {});

/// A ~ X T Y^T with X = selected columns of A and Y = selected rows of A (transposed).
struct ScrFactors {
  SparseMatrix x;
  SparseMatrix y;
  DenseMatrix t;
  double eps_col = 0.0;
  double eps_row = 0.0;
  Index rank = 0;
  std::vector<Index> column_indices;
  std::vector<Index> row_indices;
  bool converged = false;
};

struct ScrOptions {
  double tol_col = 1e-5;
  double tol_row = 1e-5;
  Index max_rank = 0;
  ToleranceMode mode = ToleranceMode::automatic;
  bool strict = false;
  Exec exec = Exec::parallel;
};

ScrFactors scr_approximate(const SparseMatrix& a, const ScrOptions& options = {});

/// ||A - X T Y^T||_F, streamed column by column.
double scr_residual(const SparseMatrix& a, const ScrFactors& f, Exec exec = Exec::parallel);

/// Same quantity from Gram bookkeeping:
///   ||A||_F^2 - 2 <T, X^T A Y> + <(X^T X) T (Y^T Y), T>,
/// clamped at zero. Cheap, but loses about half the digits once the residual
/// drops towards sqrt(eps) * ||A||_F.
double scr_residual_gram(const SparseMatrix& a, const ScrFactors& f);

}  // namespace philr
