#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "philr/dense.hpp"
#include "philr/sparse.hpp"

namespace philr::io {

/// Contents of a Matrix Market file: coordinate files load as sparse,
/// array files as dense.
using MatrixFile = std::variant<SparseMatrix, DenseMatrix>;

/// Reads `matrix coordinate {real|integer|pattern} {general|symmetric}` and
/// `matrix array {real|integer} general`. Throws io_failure on anything else.
MatrixFile read_matrix_market(std::istream& in);
MatrixFile read_matrix_market(const std::filesystem::path& path);

SparseMatrix as_sparse(const MatrixFile& m);
DenseMatrix as_dense(const MatrixFile& m);

/// Coordinate real general, 1-based, 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);
/// Array real general (column-major), 17 significant digits.
void write_matrix_market(std::ostream& out, const DenseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& m);

/// One sample per CSV row. Feature columns become the columns of `samples`
/// (n features x m samples).
struct LabeledCsv {
  Eigen::MatrixXd samples;
  std::vector<long> labels;
  std::vector<std::string> header;  ///< empty when the file has none
};

struct CsvOptions {
  /// Column holding the class label; negative counts from the end (-1 = last).
  int label_column = -1;
  /// Overrides label_column when set; requires a header row.
  std::optional<std::string> label_name;
};

/// A first row that does not parse as numbers is taken as the header.
/// Labels must be integers. Throws io_failure on ragged rows, a missing
/// label column or non-numeric fields.
LabeledCsv read_labeled_csv(std::istream& in, const CsvOptions& options = {});
LabeledCsv read_labeled_csv(const std::filesystem::path& path, const CsvOptions& options = {});

}  // namespace philr::io
