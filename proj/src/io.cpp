#include "philr/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "philr/error.hpp"

namespace philr::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::io_failure, what); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path.string());
  return out;
}

}  // namespace

MatrixFile read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("Matrix Market: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix") {
    bad("Matrix Market: missing '%%MatrixMarket matrix' banner");
  }
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  const bool coordinate = format == "coordinate";
  if (!coordinate && format != "array") bad("Matrix Market: unknown format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double" &&
      !(coordinate && field == "pattern")) {
    bad("Matrix Market: unsupported field '" + field + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") bad("Matrix Market: unsupported symmetry '" + symmetry + "'");
  if (symmetric && !coordinate) bad("Matrix Market: symmetric array files are not supported");

  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (!t.empty() && t[0] != '%') break;
  }
  std::istringstream size_line(line);
  long long rows = -1, cols = -1, entries = -1;
  size_line >> rows >> cols;
  if (coordinate) size_line >> entries;
  if (!size_line || rows < 0 || cols < 0 || (coordinate && entries < 0)) {
    bad("Matrix Market: malformed size line '" + trim(line) + "'");
  }

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      const std::string t = trim(out);
      if (!t.empty() && t[0] != '%') return true;
    }
    return false;
  };

  if (!coordinate) {
    Eigen::MatrixXd m(rows, cols);
    for (long long k = 0; k < rows * cols; ++k) {
      if (!next_data_line(line)) bad("Matrix Market: array data ends early");
      double v = 0.0;
      if (!parse_double(line, v)) bad("Matrix Market: bad array value '" + trim(line) + "'");
      m(k % rows, k / rows) = v;
    }
    if (!m.allFinite()) bad("Matrix Market: non-finite value");
    return DenseMatrix(std::move(m));
  }

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
  for (long long k = 0; k < entries; ++k) {
    if (!next_data_line(line)) bad("Matrix Market: coordinate data ends early");
    std::istringstream es(line);
    long long i = 0, j = 0;
    double v = 1.0;
    es >> i >> j;
    if (field != "pattern") {
      std::string tok;
      es >> tok;
      if (!parse_double(tok, v)) bad("Matrix Market: bad value in '" + trim(line) + "'");
    }
    if (!es && !es.eof()) bad("Matrix Market: malformed entry '" + trim(line) + "'");
    if (i < 1 || i > rows || j < 1 || j > cols) {
      bad("Matrix Market: index out of range in '" + trim(line) + "'");
    }
    if (!std::isfinite(v)) bad("Matrix Market: non-finite value");
    triplets.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
    if (symmetric && i != j) triplets.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

MatrixFile read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

SparseMatrix as_sparse(const MatrixFile& m) {
  if (const auto* s = std::get_if<SparseMatrix>(&m)) return *s;
  return SparseMatrix::from_dense(std::get<DenseMatrix>(m).eigen());
}

DenseMatrix as_dense(const MatrixFile& m) {
  if (const auto* d = std::get_if<DenseMatrix>(&m)) return *d;
  return DenseMatrix(std::get<SparseMatrix>(m).to_dense());
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (Index j = 0; j < m.cols(); ++j) {
    const auto col = m.column(j);
    for (std::size_t p = 0; p < col.rows.size(); ++p) {
      out << col.rows[p] + 1 << ' ' << j + 1 << ' ' << fmt17(col.values[p]) << '\n';
    }
  }
  if (!out) bad("Matrix Market: write failed");
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  auto out = open_out(path);
  write_matrix_market(out, m);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (double v : m.column_major()) out << fmt17(v) << '\n';
  if (!out) bad("Matrix Market: write failed");
}

void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_matrix_market(out, m);
}

LabeledCsv read_labeled_csv(std::istream& in, const CsvOptions& options) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };

  LabeledCsv out;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split(line));
  }
  if (rows.empty()) bad("CSV: no rows");

  const auto& first = rows.front();
  double probe = 0.0;
  const bool has_header = std::any_of(first.begin(), first.end(),
                                      [&](const std::string& f) { return !parse_double(f, probe); });
  if (has_header) {
    out.header = first;
    rows.erase(rows.begin());
  }
  if (rows.empty()) bad("CSV: header only, no samples");

  const auto width = static_cast<long>(rows.front().size());
  long label = options.label_column < 0 ? width + options.label_column : options.label_column;
  if (options.label_name) {
    if (!has_header) bad("CSV: label column '" + *options.label_name + "' requested but no header");
    const auto it = std::find(out.header.begin(), out.header.end(), *options.label_name);
    if (it == out.header.end()) bad("CSV: label column '" + *options.label_name + "' missing");
    label = static_cast<long>(it - out.header.begin());
  }
  if (width < 2 || label < 0 || label >= width) bad("CSV: label column missing");

  const Index n = width - 1;
  const auto m = static_cast<Index>(rows.size());
  out.samples.resize(n, m);
  out.labels.reserve(rows.size());
  for (Index s = 0; s < m; ++s) {
    const auto& row = rows[static_cast<std::size_t>(s)];
    if (static_cast<long>(row.size()) != width) {
      bad("CSV: row " + std::to_string(s + 1) + " has " + std::to_string(row.size()) +
          " fields, expected " + std::to_string(width));
    }
    Index f = 0;
    for (long c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_double(row[static_cast<std::size_t>(c)], v) || !std::isfinite(v)) {
        bad("CSV: non-numeric field '" + row[static_cast<std::size_t>(c)] + "' in row " +
            std::to_string(s + 1));
      }
      if (c == label) {
        if (v != std::floor(v) || std::abs(v) > 1e15) {
          bad("CSV: label '" + row[static_cast<std::size_t>(c)] + "' is not an integer");
        }
        out.labels.push_back(static_cast<long>(v));
      } else {
        out.samples(f++, s) = v;
      }
    }
  }
  if (has_header) out.header.erase(out.header.begin() + label);
  return out;
}

LabeledCsv read_labeled_csv(const std::filesystem::path& path, const CsvOptions& options) {
  auto in = open_in(path);
  return read_labeled_csv(in, options);
}

}  // namespace philr::io
