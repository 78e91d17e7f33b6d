#include "lscd/vector_space.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "lscd/error.h"

namespace lscd {
namespace {

std::string format_value(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

double parse_value(std::string_view text, const std::string &where) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(where + ": invalid number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (start < line.size()) {
    size_t end = line.find(' ', start);
    if (end == std::string_view::npos) end = line.size();
    if (end > start) fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return fields;
}

void check_unique(const std::vector<std::string> &words, const char *what) {
  std::unordered_set<std::string_view> seen;
  for (const std::string &word : words) {
    if (!seen.insert(word).second) {
      throw ParameterError(std::string("duplicate ") + what + " '" + word +
                           "'");
    }
  }
}

void write_rows(std::ostream &out, const std::vector<std::string> &words,
                const DenseMatrix &matrix) {
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out << words[i];
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      out << ' ' << format_value(matrix(i, j));
    }
    out << '\n';
  }
}

struct ParsedFile {
  SpaceKind kind;
  int dims = 0;
  std::optional<std::vector<std::string>> columns;
  std::vector<std::string> words;
  std::vector<std::vector<double>> values;
};

ParsedFile parse_space_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  ParsedFile parsed;
  std::string line;
  size_t line_number = 0;
  auto where = [&] { return path + ":" + std::to_string(line_number); };

  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  ++line_number;
  auto header = split_spaces(line);
  if (header.size() != 2) throw FormatError(where() + ": expected 'kind dims'");
  try {
    parsed.kind = parse_space_kind(header[0]);
  } catch (const ParameterError &e) {
    throw FormatError(where() + ": " + e.what());
  }
  double dims = parse_value(header[1], where());
  if (dims < 0 || dims != std::floor(dims)) {
    throw FormatError(where() + ": invalid dimension");
  }
  parsed.dims = static_cast<int>(dims);

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_spaces(line);
    if (fields[0] == "#columns") {
      if (parsed.columns || !parsed.words.empty()) {
        throw FormatError(where() + ": misplaced #columns line");
      }
      parsed.columns.emplace(fields.begin() + 1, fields.end());
      continue;
    }
    if (static_cast<int>(fields.size()) != parsed.dims + 1) {
      throw FormatError(where() + ": expected " +
                        std::to_string(parsed.dims) + " values");
    }
    parsed.words.emplace_back(fields[0]);
    std::vector<double> row(parsed.dims);
    for (int j = 0; j < parsed.dims; ++j) {
      row[j] = parse_value(fields[j + 1], where());
    }
    parsed.values.push_back(std::move(row));
  }
  return parsed;
}

DenseMatrix to_dense(const ParsedFile &parsed) {
  DenseMatrix m(parsed.values.size(), parsed.dims);
  for (size_t i = 0; i < parsed.values.size(); ++i) {
    for (int j = 0; j < parsed.dims; ++j) m(i, j) = parsed.values[i][j];
  }
  return m;
}

}  // namespace

const char *space_kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kCount: return "count";
    case SpaceKind::kPpmi: return "ppmi";
    case SpaceKind::kSgns: return "sgns";
  }
  return "?";
}

SpaceKind parse_space_kind(std::string_view name) {
  if (name == "count") return SpaceKind::kCount;
  if (name == "ppmi") return SpaceKind::kPpmi;
  if (name == "sgns") return SpaceKind::kSgns;
  throw ParameterError("unknown space kind '" + std::string(name) + "'");
}

VectorSpace VectorSpace::make_dense(SpaceKind kind,
                                    std::vector<std::string> rows,
                                    DenseMatrix matrix,
                                    std::optional<DenseMatrix> context) {
  VectorSpace space;
  space.kind_ = kind;
  space.row_words_ = std::move(rows);
  space.matrix_ = std::move(matrix);
  space.context_ = std::move(context);
  space.validate();
  space.index_rows();
  return space;
}

VectorSpace VectorSpace::make_sparse(SpaceKind kind,
                                     std::vector<std::string> rows,
                                     SparseMatrix matrix,
                                     std::vector<std::string> column_labels) {
  VectorSpace space;
  space.kind_ = kind;
  space.row_words_ = std::move(rows);
  matrix.makeCompressed();
  space.matrix_ = std::move(matrix);
  space.column_labels_ = std::move(column_labels);
  space.validate();
  space.index_rows();
  return space;
}

int VectorSpace::dims() const {
  return std::visit([](const auto &m) { return static_cast<int>(m.cols()); },
                    matrix_);
}

void VectorSpace::validate() const {
  const Eigen::Index matrix_rows =
      std::visit([](const auto &m) { return m.rows(); }, matrix_);
  if (matrix_rows != static_cast<Eigen::Index>(row_words_.size())) {
    throw ParameterError("row count does not match the number of row words");
  }
  check_unique(row_words_, "row word");
  if (is_sparse()) {
    const SparseMatrix &m = sparse();
    for (Eigen::Index k = 0; k < m.nonZeros(); ++k) {
      const double v = m.valuePtr()[k];
      if (!std::isfinite(v)) throw ParameterError("non-finite matrix entry");
      if (kind_ == SpaceKind::kPpmi && v < 0.0) {
        throw ParameterError("negative entry in PPMI space");
      }
    }
  } else {
    if (!dense().allFinite()) throw ParameterError("non-finite matrix entry");
    if (kind_ == SpaceKind::kPpmi && (dense().array() < 0.0).any()) {
      throw ParameterError("negative entry in PPMI space");
    }
  }
  if (column_labels_) {
    if (static_cast<int>(column_labels_->size()) != dims()) {
      throw ParameterError("column label count does not match dimensions");
    }
    check_unique(*column_labels_, "column label");
  }
  if (context_) {
    if (context_->rows() != matrix_rows || context_->cols() != dims()) {
      throw ParameterError("context matrix shape differs from word matrix");
    }
    if (!context_->allFinite()) {
      throw ParameterError("non-finite context matrix entry");
    }
  }
}

void VectorSpace::index_rows() {
  row_index_.clear();
  row_index_.reserve(row_words_.size());
  for (size_t i = 0; i < row_words_.size(); ++i) {
    row_index_.emplace(row_words_[i], static_cast<int>(i));
  }
}

std::optional<int> VectorSpace::row_of(std::string_view word) const {
  auto it = row_index_.find(std::string(word));
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd VectorSpace::row(int index) const {
  if (is_sparse()) return Eigen::VectorXd(sparse().row(index).transpose());
  return dense().row(index).transpose();
}

Eigen::VectorXd VectorSpace::row(std::string_view word) const {
  auto index = row_of(word);
  if (!index) throw MissingWordError("word '" + std::string(word) +
                                     "' not in space");
  return row(*index);
}

Eigen::VectorXd VectorSpace::multiply(const Eigen::VectorXd &v) const {
  if (is_sparse()) return sparse() * v;
  return dense() * v;
}

Eigen::VectorXd VectorSpace::row_norms() const {
  Eigen::VectorXd norms(rows());
  if (is_sparse()) {
    const SparseMatrix &m = sparse();
    for (int i = 0; i < rows(); ++i) {
      double sum = 0.0;
      for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
        sum += it.value() * it.value();
      }
      norms[i] = std::sqrt(sum);
    }
  } else {
    norms = dense().rowwise().norm();
  }
  return norms;
}

VectorSpace VectorSpace::select_rows(
    const std::vector<std::string> &words) const {
  std::vector<int> indices;
  indices.reserve(words.size());
  for (const std::string &word : words) {
    auto index = row_of(word);
    if (!index) {
      throw MissingWordError("word '" + word + "' not in space");
    }
    indices.push_back(*index);
  }
  if (is_sparse()) {
    const SparseMatrix &m = sparse();
    std::vector<Eigen::Triplet<double>> triplets;
    for (size_t r = 0; r < indices.size(); ++r) {
      for (SparseMatrix::InnerIterator it(m, indices[r]); it; ++it) {
        triplets.emplace_back(static_cast<int>(r), it.col(), it.value());
      }
    }
    SparseMatrix selected(static_cast<Eigen::Index>(indices.size()), m.cols());
    selected.setFromTriplets(triplets.begin(), triplets.end());
    return make_sparse(kind_, words, std::move(selected), *column_labels_);
  }
  DenseMatrix selected(indices.size(), dims());
  std::optional<DenseMatrix> context;
  if (context_) context.emplace(indices.size(), dims());
  for (size_t r = 0; r < indices.size(); ++r) {
    selected.row(r) = dense().row(indices[r]);
    if (context) context->row(r) = context_->row(indices[r]);
  }
  return make_dense(kind_, words, std::move(selected), std::move(context));
}

VectorSpace VectorSpace::rename_rows(std::vector<std::string> words) const {
  if (words.size() != row_words_.size()) {
    throw ParameterError("rename_rows: size mismatch");
  }
  VectorSpace renamed = *this;
  renamed.row_words_ = std::move(words);
  check_unique(renamed.row_words_, "row word");
  renamed.index_rows();
  return renamed;
}

VectorSpace VectorSpace::without_context() const {
  VectorSpace copy = *this;
  copy.context_.reset();
  return copy;
}

void save_space(const VectorSpace &space, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << space_kind_name(space.kind()) << ' ' << space.dims() << '\n';
  if (space.column_labels()) {
    out << "#columns";
    for (const std::string &label : *space.column_labels()) out << ' ' << label;
    out << '\n';
  }
  if (space.is_sparse()) {
    write_rows(out, space.row_words(), DenseMatrix(space.sparse()));
  } else {
    write_rows(out, space.row_words(), space.dense());
  }
  if (!out) throw IoError("error writing " + path);

  const std::string context_path = path + ".context";
  if (space.context_matrix()) {
    std::ofstream ctx(context_path, std::ios::binary);
    if (!ctx) throw IoError("cannot write " + context_path);
    ctx << space_kind_name(space.kind()) << ' ' << space.dims() << '\n';
    write_rows(ctx, space.row_words(), *space.context_matrix());
    if (!ctx) throw IoError("error writing " + context_path);
  } else {
    std::error_code ignored;
    std::filesystem::remove(context_path, ignored);
  }
}

VectorSpace load_space(const std::string &path) {
  ParsedFile parsed = parse_space_file(path);
  const bool sparse_kind = parsed.kind != SpaceKind::kSgns;
  try {
    if (sparse_kind) {
      if (!parsed.columns) {
        throw FormatError(path + ": count/ppmi space without #columns line");
      }
      SparseMatrix m = to_dense(parsed).sparseView();
      return VectorSpace::make_sparse(parsed.kind, std::move(parsed.words),
                                      std::move(m), std::move(*parsed.columns));
    }
    std::optional<DenseMatrix> context;
    const std::string context_path = path + ".context";
    if (std::filesystem::exists(context_path)) {
      ParsedFile ctx = parse_space_file(context_path);
      if (ctx.words != parsed.words || ctx.dims != parsed.dims) {
        throw FormatError(context_path + ": rows do not match " + path);
      }
      context = to_dense(ctx);
    }
    return VectorSpace::make_dense(parsed.kind, std::move(parsed.words),
                                   to_dense(parsed), std::move(context));
  } catch (const ParameterError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace lscd
