#ifndef LSCD_VECTOR_SPACE_H_
#define LSCD_VECTOR_SPACE_H_

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace lscd {

using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class SpaceKind { kCount, kPpmi, kSgns };

const char *space_kind_name(SpaceKind kind);
SpaceKind parse_space_kind(std::string_view name);

inline std::span<const double> as_span(const Eigen::VectorXd &v) {
  return {v.data(), static_cast<size_t>(v.size())};
}

// Row-indexed word matrix. Count and PPMI spaces are sparse and carry one
// label per column; SGNS spaces are dense and may carry the context matrix
// learned alongside the word matrix.
class VectorSpace {
 public:
  VectorSpace() = default;

  // Both factories validate shape, finiteness, unique row words and unique
  // column labels, and throw ParameterError on violation.
  static VectorSpace make_dense(SpaceKind kind, std::vector<std::string> rows,
                                DenseMatrix matrix,
                                std::optional<DenseMatrix> context = {});
  static VectorSpace make_sparse(SpaceKind kind, std::vector<std::string> rows,
                                 SparseMatrix matrix,
                                 std::vector<std::string> column_labels);

  SpaceKind kind() const { return kind_; }
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(matrix_); }
  int rows() const { return static_cast<int>(row_words_.size()); }
  int dims() const;

  const std::vector<std::string> &row_words() const { return row_words_; }
  std::optional<int> row_of(std::string_view word) const;
  bool contains(std::string_view word) const { return row_of(word).has_value(); }

  const DenseMatrix &dense() const { return std::get<DenseMatrix>(matrix_); }
  const SparseMatrix &sparse() const {
    return std::get<SparseMatrix>(matrix_);
  }
  const std::optional<std::vector<std::string>> &column_labels() const {
    return column_labels_;
  }
  const std::optional<DenseMatrix> &context_matrix() const {
    return context_;
  }

  // Dense copy of one row.
  Eigen::VectorXd row(int index) const;
  Eigen::VectorXd row(std::string_view word) const;

  // Dot products of every row with `v` (length dims()).
  Eigen::VectorXd multiply(const Eigen::VectorXd &v) const;

  // Euclidean norm of every row.
  Eigen::VectorXd row_norms() const;

  // Sub-space with the given rows, in the given order. Every word must exist.
  VectorSpace select_rows(const std::vector<std::string> &words) const;

  // Copy with row words replaced; sizes must match.
  VectorSpace rename_rows(std::vector<std::string> words) const;

  VectorSpace without_context() const;

 private:
  void index_rows();
  void validate() const;

  SpaceKind kind_ = SpaceKind::kSgns;
  std::vector<std::string> row_words_;
  std::unordered_map<std::string, int> row_index_;
  std::variant<DenseMatrix, SparseMatrix> matrix_;
  std::optional<std::vector<std::string>> column_labels_;
  std::optional<DenseMatrix> context_;
};

// Text persistence. Line 1 is "<kind> <dims>"; sparse spaces add
// "#columns c1 c2 ..." as line 2; each following line is
// "<word> v1 ... vd" with 17 significant digits. When a context matrix is
// present it is written to "<path>.context" in the same layout.
void save_space(const VectorSpace &space, const std::string &path);
VectorSpace load_space(const std::string &path);

}  // namespace lscd

#endif  // LSCD_VECTOR_SPACE_H_
