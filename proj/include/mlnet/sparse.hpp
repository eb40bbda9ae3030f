#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mlnet {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Entries within a row are sorted by column,
/// duplicates are summed at construction and exact zeros are not stored, so
/// two matrices with the same mathematical content have identical storage.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols);
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

  static CsrMatrix from_dense(const Eigen::MatrixXd& dense);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t row, std::size_t col) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;

  CsrMatrix transpose() const;
  CsrMatrix scaled(double factor) const;
  CsrMatrix plus(const CsrMatrix& other) const;

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  std::vector<double> row_counts() const;
  std::vector<double> col_counts() const;
  double total() const;
  double max_abs() const;

  std::vector<Triplet> triplets() const;
  Eigen::MatrixXd to_dense() const;

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        f(i, col_idx_[p], values_[p]);
      }
    }
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace mlnet
