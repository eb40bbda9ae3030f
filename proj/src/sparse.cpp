#include "mlnet/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlnet/error.hpp"

namespace mlnet {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols,
                     std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw Error(ErrorCode::InvalidArgument,
                  "sparse entry (" + std::to_string(t.row) + "," +
                      std::to_string(t.col) + ") outside " +
                      std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  // Stable sort keeps duplicate summation order equal to input order.
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     return a.row != b.row ? a.row < b.row : a.col < b.col;
                   });
  std::size_t k = 0;
  while (k < triplets.size()) {
    const std::size_t r = triplets[k].row;
    const std::size_t c = triplets[k].col;
    double sum = 0.0;
    while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
      sum += triplets[k].value;
      ++k;
    }
    if (sum != 0.0) {
      col_idx_.push_back(c);
      values_.push_back(sum);
      ++row_ptr_[r + 1];
    }
  }
  for (std::size_t i = 0; i < rows_; ++i) row_ptr_[i + 1] += row_ptr_[i];
}

CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXd& dense) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) {
        t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                     dense(i, j)});
      }
    }
  }
  return CsrMatrix(static_cast<std::size_t>(dense.rows()),
                   static_cast<std::size_t>(dense.cols()), std::move(t));
}

double CsrMatrix::at(std::size_t row, std::size_t col) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      acc += values_[p] * x[col_idx_[p]];
    }
    y[i] = acc;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  multiply(x, y);
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for_each([&](std::size_t i, std::size_t j, double w) { t.push_back({j, i, w}); });
  return CsrMatrix(cols_, rows_, std::move(t));
}

CsrMatrix CsrMatrix::scaled(double factor) const {
  CsrMatrix out = *this;
  if (factor == 0.0) return CsrMatrix(rows_, cols_);
  for (auto& v : out.values_) v *= factor;
  return out;
}

CsrMatrix CsrMatrix::plus(const CsrMatrix& other) const {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimensions differ in sum");
  }
  auto t = triplets();
  auto u = other.triplets();
  t.insert(t.end(), u.begin(), u.end());
  return CsrMatrix(rows_, cols_, std::move(t));
}

std::vector<double> CsrMatrix::row_sums() const {
  std::vector<double> s(rows_, 0.0);
  for_each([&](std::size_t i, std::size_t, double w) { s[i] += w; });
  return s;
}

std::vector<double> CsrMatrix::col_sums() const {
  std::vector<double> s(cols_, 0.0);
  for_each([&](std::size_t, std::size_t j, double w) { s[j] += w; });
  return s;
}

std::vector<double> CsrMatrix::row_counts() const {
  std::vector<double> s(rows_, 0.0);
  for_each([&](std::size_t i, std::size_t, double) { s[i] += 1.0; });
  return s;
}

std::vector<double> CsrMatrix::col_counts() const {
  std::vector<double> s(cols_, 0.0);
  for_each([&](std::size_t, std::size_t j, double) { s[j] += 1.0; });
  return s;
}

double CsrMatrix::total() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Triplet> CsrMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for_each([&](std::size_t i, std::size_t j, double w) { t.push_back({i, j, w}); });
  return t;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for_each([&](std::size_t i, std::size_t j, double w) {
    d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w;
  });
  return d;
}

}  // namespace mlnet
