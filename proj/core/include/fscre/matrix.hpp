#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fscre {

using Vector = std::vector<double>;
using Index = std::size_t;
using IndexList = std::vector<Index>;

// Dense row-major matrix with explicit dimensions. No broadcasting: every
// operation checks shapes and throws ShapeMismatch on disagreement.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Vector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  Matrix transpose() const;
  Matrix select_columns(std::span<const Index> columns) const;
  Matrix select_rows(std::span<const Index> rows) const;
  Matrix select(std::span<const Index> rows, std::span<const Index> columns) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Vector multiply(const Matrix& a, std::span<const double> x);
Matrix multiply(const Matrix& a, const Matrix& b);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);

}  // namespace fscre
