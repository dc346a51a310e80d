// Copyright 2026 The pmsr-pir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense exact linear algebra over GF(q).
//
// Matrix is an immutable row-major value. Every operation returns a fresh
// matrix; there is no in-place mutation through the public surface.

#ifndef PMSR_MATRIX_HPP_
#define PMSR_MATRIX_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "pmsr/error.hpp"
#include "pmsr/field.hpp"

namespace pmsr {

class Matrix {
 public:
  // Zero matrix.
  Matrix(const Field& field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), values_(rows * cols, 0) {}

  // Values are reduced mod q.
  Matrix(const Field& field, std::size_t rows, std::size_t cols,
         std::vector<std::uint32_t> values)
      : field_(field), rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "matrix needs " + std::to_string(rows * cols) +
                      " entries, got " + std::to_string(values_.size()));
    }
    for (auto& v : values_) v = field_.reduce(v);
  }

  // Entry (i, j) = gen(i, j), reduced mod q.
  template <typename Gen>
    requires std::is_invocable_v<Gen, std::size_t, std::size_t>
  Matrix(const Field& field, std::size_t rows, std::size_t cols, Gen&& gen)
      : field_(field), rows_(rows), cols_(cols), values_(rows * cols) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        values_[i * cols + j] =
            field_.reduce(static_cast<std::uint64_t>(gen(i, j)));
      }
    }
  }

  static Matrix identity(const Field& field, std::size_t n) {
    return Matrix(field, n, n,
                  [](std::size_t i, std::size_t j) { return i == j ? 1u : 0u; });
  }

  static Matrix from_rows(
      const Field& field,
      std::initializer_list<std::initializer_list<std::uint64_t>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<std::uint32_t> values;
    values.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) {
        throw Error(ErrorCode::kDimensionMismatch, "ragged row list");
      }
      for (auto v : row) values.push_back(field.reduce(v));
    }
    return Matrix(field, r, c, std::move(values));
  }

  static Matrix row_vector(std::span<const FieldElement> elems) {
    if (elems.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot infer the field of an empty vector");
    }
    const Field field = elems.front().field();
    std::vector<std::uint32_t> values;
    values.reserve(elems.size());
    for (const auto& e : elems) {
      if (e.modulus() != field.modulus()) {
        throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
      }
      values.push_back(e.value());
    }
    return Matrix(field, 1, elems.size(), std::move(values));
  }

  static Matrix column_vector(std::span<const FieldElement> elems) {
    return row_vector(elems).transpose();
  }

  const Field& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  std::uint32_t raw(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  FieldElement at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
      throw Error(ErrorCode::kOutOfRange, "matrix index out of range");
    }
    return field_.element(raw(i, j));
  }
  std::span<const std::uint32_t> row_span(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::vector<FieldElement> row(std::size_t i) const {
    if (i >= rows_) throw Error(ErrorCode::kOutOfRange, "row out of range");
    std::vector<FieldElement> out;
    out.reserve(cols_);
    for (auto v : row_span(i)) out.push_back(field_.element(v));
    return out;
  }
  std::vector<FieldElement> col(std::size_t j) const {
    if (j >= cols_) throw Error(ErrorCode::kOutOfRange, "column out of range");
    std::vector<FieldElement> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(at(i, j));
    return out;
  }
  const std::vector<std::uint32_t>& values() const noexcept { return values_; }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](std::uint32_t v) { return v == 0; });
  }

  Matrix transpose() const {
    return Matrix(field_, cols_, rows_,
                  [this](std::size_t i, std::size_t j) { return raw(j, i); });
  }

  Matrix operator+(const Matrix& o) const {
    check_same_shape(o);
    std::vector<std::uint32_t> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = field_.add(values_[i], o.values_[i]);
    }
    return Matrix(field_, rows_, cols_, std::move(v));
  }
  Matrix operator-(const Matrix& o) const {
    check_same_shape(o);
    std::vector<std::uint32_t> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = field_.sub(values_[i], o.values_[i]);
    }
    return Matrix(field_, rows_, cols_, std::move(v));
  }
  Matrix scaled(const FieldElement& s) const {
    check_field(s.field());
    std::vector<std::uint32_t> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = field_.mul(values_[i], s.value());
    }
    return Matrix(field_, rows_, cols_, std::move(v));
  }

  Matrix operator*(const Matrix& o) const;

  // Columns [first, first + count).
  Matrix col_range(std::size_t first, std::size_t count) const {
    if (first + count > cols_) {
      throw Error(ErrorCode::kOutOfRange, "column range out of bounds");
    }
    return Matrix(field_, rows_, count, [&](std::size_t i, std::size_t j) {
      return raw(i, first + j);
    });
  }
  Matrix row_range(std::size_t first, std::size_t count) const {
    if (first + count > rows_) {
      throw Error(ErrorCode::kOutOfRange, "row range out of bounds");
    }
    return Matrix(field_, count, cols_, [&](std::size_t i, std::size_t j) {
      return raw(first + i, j);
    });
  }

  Matrix hconcat(const Matrix& right) const {
    check_field(right.field_);
    if (rows_ != right.rows_) {
      throw Error(ErrorCode::kDimensionMismatch, "hconcat row mismatch");
    }
    return Matrix(field_, rows_, cols_ + right.cols_,
                  [&](std::size_t i, std::size_t j) {
                    return j < cols_ ? raw(i, j) : right.raw(i, j - cols_);
                  });
  }
  Matrix vconcat(const Matrix& below) const {
    check_field(below.field_);
    if (cols_ != below.cols_) {
      throw Error(ErrorCode::kDimensionMismatch, "vconcat column mismatch");
    }
    return Matrix(field_, rows_ + below.rows_, cols_,
                  [&](std::size_t i, std::size_t j) {
                    return i < rows_ ? raw(i, j) : below.raw(i - rows_, j);
                  });
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.values_ == b.values_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (i != 0) os << ',';
      os << '[';
      for (std::size_t j = 0; j < m.cols_; ++j) {
        if (j != 0) os << ',';
        os << m.raw(i, j);
      }
      os << ']';
    }
    return os << ']';
  }

 private:
  void check_field(const Field& f) const {
    if (!(f == field_)) {
      throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
    }
  }
  void check_same_shape(const Matrix& o) const {
    check_field(o.field_);
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw Error(ErrorCode::kDimensionMismatch, "matrix shape mismatch");
    }
  }

  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint32_t> values_;
};

inline Matrix Matrix::operator*(const Matrix& o) const {
  check_field(o.field_);
  if (cols_ != o.rows_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cannot multiply " + std::to_string(rows_) + "x" +
                    std::to_string(cols_) + " by " + std::to_string(o.rows_) +
                    "x" + std::to_string(o.cols_));
  }
  const std::uint64_t q = field_.modulus();
  std::vector<std::uint32_t> out(rows_ * o.cols_, 0);
  std::vector<std::uint64_t> acc(o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t l = 0; l < cols_; ++l) {
      const std::uint64_t a = raw(i, l);
      if (a == 0) continue;
      const std::uint32_t* brow = o.values_.data() + l * o.cols_;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        acc[j] = (acc[j] + a * brow[j]) % q;
      }
    }
    for (std::size_t j = 0; j < o.cols_; ++j) {
      out[i * o.cols_ + j] = static_cast<std::uint32_t>(acc[j]);
    }
  }
  return Matrix(field_, rows_, o.cols_, std::move(out));
}

namespace detail {

// In-place Gauss-Jordan on a rows x cols row-major buffer, eliminating only
// in the first `pivot_cols` columns. The pivot is the first nonzero entry at
// or below the current row. Returns the rank.
inline std::size_t gauss_jordan(const Field& field,
                                std::vector<std::uint32_t>& a,
                                std::size_t rows, std::size_t cols,
                                std::size_t pivot_cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < pivot_cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot * cols + c] == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank) {
      std::swap_ranges(a.begin() + pivot * cols, a.begin() + (pivot + 1) * cols,
                       a.begin() + rank * cols);
    }
    const std::uint32_t scale = field.inv(a[rank * cols + c]);
    for (std::size_t j = 0; j < cols; ++j) {
      a[rank * cols + j] = field.mul(a[rank * cols + j], scale);
    }
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank) continue;
      const std::uint32_t factor = a[i * cols + c];
      if (factor == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        a[i * cols + j] =
            field.sub(a[i * cols + j], field.mul(factor, a[rank * cols + j]));
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

inline Matrix mat_mul(const Matrix& a, const Matrix& b) { return a * b; }

inline std::size_t rank(const Matrix& a) {
  std::vector<std::uint32_t> buf = a.values();
  return detail::gauss_jordan(a.field(), buf, a.rows(), a.cols(), a.cols());
}

// x with a * x = y for square invertible a.
inline Matrix mat_solve(const Matrix& a, const Matrix& y) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "solve needs a square matrix");
  }
  if (!(a.field() == y.field())) {
    throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
  }
  if (y.rows() != a.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "right-hand side has the wrong number of rows");
  }
  const std::size_t n = a.rows();
  const std::size_t width = n + y.cols();
  std::vector<std::uint32_t> aug(n * width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i * width + j] = a.raw(i, j);
    for (std::size_t j = 0; j < y.cols(); ++j) {
      aug[i * width + n + j] = y.raw(i, j);
    }
  }
  const std::size_t r = detail::gauss_jordan(a.field(), aug, n, width, n);
  if (r != n) throw SingularMatrixError(r);
  return Matrix(a.field(), n, y.cols(), [&](std::size_t i, std::size_t j) {
    return aug[i * width + n + j];
  });
}

inline Matrix mat_inverse(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "inverse needs a square matrix");
  }
  return mat_solve(a, Matrix::identity(a.field(), a.rows()));
}

// Row i = (1, x_i, x_i^2, ..., x_i^(cols-1)).
inline Matrix vandermonde(std::span<const FieldElement> points,
                          std::size_t cols) {
  if (points.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "vandermonde needs points");
  }
  if (cols == 0) {
    throw Error(ErrorCode::kInvalidArgument, "vandermonde needs cols >= 1");
  }
  const Field field = points.front().field();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].modulus() != field.modulus()) {
      throw Error(ErrorCode::kIncompatibleFields, "incompatible fields");
    }
    if (points[i].is_zero()) {
      throw Error(ErrorCode::kDegeneratePoints, "degenerate points (zero)");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (points[i] == points[j]) {
        throw Error(ErrorCode::kDegeneratePoints,
                    "degenerate points (duplicate " +
                        std::to_string(points[i].value()) + ")");
      }
    }
  }
  return Matrix(field, points.size(), cols, [&](std::size_t i, std::size_t j) {
    return field.pow(points[i].value(), j);
  });
}

inline Matrix submatrix_rows(const Matrix& a,
                             std::span<const std::size_t> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) {
      throw Error(ErrorCode::kOutOfRange,
                  "row index " + std::to_string(rows[i]) + " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[i] == rows[j]) {
        throw Error(ErrorCode::kRepeatedIndex, "repeated row index");
      }
    }
  }
  return Matrix(a.field(), rows.size(), a.cols(),
                [&](std::size_t i, std::size_t j) { return a.raw(rows[i], j); });
}

inline Matrix submatrix_rows(const Matrix& a,
                             std::initializer_list<std::size_t> rows) {
  return submatrix_rows(a, std::span<const std::size_t>(rows.begin(), rows.size()));
}

}  // namespace pmsr

#endif  // PMSR_MATRIX_HPP_
