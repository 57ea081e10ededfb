// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace seass {

#ifdef SEASS_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

// Dense row-major matrix. Column vectors are Matrix with cols() == 1.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, real(0)) {}
  Matrix(size_t rows, size_t cols, std::vector<real> data);

  static Matrix constant(size_t rows, size_t cols, real v);
  static Matrix ones(size_t rows, size_t cols) { return constant(rows, cols, real(1)); }
  // row-major literal, e.g. Matrix::of({{1, 2}, {3, 4}})
  static Matrix of(std::initializer_list<std::initializer_list<real>> rows);
  static Matrix col(std::initializer_list<real> values);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_vector() const { return cols_ == 1; }

  real& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  real operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  real& operator[](size_t i) { return data_[i]; }
  real operator[](size_t i) const { return data_[i]; }

  real* data() { return data_.data(); }
  const real* data() const { return data_.data(); }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const;
  void fill(real v);
  void set_zero() { fill(real(0)); }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<real> data_;
};

// ---- forward ops ------------------------------------------------------

Matrix matmul(const Matrix& a, const Matrix& b);     // A * B
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // A * B^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // A^T * B

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, real s);

void add_in_place(Matrix& a, const Matrix& b);
void add_scaled_in_place(Matrix& a, const Matrix& b, real s);

Matrix sigmoid(const Matrix& a);
Matrix tanh_elem(const Matrix& a);

// Numerically stable softmax over a nonempty vector (any shape is treated
// as flat). Output is positive and sums to 1.
Matrix softmax(const Matrix& v);
Matrix log_softmax(const Matrix& v);

// Pairwise max over a vector of even length 2d; output element j is
// max(v[2j], v[2j+1]) (element pair (2j-1, 2j) under 1-based indexing).
Matrix maxout_pairs(const Matrix& v);

// Stack two column vectors: [a; b].
Matrix concat_cols(const Matrix& a, const Matrix& b);

real dot(const Matrix& a, const Matrix& b);
real sum(const Matrix& a);
real max_abs(const Matrix& a);

}  // namespace seass
