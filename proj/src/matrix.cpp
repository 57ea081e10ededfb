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

#include "seass/matrix.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "seass/errors.hpp"

namespace seass {

namespace {

using EMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

ECMap emap(const Matrix& m) { return ECMap(m.data(), (Eigen::Index)m.rows(), (Eigen::Index)m.cols()); }
EMap emap(Matrix& m) { return EMap(m.data(), (Eigen::Index)m.rows(), (Eigen::Index)m.cols()); }

[[noreturn]] void shape_fail(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + std::to_string(a.rows()) + "x" +
                   std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                   std::to_string(b.cols()));
}

}  // namespace

Matrix::Matrix(size_t rows, size_t cols, std::vector<real> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw ShapeError("Matrix: data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix Matrix::constant(size_t rows, size_t cols, real v) {
  Matrix m(rows, cols);
  m.fill(v);
  return m;
}

Matrix Matrix::of(std::initializer_list<std::initializer_list<real>> rows) {
  const size_t r = rows.size();
  const size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("Matrix::of: ragged rows");
    size_t j = 0;
    for (real v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::col(std::initializer_list<real> values) {
  Matrix m(values.size(), 1);
  size_t i = 0;
  for (real v : values) m[i++] = v;
  return m;
}

bool Matrix::all_finite() const {
  for (real v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Matrix::fill(real v) { std::fill(data_.begin(), data_.end(), v); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_fail("matmul", a, b);
  Matrix out(a.rows(), b.cols());
  emap(out).noalias() = emap(a) * emap(b);
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) shape_fail("matmul_nt", a, b);
  Matrix out(a.rows(), b.rows());
  emap(out).noalias() = emap(a) * emap(b).transpose();
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) shape_fail("matmul_tn", a, b);
  Matrix out(a.cols(), b.cols());
  emap(out).noalias() = emap(a).transpose() * emap(b);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) shape_fail("add", a, b);
  Matrix out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) shape_fail("sub", a, b);
  Matrix out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) shape_fail("hadamard", a, b);
  Matrix out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Matrix scaled(const Matrix& a, real s) {
  Matrix out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

void add_in_place(Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) shape_fail("add_in_place", a, b);
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void add_scaled_in_place(Matrix& a, const Matrix& b, real s) {
  if (!a.same_shape(b)) shape_fail("add_scaled_in_place", a, b);
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i] * s;
}

Matrix sigmoid(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = real(1) / (real(1) + std::exp(-a[i]));
  return out;
}

Matrix tanh_elem(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = std::tanh(a[i]);
  return out;
}

Matrix softmax(const Matrix& v) {
  if (v.empty()) throw DomainError("softmax: empty input");
  Matrix out(v.rows(), v.cols());
  real m = v[0];
  for (size_t i = 1; i < v.size(); ++i) m = std::max(m, v[i]);
  real z = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    z += out[i];
  }
  for (size_t i = 0; i < v.size(); ++i) out[i] /= z;
  return out;
}

Matrix log_softmax(const Matrix& v) {
  if (v.empty()) throw DomainError("log_softmax: empty input");
  Matrix out(v.rows(), v.cols());
  real m = v[0];
  for (size_t i = 1; i < v.size(); ++i) m = std::max(m, v[i]);
  real z = 0;
  for (size_t i = 0; i < v.size(); ++i) z += std::exp(v[i] - m);
  const real lse = m + std::log(z);
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
  return out;
}

Matrix maxout_pairs(const Matrix& v) {
  if (v.size() % 2 != 0)
    throw ShapeError("maxout_pairs: length " + std::to_string(v.size()) + " is odd");
  Matrix out(v.size() / 2, 1);
  for (size_t j = 0; j < out.size(); ++j) out[j] = std::max(v[2 * j], v[2 * j + 1]);
  return out;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
  if (!a.is_vector() || !b.is_vector()) throw ShapeError("concat_cols: inputs must be column vectors");
  Matrix out(a.rows() + b.rows(), 1);
  for (size_t i = 0; i < a.rows(); ++i) out[i] = a[i];
  for (size_t i = 0; i < b.rows(); ++i) out[a.rows() + i] = b[i];
  return out;
}

real dot(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) shape_fail("dot", a, b);
  real s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

real sum(const Matrix& a) {
  real s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i];
  return s;
}

real max_abs(const Matrix& a) {
  real m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace seass
