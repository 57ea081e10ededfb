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

#include "seass/tape.hpp"

#include <cmath>
#include <string>

#include "seass/errors.hpp"

namespace seass {

void Tape::clear() {
  nodes_.clear();
  args_.clear();
}

VarId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return (VarId)(nodes_.size() - 1);
}

VarId Tape::leaf(const Matrix* m) {
  Node n;
  n.op = Op::kLeaf;
  n.ext = m;
  return push(std::move(n));
}

VarId Tape::constant(Matrix m) {
  Node n;
  n.op = Op::kConstant;
  n.val = std::move(m);
  return push(std::move(n));
}

VarId Tape::add(VarId a, VarId b) {
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.val = seass::add(value(a), value(b));
  return push(std::move(n));
}

VarId Tape::sub(VarId a, VarId b) {
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.val = seass::sub(value(a), value(b));
  return push(std::move(n));
}

VarId Tape::mul(VarId a, VarId b) {
  Node n;
  n.op = Op::kMul;
  n.a = a;
  n.b = b;
  n.val = hadamard(value(a), value(b));
  return push(std::move(n));
}

VarId Tape::scale(VarId a, real s) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.raux = s;
  n.val = scaled(value(a), s);
  return push(std::move(n));
}

VarId Tape::one_minus(VarId a) {
  Node n;
  n.op = Op::kOneMinus;
  n.a = a;
  const Matrix& x = value(a);
  n.val = Matrix(x.rows(), x.cols());
  for (size_t i = 0; i < x.size(); ++i) n.val[i] = real(1) - x[i];
  return push(std::move(n));
}

VarId Tape::matmul(VarId a, VarId b) {
  Node n;
  n.op = Op::kMatMulNN;
  n.a = a;
  n.b = b;
  n.val = seass::matmul(value(a), value(b));
  return push(std::move(n));
}

VarId Tape::matmul_nt(VarId a, VarId b) {
  Node n;
  n.op = Op::kMatMulNT;
  n.a = a;
  n.b = b;
  n.val = seass::matmul_nt(value(a), value(b));
  return push(std::move(n));
}

VarId Tape::matmul_tn(VarId a, VarId b) {
  Node n;
  n.op = Op::kMatMulTN;
  n.a = a;
  n.b = b;
  n.val = seass::matmul_tn(value(a), value(b));
  return push(std::move(n));
}

VarId Tape::add_row_broadcast(VarId m, VarId v) {
  const Matrix& a = value(m);
  const Matrix& x = value(v);
  if (!x.is_vector() || x.rows() != a.cols())
    throw ShapeError("add_row_broadcast: vector length " + std::to_string(x.size()) +
                     " does not match " + std::to_string(a.cols()) + " columns");
  Node n;
  n.op = Op::kAddRowBroadcast;
  n.a = m;
  n.b = v;
  n.val = a;
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) n.val(i, j) += x[j];
  return push(std::move(n));
}

VarId Tape::sigmoid(VarId a) {
  Node n;
  n.op = Op::kSigmoid;
  n.a = a;
  n.val = seass::sigmoid(value(a));
  return push(std::move(n));
}

VarId Tape::tanh(VarId a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.val = tanh_elem(value(a));
  return push(std::move(n));
}

VarId Tape::softmax(VarId a) {
  Node n;
  n.op = Op::kSoftmax;
  n.a = a;
  n.val = seass::softmax(value(a));
  return push(std::move(n));
}

VarId Tape::log_softmax(VarId a) {
  const Matrix& x = value(a);
  if (x.empty()) throw DomainError("log_softmax: empty input");
  Node n;
  n.op = Op::kLogSoftmax;
  n.a = a;
  n.val = Matrix(x.rows(), x.cols());
  real m = x[0];
  for (size_t i = 1; i < x.size(); ++i) m = std::max(m, x[i]);
  real z = 0;
  for (size_t i = 0; i < x.size(); ++i) z += std::exp(x[i] - m);
  const real lse = m + std::log(z);
  for (size_t i = 0; i < x.size(); ++i) n.val[i] = x[i] - lse;
  return push(std::move(n));
}

VarId Tape::maxout_pairs(VarId a) {
  Node n;
  n.op = Op::kMaxoutPairs;
  n.a = a;
  n.val = seass::maxout_pairs(value(a));
  return push(std::move(n));
}

VarId Tape::concat(VarId a, VarId b) {
  Node n;
  n.op = Op::kConcat;
  n.a = a;
  n.b = b;
  n.val = concat_cols(value(a), value(b));
  return push(std::move(n));
}

VarId Tape::stack_rows(const std::vector<VarId>& rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no rows");
  const size_t c = value(rows[0]).rows();
  Node n;
  n.op = Op::kStackRows;
  n.iaux = (int32_t)args_.size();
  n.iaux2 = (int32_t)rows.size();
  n.val = Matrix(rows.size(), c);
  for (size_t i = 0; i < rows.size(); ++i) {
    const Matrix& v = value(rows[i]);
    if (!v.is_vector() || v.rows() != c) throw ShapeError("stack_rows: mismatched row lengths");
    for (size_t j = 0; j < c; ++j) n.val(i, j) = v[j];
    args_.push_back(rows[i]);
  }
  return push(std::move(n));
}

VarId Tape::row(VarId m, int32_t r) {
  const Matrix& x = value(m);
  if (r < 0 || (size_t)r >= x.rows())
    throw ShapeError("row: index " + std::to_string(r) + " out of " + std::to_string(x.rows()));
  Node n;
  n.op = Op::kRow;
  n.a = m;
  n.iaux = r;
  n.val = Matrix(x.cols(), 1);
  for (size_t j = 0; j < x.cols(); ++j) n.val[j] = x((size_t)r, j);
  return push(std::move(n));
}

VarId Tape::pick(VarId v, int32_t i) {
  const Matrix& x = value(v);
  if (i < 0 || (size_t)i >= x.size())
    throw ShapeError("pick: index " + std::to_string(i) + " out of " + std::to_string(x.size()));
  Node n;
  n.op = Op::kPick;
  n.a = v;
  n.iaux = i;
  n.val = Matrix(1, 1);
  n.val[0] = x[(size_t)i];
  return push(std::move(n));
}

VarId Tape::dropout(VarId a, Matrix mask) {
  const Matrix& x = value(a);
  if (!x.same_shape(mask)) throw ShapeError("dropout: mask shape mismatch");
  Node n;
  n.op = Op::kDropout;
  n.a = a;
  n.val = hadamard(x, mask);
  n.aux = std::move(mask);
  return push(std::move(n));
}

VarId Tape::sum_n(const std::vector<VarId>& xs) {
  if (xs.empty()) throw ShapeError("sum_n: no terms");
  const Matrix& first = value(xs[0]);
  Node n;
  n.op = Op::kSumN;
  n.iaux = (int32_t)args_.size();
  n.iaux2 = (int32_t)xs.size();
  n.val = first;
  for (size_t k = 1; k < xs.size(); ++k) {
    add_in_place(n.val, value(xs[k]));
    }
  for (VarId id : xs) args_.push_back(id);
  return push(std::move(n));
}

Matrix Tape::grad(VarId id) const {
  const Node& n = nodes_[id];
  if (!n.grad.empty()) return n.grad;
  const Matrix& v = n.ext ? *n.ext : n.val;
  return Matrix(v.rows(), v.cols());
}

Matrix& Tape::grad_buf(VarId id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    const Matrix& v = n.ext ? *n.ext : n.val;
    n.grad = Matrix(v.rows(), v.cols());
  }
  return n.grad;
}

void Tape::backward(VarId root) {
  const Matrix& rv = value(root);
  if (rv.size() != 1) throw ShapeError("backward: root must be a scalar");
  grad_buf(root)[0] = real(1);

  for (VarId id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) continue;  // loss does not depend on this node
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
      case Op::kConstant:
        break;
      case Op::kAdd:
        add_in_place(grad_buf(n.a), g);
        add_in_place(grad_buf(n.b), g);
        break;
      case Op::kSub:
        add_in_place(grad_buf(n.a), g);
        add_scaled_in_place(grad_buf(n.b), g, real(-1));
        break;
      case Op::kMul:
        add_in_place(grad_buf(n.a), hadamard(g, value(n.b)));
        add_in_place(grad_buf(n.b), hadamard(g, value(n.a)));
        break;
      case Op::kScale:
        add_scaled_in_place(grad_buf(n.a), g, n.raux);
        break;
      case Op::kOneMinus:
        add_scaled_in_place(grad_buf(n.a), g, real(-1));
        break;
      case Op::kMatMulNN:
        add_in_place(grad_buf(n.a), seass::matmul_nt(g, value(n.b)));
        add_in_place(grad_buf(n.b), seass::matmul_tn(value(n.a), g));
        break;
      case Op::kMatMulNT:
        // C = A B^T: dA += g B, dB += g^T A
        add_in_place(grad_buf(n.a), seass::matmul(g, value(n.b)));
        add_in_place(grad_buf(n.b), seass::matmul_tn(g, value(n.a)));
        break;
      case Op::kMatMulTN:
        // C = A^T B: dA += B g^T, dB += A g
        add_in_place(grad_buf(n.a), seass::matmul_nt(value(n.b), g));
        add_in_place(grad_buf(n.b), seass::matmul(value(n.a), g));
        break;
      case Op::kAddRowBroadcast: {
        add_in_place(grad_buf(n.a), g);
        Matrix& dv = grad_buf(n.b);
        for (size_t i = 0; i < g.rows(); ++i)
          for (size_t j = 0; j < g.cols(); ++j) dv[j] += g(i, j);
        break;
      }
      case Op::kSigmoid: {
        Matrix& da = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) da[i] += g[i] * n.val[i] * (real(1) - n.val[i]);
        break;
      }
      case Op::kTanh: {
        Matrix& da = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) da[i] += g[i] * (real(1) - n.val[i] * n.val[i]);
        break;
      }
      case Op::kSoftmax: {
        const real gy = dot(g, n.val);
        Matrix& da = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) da[i] += n.val[i] * (g[i] - gy);
        break;
      }
      case Op::kLogSoftmax: {
        const real gs = sum(g);
        Matrix& da = grad_buf(n.a);
        for (size_t i = 0; i < g.size(); ++i) da[i] += g[i] - std::exp(n.val[i]) * gs;
        break;
      }
      case Op::kMaxoutPairs: {
        const Matrix& x = value(n.a);
        Matrix& da = grad_buf(n.a);
        for (size_t j = 0; j < n.val.size(); ++j) {
          const size_t w = x[2 * j] >= x[2 * j + 1] ? 2 * j : 2 * j + 1;
          da[w] += g[j];
        }
        break;
      }
      case Op::kConcat: {
        const size_t ra = value(n.a).rows();
        Matrix& da = grad_buf(n.a);
        Matrix& db = grad_buf(n.b);
        for (size_t i = 0; i < ra; ++i) da[i] += g[i];
        for (size_t i = 0; i < db.size(); ++i) db[i] += g[ra + i];
        break;
      }
      case Op::kStackRows: {
        for (int32_t k = 0; k < n.iaux2; ++k) {
          Matrix& dr = grad_buf(args_[n.iaux + k]);
          for (size_t j = 0; j < dr.size(); ++j) dr[j] += g((size_t)k, j);
        }
        break;
      }
      case Op::kRow: {
        Matrix& dm = grad_buf(n.a);
        for (size_t j = 0; j < g.size(); ++j) dm((size_t)n.iaux, j) += g[j];
        break;
      }
      case Op::kPick:
        grad_buf(n.a)[(size_t)n.iaux] += g[0];
        break;
      case Op::kDropout:
        add_in_place(grad_buf(n.a), hadamard(g, n.aux));
        break;
      case Op::kSumN: {
        for (int32_t k = 0; k < n.iaux2; ++k) add_in_place(grad_buf(args_[n.iaux + k]), g);
        break;
      }
    }
  }
}

GruStep gru_cell(Tape& t, VarId wz, VarId wr, VarId wh, VarId x, VarId h_prev) {
  const size_t xd = t.value(x).rows();
  const size_t hd = t.value(h_prev).rows();
  const char* names[] = {"W_z", "W_r", "W_h"};
  const VarId ws[] = {wz, wr, wh};
  for (int k = 0; k < 3; ++k) {
    const Matrix& w = t.value(ws[k]);
    if (w.rows() != hd || w.cols() != xd + hd)
      throw ShapeError(std::string("gru_cell: ") + names[k] + " is " + std::to_string(w.rows()) +
                       "x" + std::to_string(w.cols()) + ", expected " + std::to_string(hd) + "x" +
                       std::to_string(xd + hd));
  }
  const VarId xh = t.concat(x, h_prev);
  GruStep s;
  s.z = t.sigmoid(t.matmul(wz, xh));
  s.r = t.sigmoid(t.matmul(wr, xh));
  const VarId xrh = t.concat(x, t.mul(s.r, h_prev));
  s.htilde = t.tanh(t.matmul(wh, xrh));
  s.h = t.add(t.mul(t.one_minus(s.z), h_prev), t.mul(s.z, s.htilde));
  return s;
}

}  // namespace seass
