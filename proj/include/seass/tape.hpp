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

#include <cstdint>
#include <vector>

#include "seass/matrix.hpp"

namespace seass {

// Reverse-accumulation tape. Each overload records one node holding the
// forward value; backward() walks the records in reverse and accumulates
// gradients into the parents. Leaves reference external matrices (model
// parameters) without copying them; their gradients live on the tape and
// are harvested with grad().
//
// Gradient buffers are allocated on first touch, so subgraphs the loss
// never reaches cost nothing during backward.

using VarId = int32_t;

class Tape {
 public:
  enum class Op : uint8_t {
    kLeaf,
    kConstant,
    kAdd,
    kSub,
    kMul,
    kScale,
    kOneMinus,
    kMatMulNN,
    kMatMulNT,
    kMatMulTN,
    kAddRowBroadcast,
    kSigmoid,
    kTanh,
    kSoftmax,
    kLogSoftmax,
    kMaxoutPairs,
    kConcat,
    kStackRows,
    kRow,
    kPick,
    kDropout,
    kSumN,
  };

  struct Node {
    Op op;
    VarId a = -1, b = -1;
    Matrix val;              // owned forward value (empty for leaves)
    const Matrix* ext = nullptr;  // leaf view of an external matrix
    Matrix grad;             // lazily allocated
    Matrix aux;              // dropout mask
    int32_t iaux = 0;        // row / pick index, or arg-pool offset
    int32_t iaux2 = 0;       // arg-pool count
    real raux = 0;           // scale factor
  };

  void clear();
  size_t size() const { return nodes_.size(); }

  VarId leaf(const Matrix* m);
  VarId constant(Matrix m);

  VarId add(VarId a, VarId b);
  VarId sub(VarId a, VarId b);
  VarId mul(VarId a, VarId b);
  VarId scale(VarId a, real s);
  VarId one_minus(VarId a);
  VarId matmul(VarId a, VarId b);
  VarId matmul_nt(VarId a, VarId b);
  VarId matmul_tn(VarId a, VarId b);
  // m (r x c) plus a length-c column vector added to every row
  VarId add_row_broadcast(VarId m, VarId v);
  VarId sigmoid(VarId a);
  VarId tanh(VarId a);
  VarId softmax(VarId a);
  VarId log_softmax(VarId a);
  VarId maxout_pairs(VarId a);
  VarId concat(VarId a, VarId b);
  // rows[i] becomes row i of the result; every arg is a column vector
  VarId stack_rows(const std::vector<VarId>& rows);
  // row r of a matrix, as a column vector
  VarId row(VarId m, int32_t r);
  // single element of a vector, as a 1x1 matrix
  VarId pick(VarId v, int32_t i);
  // inverted dropout with a caller-supplied mask of 0 / (1-p) scale values
  VarId dropout(VarId a, Matrix mask);
  VarId sum_n(const std::vector<VarId>& xs);

  const Matrix& value(VarId id) const {
    const Node& n = nodes_[id];
    return n.ext ? *n.ext : n.val;
  }

  // Zero matrix if the backward sweep never reached this node.
  Matrix grad(VarId id) const;
  bool grad_touched(VarId id) const { return !nodes_[id].grad.empty(); }
  // Valid only when grad_touched(id).
  const Matrix& grad_ref(VarId id) const { return nodes_[id].grad; }

  // Seeds d(root)/d(root) = 1 (root must be 1x1) and sweeps the tape.
  void backward(VarId root);

 private:
  VarId push(Node n);
  Matrix& grad_buf(VarId id);

  std::vector<Node> nodes_;
  std::vector<VarId> args_;
};

// One gated-recurrence update. The candidate state mixes into the previous
// state through the update gate:
//   z = sigmoid(Wz [x; h]),  r = sigmoid(Wr [x; h]),
//   htilde = tanh(Wh [x; r*h]),  h' = (1-z)*h + z*htilde.
struct GruStep {
  VarId h, z, r, htilde;
};

GruStep gru_cell(Tape& t, VarId wz, VarId wr, VarId wh, VarId x, VarId h_prev);

}  // namespace seass
