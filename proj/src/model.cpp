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

#include "seass/model.hpp"

#include <cmath>
#include <string>

#include "seass/errors.hpp"
#include "seass/rng.hpp"
#include "seass/text.hpp"

namespace seass {

void ModelConfig::validate() const {
  if (emb_dim < 1 || enc_hidden < 1 || dec_hidden < 1 || attn_dim < 1)
    throw DomainError("model config: all dimensions must be >= 1");
  if (src_vocab < 4 || tgt_vocab < 4)
    throw DomainError("model config: vocabulary sizes must cover the four specials");
  if (!(dropout >= 0 && dropout < 1)) throw DomainError("model config: dropout must be in [0,1)");
}

bool ModelConfig::same_shapes(const ModelConfig& o) const {
  return emb_dim == o.emb_dim && enc_hidden == o.enc_hidden && dec_hidden == o.dec_hidden &&
         attn_dim == o.attn_dim && src_vocab == o.src_vocab && tgt_vocab == o.tgt_vocab;
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  cfg.validate();
  const size_t e = (size_t)cfg.emb_dim, h = (size_t)cfg.enc_hidden, d = (size_t)cfg.dec_hidden,
               a = (size_t)cfg.attn_dim;
  ModelParams p;
  p.src_embed = Matrix((size_t)cfg.src_vocab, e);
  p.tgt_embed = Matrix((size_t)cfg.tgt_vocab, e);
  for (GruWeights* g : {&p.enc_fwd, &p.enc_bwd}) {
    g->wz = Matrix(h, e + h);
    g->wr = Matrix(h, e + h);
    g->wh = Matrix(h, e + h);
  }
  p.gate_w = Matrix(2 * h, 2 * h);
  p.gate_u = Matrix(2 * h, 2 * h);
  p.gate_b = Matrix(2 * h, 1);
  p.init_w = Matrix(d, h);
  p.init_b = Matrix(d, 1);
  p.dec.wz = Matrix(d, e + 2 * h + d);
  p.dec.wr = Matrix(d, e + 2 * h + d);
  p.dec.wh = Matrix(d, e + 2 * h + d);
  p.attn_w = Matrix(a, d);
  p.attn_u = Matrix(a, 2 * h);
  p.attn_v = Matrix(a, 1);
  p.read_w = Matrix(2 * d, e);
  p.read_u = Matrix(2 * d, 2 * h);
  p.read_v = Matrix(2 * d, d);
  p.out_w = Matrix((size_t)cfg.tgt_vocab, d);
  return p;
}

ModelParams ModelParams::init(const ModelConfig& cfg, uint64_t seed) {
  ModelParams p = zeros(cfg);
  Rng rng(derive_seed(seed, 1));
  for (size_t i = 0; i < kArrayCount; ++i) {
    Matrix& m = p.array(i);
    const bool bias = (i == 10 || i == 12);  // gate_b, init_b stay zero
    if (bias) continue;
    const real std = std::sqrt(real(2) / (real)(m.rows() + m.cols()));
    for (size_t k = 0; k < m.size(); ++k) m[k] = (real)rng.normal(0.0, std);
  }
  return p;
}

const char* ModelParams::array_name(size_t i) {
  static const char* names[kArrayCount] = {
      "src_embed", "tgt_embed", "enc_fwd.wz", "enc_fwd.wr", "enc_fwd.wh", "enc_bwd.wz",
      "enc_bwd.wr", "enc_bwd.wh", "gate_w",    "gate_u",     "gate_b",     "init_w",
      "init_b",    "dec.wz",    "dec.wr",     "dec.wh",     "attn_w",     "attn_u",
      "attn_v",    "read_w",    "read_u",     "read_v",     "out_w"};
  return names[i];
}

Matrix& ModelParams::array(size_t i) {
  Matrix* arrays[kArrayCount] = {
      &src_embed, &tgt_embed, &enc_fwd.wz, &enc_fwd.wr, &enc_fwd.wh, &enc_bwd.wz,
      &enc_bwd.wr, &enc_bwd.wh, &gate_w,    &gate_u,     &gate_b,     &init_w,
      &init_b,    &dec.wz,    &dec.wr,     &dec.wh,     &attn_w,     &attn_u,
      &attn_v,    &read_w,    &read_u,     &read_v,     &out_w};
  return *arrays[i];
}

const Matrix& ModelParams::array(size_t i) const {
  return const_cast<ModelParams*>(this)->array(i);
}

namespace {

void check_ids(const std::vector<int32_t>& ids, int32_t vocab, const char* what) {
  for (int32_t id : ids)
    if (id < 0 || id >= vocab)
      throw VocabError(std::string(what) + " id " + std::to_string(id) +
                       " out of vocabulary range " + std::to_string(vocab));
}

Matrix embed_row(const Matrix& table, int32_t id) {
  Matrix v(table.cols(), 1);
  for (size_t j = 0; j < table.cols(); ++j) v[j] = table((size_t)id, j);
  return v;
}

Matrix gru_plain(const GruWeights& w, const Matrix& x, const Matrix& h) {
  const Matrix xh = concat_cols(x, h);
  const Matrix z = sigmoid(matmul(w.wz, xh));
  const Matrix r = sigmoid(matmul(w.wr, xh));
  const Matrix xrh = concat_cols(x, hadamard(r, h));
  const Matrix ht = tanh_elem(matmul(w.wh, xrh));
  Matrix out(h.rows(), 1);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = (real(1) - z[i]) * h[i] + z[i] * ht[i];
  return out;
}

}  // namespace

EncodedSentence encode_sentence(const std::vector<int32_t>& src, const ModelParams& p,
                                const ModelConfig& cfg) {
  if (src.empty()) throw DomainError("encode_sentence: empty source");
  check_ids(src, cfg.src_vocab, "source");
  const size_t n = src.size(), h = (size_t)cfg.enc_hidden;

  std::vector<Matrix> emb(n);
  for (size_t i = 0; i < n; ++i) emb[i] = embed_row(p.src_embed, src[i]);

  std::vector<Matrix> fwd(n), bwd(n);
  Matrix state(h, 1);
  for (size_t i = 0; i < n; ++i) {
    state = gru_plain(p.enc_fwd, emb[i], state);
    fwd[i] = state;
  }
  state = Matrix(h, 1);
  for (size_t i = n; i-- > 0;) {
    state = gru_plain(p.enc_bwd, emb[i], state);
    bwd[i] = state;
  }

  EncodedSentence enc;
  enc.h = Matrix(n, 2 * h);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < h; ++j) enc.h(i, j) = fwd[i][j];
    for (size_t j = 0; j < h; ++j) enc.h(i, h + j) = bwd[i][j];
  }
  enc.s = concat_cols(bwd[0], fwd[n - 1]);
  enc.bwd1 = bwd[0];

  if (cfg.gate_enabled) {
    apply_selective_gate(enc, p);
  } else {
    enc.gate = Matrix::ones(n, 2 * h);
    enc.hp = enc.h;
  }
  enc.attn_cache = matmul_nt(enc.hp, p.attn_u);
  return enc;
}

void apply_selective_gate(EncodedSentence& enc, const ModelParams& p) {
  const Matrix us = add(matmul(p.gate_u, enc.s), p.gate_b);
  Matrix pre = matmul_nt(enc.h, p.gate_w);
  for (size_t i = 0; i < pre.rows(); ++i)
    for (size_t j = 0; j < pre.cols(); ++j) pre(i, j) += us[j];
  enc.gate = sigmoid(pre);
  enc.hp = hadamard(enc.h, enc.gate);
}

DecoderState initial_decoder_state(const EncodedSentence& enc, const ModelParams& p,
                                   const ModelConfig& cfg) {
  DecoderState st;
  st.s = tanh_elem(add(matmul(p.init_w, enc.bwd1), p.init_b));
  st.c = Matrix(2 * (size_t)cfg.enc_hidden, 1);
  return st;
}

DecoderStep decode_step(int32_t prev_word, const DecoderState& prev, const EncodedSentence& enc,
                        const ModelParams& p, const ModelConfig& cfg) {
  if (prev_word < 0 || prev_word >= cfg.tgt_vocab)
    throw VocabError("target id " + std::to_string(prev_word) + " out of vocabulary range " +
                     std::to_string(cfg.tgt_vocab));
  const Matrix emb = embed_row(p.tgt_embed, prev_word);

  DecoderStep out;
  out.state.s = gru_plain(p.dec, concat_cols(emb, prev.c), prev.s);

  // energies use the pre-update state
  const Matrix q = matmul(p.attn_w, prev.s);
  Matrix pre = enc.attn_cache;
  for (size_t i = 0; i < pre.rows(); ++i)
    for (size_t j = 0; j < pre.cols(); ++j) pre(i, j) += q[j];
  out.alpha = softmax(matmul(tanh_elem(pre), p.attn_v));
  out.state.c = matmul_tn(enc.hp, out.alpha);

  const Matrix r =
      add(add(matmul(p.read_w, emb), matmul(p.read_u, out.state.c)), matmul(p.read_v, out.state.s));
  const Matrix m = maxout_pairs(r);
  out.log_probs = log_softmax(matmul(p.out_w, m));
  return out;
}

PairGraph build_pair_graph(Tape& t, const ModelParams& p, const ModelConfig& cfg,
                           const std::vector<int32_t>& src, const std::vector<int32_t>& tgt,
                           bool train_mode, uint64_t dropout_seed, const Matrix* gate_override) {
  if (src.empty()) throw DomainError("build_pair_graph: empty source");
  if (tgt.empty()) throw DomainError("build_pair_graph: empty target");
  check_ids(src, cfg.src_vocab, "source");
  check_ids(tgt, cfg.tgt_vocab, "target");

  const size_t n = src.size(), T = tgt.size();
  const size_t e = (size_t)cfg.emb_dim, h = (size_t)cfg.enc_hidden, d = (size_t)cfg.dec_hidden;

  PairGraph g;
  g.leaves.resize(ModelParams::kArrayCount);
  for (size_t i = 0; i < ModelParams::kArrayCount; ++i) g.leaves[i] = t.leaf(&p.array(i));
  const VarId src_embed = g.leaves[0], tgt_embed = g.leaves[1];
  const VarId efz = g.leaves[2], efr = g.leaves[3], efh = g.leaves[4];
  const VarId ebz = g.leaves[5], ebr = g.leaves[6], ebh = g.leaves[7];
  const VarId gate_w = g.leaves[8], gate_u = g.leaves[9], gate_b = g.leaves[10];
  const VarId init_w = g.leaves[11], init_b = g.leaves[12];
  const VarId dwz = g.leaves[13], dwr = g.leaves[14], dwh = g.leaves[15];
  const VarId attn_w = g.leaves[16], attn_u = g.leaves[17], attn_v = g.leaves[18];
  const VarId read_w = g.leaves[19], read_u = g.leaves[20], read_v = g.leaves[21];
  const VarId out_w = g.leaves[22];

  const bool drop = train_mode && cfg.dropout > 0;
  Rng rng(dropout_seed);
  const auto draw_mask = [&](size_t rows) {
    Matrix mask(rows, 1);
    const real keep = real(1) - cfg.dropout;
    for (size_t i = 0; i < rows; ++i) mask[i] = rng.bernoulli(keep) ? real(1) / keep : real(0);
    return mask;
  };

  // encoder
  std::vector<VarId> emb(n);
  for (size_t i = 0; i < n; ++i) {
    emb[i] = t.row(src_embed, src[i]);
    if (drop) emb[i] = t.dropout(emb[i], draw_mask(e));
  }
  std::vector<VarId> fwd(n), bwd(n);
  VarId state = t.constant(Matrix(h, 1));
  for (size_t i = 0; i < n; ++i) {
    state = gru_cell(t, efz, efr, efh, emb[i], state).h;
    fwd[i] = state;
  }
  state = t.constant(Matrix(h, 1));
  for (size_t i = n; i-- > 0;) {
    state = gru_cell(t, ebz, ebr, ebh, emb[i], state).h;
    bwd[i] = state;
  }
  std::vector<VarId> rows(n);
  for (size_t i = 0; i < n; ++i) rows[i] = t.concat(fwd[i], bwd[i]);
  const VarId H = t.stack_rows(rows);
  const VarId s = t.concat(bwd[0], fwd[n - 1]);

  VarId hp = H;
  if (gate_override != nullptr) {
    g.gate = t.leaf(gate_override);
    hp = t.mul(H, g.gate);
  } else if (cfg.gate_enabled) {
    const VarId us = t.add(t.matmul(gate_u, s), gate_b);
    g.gate = t.sigmoid(t.add_row_broadcast(t.matmul_nt(H, gate_w), us));
    hp = t.mul(H, g.gate);
  }

  const VarId attn_cache = t.matmul_nt(hp, attn_u);  // n x A

  // decoder
  VarId st = t.tanh(t.add(t.matmul(init_w, bwd[0]), init_b));
  VarId ct = t.constant(Matrix(2 * h, 1));
  g.step_logprob.reserve(T);
  for (size_t step = 0; step < T; ++step) {
    const int32_t prev = step == 0 ? kBos : tgt[step - 1];
    VarId w = t.row(tgt_embed, prev);
    const VarId w_clean = w;
    if (drop) w = t.dropout(w, draw_mask(e));

    const VarId s_prev = st;
    st = gru_cell(t, dwz, dwr, dwh, t.concat(w, ct), s_prev).h;

    const VarId q = t.matmul(attn_w, s_prev);
    const VarId energies = t.matmul(t.tanh(t.add_row_broadcast(attn_cache, q)), attn_v);
    const VarId alpha = t.softmax(energies);
    ct = t.matmul_tn(hp, alpha);

    const VarId r = t.add(t.add(t.matmul(read_w, w_clean), t.matmul(read_u, ct)),
                          t.matmul(read_v, st));
    VarId m = t.maxout_pairs(r);
    if (drop) m = t.dropout(m, draw_mask(d));
    const VarId logp = t.log_softmax(t.matmul(out_w, m));
    g.step_logprob.push_back(t.pick(logp, tgt[step]));
  }

  g.score = t.sum_n(g.step_logprob);
  g.loss = t.scale(g.score, real(-1));
  return g;
}

real sequence_nll(const std::vector<std::vector<int32_t>>& srcs,
                  const std::vector<std::vector<int32_t>>& tgts, const ModelParams& p,
                  const ModelConfig& cfg, bool train_mode, uint64_t dropout_seed) {
  if (srcs.size() != tgts.size() || srcs.empty())
    throw DomainError("sequence_nll: batch source/target mismatch");
  Tape t;
  real total = 0;
  for (size_t i = 0; i < srcs.size(); ++i) {
    t.clear();
    const PairGraph g = build_pair_graph(t, p, cfg, srcs[i], tgts[i], train_mode,
                                         derive_seed(dropout_seed, 3, i));
    const real loss = t.value(g.loss)[0];
    if (!std::isfinite(loss))
      throw NonFiniteLossError("non-finite loss on pair " + std::to_string(i), (long)i);
    total += loss;
  }
  return total / (real)srcs.size();
}

real batch_loss_and_grads(const std::vector<std::vector<int32_t>>& srcs,
                          const std::vector<std::vector<int32_t>>& tgts, const ModelParams& p,
                          const ModelConfig& cfg, bool train_mode, uint64_t dropout_seed,
                          std::vector<Matrix>& grads) {
  if (srcs.size() != tgts.size() || srcs.empty())
    throw DomainError("batch_loss_and_grads: batch source/target mismatch");
  grads.resize(ModelParams::kArrayCount);
  for (size_t i = 0; i < ModelParams::kArrayCount; ++i) {
    const Matrix& a = p.array(i);
    grads[i] = Matrix(a.rows(), a.cols());
  }

  const real inv_b = real(1) / (real)srcs.size();
  Tape t;
  real total = 0;
  for (size_t i = 0; i < srcs.size(); ++i) {
    t.clear();
    const PairGraph g = build_pair_graph(t, p, cfg, srcs[i], tgts[i], train_mode,
                                         derive_seed(dropout_seed, 3, i));
    const real loss = t.value(g.loss)[0];
    if (!std::isfinite(loss))
      throw NonFiniteLossError("non-finite loss on pair " + std::to_string(i), (long)i);
    total += loss;
    t.backward(g.loss);
    for (size_t k = 0; k < ModelParams::kArrayCount; ++k)
      if (t.grad_touched(g.leaves[k])) add_scaled_in_place(grads[k], t.grad_ref(g.leaves[k]), inv_b);
  }
  return total * inv_b;
}

}  // namespace seass
