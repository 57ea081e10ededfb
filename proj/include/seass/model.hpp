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
#include <string>
#include <vector>

#include "seass/matrix.hpp"
#include "seass/tape.hpp"

namespace seass {

struct ModelConfig {
  int32_t emb_dim = 300;
  int32_t enc_hidden = 512;  // per direction
  int32_t dec_hidden = 512;
  int32_t attn_dim = 512;
  int32_t src_vocab = 0;
  int32_t tgt_vocab = 0;
  real dropout = 0.5;
  bool gate_enabled = true;

  void validate() const;
  bool same_shapes(const ModelConfig& o) const;
};

struct GruWeights {
  Matrix wz, wr, wh;  // each hidden x (input + hidden)
};

// Weight shapes (E = emb_dim, H = enc_hidden, D = dec_hidden, A = attn_dim):
//   embeddings          src V_s x E, tgt V_t x E
//   encoder GRUs        H x (E+H), both directions
//   selective gate      gate_w 2H x 2H, gate_u 2H x 2H, gate_b 2H
//   decoder init        init_w D x H, init_b D
//   decoder GRU         D x (E+2H+D); the cell input is [word emb; context]
//   attention           attn_w A x D, attn_u A x 2H, attn_v A
//   readout             read_w 2D x E, read_u 2D x 2H, read_v 2D x D
//   output              out_w V_t x D
struct ModelParams {
  Matrix src_embed, tgt_embed;
  GruWeights enc_fwd, enc_bwd;
  Matrix gate_w, gate_u, gate_b;
  Matrix init_w, init_b;
  GruWeights dec;
  Matrix attn_w, attn_u, attn_v;
  Matrix read_w, read_u, read_v;
  Matrix out_w;

  static ModelParams zeros(const ModelConfig& cfg);
  // zero-mean Gaussians with std sqrt(2/(fan_in+fan_out)); biases zero
  static ModelParams init(const ModelConfig& cfg, uint64_t seed);

  static constexpr size_t kArrayCount = 23;
  static const char* array_name(size_t i);
  Matrix& array(size_t i);
  const Matrix& array(size_t i) const;
};

struct EncodedSentence {
  Matrix h;      // n x 2H, row i = [fwd_i; bwd_i]
  Matrix s;      // 2H sentence vector [bwd_1; fwd_n]
  Matrix gate;   // n x 2H selective gate values (all ones when disabled)
  Matrix hp;     // n x 2H gated states
  Matrix bwd1;   // H, backward state at the first word (decoder init input)
  Matrix attn_cache;  // n x A, rows attn_u * hp_i, reused every decode step
};

struct DecoderState {
  Matrix s;  // D
  Matrix c;  // 2H
};

struct DecoderStep {
  DecoderState state;
  Matrix alpha;      // n attention weights
  Matrix log_probs;  // V_t
};

// Plain (tape-free) forward passes used for decoding and evaluation.
// Dropout is an inference-mode identity here by design.
EncodedSentence encode_sentence(const std::vector<int32_t>& src, const ModelParams& p,
                                const ModelConfig& cfg);
void apply_selective_gate(EncodedSentence& enc, const ModelParams& p);
DecoderState initial_decoder_state(const EncodedSentence& enc, const ModelParams& p,
                                   const ModelConfig& cfg);
DecoderStep decode_step(int32_t prev_word, const DecoderState& prev, const EncodedSentence& enc,
                        const ModelParams& p, const ModelConfig& cfg);

// Tape-building forward pass for one (src, tgt) pair; tgt carries the
// trailing EOS and no BOS. step_logprob[t] picks log p(tgt[t] | ...), and
// loss = -sum of them.
struct PairGraph {
  VarId loss = -1;
  VarId score = -1;  // +sum of gold log-probs
  VarId gate = -1;   // n x 2H gate node; -1 when the gate is disabled
  std::vector<VarId> step_logprob;
  std::vector<VarId> leaves;  // per-array leaf ids, ModelParams order
};

PairGraph build_pair_graph(Tape& t, const ModelParams& p, const ModelConfig& cfg,
                           const std::vector<int32_t>& src, const std::vector<int32_t>& tgt,
                           bool train_mode, uint64_t dropout_seed,
                           const Matrix* gate_override = nullptr);

// Mean over pairs of the per-pair NLL (negative sum of gold log-probs).
real sequence_nll(const std::vector<std::vector<int32_t>>& srcs,
                  const std::vector<std::vector<int32_t>>& tgts, const ModelParams& p,
                  const ModelConfig& cfg, bool train_mode = false, uint64_t dropout_seed = 0);

// Same mean loss, with gradients (summed over pairs, scaled by 1/B)
// accumulated into grads[i] matching ModelParams::array(i).
real batch_loss_and_grads(const std::vector<std::vector<int32_t>>& srcs,
                          const std::vector<std::vector<int32_t>>& tgts, const ModelParams& p,
                          const ModelConfig& cfg, bool train_mode, uint64_t dropout_seed,
                          std::vector<Matrix>& grads);

}  // namespace seass
