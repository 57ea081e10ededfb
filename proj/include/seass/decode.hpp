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

#include "seass/model.hpp"

namespace seass {

struct DecodeConfig {
  int32_t beam_size = 12;
  int32_t max_len = 0;    // maximum number of generated words (EOS not counted)
  int32_t min_len = 0;    // EOS masked until this many words are out
  int32_t fixed_len = -1; // exact output length; <0 disables
  bool suppress_unk = false;

  void validate() const;
};

// Argmax decoding from BOS; stops at EOS or max_len; EOS is not part of
// the returned sequence. Ties go to the lowest token id.
std::vector<int32_t> greedy_decode(const std::vector<int32_t>& src, const ModelParams& p,
                                   const ModelConfig& cfg, const DecodeConfig& dcfg);

struct ScoredHyp {
  std::vector<int32_t> ids;  // EOS stripped
  real score_sum = 0;        // sum of step log-probs, EOS step included when finished
  real norm = 0;             // score_sum / generated word count (EOS counted)
  bool finished = false;     // ended in EOS rather than the length cap
};

// Beam search ranked by length-normalized score (cumulative log-prob over
// the number of generated words, EOS included). Hypotheses cut off at
// max_len enter the pool unfinished. Deterministic: ties break toward the
// lexicographically smaller token sequence.
std::vector<ScoredHyp> beam_decode(const std::vector<int32_t>& src, const ModelParams& p,
                                   const ModelConfig& cfg, const DecodeConfig& dcfg);

}  // namespace seass
