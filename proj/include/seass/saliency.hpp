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

struct SaliencyMap {
  std::vector<real> raw;         // Euclidean norm of the gate gradient per source word
  std::vector<real> normalized;  // raw / max(raw), or all zero
};

// First-order attribution of the summary score to each word's selective
// gate: the score is the teacher-forced sum of log-probabilities of the
// summary tokens (with a trailing EOS supplied when missing), and the raw
// saliency of word i is the L2 norm of its gate-vector gradient. The gate
// is treated as a cut point, so only its downstream influence counts.
SaliencyMap saliency_map(const std::vector<int32_t>& src, const std::vector<int32_t>& summary,
                         const ModelParams& p, const ModelConfig& cfg);

}  // namespace seass
