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

#include "seass/saliency.hpp"

#include <cmath>

#include "seass/errors.hpp"
#include "seass/text.hpp"

namespace seass {

SaliencyMap saliency_map(const std::vector<int32_t>& src, const std::vector<int32_t>& summary,
                         const ModelParams& p, const ModelConfig& cfg) {
  if (!cfg.gate_enabled)
    throw DomainError("saliency_map: the selective gate is disabled in this model");
  if (summary.empty()) throw DomainError("saliency_map: empty summary");

  std::vector<int32_t> tgt = summary;
  if (tgt.back() != kEos) tgt.push_back(kEos);

  Tape t;
  const PairGraph g = build_pair_graph(t, p, cfg, src, tgt, false, 0);
  t.backward(g.score);

  const Matrix dg = t.grad(g.gate);  // n x 2H
  SaliencyMap map;
  map.raw.resize(src.size());
  map.normalized.assign(src.size(), 0);
  real max_raw = 0;
  for (size_t i = 0; i < src.size(); ++i) {
    real ss = 0;
    for (size_t j = 0; j < dg.cols(); ++j) ss += dg(i, j) * dg(i, j);
    map.raw[i] = std::sqrt(ss);
    max_raw = std::max(max_raw, map.raw[i]);
  }
  if (max_raw > 0)
    for (size_t i = 0; i < src.size(); ++i) map.normalized[i] = map.raw[i] / max_raw;
  return map;
}

}  // namespace seass
