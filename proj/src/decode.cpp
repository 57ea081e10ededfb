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

#include "seass/decode.hpp"

#include <algorithm>

#include "seass/errors.hpp"
#include "seass/text.hpp"

namespace seass {

void DecodeConfig::validate() const {
  if (beam_size < 1) throw DomainError("decode config: beam_size must be >= 1");
  if (max_len < 0) throw DomainError("decode config: max_len must be >= 0");
  if (fixed_len == 0) throw DomainError("decode config: fixed_len must be >= 1 when set");
  if (fixed_len < 0 && min_len > max_len)
    throw DomainError("decode config: min_len exceeds max_len");
}

namespace {

struct Rules {
  int32_t max_len;  // generated words before forced stop
  int32_t min_len;  // EOS masked below this
  bool fixed;       // exactly max_len words, then EOS forced
  bool suppress_unk;
};

Rules make_rules(const DecodeConfig& dcfg) {
  dcfg.validate();
  Rules r;
  r.fixed = dcfg.fixed_len >= 1;
  r.max_len = r.fixed ? dcfg.fixed_len : dcfg.max_len;
  r.min_len = r.fixed ? dcfg.fixed_len : dcfg.min_len;
  r.suppress_unk = dcfg.suppress_unk;
  return r;
}

bool token_allowed(int32_t tok, int32_t len, const Rules& r) {
  if (tok == kPad || tok == kBos) return false;
  if (tok == kUnk && r.suppress_unk) return false;
  if (tok == kEos) return len >= r.min_len;
  return len < r.max_len;  // at the cap only EOS remains
}

}  // namespace

std::vector<int32_t> greedy_decode(const std::vector<int32_t>& src, const ModelParams& p,
                                   const ModelConfig& cfg, const DecodeConfig& dcfg) {
  const Rules rules = make_rules(dcfg);
  const EncodedSentence enc = encode_sentence(src, p, cfg);
  DecoderState state = initial_decoder_state(enc, p, cfg);
  int32_t prev = kBos;
  std::vector<int32_t> out;
  while ((int32_t)out.size() < rules.max_len || rules.fixed) {
    const DecoderStep step = decode_step(prev, state, enc, p, cfg);
    int32_t best = -1;
    for (int32_t tok = 0; tok < cfg.tgt_vocab; ++tok) {
      if (!token_allowed(tok, (int32_t)out.size(), rules)) continue;
      if (best < 0 || step.log_probs[(size_t)tok] > step.log_probs[(size_t)best]) best = tok;
    }
    if (best < 0 || best == kEos) break;
    out.push_back(best);
    state = step.state;
    prev = best;
  }
  return out;
}

namespace {

struct Hyp {
  std::vector<int32_t> ids;
  real sum = 0;
  DecoderState state;  // after consuming ids
  int32_t last = kBos;
};

struct Candidate {
  size_t parent;
  int32_t tok;
  real sum;
  std::vector<int32_t> ids;  // parent ids + tok, for deterministic ordering
};

real normalized(real sum, int32_t words) { return words > 0 ? sum / (real)words : real(0); }

}  // namespace

std::vector<ScoredHyp> beam_decode(const std::vector<int32_t>& src, const ModelParams& p,
                                   const ModelConfig& cfg, const DecodeConfig& dcfg) {
  const Rules rules = make_rules(dcfg);
  const size_t K = (size_t)dcfg.beam_size;
  const EncodedSentence enc = encode_sentence(src, p, cfg);

  std::vector<Hyp> live(1);
  live[0].state = initial_decoder_state(enc, p, cfg);
  std::vector<ScoredHyp> pool;

  for (int32_t len = 0;; ++len) {
    if (live.empty() || pool.size() >= K) break;
    if (len == rules.max_len && !rules.fixed) {
      for (Hyp& h : live)
        pool.push_back({std::move(h.ids), h.sum, normalized(h.sum, len), false});
      break;
    }
    if (len > rules.max_len) break;  // fixed mode: every survivor took EOS last round

    std::vector<DecoderStep> steps(live.size());
    std::vector<Candidate> cands;
    for (size_t i = 0; i < live.size(); ++i) {
      steps[i] = decode_step(live[i].last, live[i].state, enc, p, cfg);
      for (int32_t tok = 0; tok < cfg.tgt_vocab; ++tok) {
        if (!token_allowed(tok, len, rules)) continue;
        Candidate c;
        c.parent = i;
        c.tok = tok;
        c.sum = live[i].sum + steps[i].log_probs[(size_t)tok];
        c.ids = live[i].ids;
        if (tok != kEos) c.ids.push_back(tok);
        cands.push_back(std::move(c));
      }
    }
    if (cands.empty()) break;
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.sum != b.sum) return a.sum > b.sum;
      if (a.ids != b.ids) return a.ids < b.ids;
      return a.tok < b.tok;
    });
    if (cands.size() > K) cands.resize(K);

    std::vector<Hyp> next;
    for (Candidate& c : cands) {
      if (c.tok == kEos) {
        pool.push_back({std::move(c.ids), c.sum, normalized(c.sum, len + 1), true});
      } else {
        Hyp h;
        h.ids = std::move(c.ids);
        h.sum = c.sum;
        h.state = steps[c.parent].state;
        h.last = c.tok;
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }

  std::sort(pool.begin(), pool.end(), [](const ScoredHyp& a, const ScoredHyp& b) {
    if (a.norm != b.norm) return a.norm > b.norm;
    return a.ids < b.ids;
  });
  return pool;
}

}  // namespace seass
