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

namespace seass {

struct RougeScore {
  real precision = 0, recall = 0, f1 = 0;
};

// Porter (1980) stemmer. Tokens that are not lowercase ASCII letters are
// returned unchanged, as are words of length <= 2.
std::string porter_stem(const std::string& token);

// Clipped n-gram overlap: recall over reference n-grams, precision over
// candidate n-grams, F1 with beta = 1. Empty denominators score 0.
RougeScore rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   int n);
RougeScore rouge_n_ids(const std::vector<int32_t>& cand, const std::vector<int32_t>& ref, int n);

// Longest common subsequence: R = lcs/|ref|, P = lcs/|cand|.
RougeScore rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref);
RougeScore rouge_l_ids(const std::vector<int32_t>& cand, const std::vector<int32_t>& ref);

enum class RougeMode { kF1, kRecall };

struct EvalConfig {
  bool rouge1 = true, rouge2 = true, rougeL = true;
  RougeMode mode = RougeMode::kF1;
  int32_t byte_cap = 0;      // truncate candidates to this many bytes; 0 = off
  bool stemming = false;
  int32_t bucket_width = 0;  // source-length buckets for the rouge-2 report; 0 = off
};

struct BucketRow {
  size_t start = 0, end = 0;  // [start, end)
  size_t count = 0;
  real mean_rouge2_f1 = 0;
};

struct CorpusReport {
  RougeScore rouge1, rouge2, rougeL;
  std::vector<BucketRow> buckets;
};

// Keeps the candidate tokens that lie entirely within the first `cap`
// bytes of the space-joined string; a token cut by the boundary is dropped.
std::vector<std::string> truncate_bytes(const std::vector<std::string>& tokens, size_t cap);

// Per line: truncation, then optional stemming of both sides, then for
// each metric the best reference by the active mode's field. Corpus score
// is the arithmetic mean. Buckets group lines by source length and report
// mean rouge-2 F1 per bucket.
CorpusReport score_corpus(const std::vector<std::vector<std::string>>& cands,
                          const std::vector<std::vector<std::vector<std::string>>>& refs,
                          const EvalConfig& cfg,
                          const std::vector<size_t>* src_lengths = nullptr);

}  // namespace seass
