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

// Token alphabets are letters only so corpus normalization (digits -> '#')
// cannot merge distinct tokens. Indices map to bijective base-26 suffixes:
// 0 -> a, 25 -> z, 26 -> aa.
std::string copy_token(int32_t i);     // "wa", "wb", ...
std::string salient_token(int32_t i);  // "sa", ...
std::string noise_token(int32_t i);    // "xa", ...
std::string target_token(int32_t i);   // "ta", ...; the image of salient_token(i)

struct CopySpec {
  int32_t vocab = 20;
  int32_t len_min = 1, len_max = 10;
  int32_t train_n = 2000, dev_n = 0, test_n = 200;
  uint64_t seed = 0;

  void validate() const;
};

// Sources mix salient and noise tokens at ratio rho; the target is the
// salient subsequence mapped through the fixed bijection onto a disjoint
// output alphabet, so the task is selection plus substitution.
struct SelectionSpec {
  int32_t salient = 50, noise = 50;
  int32_t len_min = 10, len_max = 20;
  real rho = real(0.5);
  int32_t train_n = 5000, dev_n = 500, test_n = 500;
  uint64_t seed = 0;

  void validate() const;
};

struct TokenLinePair {
  std::vector<std::string> src, tgt;
};

struct SynthCorpus {
  std::vector<TokenLinePair> train, dev, test;
};

SynthCorpus generate_copy_corpus(const CopySpec& spec);
SynthCorpus generate_selection_corpus(const SelectionSpec& spec);

// Full alphabets in id order, for building vocabularies that cover every
// token the generator can emit.
std::vector<std::string> copy_alphabet(const CopySpec& spec);
std::vector<std::string> selection_source_alphabet(const SelectionSpec& spec);
std::vector<std::string> selection_target_alphabet(const SelectionSpec& spec);

std::string spec_json(const CopySpec& spec);
std::string spec_json(const SelectionSpec& spec);

}  // namespace seass
