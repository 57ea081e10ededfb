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

#include "seass/synth.hpp"

#include <cmath>
#include <numeric>

#include "json.hpp"
#include "seass/errors.hpp"
#include "seass/rng.hpp"

namespace seass {
namespace {

// Bijective base-26 over 'a'..'z': 0 -> "a", 25 -> "z", 26 -> "aa".
std::string letters(int32_t i) {
  std::string out;
  int64_t n = i;
  for (;;) {
    out.insert(out.begin(), static_cast<char>('a' + n % 26));
    n = n / 26 - 1;
    if (n < 0) break;
  }
  return out;
}

void check_counts(int32_t train_n, int32_t dev_n, int32_t test_n) {
  if (train_n < 0 || dev_n < 0 || test_n < 0)
    throw DomainError("synthetic corpus: split sizes must be non-negative");
  if (train_n + dev_n + test_n < 1)
    throw DomainError("synthetic corpus: at least one pair required");
}

void check_lengths(int32_t len_min, int32_t len_max) {
  if (len_min < 1)
    throw DomainError("synthetic corpus: len_min must be at least 1");
  if (len_max < len_min)
    throw DomainError("synthetic corpus: len_max must be >= len_min");
}

SynthCorpus slice_splits(std::vector<TokenLinePair> all, int32_t train_n,
                         int32_t dev_n, int32_t test_n) {
  SynthCorpus out;
  auto it = all.begin();
  out.train.assign(it, it + train_n);
  it += train_n;
  out.dev.assign(it, it + dev_n);
  it += dev_n;
  out.test.assign(it, it + test_n);
  return out;
}

}  // namespace

std::string copy_token(int32_t i) { return "w" + letters(i); }
std::string salient_token(int32_t i) { return "s" + letters(i); }
std::string noise_token(int32_t i) { return "x" + letters(i); }
std::string target_token(int32_t i) { return "t" + letters(i); }

void CopySpec::validate() const {
  if (vocab < 1) throw DomainError("copy corpus: vocab must be at least 1");
  check_lengths(len_min, len_max);
  check_counts(train_n, dev_n, test_n);
}

void SelectionSpec::validate() const {
  if (salient < 1 || noise < 1)
    throw DomainError("selection corpus: alphabet sizes must be at least 1");
  check_lengths(len_min, len_max);
  check_counts(train_n, dev_n, test_n);
  if (!(rho >= real(0) && rho < real(1)))
    throw DomainError("selection corpus: rho must lie in [0, 1)");
  // Every admissible length must leave at least one salient position,
  // otherwise some pair would have an empty target.
  for (int32_t len = len_min; len <= len_max; ++len) {
    if (std::lround(rho * len) >= len)
      throw DomainError("selection corpus: rho leaves no salient tokens at length " +
                        std::to_string(len));
  }
}

SynthCorpus generate_copy_corpus(const CopySpec& spec) {
  spec.validate();
  const int32_t total = spec.train_n + spec.dev_n + spec.test_n;
  std::vector<TokenLinePair> all(total);
  for (int32_t idx = 0; idx < total; ++idx) {
    Rng rng(derive_seed(spec.seed, 11, static_cast<uint64_t>(idx)));
    const int32_t len =
        spec.len_min +
        static_cast<int32_t>(rng.below(static_cast<uint64_t>(spec.len_max - spec.len_min + 1)));
    TokenLinePair& pair = all[idx];
    pair.src.reserve(len);
    for (int32_t i = 0; i < len; ++i)
      pair.src.push_back(copy_token(static_cast<int32_t>(rng.below(spec.vocab))));
    pair.tgt = pair.src;
  }
  return slice_splits(std::move(all), spec.train_n, spec.dev_n, spec.test_n);
}

SynthCorpus generate_selection_corpus(const SelectionSpec& spec) {
  spec.validate();
  const int32_t total = spec.train_n + spec.dev_n + spec.test_n;
  std::vector<TokenLinePair> all(total);
  for (int32_t idx = 0; idx < total; ++idx) {
    Rng rng(derive_seed(spec.seed, 12, static_cast<uint64_t>(idx)));
    const int32_t len =
        spec.len_min +
        static_cast<int32_t>(rng.below(static_cast<uint64_t>(spec.len_max - spec.len_min + 1)));
    const int32_t noise_count = static_cast<int32_t>(std::lround(spec.rho * len));
    if (noise_count >= len)
      throw DomainError("selection corpus: pair " + std::to_string(idx) +
                        " would have no salient tokens");

    // The first noise_count entries of a shuffled position list carry noise;
    // everything else is salient, so the salient/noise interleaving is
    // uniform over position subsets.
    std::vector<int32_t> positions(len);
    std::iota(positions.begin(), positions.end(), 0);
    rng.shuffle(positions);
    std::vector<bool> is_noise(len, false);
    for (int32_t k = 0; k < noise_count; ++k) is_noise[positions[k]] = true;

    TokenLinePair& pair = all[idx];
    pair.src.reserve(len);
    for (int32_t i = 0; i < len; ++i) {
      if (is_noise[i]) {
        pair.src.push_back(noise_token(static_cast<int32_t>(rng.below(spec.noise))));
      } else {
        const int32_t sal = static_cast<int32_t>(rng.below(spec.salient));
        pair.src.push_back(salient_token(sal));
        pair.tgt.push_back(target_token(sal));
      }
    }
  }
  return slice_splits(std::move(all), spec.train_n, spec.dev_n, spec.test_n);
}

std::vector<std::string> copy_alphabet(const CopySpec& spec) {
  std::vector<std::string> out;
  out.reserve(spec.vocab);
  for (int32_t i = 0; i < spec.vocab; ++i) out.push_back(copy_token(i));
  return out;
}

std::vector<std::string> selection_source_alphabet(const SelectionSpec& spec) {
  std::vector<std::string> out;
  out.reserve(spec.salient + spec.noise);
  for (int32_t i = 0; i < spec.salient; ++i) out.push_back(salient_token(i));
  for (int32_t i = 0; i < spec.noise; ++i) out.push_back(noise_token(i));
  return out;
}

std::vector<std::string> selection_target_alphabet(const SelectionSpec& spec) {
  std::vector<std::string> out;
  out.reserve(spec.salient);
  for (int32_t i = 0; i < spec.salient; ++i) out.push_back(target_token(i));
  return out;
}

std::string spec_json(const CopySpec& spec) {
  nlohmann::json j;
  j["task"] = "copy";
  j["vocab"] = spec.vocab;
  j["len_min"] = spec.len_min;
  j["len_max"] = spec.len_max;
  j["train_n"] = spec.train_n;
  j["dev_n"] = spec.dev_n;
  j["test_n"] = spec.test_n;
  j["seed"] = spec.seed;
  return j.dump(2) + "\n";
}

std::string spec_json(const SelectionSpec& spec) {
  nlohmann::json j;
  j["task"] = "selection";
  j["salient"] = spec.salient;
  j["noise"] = spec.noise;
  j["len_min"] = spec.len_min;
  j["len_max"] = spec.len_max;
  j["rho"] = spec.rho;
  j["train_n"] = spec.train_n;
  j["dev_n"] = spec.dev_n;
  j["test_n"] = spec.test_n;
  j["seed"] = spec.seed;
  return j.dump(2) + "\n";
}

}  // namespace seass
