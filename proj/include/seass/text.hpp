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
#include <unordered_map>
#include <vector>

namespace seass {

constexpr int32_t kPad = 0;
constexpr int32_t kBos = 1;
constexpr int32_t kEos = 2;
constexpr int32_t kUnk = 3;

// ASCII lowercasing plus replacement of every Unicode decimal digit with
// '#'. Idempotent; bytes that do not decode as UTF-8 pass through.
std::string normalize_token(const std::string& token);
std::vector<std::string> normalize_tokens(const std::vector<std::string>& tokens);

std::vector<std::string> split_whitespace(const std::string& line);
std::string join_tokens(const std::vector<std::string>& tokens);

class Vocabulary {
 public:
  // Tokens with frequency >= min_count get ids after the four specials,
  // ordered by descending frequency then lexicographically.
  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus, int min_count);

  // One token per line, line number - 1 = id, specials on the first four lines.
  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;

  int32_t id(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const { return map_.count(token) > 0; }
  const std::string& token(int32_t id) const;
  size_t size() const { return list_.size(); }

 private:
  Vocabulary();
  void insert(const std::string& token);

  std::unordered_map<std::string, int32_t> map_;
  std::vector<std::string> list_;
};

enum class Role { kSource, kTarget };

// OOV tokens map to UNK; target sequences get a trailing EOS.
std::vector<int32_t> encode_sequence(const std::vector<std::string>& tokens,
                                     const Vocabulary& vocab, Role role);
std::vector<std::string> decode_sequence(const std::vector<int32_t>& ids, const Vocabulary& vocab);

struct TokenPair {
  std::vector<int32_t> src, tgt;
};

struct Batch {
  size_t size = 0;
  size_t max_src = 0, max_tgt = 0;
  std::vector<int32_t> src, tgt;            // row-major grids, PAD-filled
  std::vector<uint8_t> src_mask, tgt_mask;  // 1 exactly on non-PAD positions

  std::vector<int32_t> src_row(size_t i) const;
  std::vector<int32_t> tgt_row(size_t i) const;
};

Batch pack_batch(const std::vector<TokenPair>& pairs, size_t begin, size_t count);

// Pairs are stably sorted by source length, sliced into batches, and the
// batch order is shuffled with the seed. Same seed, same sequence.
std::vector<Batch> make_batches(const std::vector<TokenPair>& pairs, size_t batch_size,
                                uint64_t shuffle_seed);

std::vector<std::vector<std::string>> read_token_lines(const std::string& path);
void write_token_lines(const std::string& path, const std::vector<std::vector<std::string>>& lines);

}  // namespace seass
