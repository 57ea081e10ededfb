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

#include "seass/text.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "seass/errors.hpp"
#include "seass/io.hpp"
#include "seass/rng.hpp"

namespace seass {

namespace {

const char* kSpecials[4] = {"<pad>", "<s>", "</s>", "<unk>"};

// Unicode Nd (decimal digit) ranges.
struct CpRange {
  uint32_t lo, hi;
};
const CpRange kDigitRanges[] = {
    {0x0030, 0x0039},   {0x0660, 0x0669},   {0x06F0, 0x06F9},   {0x07C0, 0x07C9},
    {0x0966, 0x096F},   {0x09E6, 0x09EF},   {0x0A66, 0x0A6F},   {0x0AE6, 0x0AEF},
    {0x0B66, 0x0B6F},   {0x0BE6, 0x0BEF},   {0x0C66, 0x0C6F},   {0x0CE6, 0x0CEF},
    {0x0D66, 0x0D6F},   {0x0DE6, 0x0DEF},   {0x0E50, 0x0E59},   {0x0ED0, 0x0ED9},
    {0x0F20, 0x0F29},   {0x1040, 0x1049},   {0x1090, 0x1099},   {0x17E0, 0x17E9},
    {0x1810, 0x1819},   {0x1946, 0x194F},   {0x19D0, 0x19D9},   {0x1A80, 0x1A89},
    {0x1A90, 0x1A99},   {0x1B50, 0x1B59},   {0x1BB0, 0x1BB9},   {0x1C40, 0x1C49},
    {0x1C50, 0x1C59},   {0xA620, 0xA629},   {0xA8D0, 0xA8D9},   {0xA900, 0xA909},
    {0xA9D0, 0xA9D9},   {0xA9F0, 0xA9F9},   {0xAA50, 0xAA59},   {0xABF0, 0xABF9},
    {0xFF10, 0xFF19},   {0x104A0, 0x104A9}, {0x11066, 0x1106F}, {0x110F0, 0x110F9},
    {0x11136, 0x1113F}, {0x111D0, 0x111D9}, {0x112F0, 0x112F9}, {0x11450, 0x11459},
    {0x114D0, 0x114D9}, {0x11650, 0x11659}, {0x116C0, 0x116C9}, {0x11730, 0x11739},
    {0x118E0, 0x118E9}, {0x11C50, 0x11C59}, {0x11D50, 0x11D59}, {0x16A60, 0x16A69},
    {0x16B50, 0x16B59}, {0x1D7CE, 0x1D7FF}, {0x1E950, 0x1E959},
};

bool is_decimal_digit(uint32_t cp) {
  for (const auto& r : kDigitRanges)
    if (cp >= r.lo && cp <= r.hi) return true;
  return false;
}

// Decodes one UTF-8 codepoint at s[i]; returns its byte length, or 0 when
// the bytes are not valid UTF-8 (caller passes them through untouched).
size_t decode_utf8(const std::string& s, size_t i, uint32_t* cp) {
  const auto byte = [&](size_t k) { return (uint8_t)s[k]; };
  const uint8_t b0 = byte(i);
  if (b0 < 0x80) {
    *cp = b0;
    return 1;
  }
  size_t len;
  uint32_t v;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    v = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    v = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    v = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (size_t k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xC0) != 0x80) return 0;
    v = (v << 6) | (byte(i + k) & 0x3F);
  }
  *cp = v;
  return len;
}

}  // namespace

std::string normalize_token(const std::string& token) {
  std::string out;
  out.reserve(token.size());
  size_t i = 0;
  while (i < token.size()) {
    uint32_t cp = 0;
    const size_t len = decode_utf8(token, i, &cp);
    if (len == 0) {
      out.push_back(token[i]);
      ++i;
      continue;
    }
    if (is_decimal_digit(cp)) {
      out.push_back('#');
    } else if (len == 1 && cp >= 'A' && cp <= 'Z') {
      out.push_back((char)(cp - 'A' + 'a'));
    } else {
      out.append(token, i, len);
    }
    i += len;
  }
  return out;
}

std::vector<std::string> normalize_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(normalize_token(t));
  return out;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary() {
  for (const char* s : kSpecials) insert(s);
}

void Vocabulary::insert(const std::string& token) {
  map_.emplace(token, (int32_t)list_.size());
  list_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus, int min_count) {
  if (min_count < 1) throw DomainError("build_vocabulary: min_count must be >= 1");
  if (corpus.empty()) throw DomainError("build_vocabulary: empty corpus");
  std::unordered_map<std::string, int64_t> freq;
  for (const auto& line : corpus)
    for (const auto& tok : line) ++freq[tok];

  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto& [tok, n] : freq) {
    if (n < min_count) continue;
    bool special = false;
    for (const char* s : kSpecials) special |= (tok == s);
    if (!special) kept.emplace_back(tok, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  for (const auto& [tok, n] : kept) v.insert(tok);
  return v;
}

Vocabulary Vocabulary::load(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 4) throw VocabError("vocabulary file " + path + " is missing the specials");
  for (int i = 0; i < 4; ++i)
    if (lines[i] != kSpecials[i])
      throw VocabError("vocabulary file " + path + " line " + std::to_string(i + 1) +
                       " should be " + kSpecials[i] + ", got '" + lines[i] + "'");
  Vocabulary v;
  for (size_t i = 4; i < lines.size(); ++i) {
    if (lines[i].empty()) throw VocabError("vocabulary file " + path + " has an empty entry");
    if (v.map_.count(lines[i]))
      throw VocabError("vocabulary file " + path + " has duplicate token '" + lines[i] + "'");
    v.insert(lines[i]);
  }
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::string out;
  for (const auto& tok : list_) {
    out += tok;
    out.push_back('\n');
  }
  atomic_write_file(path, out);
}

int32_t Vocabulary::id(const std::string& token) const {
  const auto it = map_.find(token);
  return it == map_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int32_t id) const {
  if (id < 0 || (size_t)id >= list_.size())
    throw VocabError("token id " + std::to_string(id) + " out of range");
  return list_[(size_t)id];
}

std::vector<int32_t> encode_sequence(const std::vector<std::string>& tokens,
                                     const Vocabulary& vocab, Role role) {
  if (tokens.empty()) throw DomainError("encode_sequence: empty token list");
  std::vector<int32_t> ids;
  ids.reserve(tokens.size() + 1);
  for (const auto& t : tokens) ids.push_back(vocab.id(t));
  if (role == Role::kTarget) ids.push_back(kEos);
  return ids;
}

std::vector<std::string> decode_sequence(const std::vector<int32_t>& ids, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int32_t id : ids) out.push_back(vocab.token(id));
  return out;
}

std::vector<int32_t> Batch::src_row(size_t i) const {
  std::vector<int32_t> out;
  for (size_t j = 0; j < max_src; ++j)
    if (src_mask[i * max_src + j]) out.push_back(src[i * max_src + j]);
  return out;
}

std::vector<int32_t> Batch::tgt_row(size_t i) const {
  std::vector<int32_t> out;
  for (size_t j = 0; j < max_tgt; ++j)
    if (tgt_mask[i * max_tgt + j]) out.push_back(tgt[i * max_tgt + j]);
  return out;
}

Batch pack_batch(const std::vector<TokenPair>& pairs, size_t begin, size_t count) {
  Batch b;
  b.size = count;
  for (size_t i = 0; i < count; ++i) {
    const TokenPair& p = pairs[begin + i];
    if (p.src.empty()) throw DomainError("pack_batch: empty source sequence");
    b.max_src = std::max(b.max_src, p.src.size());
    b.max_tgt = std::max(b.max_tgt, p.tgt.size());
  }
  b.src.assign(count * b.max_src, kPad);
  b.src_mask.assign(count * b.max_src, 0);
  b.tgt.assign(count * b.max_tgt, kPad);
  b.tgt_mask.assign(count * b.max_tgt, 0);
  for (size_t i = 0; i < count; ++i) {
    const TokenPair& p = pairs[begin + i];
    for (size_t j = 0; j < p.src.size(); ++j) {
      b.src[i * b.max_src + j] = p.src[j];
      b.src_mask[i * b.max_src + j] = 1;
    }
    for (size_t j = 0; j < p.tgt.size(); ++j) {
      b.tgt[i * b.max_tgt + j] = p.tgt[j];
      b.tgt_mask[i * b.max_tgt + j] = 1;
    }
  }
  return b;
}

std::vector<Batch> make_batches(const std::vector<TokenPair>& pairs, size_t batch_size,
                                uint64_t shuffle_seed) {
  if (batch_size < 1) throw DomainError("make_batches: batch_size must be >= 1");
  std::vector<size_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return pairs[a].src.size() < pairs[b].src.size(); });

  std::vector<TokenPair> sorted;
  sorted.reserve(pairs.size());
  for (size_t i : order) sorted.push_back(pairs[i]);

  std::vector<Batch> batches;
  for (size_t begin = 0; begin < sorted.size(); begin += batch_size)
    batches.push_back(pack_batch(sorted, begin, std::min(batch_size, sorted.size() - begin)));

  Rng rng(shuffle_seed);
  rng.shuffle(batches);
  return batches;
}

std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<std::string>> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(split_whitespace(line));
  return out;
}

void write_token_lines(const std::string& path,
                       const std::vector<std::vector<std::string>>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += join_tokens(line);
    out.push_back('\n');
  }
  atomic_write_file(path, out);
}

}  // namespace seass
