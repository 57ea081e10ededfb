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

#include "seass/rouge.hpp"

#include <algorithm>
#include <map>

#include "seass/errors.hpp"

namespace seass {

namespace {

real f_score(real p, real r) { return p + r > 0 ? 2 * p * r / (p + r) : real(0); }

template <typename T>
RougeScore rouge_n_impl(const std::vector<T>& cand, const std::vector<T>& ref, int n) {
  if (n < 1) throw DomainError("rouge_n: n must be >= 1");
  const auto grams = [n](const std::vector<T>& toks) {
    std::map<std::vector<T>, int64_t> counts;
    if ((int64_t)toks.size() >= n)
      for (size_t i = 0; i + n <= toks.size(); ++i)
        ++counts[std::vector<T>(toks.begin() + i, toks.begin() + i + n)];
    return counts;
  };
  const auto cg = grams(cand), rg = grams(ref);
  int64_t overlap = 0, ctotal = 0, rtotal = 0;
  for (const auto& [g, c] : cg) {
    ctotal += c;
    const auto it = rg.find(g);
    if (it != rg.end()) overlap += std::min(c, it->second);
  }
  for (const auto& [g, c] : rg) rtotal += c;

  RougeScore s;
  s.precision = ctotal > 0 ? (real)overlap / (real)ctotal : real(0);
  s.recall = rtotal > 0 ? (real)overlap / (real)rtotal : real(0);
  s.f1 = f_score(s.precision, s.recall);
  return s;
}

template <typename T>
RougeScore rouge_l_impl(const std::vector<T>& cand, const std::vector<T>& ref) {
  const size_t n = cand.size(), m = ref.size();
  size_t lcs = 0;
  if (n > 0 && m > 0) {
    std::vector<size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
      for (size_t j = 1; j <= m; ++j)
        cur[j] = cand[i - 1] == ref[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
      std::swap(prev, cur);
    }
    lcs = prev[m];
  }
  RougeScore s;
  s.precision = n > 0 ? (real)lcs / (real)n : real(0);
  s.recall = m > 0 ? (real)lcs / (real)m : real(0);
  s.f1 = f_score(s.precision, s.recall);
  return s;
}

}  // namespace

RougeScore rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   int n) {
  return rouge_n_impl(cand, ref, n);
}
RougeScore rouge_n_ids(const std::vector<int32_t>& cand, const std::vector<int32_t>& ref, int n) {
  return rouge_n_impl(cand, ref, n);
}
RougeScore rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  return rouge_l_impl(cand, ref);
}
RougeScore rouge_l_ids(const std::vector<int32_t>& cand, const std::vector<int32_t>& ref) {
  return rouge_l_impl(cand, ref);
}

std::vector<std::string> truncate_bytes(const std::vector<std::string>& tokens, size_t cap) {
  std::vector<std::string> out;
  size_t used = 0;
  for (const auto& tok : tokens) {
    const size_t next = used + (out.empty() ? 0 : 1) + tok.size();
    if (next > cap) break;
    out.push_back(tok);
    used = next;
  }
  return out;
}

CorpusReport score_corpus(const std::vector<std::vector<std::string>>& cands,
                          const std::vector<std::vector<std::vector<std::string>>>& refs,
                          const EvalConfig& cfg, const std::vector<size_t>* src_lengths) {
  if (cands.size() != refs.size())
    throw DomainError("score_corpus: " + std::to_string(cands.size()) + " candidates vs " +
                      std::to_string(refs.size()) + " reference lines");
  if (src_lengths && src_lengths->size() != cands.size())
    throw DomainError("score_corpus: source length list does not match the candidate count");
  if (cands.empty()) throw DomainError("score_corpus: empty input");

  const auto pick_field = [&](const RougeScore& s) {
    return cfg.mode == RougeMode::kRecall ? s.recall : s.f1;
  };
  const auto stem_all = [](std::vector<std::string> toks) {
    for (auto& t : toks) t = porter_stem(t);
    return toks;
  };

  CorpusReport rep;
  std::map<size_t, std::pair<size_t, real>> buckets;  // start -> (count, f1 sum)

  for (size_t line = 0; line < cands.size(); ++line) {
    if (refs[line].empty())
      throw DomainError("score_corpus: no references on line " + std::to_string(line + 1));

    std::vector<std::string> cand = cands[line];
    if (cfg.byte_cap > 0) cand = truncate_bytes(cand, (size_t)cfg.byte_cap);
    if (cfg.stemming) cand = stem_all(std::move(cand));

    std::vector<std::vector<std::string>> rr = refs[line];
    if (cfg.stemming)
      for (auto& r : rr) r = stem_all(std::move(r));

    const auto best_by_mode = [&](auto&& metric) {
      RougeScore best = metric(cand, rr[0]);
      for (size_t k = 1; k < rr.size(); ++k) {
        const RougeScore s = metric(cand, rr[k]);
        if (pick_field(s) > pick_field(best)) best = s;
      }
      return best;
    };

    RougeScore r2;
    if (cfg.rouge1) {
      const RougeScore s = best_by_mode(
          [](const auto& c, const auto& r) { return rouge_n(c, r, 1); });
      rep.rouge1.precision += s.precision;
      rep.rouge1.recall += s.recall;
      rep.rouge1.f1 += s.f1;
    }
    if (cfg.rouge2 || cfg.bucket_width > 0) {
      r2 = best_by_mode([](const auto& c, const auto& r) { return rouge_n(c, r, 2); });
      rep.rouge2.precision += r2.precision;
      rep.rouge2.recall += r2.recall;
      rep.rouge2.f1 += r2.f1;
    }
    if (cfg.rougeL) {
      const RougeScore s =
          best_by_mode([](const auto& c, const auto& r) { return rouge_l(c, r); });
      rep.rougeL.precision += s.precision;
      rep.rougeL.recall += s.recall;
      rep.rougeL.f1 += s.f1;
    }
    if (cfg.bucket_width > 0 && src_lengths) {
      const size_t start = ((*src_lengths)[line] / (size_t)cfg.bucket_width) *
                           (size_t)cfg.bucket_width;
      auto& b = buckets[start];
      b.first += 1;
      b.second += r2.f1;
    }
  }

  const real inv = real(1) / (real)cands.size();
  for (RougeScore* s : {&rep.rouge1, &rep.rouge2, &rep.rougeL}) {
    s->precision *= inv;
    s->recall *= inv;
    s->f1 *= inv;
  }
  for (const auto& [start, cs] : buckets)
    rep.buckets.push_back(
        {start, start + (size_t)cfg.bucket_width, cs.first, cs.second / (real)cs.first});
  return rep;
}

}  // namespace seass
