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

#include "seass/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seass/decode.hpp"
#include "seass/errors.hpp"
#include "seass/io.hpp"
#include "seass/model.hpp"
#include "seass/rouge.hpp"
#include "seass/saliency.hpp"
#include "seass/synth.hpp"
#include "seass/text.hpp"
#include "seass/train.hpp"

namespace seass::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for problems a corrected invocation would fix (missing inputs,
// bad flag combinations); run() turns it into usage text and exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One configuration surface shared by every subcommand: JSON file with
// flat dotted keys, command-line flags override file values.
struct RunConfig {
  ModelConfig model;
  OptimizerConfig opt;
  DecodeConfig decode;
  EvalConfig eval;
  int64_t max_updates = 0;
  uint64_t seed = 0;
  std::string src, tgt, dev_src, dev_tgt, vocab_src, vocab_tgt, out;
};

RougeMode parse_mode(const std::string& s) {
  if (s == "f1") return RougeMode::kF1;
  if (s == "recall") return RougeMode::kRecall;
  throw UsageError("--mode must be f1 or recall, got '" + s + "'");
}

void apply_config_kv(RunConfig& rc, const std::string& key, const json& v) {
  if (key == "model.emb_dim") rc.model.emb_dim = v.get<int32_t>();
  else if (key == "model.enc_hidden") rc.model.enc_hidden = v.get<int32_t>();
  else if (key == "model.dec_hidden") rc.model.dec_hidden = v.get<int32_t>();
  else if (key == "model.attn_dim") rc.model.attn_dim = v.get<int32_t>();
  else if (key == "model.dropout") rc.model.dropout = v.get<real>();
  else if (key == "model.gate") rc.model.gate_enabled = v.get<bool>();
  else if (key == "train.alpha") rc.opt.alpha = v.get<real>();
  else if (key == "train.beta1") rc.opt.beta1 = v.get<real>();
  else if (key == "train.beta2") rc.opt.beta2 = v.get<real>();
  else if (key == "train.eps") rc.opt.eps = v.get<real>();
  else if (key == "train.clip") rc.opt.clip = v.get<real>();
  else if (key == "train.batch_size") rc.opt.batch_size = v.get<int32_t>();
  else if (key == "train.eval_every") rc.opt.eval_every = v.get<int64_t>();
  else if (key == "train.patience") rc.opt.patience = v.get<int32_t>();
  else if (key == "train.max_updates") rc.max_updates = v.get<int64_t>();
  else if (key == "decode.beam_size") rc.decode.beam_size = v.get<int32_t>();
  else if (key == "decode.max_len") rc.decode.max_len = v.get<int32_t>();
  else if (key == "decode.min_len") rc.decode.min_len = v.get<int32_t>();
  else if (key == "decode.fixed_len") rc.decode.fixed_len = v.get<int32_t>();
  else if (key == "decode.suppress_unk") rc.decode.suppress_unk = v.get<bool>();
  else if (key == "eval.mode") rc.eval.mode = parse_mode(v.get<std::string>());
  else if (key == "eval.byte_cap") rc.eval.byte_cap = v.get<int32_t>();
  else if (key == "eval.stem") rc.eval.stemming = v.get<bool>();
  else if (key == "eval.buckets") rc.eval.bucket_width = v.get<int32_t>();
  else if (key == "seed") rc.seed = v.get<uint64_t>();
  else if (key == "data.src") rc.src = v.get<std::string>();
  else if (key == "data.tgt") rc.tgt = v.get<std::string>();
  else if (key == "data.dev_src") rc.dev_src = v.get<std::string>();
  else if (key == "data.dev_tgt") rc.dev_tgt = v.get<std::string>();
  else if (key == "data.vocab_src") rc.vocab_src = v.get<std::string>();
  else if (key == "data.vocab_tgt") rc.vocab_tgt = v.get<std::string>();
  else if (key == "out.dir") rc.out = v.get<std::string>();
  else throw DomainError("config: unknown key '" + key + "'");
}

void apply_config_file(RunConfig& rc, const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DomainError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw DomainError("config " + path + ": top level must be an object");
  for (const auto& [key, val] : j.items()) {
    try {
      apply_config_kv(rc, key, val);
    } catch (const json::exception& e) {
      throw DomainError("config key '" + key + "': " + e.what());
    }
  }
}

std::string fmt_real(real x) {
  std::ostringstream os;
  os << std::setprecision(17) << static_cast<double>(x);
  return os.str();
}

void require_path(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError("missing required input: " + flag);
}

// Reads a line-aligned pair of token files, normalizes, and encodes.
// Empty lines are rejected; filtering dirty corpora is preprocess's job.
std::vector<TokenPair> load_pairs(const std::string& src_path, const std::string& tgt_path,
                                  const Vocabulary& vs, const Vocabulary& vt) {
  const auto src = read_token_lines(src_path);
  const auto tgt = read_token_lines(tgt_path);
  if (src.size() != tgt.size())
    throw DomainError(src_path + " has " + std::to_string(src.size()) + " lines but " + tgt_path +
                      " has " + std::to_string(tgt.size()));
  std::vector<TokenPair> out;
  out.reserve(src.size());
  for (size_t i = 0; i < src.size(); ++i) {
    const auto ns = normalize_tokens(src[i]);
    const auto nt = normalize_tokens(tgt[i]);
    if (ns.empty() || nt.empty())
      throw DomainError(src_path + ": pair at line " + std::to_string(i + 1) +
                        " is empty; run preprocess to filter such lines");
    out.push_back({encode_sequence(ns, vs, Role::kSource), encode_sequence(nt, vt, Role::kTarget)});
  }
  return out;
}

void check_vocab_size(const Vocabulary& v, int32_t expected, const std::string& which) {
  if (static_cast<int32_t>(v.size()) != expected)
    throw DomainError(which + " vocabulary has " + std::to_string(v.size()) +
                      " entries but the checkpoint was trained with " + std::to_string(expected));
}

// ---------------------------------------------------------------------------
// Flag staging area. Defaults here only matter when neither the config file
// nor the command line supplies a value.

struct Args {
  std::string src, tgt, dev_src, dev_tgt, vocab_src, vocab_tgt;
  std::string config, checkpoint, out, out_src, out_tgt, out_buckets;
  std::string cand, refs;
  std::string metrics = "rouge1,rouge2,rougeL";
  std::string mode = "f1";
  std::string gate = "on";
  std::string task = "copy";
  uint64_t seed = 0;
  int32_t beam = 12;
  bool greedy = false;
  int32_t fixed_len = -1;
  int32_t max_len = 0, min_len = 0;
  bool suppress_unk = false;
  int32_t byte_cap = 0;
  bool stem = false;
  int32_t buckets = 0;
  int64_t max_updates = 0;
  int32_t min_count = 1, min_src_len = 1;
  // gen-synth knobs; -1 means "use the task's default"
  int32_t vocab = 20, salient = 50, noise = 50;
  int32_t len_min = -1, len_max = -1;
  double rho = 0.5;
  int32_t train_n = -1, dev_n = -1, test_n = -1;
};

// ---------------------------------------------------------------------------

void cmd_preprocess(const Args& a) {
  require_path(a.src, "--src");
  require_path(a.tgt, "--tgt");
  require_path(a.vocab_src, "--vocab-src");
  require_path(a.vocab_tgt, "--vocab-tgt");
  if (a.out_src.empty() != a.out_tgt.empty())
    throw UsageError("--out-src and --out-tgt must be given together");

  const auto src = read_token_lines(a.src);
  const auto tgt = read_token_lines(a.tgt);
  if (src.size() != tgt.size())
    throw DomainError(a.src + " has " + std::to_string(src.size()) + " lines but " + a.tgt +
                      " has " + std::to_string(tgt.size()));

  std::vector<std::vector<std::string>> kept_src, kept_tgt;
  for (size_t i = 0; i < src.size(); ++i) {
    auto ns = normalize_tokens(src[i]);
    auto nt = normalize_tokens(tgt[i]);
    if (static_cast<int32_t>(ns.size()) < a.min_src_len || ns.empty() || nt.empty()) continue;
    kept_src.push_back(std::move(ns));
    kept_tgt.push_back(std::move(nt));
  }
  if (kept_src.empty()) throw DomainError("preprocess: no pairs survive filtering");

  const Vocabulary vs = Vocabulary::build(kept_src, a.min_count);
  const Vocabulary vt = Vocabulary::build(kept_tgt, a.min_count);
  vs.save(a.vocab_src);
  vt.save(a.vocab_tgt);
  if (!a.out_src.empty()) {
    write_token_lines(a.out_src, kept_src);
    write_token_lines(a.out_tgt, kept_tgt);
  }

  json summary;
  summary["pairs_in"] = src.size();
  summary["pairs_kept"] = kept_src.size();
  summary["src_vocab"] = vs.size();
  summary["tgt_vocab"] = vt.size();
  std::cout << summary.dump() << "\n";
}

void cmd_gen_synth(const Args& a, const CLI::App& sub) {
  require_path(a.out, "--out");
  const fs::path dir(a.out);

  SynthCorpus corpus;
  std::string sidecar;
  std::vector<std::string> src_alpha, tgt_alpha;
  if (a.task == "copy") {
    CopySpec s;
    s.seed = a.seed;
    if (sub.count("--vocab")) s.vocab = a.vocab;
    if (a.len_min >= 0) s.len_min = a.len_min;
    if (a.len_max >= 0) s.len_max = a.len_max;
    if (a.train_n >= 0) s.train_n = a.train_n;
    if (a.dev_n >= 0) s.dev_n = a.dev_n;
    if (a.test_n >= 0) s.test_n = a.test_n;
    corpus = generate_copy_corpus(s);
    sidecar = spec_json(s);
    src_alpha = copy_alphabet(s);
    tgt_alpha = src_alpha;
  } else {
    SelectionSpec s;
    s.seed = a.seed;
    if (sub.count("--salient")) s.salient = a.salient;
    if (sub.count("--noise")) s.noise = a.noise;
    if (sub.count("--rho")) s.rho = static_cast<real>(a.rho);
    if (a.len_min >= 0) s.len_min = a.len_min;
    if (a.len_max >= 0) s.len_max = a.len_max;
    if (a.train_n >= 0) s.train_n = a.train_n;
    if (a.dev_n >= 0) s.dev_n = a.dev_n;
    if (a.test_n >= 0) s.test_n = a.test_n;
    corpus = generate_selection_corpus(s);
    sidecar = spec_json(s);
    src_alpha = selection_source_alphabet(s);
    tgt_alpha = selection_target_alphabet(s);
  }

  const auto write_split = [&](const char* name, const std::vector<TokenLinePair>& pairs) {
    std::vector<std::vector<std::string>> src_lines, tgt_lines;
    src_lines.reserve(pairs.size());
    tgt_lines.reserve(pairs.size());
    for (const auto& p : pairs) {
      src_lines.push_back(p.src);
      tgt_lines.push_back(p.tgt);
    }
    write_token_lines((dir / (std::string(name) + ".src.txt")).string(), src_lines);
    write_token_lines((dir / (std::string(name) + ".tgt.txt")).string(), tgt_lines);
  };
  write_split("train", corpus.train);
  write_split("dev", corpus.dev);
  write_split("test", corpus.test);

  Vocabulary::build({src_alpha}, 1).save((dir / "vocab.src.txt").string());
  Vocabulary::build({tgt_alpha}, 1).save((dir / "vocab.tgt.txt").string());
  atomic_write_file((dir / "spec.json").string(), sidecar);

  json summary;
  summary["task"] = a.task;
  summary["train"] = corpus.train.size();
  summary["dev"] = corpus.dev.size();
  summary["test"] = corpus.test.size();
  summary["out"] = dir.string();
  std::cout << summary.dump() << "\n";
}

void cmd_train(const Args& a, const CLI::App& sub) {
  RunConfig rc;
  Checkpoint ck;
  const bool resuming = !a.checkpoint.empty();
  if (resuming) {
    ck = load_checkpoint(a.checkpoint);
    rc.model = ck.model;
    rc.opt = ck.opt;
    rc.seed = ck.seed;
  }
  if (!a.config.empty()) apply_config_file(rc, a.config);
  if (!a.src.empty()) rc.src = a.src;
  if (!a.tgt.empty()) rc.tgt = a.tgt;
  if (!a.dev_src.empty()) rc.dev_src = a.dev_src;
  if (!a.dev_tgt.empty()) rc.dev_tgt = a.dev_tgt;
  if (!a.vocab_src.empty()) rc.vocab_src = a.vocab_src;
  if (!a.vocab_tgt.empty()) rc.vocab_tgt = a.vocab_tgt;
  if (!a.out.empty()) rc.out = a.out;
  if (sub.count("--seed")) rc.seed = a.seed;
  if (sub.count("--gate")) rc.model.gate_enabled = (a.gate == "on");
  if (sub.count("--max-updates")) rc.max_updates = a.max_updates;

  require_path(rc.src, "--src (or config data.src)");
  require_path(rc.tgt, "--tgt (or config data.tgt)");
  require_path(rc.vocab_src, "--vocab-src (or config data.vocab_src)");
  require_path(rc.vocab_tgt, "--vocab-tgt (or config data.vocab_tgt)");
  if (rc.max_updates < 1)
    throw UsageError("train needs a positive --max-updates (or config train.max_updates)");
  if (rc.dev_src.empty() != rc.dev_tgt.empty())
    throw UsageError("--dev-src and --dev-tgt must be given together");

  const Vocabulary vs = Vocabulary::load(rc.vocab_src);
  const Vocabulary vt = Vocabulary::load(rc.vocab_tgt);
  rc.model.src_vocab = static_cast<int32_t>(vs.size());
  rc.model.tgt_vocab = static_cast<int32_t>(vt.size());
  if (resuming && !rc.model.same_shapes(ck.model))
    throw DomainError("resume: requested model dimensions differ from the checkpoint");

  const auto train_pairs = load_pairs(rc.src, rc.tgt, vs, vt);

  DevScorer scorer;
  if (!rc.dev_src.empty()) {
    const auto dev_pairs = load_pairs(rc.dev_src, rc.dev_tgt, vs, vt);
    int32_t cap = rc.decode.max_len;
    if (cap < 1) {
      for (const auto& p : dev_pairs)
        cap = std::max(cap, 2 * static_cast<int32_t>(p.tgt.size() - 1) + 2);
      cap = std::max(cap, 4);
    }
    scorer = make_dev_scorer(dev_pairs, rc.model, cap);
  }

  TrainRunConfig tc;
  tc.model = rc.model;
  tc.opt = rc.opt;
  tc.max_updates = rc.max_updates;
  tc.seed = rc.seed;
  if (!rc.out.empty()) {
    const fs::path dir(rc.out);
    tc.best_path = (dir / "best.ckpt").string();
    tc.last_path = (dir / "last.ckpt").string();
    tc.log_path = (dir / "train_log.jsonl").string();
  }

  const TrainResult res = training_run(train_pairs, tc, scorer, resuming ? &ck : nullptr);

  if (rc.out.empty()) {
    // No output directory: the metrics log itself is the result.
    std::cout << res.log;
    return;
  }
  json summary;
  summary["steps"] = res.steps;
  summary["final_loss"] = res.final_loss;
  summary["best_dev"] = json();
  if (res.best_dev > real(-1e299)) summary["best_dev"] = res.best_dev;
  summary["last"] = tc.last_path;
  summary["log"] = tc.log_path;
  std::cout << summary.dump() << "\n";
}

void cmd_decode(const Args& a, const CLI::App& sub) {
  require_path(a.checkpoint, "--checkpoint");
  require_path(a.src, "--src");
  require_path(a.vocab_src, "--vocab-src");
  require_path(a.vocab_tgt, "--vocab-tgt");

  const Checkpoint ck = load_checkpoint(a.checkpoint);
  RunConfig rc;
  rc.model = ck.model;
  if (!a.config.empty()) apply_config_file(rc, a.config);
  if (!rc.model.same_shapes(ck.model))
    throw DomainError("decode: config model dimensions differ from the checkpoint");
  if (sub.count("--beam")) rc.decode.beam_size = a.beam;
  if (sub.count("--fixed-len")) rc.decode.fixed_len = a.fixed_len;
  if (sub.count("--max-len")) rc.decode.max_len = a.max_len;
  if (sub.count("--min-len")) rc.decode.min_len = a.min_len;
  if (sub.count("--suppress-unk")) rc.decode.suppress_unk = true;
  if (sub.count("--gate")) rc.model.gate_enabled = (a.gate == "on");

  const Vocabulary vs = Vocabulary::load(a.vocab_src);
  const Vocabulary vt = Vocabulary::load(a.vocab_tgt);
  check_vocab_size(vs, rc.model.src_vocab, "source");
  check_vocab_size(vt, rc.model.tgt_vocab, "target");

  const auto lines = read_token_lines(a.src);
  std::string out_text;
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto ns = normalize_tokens(lines[i]);
    if (ns.empty())
      throw DomainError(a.src + ": line " + std::to_string(i + 1) + " is empty");
    const auto ids = encode_sequence(ns, vs, Role::kSource);

    DecodeConfig d = rc.decode;
    if (d.fixed_len < 1 && d.max_len == 0)
      d.max_len = 2 * static_cast<int32_t>(ids.size()) + 4;

    std::vector<int32_t> out_ids;
    if (a.greedy) {
      out_ids = greedy_decode(ids, ck.params, rc.model, d);
    } else {
      const auto hyps = beam_decode(ids, ck.params, rc.model, d);
      if (!hyps.empty()) out_ids = hyps.front().ids;
    }
    out_text += join_tokens(decode_sequence(out_ids, vt));
    out_text += '\n';
  }

  if (a.out.empty())
    std::cout << out_text;
  else
    atomic_write_file(a.out, out_text);
}

void cmd_evaluate(const Args& a, const CLI::App& sub) {
  require_path(a.cand, "--cand");
  require_path(a.refs, "--refs");

  RunConfig rc;
  if (!a.config.empty()) apply_config_file(rc, a.config);
  if (sub.count("--mode")) rc.eval.mode = parse_mode(a.mode);
  if (sub.count("--byte-cap")) rc.eval.byte_cap = a.byte_cap;
  if (sub.count("--stem")) rc.eval.stemming = true;
  if (sub.count("--buckets")) rc.eval.bucket_width = a.buckets;

  rc.eval.rouge1 = rc.eval.rouge2 = rc.eval.rougeL = false;
  std::stringstream ms(a.metrics);
  std::string item;
  while (std::getline(ms, item, ',')) {
    if (item == "rouge1") rc.eval.rouge1 = true;
    else if (item == "rouge2") rc.eval.rouge2 = true;
    else if (item == "rougeL") rc.eval.rougeL = true;
    else if (!item.empty())
      throw UsageError("--metrics: unknown metric '" + item + "' (rouge1, rouge2, rougeL)");
  }
  if (!rc.eval.rouge1 && !rc.eval.rouge2 && !rc.eval.rougeL)
    throw UsageError("--metrics selected no metric");

  const auto cands = read_token_lines(a.cand);

  std::vector<std::string> ref_files;
  if (fs::is_directory(a.refs)) {
    for (int k = 0;; ++k) {
      const fs::path p = fs::path(a.refs) / ("ref" + std::to_string(k) + ".txt");
      if (!fs::exists(p)) break;
      ref_files.push_back(p.string());
    }
    if (ref_files.empty())
      throw DomainError(a.refs + ": no ref0.txt found in reference directory");
  } else {
    ref_files.push_back(a.refs);
  }

  std::vector<std::vector<std::vector<std::string>>> refs(cands.size());
  for (const auto& file : ref_files) {
    const auto lines = read_token_lines(file);
    if (lines.size() != cands.size())
      throw DomainError(file + " has " + std::to_string(lines.size()) + " lines but " + a.cand +
                        " has " + std::to_string(cands.size()));
    for (size_t i = 0; i < lines.size(); ++i) refs[i].push_back(lines[i]);
  }

  std::vector<size_t> lens;
  const std::vector<size_t>* lens_ptr = nullptr;
  if (!a.src.empty()) {
    const auto src_lines = read_token_lines(a.src);
    if (src_lines.size() != cands.size())
      throw DomainError(a.src + " has " + std::to_string(src_lines.size()) + " lines but " +
                        a.cand + " has " + std::to_string(cands.size()));
    for (const auto& l : src_lines) lens.push_back(l.size());
    lens_ptr = &lens;
  }
  if (rc.eval.bucket_width > 0 && lens_ptr == nullptr)
    throw UsageError("--buckets needs --src to supply source lengths");

  const CorpusReport report = score_corpus(cands, refs, rc.eval, lens_ptr);

  json rep;
  const auto triple = [](const RougeScore& s) {
    return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  };
  if (rc.eval.rouge1) rep["rouge1"] = triple(report.rouge1);
  if (rc.eval.rouge2) rep["rouge2"] = triple(report.rouge2);
  if (rc.eval.rougeL) rep["rougeL"] = triple(report.rougeL);
  const std::string rep_text = rep.dump(2) + "\n";
  std::cout << rep_text;
  if (!a.out.empty()) atomic_write_file(a.out, rep_text);

  if (rc.eval.bucket_width > 0) {
    std::string csv = "bucket_start,bucket_end,count,mean_rouge2_f1\n";
    for (const auto& b : report.buckets) {
      csv += std::to_string(b.start) + "," + std::to_string(b.end) + "," +
             std::to_string(b.count) + "," + fmt_real(b.mean_rouge2_f1) + "\n";
    }
    if (a.out_buckets.empty())
      std::cout << csv;
    else
      atomic_write_file(a.out_buckets, csv);
  }
}

void cmd_saliency(const Args& a) {
  require_path(a.checkpoint, "--checkpoint");
  require_path(a.src, "--src");
  require_path(a.tgt, "--tgt");
  require_path(a.vocab_src, "--vocab-src");
  require_path(a.vocab_tgt, "--vocab-tgt");
  require_path(a.out, "--out (output path prefix)");

  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const Vocabulary vs = Vocabulary::load(a.vocab_src);
  const Vocabulary vt = Vocabulary::load(a.vocab_tgt);
  check_vocab_size(vs, ck.model.src_vocab, "source");
  check_vocab_size(vt, ck.model.tgt_vocab, "target");

  const auto src = read_token_lines(a.src);
  const auto tgt = read_token_lines(a.tgt);
  if (src.size() != tgt.size())
    throw DomainError(a.src + " has " + std::to_string(src.size()) + " lines but " + a.tgt +
                      " has " + std::to_string(tgt.size()));

  json arr = json::array();
  std::string csv = "sentence,position,token,raw,normalized\n";
  for (size_t i = 0; i < src.size(); ++i) {
    const auto ns = normalize_tokens(src[i]);
    const auto nt = normalize_tokens(tgt[i]);
    if (ns.empty() || nt.empty())
      throw DomainError(a.src + ": pair at line " + std::to_string(i + 1) + " is empty");
    const auto src_ids = encode_sequence(ns, vs, Role::kSource);
    const auto tgt_ids = encode_sequence(nt, vt, Role::kTarget);
    const SaliencyMap map = saliency_map(src_ids, tgt_ids, ck.params, ck.model);

    arr.push_back({{"tokens", ns}, {"raw", map.raw}, {"normalized", map.normalized}});
    for (size_t pos = 0; pos < ns.size(); ++pos) {
      csv += std::to_string(i) + "," + std::to_string(pos) + "," + ns[pos] + "," +
             fmt_real(map.raw[pos]) + "," + fmt_real(map.normalized[pos]) + "\n";
    }
  }

  atomic_write_file(a.out + ".json", arr.dump(2) + "\n");
  atomic_write_file(a.out + ".csv", csv);

  json summary;
  summary["sentences"] = src.size();
  summary["json"] = a.out + ".json";
  summary["csv"] = a.out + ".csv";
  std::cout << summary.dump() << "\n";
}

}  // namespace

int run(int argc, char** argv) {
  Args a;
  CLI::App app{"selective-encoding sequence-to-sequence summarization toolkit"};
  app.name("seass");
  app.require_subcommand(1);

  const auto gate_values = CLI::IsMember({"on", "off"});
  const auto mode_values = CLI::IsMember({"f1", "recall"});

  CLI::App* pre = app.add_subcommand("preprocess",
                                     "Normalize a parallel corpus and build vocabularies");
  pre->add_option("--src", a.src, "source corpus, one sentence per line");
  pre->add_option("--tgt", a.tgt, "target corpus, line-aligned with --src");
  pre->add_option("--vocab-src", a.vocab_src, "output path for the source vocabulary");
  pre->add_option("--vocab-tgt", a.vocab_tgt, "output path for the target vocabulary");
  pre->add_option("--min-count", a.min_count, "minimum token frequency kept in a vocabulary");
  pre->add_option("--min-src-len", a.min_src_len, "drop pairs with fewer source tokens");
  pre->add_option("--out-src", a.out_src, "write the filtered source corpus here");
  pre->add_option("--out-tgt", a.out_tgt, "write the filtered target corpus here");

  CLI::App* gen = app.add_subcommand("gen-synth", "Generate a deterministic synthetic corpus");
  gen->add_option("--task", a.task, "corpus family")->check(CLI::IsMember({"copy", "selection"}));
  gen->add_option("--out", a.out, "output directory");
  gen->add_option("--seed", a.seed, "corpus seed");
  gen->add_option("--vocab", a.vocab, "copy task: alphabet size");
  gen->add_option("--salient", a.salient, "selection task: salient alphabet size");
  gen->add_option("--noise", a.noise, "selection task: noise alphabet size");
  gen->add_option("--rho", a.rho, "selection task: noise fraction of each source");
  gen->add_option("--len-min", a.len_min, "minimum source length");
  gen->add_option("--len-max", a.len_max, "maximum source length");
  gen->add_option("--train-n", a.train_n, "training pairs");
  gen->add_option("--dev-n", a.dev_n, "development pairs");
  gen->add_option("--test-n", a.test_n, "test pairs");

  CLI::App* tr = app.add_subcommand("train", "Train a model");
  tr->add_option("--src", a.src, "training source corpus");
  tr->add_option("--tgt", a.tgt, "training target corpus");
  tr->add_option("--dev-src", a.dev_src, "development source corpus");
  tr->add_option("--dev-tgt", a.dev_tgt, "development target corpus");
  tr->add_option("--vocab-src", a.vocab_src, "source vocabulary file");
  tr->add_option("--vocab-tgt", a.vocab_tgt, "target vocabulary file");
  tr->add_option("--config", a.config, "JSON config with flat dotted keys");
  tr->add_option("--checkpoint", a.checkpoint, "resume from this checkpoint");
  tr->add_option("--out", a.out, "directory for checkpoints and the metrics log");
  tr->add_option("--seed", a.seed, "training seed");
  tr->add_option("--max-updates", a.max_updates, "number of optimizer updates to run");
  tr->add_option("--gate", a.gate, "selective gate; off trains the plain attention baseline")
      ->check(gate_values);

  CLI::App* de = app.add_subcommand("decode", "Decode source sentences with a trained model");
  de->add_option("--src", a.src, "source sentences to decode");
  de->add_option("--vocab-src", a.vocab_src, "source vocabulary file");
  de->add_option("--vocab-tgt", a.vocab_tgt, "target vocabulary file");
  de->add_option("--config", a.config, "JSON config with flat dotted keys");
  de->add_option("--checkpoint", a.checkpoint, "model checkpoint");
  de->add_option("--out", a.out, "output file; stdout when omitted");
  de->add_option("--beam", a.beam, "beam size");
  de->add_flag("--greedy", a.greedy, "greedy decoding instead of beam search");
  de->add_option("--fixed-len", a.fixed_len, "emit exactly this many words");
  de->add_option("--max-len", a.max_len, "maximum words per output");
  de->add_option("--min-len", a.min_len, "minimum words per output");
  de->add_flag("--suppress-unk", a.suppress_unk, "never emit the unknown-word token");
  de->add_option("--gate", a.gate, "override the checkpoint's selective-gate setting")
      ->check(gate_values);

  CLI::App* ev = app.add_subcommand("evaluate", "Score candidate summaries against references");
  ev->add_option("--cand", a.cand, "candidate summaries, one per line");
  ev->add_option("--refs", a.refs, "reference file, or a directory of ref0.txt..refK.txt");
  ev->add_option("--src", a.src, "source sentences (supplies lengths for --buckets)");
  ev->add_option("--config", a.config, "JSON config with flat dotted keys");
  ev->add_option("--metrics", a.metrics, "comma list from rouge1,rouge2,rougeL");
  ev->add_option("--mode", a.mode, "reference selection and report field")->check(mode_values);
  ev->add_option("--byte-cap", a.byte_cap, "truncate candidates to this many bytes");
  ev->add_flag("--stem", a.stem, "stem both sides before matching");
  ev->add_option("--buckets", a.buckets, "source-length bucket width for the rouge-2 table");
  ev->add_option("--out", a.out, "also write the JSON report here");
  ev->add_option("--out-buckets", a.out_buckets, "write the bucket CSV here");

  CLI::App* sa = app.add_subcommand("saliency", "Gate-gradient attribution for source tokens");
  sa->add_option("--src", a.src, "source sentences");
  sa->add_option("--tgt", a.tgt, "summaries to score, line-aligned with --src");
  sa->add_option("--vocab-src", a.vocab_src, "source vocabulary file");
  sa->add_option("--vocab-tgt", a.vocab_tgt, "target vocabulary file");
  sa->add_option("--checkpoint", a.checkpoint, "model checkpoint");
  sa->add_option("--out", a.out, "output path prefix (.json and .csv are appended)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (pre->parsed()) cmd_preprocess(a);
    else if (gen->parsed()) cmd_gen_synth(a, *gen);
    else if (tr->parsed()) cmd_train(a, *tr);
    else if (de->parsed()) cmd_decode(a, *de);
    else if (ev->parsed()) cmd_evaluate(a, *ev);
    else if (sa->parsed()) cmd_saliency(a);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace seass::cli
