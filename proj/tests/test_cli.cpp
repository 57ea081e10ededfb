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

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "seass/cli.hpp"
#include "seass/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs the command-line entry point in-process with captured streams.
int run_cli(const std::vector<std::string>& args, std::string* out = nullptr,
            std::string* err = nullptr) {
  std::vector<std::string> full = {"seass"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : full) argv.push_back(s.data());

  std::ostringstream cap_out, cap_err;
  std::streambuf* old_out = std::cout.rdbuf(cap_out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(cap_err.rdbuf());
  int code = -1;
  try {
    code = seass::cli::run(static_cast<int>(argv.size()), argv.data());
  } catch (...) {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  if (out) *out = cap_out.str();
  if (err) *err = cap_err.str();
  return code;
}

// Fresh scratch directory per test, removed on scope exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

// Generates a small copy corpus plus a training config, then trains for
// `updates` steps into `out_dir`. Returns the config path.
std::string prepare_and_train(const Scratch& s, int updates, uint64_t seed,
                              const std::string& out_dir) {
  REQUIRE(run_cli({"gen-synth", "--task", "copy", "--out", s / "data", "--seed", "3", "--vocab",
                   "6", "--len-min", "2", "--len-max", "4", "--train-n", "12", "--dev-n", "4",
                   "--test-n", "4"}) == 0);
  json cfg;
  cfg["model.emb_dim"] = 4;
  cfg["model.enc_hidden"] = 3;
  cfg["model.dec_hidden"] = 4;
  cfg["model.attn_dim"] = 3;
  cfg["model.dropout"] = 0.0;
  cfg["train.alpha"] = 0.01;
  cfg["train.batch_size"] = 4;
  cfg["train.eval_every"] = 2;
  cfg["train.patience"] = 2;
  cfg["train.max_updates"] = updates;
  cfg["seed"] = seed;
  cfg["data.src"] = s / "data/train.src.txt";
  cfg["data.tgt"] = s / "data/train.tgt.txt";
  cfg["data.dev_src"] = s / "data/dev.src.txt";
  cfg["data.dev_tgt"] = s / "data/dev.tgt.txt";
  cfg["data.vocab_src"] = s / "data/vocab.src.txt";
  cfg["data.vocab_tgt"] = s / "data/vocab.tgt.txt";
  if (!out_dir.empty()) cfg["out.dir"] = out_dir;
  const std::string cfg_path = s / "cfg.json";
  seass::atomic_write_file(cfg_path, cfg.dump(2));
  return cfg_path;
}

}  // namespace

TEST_CASE("cli: argument errors exit 2, help exits 0") {
  std::string err;
  CHECK(run_cli({}, nullptr, &err) == 2);
  CHECK(err.find("Usage") != std::string::npos);
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({"train", "--help"}) == 0);
  CHECK(run_cli({"no-such-command"}) == 2);
  CHECK(run_cli({"decode", "--no-such-flag"}) == 2);
  CHECK(run_cli({"evaluate", "--cand", "x", "--refs", "y", "--mode", "bogus"}) == 2);
  // Missing required inputs are usage errors too.
  CHECK(run_cli({"preprocess", "--src", "only.txt"}) == 2);
  CHECK(run_cli({"decode", "--src", "x.txt"}) == 2);
}

TEST_CASE("cli: synthetic corpus generation writes a complete data directory") {
  const Scratch s("seass_cli_gen");
  std::string out;
  REQUIRE(run_cli({"gen-synth", "--task", "copy", "--out", s / "copy", "--seed", "7", "--vocab",
                   "12", "--len-min", "2", "--len-max", "5", "--train-n", "20", "--dev-n", "4",
                   "--test-n", "4"},
                  &out) == 0);
  const json summary = json::parse(out);
  CHECK(summary.at("task") == "copy");
  CHECK(summary.at("train") == 20);

  for (const char* name : {"train", "dev", "test"}) {
    CHECK(fs::exists(fs::path(s / "copy") / (std::string(name) + ".src.txt")));
    CHECK(fs::exists(fs::path(s / "copy") / (std::string(name) + ".tgt.txt")));
  }
  CHECK(count_lines(seass::read_file(s / "copy/train.src.txt")) == 20);
  CHECK(count_lines(seass::read_file(s / "copy/dev.src.txt")) == 4);
  // Specials plus the twelve alphabet tokens.
  CHECK(count_lines(seass::read_file(s / "copy/vocab.src.txt")) == 16);
  CHECK(count_lines(seass::read_file(s / "copy/vocab.tgt.txt")) == 16);

  const json spec = json::parse(seass::read_file(s / "copy/spec.json"));
  CHECK(spec.at("task") == "copy");
  CHECK(spec.at("seed") == 7);
  CHECK(spec.at("vocab") == 12);

  // Selection: disjoint source/target alphabets of the configured sizes.
  REQUIRE(run_cli({"gen-synth", "--task", "selection", "--out", s / "sel", "--salient", "6",
                   "--noise", "6", "--rho", "0.4", "--len-min", "4", "--len-max", "6",
                   "--train-n", "10", "--dev-n", "2", "--test-n", "2"}) == 0);
  CHECK(count_lines(seass::read_file(s / "sel/vocab.src.txt")) == 16);
  CHECK(count_lines(seass::read_file(s / "sel/vocab.tgt.txt")) == 10);

  // A rho that rounds every position to noise is rejected.
  CHECK(run_cli({"gen-synth", "--task", "selection", "--out", s / "bad", "--rho", "0.9",
                 "--len-min", "5", "--len-max", "5"}) == 1);
}

TEST_CASE("cli: preprocess filters pairs and builds vocabularies") {
  const Scratch s("seass_cli_pre");
  seass::atomic_write_file(s / "src.txt", "The Cat sat\nshort\nDog runs Fast\n");
  seass::atomic_write_file(s / "tgt.txt", "cat SAT\nx\ndog runs\n");

  std::string out;
  REQUIRE(run_cli({"preprocess", "--src", s / "src.txt", "--tgt", s / "tgt.txt", "--vocab-src",
                   s / "vs.txt", "--vocab-tgt", s / "vt.txt", "--min-src-len", "2", "--out-src",
                   s / "f.src.txt", "--out-tgt", s / "f.tgt.txt"},
                  &out) == 0);
  const json summary = json::parse(out);
  CHECK(summary.at("pairs_in") == 3);
  CHECK(summary.at("pairs_kept") == 2);  // "short" has one source token

  const std::string fsrc = seass::read_file(s / "f.src.txt");
  CHECK(fsrc == "the cat sat\ndog runs fast\n");
  const std::string vs = seass::read_file(s / "vs.txt");
  CHECK(vs.find("cat\n") != std::string::npos);
  CHECK(vs.find("Cat") == std::string::npos);  // normalized before counting

  // Paired output flags must come together.
  CHECK(run_cli({"preprocess", "--src", s / "src.txt", "--tgt", s / "tgt.txt", "--vocab-src",
                 s / "vs.txt", "--vocab-tgt", s / "vt.txt", "--out-src", s / "f.src.txt"}) == 2);
}

TEST_CASE("cli: evaluate reports the pinned metrics") {
  const Scratch s("seass_cli_eval");
  seass::atomic_write_file(s / "cand.txt", "wa wb wc\nwx wy\n");
  seass::atomic_write_file(s / "ref.txt", "wa wb wc\nwx wy\n");

  std::string out;
  REQUIRE(run_cli({"evaluate", "--cand", s / "cand.txt", "--refs", s / "ref.txt", "--out",
                   s / "rep.json"},
                  &out) == 0);
  const json rep = json::parse(seass::read_file(s / "rep.json"));
  CHECK(rep.at("rouge1").at("f1") == 1.0);
  CHECK(rep.at("rouge2").at("f1") == 1.0);
  CHECK(rep.at("rougeL").at("f1") == 1.0);
  CHECK(json::parse(out) == rep);  // stdout carries the same report

  // Metric selection prunes the report.
  REQUIRE(run_cli({"evaluate", "--cand", s / "cand.txt", "--refs", s / "ref.txt", "--metrics",
                   "rouge2"},
                  &out) == 0);
  const json only2 = json::parse(out);
  CHECK(only2.contains("rouge2"));
  CHECK_FALSE(only2.contains("rouge1"));
  CHECK(run_cli({"evaluate", "--cand", s / "cand.txt", "--refs", s / "ref.txt", "--metrics",
                 "bogus"}) == 2);

  // Multi-reference directory: ref0.txt, ref1.txt consecutively.
  fs::create_directories(fs::path(s / "refs"));
  seass::atomic_write_file(s / "refs/ref0.txt", "zz zz zz\nzz zz\n");
  seass::atomic_write_file(s / "refs/ref1.txt", "wa wb wc\nwx wy\n");
  REQUIRE(run_cli({"evaluate", "--cand", s / "cand.txt", "--refs", s / "refs"}, &out) == 0);
  CHECK(json::parse(out).at("rouge1").at("f1") == 1.0);  // best reference wins
  fs::create_directories(fs::path(s / "empty"));
  CHECK(run_cli({"evaluate", "--cand", s / "cand.txt", "--refs", s / "empty"}) == 1);

  // Buckets need source lengths; the CSV lands where asked.
  CHECK(run_cli({"evaluate", "--cand", s / "cand.txt", "--refs", s / "ref.txt", "--buckets",
                 "5"}) == 2);
  seass::atomic_write_file(s / "src.txt", "a b c\np q r s t u v\n");
  REQUIRE(run_cli({"evaluate", "--cand", s / "cand.txt", "--refs", s / "ref.txt", "--buckets",
                   "5", "--src", s / "src.txt", "--out-buckets", s / "buckets.csv"}) == 0);
  const std::string csv = seass::read_file(s / "buckets.csv");
  CHECK(csv.find("bucket_start,bucket_end,count,mean_rouge2_f1\n") == 0);
  CHECK(csv.find("0,5,1,") != std::string::npos);
  CHECK(csv.find("5,10,1,") != std::string::npos);
}

TEST_CASE("cli: training produces checkpoints and a metrics log") {
  const Scratch s("seass_cli_train");
  const std::string cfg = prepare_and_train(s, 4, 5, s / "run");
  std::string out;
  REQUIRE(run_cli({"train", "--config", cfg}, &out) == 0);

  const json summary = json::parse(out);
  CHECK(summary.at("steps") == 4);
  CHECK(fs::exists(s / "run/last.ckpt"));
  CHECK(fs::exists(s / "run/best.ckpt"));  // dev evaluations ran

  const std::string log = seass::read_file(s / "run/train_log.jsonl");
  REQUIRE(count_lines(log) == 4);
  std::istringstream is(log);
  std::string line;
  int64_t step = 0;
  while (std::getline(is, line)) {
    const json j = json::parse(line);
    ++step;
    CHECK(j.at("step") == step);
    CHECK(j.at("loss").is_number());
    CHECK(j.at("alpha").is_number());
    CHECK(j.at("dev_rouge2").is_null() == (step % 2 != 0));
  }

  // Flags override the config: fewer updates, different seed.
  std::string out_b;
  REQUIRE(run_cli({"train", "--config", cfg, "--max-updates", "2", "--seed", "6", "--out",
                   s / "run_b"},
                  &out_b) == 0);
  CHECK(json::parse(out_b).at("steps") == 2);
  const std::string log_b = seass::read_file(s / "run_b/train_log.jsonl");
  CHECK(count_lines(log_b) == 2);
  const double loss_a = json::parse(log.substr(0, log.find('\n'))).at("loss");
  const double loss_b = json::parse(log_b.substr(0, log_b.find('\n'))).at("loss");
  CHECK(loss_a != loss_b);  // different seed, different first loss

  // Without an output directory the metrics log itself goes to stdout.
  json no_dir = json::parse(seass::read_file(cfg));
  no_dir.erase("out.dir");
  seass::atomic_write_file(s / "cfg_stream.json", no_dir.dump(2));
  std::string streamed;
  REQUIRE(run_cli({"train", "--config", s / "cfg_stream.json", "--max-updates", "2"},
                  &streamed) == 0);
  REQUIRE(count_lines(streamed) == 2);
  CHECK(json::parse(streamed.substr(0, streamed.find('\n'))).contains("step"));

  // Resuming from the half checkpoint continues the step numbering.
  std::string resumed;
  REQUIRE(run_cli({"train", "--config", s / "cfg_stream.json", "--checkpoint",
                   s / "run_b/last.ckpt", "--seed", "6", "--max-updates", "4"},
                  &resumed) == 0);
  REQUIRE(count_lines(resumed) == 2);
  CHECK(json::parse(resumed.substr(0, resumed.find('\n'))).at("step") == 3);

  // Unknown config keys are runtime errors, not silent ignores.
  seass::atomic_write_file(s / "bad.json", "{\"model.emb\": 4}");
  CHECK(run_cli({"train", "--config", s / "bad.json"}) == 1);
  // A config without paths still needs its inputs.
  seass::atomic_write_file(s / "empty.json", "{}");
  CHECK(run_cli({"train", "--config", s / "empty.json"}) == 2);
}

TEST_CASE("cli: decode writes one line per source sentence") {
  const Scratch s("seass_cli_dec");
  const std::string cfg = prepare_and_train(s, 2, 5, s / "run");
  REQUIRE(run_cli({"train", "--config", cfg}) == 0);

  REQUIRE(run_cli({"decode", "--checkpoint", s / "run/last.ckpt", "--src",
                   s / "data/test.src.txt", "--vocab-src", s / "data/vocab.src.txt",
                   "--vocab-tgt", s / "data/vocab.tgt.txt", "--out", s / "hyp.txt", "--beam",
                   "2"}) == 0);
  CHECK(count_lines(seass::read_file(s / "hyp.txt")) == 4);

  std::string streamed;
  REQUIRE(run_cli({"decode", "--checkpoint", s / "run/last.ckpt", "--src",
                   s / "data/test.src.txt", "--vocab-src", s / "data/vocab.src.txt",
                   "--vocab-tgt", s / "data/vocab.tgt.txt", "--greedy", "--max-len", "3"},
                  &streamed) == 0);
  CHECK(count_lines(streamed) == 4);

  // A vocabulary that disagrees with the checkpoint is rejected.
  seass::atomic_write_file(s / "tiny_vocab.txt", "<pad>\n<s>\n</s>\n<unk>\nwa\n");
  CHECK(run_cli({"decode", "--checkpoint", s / "run/last.ckpt", "--src",
                 s / "data/test.src.txt", "--vocab-src", s / "tiny_vocab.txt", "--vocab-tgt",
                 s / "data/vocab.tgt.txt"}) == 1);
}

TEST_CASE("cli: saliency emits aligned json and csv attributions") {
  const Scratch s("seass_cli_sal");
  const std::string cfg = prepare_and_train(s, 2, 5, s / "run");
  REQUIRE(run_cli({"train", "--config", cfg}) == 0);

  std::string out;
  REQUIRE(run_cli({"saliency", "--checkpoint", s / "run/last.ckpt", "--src",
                   s / "data/test.src.txt", "--tgt", s / "data/test.tgt.txt", "--vocab-src",
                   s / "data/vocab.src.txt", "--vocab-tgt", s / "data/vocab.tgt.txt", "--out",
                   s / "sal"},
                  &out) == 0);
  CHECK(json::parse(out).at("sentences") == 4);

  const json arr = json::parse(seass::read_file(s / "sal.json"));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 4);
  for (const auto& row : arr) {
    const size_t n = row.at("tokens").size();
    CHECK(row.at("raw").size() == n);
    CHECK(row.at("normalized").size() == n);
  }
  const std::string csv = seass::read_file(s / "sal.csv");
  CHECK(csv.find("sentence,position,token,raw,normalized\n") == 0);

  CHECK(run_cli({"saliency", "--checkpoint", s / "run/last.ckpt", "--src",
                 s / "data/test.src.txt"}) == 2);
}
