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

#include "seass/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "seass/decode.hpp"
#include "seass/errors.hpp"
#include "seass/io.hpp"
#include "seass/rng.hpp"
#include "seass/rouge.hpp"

namespace seass {

using json = nlohmann::json;

void OptimizerConfig::validate() const {
  if (!(alpha > 0)) throw DomainError("optimizer config: alpha must be > 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
    throw DomainError("optimizer config: betas must be in [0,1)");
  if (!(clip > 0)) throw DomainError("optimizer config: clip range must be > 0");
  if (batch_size < 1) throw DomainError("optimizer config: batch_size must be >= 1");
  if (patience < 1) throw DomainError("optimizer config: patience must be >= 1");
}

TrainState TrainState::fresh(const ModelConfig& cfg, const OptimizerConfig& opt) {
  const ModelParams shapes = ModelParams::zeros(cfg);
  TrainState st;
  st.alpha = opt.alpha;
  st.m.resize(ModelParams::kArrayCount);
  st.v.resize(ModelParams::kArrayCount);
  for (size_t i = 0; i < ModelParams::kArrayCount; ++i) {
    const Matrix& a = shapes.array(i);
    st.m[i] = Matrix(a.rows(), a.cols());
    st.v[i] = Matrix(a.rows(), a.cols());
  }
  return st;
}

void clip_gradients(std::vector<Matrix>& grads, real range) {
  if (!(range > 0)) throw DomainError("clip_gradients: range must be > 0");
  for (Matrix& g : grads)
    for (size_t i = 0; i < g.size(); ++i) g[i] = std::clamp(g[i], -range, range);
}

void adam_update(ModelParams& params, TrainState& state, const std::vector<Matrix>& grads,
                 const OptimizerConfig& opt) {
  if (grads.size() != ModelParams::kArrayCount)
    throw ShapeError("adam_update: wrong gradient count");
  state.step += 1;
  const real bc1 = real(1) - (real)std::pow((double)opt.beta1, (double)state.step);
  const real bc2 = real(1) - (real)std::pow((double)opt.beta2, (double)state.step);
  for (size_t k = 0; k < ModelParams::kArrayCount; ++k) {
    Matrix& theta = params.array(k);
    Matrix& m = state.m[k];
    Matrix& v = state.v[k];
    const Matrix& g = grads[k];
    if (!theta.same_shape(g)) throw ShapeError("adam_update: gradient shape mismatch");
    for (size_t i = 0; i < theta.size(); ++i) {
      m[i] = opt.beta1 * m[i] + (real(1) - opt.beta1) * g[i];
      v[i] = opt.beta2 * v[i] + (real(1) - opt.beta2) * g[i] * g[i];
      const real mhat = m[i] / bc1;
      const real vhat = v[i] / bc2;
      theta[i] -= state.alpha * mhat / (std::sqrt(vhat) + opt.eps);
    }
    if (!theta.all_finite())
      throw DomainError(std::string("adam_update: non-finite values in ") +
                        ModelParams::array_name(k));
  }
}

bool schedule_update(TrainState& state, real score, int32_t patience) {
  if (score > state.best_dev) {
    state.best_dev = score;
    state.drop_count = 0;
    return true;
  }
  if (score < state.best_dev) {
    if (++state.drop_count >= patience) {
      state.alpha /= 2;
      state.drop_count = 0;
    }
  } else {
    state.drop_count = 0;
  }
  return false;
}

// ---- checkpoint format -------------------------------------------------
//
//   magic "SEASSCKPT" | version int32 LE | manifest length uint64 LE |
//   manifest JSON | raw arrays, little-endian, in manifest order
//
// The manifest records config, schedule state, dtype, and per-array
// (name, rows, cols, offset) with offsets relative to the data section.

namespace {

constexpr char kMagic[9] = {'S', 'E', 'A', 'S', 'S', 'C', 'K', 'P', 'T'};
constexpr int32_t kVersion = 1;

const char* dtype_name() { return sizeof(real) == 8 ? "f64" : "f32"; }

void append_le(std::string& out, const void* p, size_t n) {
  // serialized layout is little-endian, matching every platform this
  // builds on; a byte-swapping port would go here
  out.append((const char*)p, n);
}

json model_config_json(const ModelConfig& c) {
  return json{{"emb_dim", c.emb_dim},     {"enc_hidden", c.enc_hidden},
              {"dec_hidden", c.dec_hidden}, {"attn_dim", c.attn_dim},
              {"src_vocab", c.src_vocab}, {"tgt_vocab", c.tgt_vocab},
              {"dropout", c.dropout},     {"gate_enabled", c.gate_enabled}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.emb_dim = j.at("emb_dim");
  c.enc_hidden = j.at("enc_hidden");
  c.dec_hidden = j.at("dec_hidden");
  c.attn_dim = j.at("attn_dim");
  c.src_vocab = j.at("src_vocab");
  c.tgt_vocab = j.at("tgt_vocab");
  c.dropout = j.at("dropout");
  c.gate_enabled = j.at("gate_enabled");
  return c;
}

json opt_config_json(const OptimizerConfig& o) {
  return json{{"alpha", o.alpha},           {"beta1", o.beta1},   {"beta2", o.beta2},
              {"eps", o.eps},               {"clip", o.clip},     {"batch_size", o.batch_size},
              {"eval_every", o.eval_every}, {"patience", o.patience}};
}

OptimizerConfig opt_config_from_json(const json& j) {
  OptimizerConfig o;
  o.alpha = j.at("alpha");
  o.beta1 = j.at("beta1");
  o.beta2 = j.at("beta2");
  o.eps = j.at("eps");
  o.clip = j.at("clip");
  o.batch_size = j.at("batch_size");
  o.eval_every = j.at("eval_every");
  o.patience = j.at("patience");
  return o;
}

struct ArrayRef {
  std::string name;
  const Matrix* m;
};

std::vector<ArrayRef> checkpoint_arrays(const Checkpoint& c) {
  std::vector<ArrayRef> out;
  for (size_t i = 0; i < ModelParams::kArrayCount; ++i)
    out.push_back({ModelParams::array_name(i), &c.params.array(i)});
  for (size_t i = 0; i < ModelParams::kArrayCount; ++i)
    out.push_back({std::string("m.") + ModelParams::array_name(i), &c.state.m[i]});
  for (size_t i = 0; i < ModelParams::kArrayCount; ++i)
    out.push_back({std::string("v.") + ModelParams::array_name(i), &c.state.v[i]});
  return out;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const auto arrays = checkpoint_arrays(ckpt);

  json manifest;
  manifest["dtype"] = dtype_name();
  manifest["config"] = {{"model", model_config_json(ckpt.model)},
                        {"opt", opt_config_json(ckpt.opt)}};
  manifest["state"] = {{"step", ckpt.state.step},
                       {"alpha", ckpt.state.alpha},
                       {"drop_count", ckpt.state.drop_count},
                       {"best_dev", ckpt.state.best_dev},
                       {"seed", ckpt.seed}};
  json arr = json::array();
  uint64_t offset = 0;
  for (const auto& a : arrays) {
    arr.push_back({{"name", a.name},
                   {"rows", a.m->rows()},
                   {"cols", a.m->cols()},
                   {"offset", offset}});
    offset += a.m->size() * sizeof(real);
  }
  manifest["arrays"] = arr;
  const std::string mstr = manifest.dump();

  std::string out;
  out.reserve(sizeof(kMagic) + 4 + 8 + mstr.size() + offset);
  out.append(kMagic, sizeof(kMagic));
  append_le(out, &kVersion, 4);
  const uint64_t mlen = mstr.size();
  append_le(out, &mlen, 8);
  out += mstr;
  for (const auto& a : arrays) append_le(out, a.m->data(), a.m->size() * sizeof(real));
  atomic_write_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path, const ModelConfig* expected) {
  const std::string raw = read_file(path);
  if (raw.size() < sizeof(kMagic) + 12) throw CheckpointCorruptError(path + ": truncated header");
  if (std::memcmp(raw.data(), kMagic, sizeof(kMagic)) != 0)
    throw CheckpointMagicError(path + ": not a checkpoint file");
  int32_t version;
  std::memcpy(&version, raw.data() + sizeof(kMagic), 4);
  if (version != kVersion)
    throw CheckpointVersionError(path + ": format version " + std::to_string(version) +
                                 ", expected " + std::to_string(kVersion));
  uint64_t mlen;
  std::memcpy(&mlen, raw.data() + sizeof(kMagic) + 4, 8);
  const size_t data_start = sizeof(kMagic) + 12 + mlen;
  if (data_start > raw.size()) throw CheckpointCorruptError(path + ": truncated manifest");

  json manifest;
  try {
    manifest = json::parse(raw.substr(sizeof(kMagic) + 12, mlen));
  } catch (const json::exception& e) {
    throw CheckpointCorruptError(path + ": bad manifest: " + e.what());
  }

  Checkpoint c;
  try {
    if (manifest.at("dtype") != dtype_name())
      throw CheckpointVersionError(path + ": dtype " +
                                   manifest.at("dtype").get<std::string>() +
                                   " does not match this build (" + dtype_name() + ")");
    c.model = model_config_from_json(manifest.at("config").at("model"));
    c.opt = opt_config_from_json(manifest.at("config").at("opt"));
    const json& st = manifest.at("state");
    c.state.step = st.at("step");
    c.state.alpha = st.at("alpha");
    c.state.drop_count = st.at("drop_count");
    c.state.best_dev = st.at("best_dev");
    c.seed = st.at("seed");
  } catch (const json::exception& e) {
    throw CheckpointCorruptError(path + ": bad manifest: " + e.what());
  }

  c.params = ModelParams::zeros(c.model);
  c.state.m.resize(ModelParams::kArrayCount);
  c.state.v.resize(ModelParams::kArrayCount);

  const json& arr = manifest.at("arrays");
  if (arr.size() != 3 * ModelParams::kArrayCount)
    throw CheckpointCorruptError(path + ": manifest lists " + std::to_string(arr.size()) +
                                 " arrays, expected " +
                                 std::to_string(3 * ModelParams::kArrayCount));

  const ModelParams want = expected ? ModelParams::zeros(*expected) : ModelParams();
  for (size_t idx = 0; idx < arr.size(); ++idx) {
    const json& e = arr[idx];
    const std::string name = e.at("name");
    const size_t rows = e.at("rows"), cols = e.at("cols");
    const uint64_t offset = e.at("offset");

    const size_t k = idx % ModelParams::kArrayCount;
    const std::string expect_name =
        idx < ModelParams::kArrayCount
            ? std::string(ModelParams::array_name(k))
            : (idx < 2 * ModelParams::kArrayCount ? "m." : "v.") + std::string(
                  ModelParams::array_name(k));
    if (name != expect_name)
      throw CheckpointCorruptError(path + ": array " + std::to_string(idx) + " is '" + name +
                                   "', expected '" + expect_name + "'");

    Matrix& dst = idx < ModelParams::kArrayCount
                      ? c.params.array(k)
                      : (idx < 2 * ModelParams::kArrayCount ? c.state.m[k] : c.state.v[k]);
    if (idx < ModelParams::kArrayCount) {
      if (expected && (want.array(k).rows() != rows || want.array(k).cols() != cols))
        throw CheckpointShapeError(path + ": array '" + name + "' is " + std::to_string(rows) +
                                   "x" + std::to_string(cols) + ", expected " +
                                   std::to_string(want.array(k).rows()) + "x" +
                                   std::to_string(want.array(k).cols()));
      if (dst.rows() != rows || dst.cols() != cols)
        throw CheckpointCorruptError(path + ": array '" + name +
                                     "' shape disagrees with the stored config");
    } else {
      dst = Matrix(rows, cols);
      const size_t pk = idx % ModelParams::kArrayCount;
      if (!dst.same_shape(c.params.array(pk)))
        throw CheckpointCorruptError(path + ": moment '" + name +
                                     "' shape disagrees with its parameter");
    }
    const uint64_t bytes = (uint64_t)rows * cols * sizeof(real);
    if (data_start + offset + bytes > raw.size())
      throw CheckpointCorruptError(path + ": truncated data for array '" + name + "'");
    std::memcpy(dst.data(), raw.data() + data_start + offset, bytes);
  }
  return c;
}

DevScorer make_dev_scorer(const std::vector<TokenPair>& dev_pairs, const ModelConfig& cfg,
                          int32_t max_len) {
  std::vector<std::vector<int32_t>> refs;
  refs.reserve(dev_pairs.size());
  for (const auto& p : dev_pairs) {
    std::vector<int32_t> r = p.tgt;
    while (!r.empty() && r.back() == kEos) r.pop_back();
    refs.push_back(std::move(r));
  }
  return [dev_pairs, refs, cfg, max_len](const ModelParams& params, int64_t) {
    DecodeConfig dc;
    dc.beam_size = 1;
    dc.max_len = max_len;
    real total = 0;
    for (size_t i = 0; i < dev_pairs.size(); ++i) {
      const auto hyp = greedy_decode(dev_pairs[i].src, params, cfg, dc);
      total += rouge_n_ids(hyp, refs[i], 2).f1;
    }
    return dev_pairs.empty() ? real(0) : total / (real)dev_pairs.size();
  };
}

TrainResult training_run(const std::vector<TokenPair>& train_pairs, const TrainRunConfig& cfg,
                         const DevScorer& dev_scorer, const Checkpoint* resume) {
  if (train_pairs.empty()) throw DomainError("training_run: empty corpus");
  cfg.model.validate();
  cfg.opt.validate();

  ModelParams params = resume ? resume->params : ModelParams::init(cfg.model, cfg.seed);
  TrainState state = resume ? resume->state : TrainState::fresh(cfg.model, cfg.opt);
  if (resume && !resume->model.same_shapes(cfg.model))
    throw CheckpointShapeError("resume checkpoint does not match the run's model config");

  const size_t bpe = (train_pairs.size() + cfg.opt.batch_size - 1) / cfg.opt.batch_size;
  std::vector<Batch> batches;
  int64_t cached_epoch = -1;

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res;
  res.log.reserve(1024);
  std::vector<Matrix> grads;

  const auto save = [&](const std::string& path) {
    if (path.empty()) return;
    Checkpoint c;
    c.model = cfg.model;
    c.opt = cfg.opt;
    c.params = params;
    c.state = state;
    c.seed = cfg.seed;
    save_checkpoint(c, path);
  };

  while (state.step < cfg.max_updates) {
    const int64_t step = state.step;  // 0-based position of this update
    const int64_t epoch = step / (int64_t)bpe;
    if (epoch != cached_epoch) {
      batches = make_batches(train_pairs, (size_t)cfg.opt.batch_size,
                             derive_seed(cfg.seed, 2, (uint64_t)epoch));
      cached_epoch = epoch;
    }
    const Batch& batch = batches[(size_t)(step % (int64_t)bpe)];
    std::vector<std::vector<int32_t>> srcs(batch.size), tgts(batch.size);
    for (size_t i = 0; i < batch.size; ++i) {
      srcs[i] = batch.src_row(i);
      tgts[i] = batch.tgt_row(i);
    }

    real loss;
    try {
      loss = batch_loss_and_grads(srcs, tgts, params, cfg.model, true,
                                  derive_seed(cfg.seed, 4, (uint64_t)step), grads);
    } catch (const NonFiniteLossError& e) {
      throw NonFiniteLossError(std::string(e.what()) + " at update " + std::to_string(step + 1),
                               e.batch_index);
    }
    clip_gradients(grads, cfg.opt.clip);
    adam_update(params, state, grads, cfg.opt);
    res.final_loss = loss;

    json line;
    line["step"] = state.step;
    line["loss"] = loss;
    line["dev_rouge2"] = nullptr;
    if (dev_scorer && cfg.opt.eval_every > 0 && state.step % cfg.opt.eval_every == 0) {
      const real score = dev_scorer(params, state.step);
      line["dev_rouge2"] = score;
      if (schedule_update(state, score, cfg.opt.patience)) save(cfg.best_path);
    }
    line["alpha"] = state.alpha;
    line["wall"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.log += line.dump();
    res.log.push_back('\n');
  }

  save(cfg.last_path);
  if (!cfg.log_path.empty()) atomic_write_file(cfg.log_path, res.log);
  res.steps = state.step;
  res.best_dev = state.best_dev;
  return res;
}

}  // namespace seass
