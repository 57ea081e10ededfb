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
#include <functional>
#include <string>
#include <vector>

#include "seass/model.hpp"
#include "seass/text.hpp"

namespace seass {

struct OptimizerConfig {
  real alpha = real(0.001);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real eps = real(1e-8);
  real clip = real(5.0);
  int32_t batch_size = 64;
  int64_t eval_every = 2000;
  int32_t patience = 12;

  void validate() const;
};

struct TrainState {
  int64_t step = 0;
  std::vector<Matrix> m, v;  // Adam moments, ModelParams array order
  real alpha = 0;
  int32_t drop_count = 0;         // consecutive below-best dev evaluations
  real best_dev = real(-1e300);  // sentinel: no evaluation seen yet

  static TrainState fresh(const ModelConfig& cfg, const OptimizerConfig& opt);
};

void clip_gradients(std::vector<Matrix>& grads, real range);
void adam_update(ModelParams& params, TrainState& state, const std::vector<Matrix>& grads,
                 const OptimizerConfig& opt);

// Learning-rate schedule bookkeeping for one dev evaluation: a new best
// resets the drop counter, `patience` consecutive scores below the best
// halve alpha (then the counter resets), a score equal to the best breaks
// the streak. Returns true on a new best.
bool schedule_update(TrainState& state, real score, int32_t patience);

struct Checkpoint {
  ModelConfig model;
  OptimizerConfig opt;
  ModelParams params;
  TrainState state;
  uint64_t seed = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
// With `expected`, array shapes must match that config exactly; the error
// names the first offending array.
Checkpoint load_checkpoint(const std::string& path, const ModelConfig* expected = nullptr);

using DevScorer = std::function<real(const ModelParams& params, int64_t step)>;

// Greedy-decodes every dev source and scores bigram-overlap F1 against the
// gold targets (EOS stripped).
DevScorer make_dev_scorer(const std::vector<TokenPair>& dev_pairs, const ModelConfig& cfg,
                          int32_t max_len);

struct TrainRunConfig {
  ModelConfig model;
  OptimizerConfig opt;
  int64_t max_updates = 0;
  uint64_t seed = 0;
  std::string best_path;  // best-dev checkpoint; empty = skip
  std::string last_path;  // end-of-run checkpoint; empty = skip
  std::string log_path;   // metrics log; empty = skip
};

struct TrainResult {
  int64_t steps = 0;
  real final_loss = 0;
  real best_dev = real(-1e300);
  std::string log;  // one JSON object per line: step, loss, dev_rouge2, alpha, wall
};

// Runs max_updates optimization steps (continuing from `resume` when
// given). A null dev_scorer skips evaluation entirely. Everything except
// the wall field is a pure function of the data, the config, and the seed.
TrainResult training_run(const std::vector<TokenPair>& train_pairs, const TrainRunConfig& cfg,
                         const DevScorer& dev_scorer, const Checkpoint* resume = nullptr);

}  // namespace seass
