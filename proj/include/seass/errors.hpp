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

#include <stdexcept>
#include <string>

namespace seass {

// Shape/dimension violations (matrix ops, weight wiring, manifest checks).
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid value-domain inputs (empty softmax input, bad ratios, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct VocabError : std::runtime_error {
  explicit VocabError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Loss evaluated to NaN/inf; carries enough context to locate the batch.
struct NonFiniteLossError : std::runtime_error {
  explicit NonFiniteLossError(const std::string& msg, long batch_index = -1)
      : std::runtime_error(msg), batch_index(batch_index) {}
  long batch_index;
};

// Checkpoint loading failures, kept distinct so callers can tell a foreign
// file from a truncated one from a shape drift.
struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};
struct CheckpointMagicError : CheckpointError {
  explicit CheckpointMagicError(const std::string& msg) : CheckpointError(msg) {}
};
struct CheckpointVersionError : CheckpointError {
  explicit CheckpointVersionError(const std::string& msg) : CheckpointError(msg) {}
};
struct CheckpointCorruptError : CheckpointError {
  explicit CheckpointCorruptError(const std::string& msg) : CheckpointError(msg) {}
};
struct CheckpointShapeError : CheckpointError {
  explicit CheckpointShapeError(const std::string& msg) : CheckpointError(msg) {}
};

}  // namespace seass
