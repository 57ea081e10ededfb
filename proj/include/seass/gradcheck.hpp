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

#include <functional>
#include <utility>
#include <vector>

#include "seass/matrix.hpp"

namespace seass {

struct GradCheckResult {
  real max_rel_err = 0;
  size_t worst_param = 0;
  size_t worst_elem = 0;
  real analytic = 0;
  real numeric = 0;
};

// Central-difference comparison of analytic gradients. Every element of
// every listed parameter is perturbed by +-eps through the live matrix the
// loss function reads, so the closure must recompute the loss from scratch
// on each call. Relative error uses a floor of 1e-3 in the denominator to
// keep near-zero gradient pairs from blowing up the ratio.
GradCheckResult gradient_check(const std::function<real()>& loss,
                               const std::vector<std::pair<Matrix*, const Matrix*>>& params,
                               real eps = real(1e-5));

}  // namespace seass
