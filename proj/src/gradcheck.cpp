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

#include "seass/gradcheck.hpp"

#include <cmath>

#include "seass/errors.hpp"

namespace seass {

GradCheckResult gradient_check(const std::function<real()>& loss,
                               const std::vector<std::pair<Matrix*, const Matrix*>>& params,
                               real eps) {
  GradCheckResult res;
  for (size_t p = 0; p < params.size(); ++p) {
    Matrix& m = *params[p].first;
    const Matrix& analytic = *params[p].second;
    if (!m.same_shape(analytic)) throw ShapeError("gradient_check: gradient shape mismatch");
    for (size_t i = 0; i < m.size(); ++i) {
      const real orig = m[i];
      m[i] = orig + eps;
      const real lp = loss();
      m[i] = orig - eps;
      const real lm = loss();
      m[i] = orig;
      if (!std::isfinite(lp) || !std::isfinite(lm))
        throw DomainError("gradient_check: non-finite loss during perturbation");
      const real num = (lp - lm) / (2 * eps);
      const real ana = analytic[i];
      const real denom = std::max({std::abs(ana), std::abs(num), real(1e-3)});
      const real rel = std::abs(ana - num) / denom;
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_param = p;
        res.worst_elem = i;
        res.analytic = ana;
        res.numeric = num;
      }
    }
  }
  return res;
}

}  // namespace seass
