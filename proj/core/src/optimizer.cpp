// Copyright 2026 The seqgan Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqgan/optimizer.hpp"

#include <cmath>

namespace seqgan {

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state, double learning_rate,
               const AdamOptions& options) {
  params.check_compatible(grads);
  if (state.step == 0 && state.first_moment.size() == 0) {
    state.first_moment = params.zeros_like();
    state.second_moment = params.zeros_like();
  }
  params.check_compatible(state.first_moment);
  params.check_compatible(state.second_moment);

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  auto& p = params.entries();
  const auto& g = grads.entries();
  auto& m = state.first_moment.entries();
  auto& v = state.second_moment.entries();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p[i].value.size(); ++j) {
      const double gj = g[i].value[j];
      m[i].value[j] = options.beta1 * m[i].value[j] + (1.0 - options.beta1) * gj;
      v[i].value[j] = options.beta2 * v[i].value[j] + (1.0 - options.beta2) * gj * gj;
      const double m_hat = m[i].value[j] / correction1;
      const double v_hat = v[i].value[j] / correction2;
      p[i].value[j] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

}  // namespace seqgan
