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

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "seqgan/captioner.hpp"
#include "seqgan/params.hpp"

namespace seqgan::testing {

// Exhaustive view of a small captioner's output distribution. Only usable
// when K^T_max is tiny; a K=4, T_max=3 model has 15 reachable sequences since
// BOS is never emitted.
struct WeightedSequence {
  TokenSequence sequence;
  double probability = 0.0;
};

std::vector<WeightedSequence> enumerate_sequences(const Captioner& g, const Tensor& features);

using SequenceReward = std::function<double(const TokenSequence&)>;

struct ScstOracle {
  ParamSet expected_scst;   // sum_s p(s) (r(s) - r(greedy)) grad log p(s)
  ParamSet exact_gradient;  // tape gradient of sum_s p(s) r(s)
  double total_probability = 0.0;
  std::size_t sequences = 0;
};

ScstOracle scst_oracle(const Captioner& g, const Tensor& features, const SequenceReward& reward);

// Mean over parameter components of the exact per-component variance of the
// single-sample estimators, with and without the greedy baseline.
struct EstimatorVariance {
  double scst = 0.0;
  double reinforce = 0.0;
};

EstimatorVariance estimator_variance(const Captioner& g, const Tensor& features,
                                     const SequenceReward& reward);

}  // namespace seqgan::testing
