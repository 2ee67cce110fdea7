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

#include <benchmark/benchmark.h>

#include "seqgan/autodiff.hpp"
#include "seqgan/captioner.hpp"
#include "seqgan/discriminator.hpp"
#include "seqgan/metrics.hpp"
#include "seqgan/training.hpp"

namespace seqgan {
namespace {

// Toy-task sizes: 4 crops of 16 features, vocabulary of 40, hidden 32.
constexpr std::size_t kCrops = 4;
constexpr std::size_t kFeatures = 16;
constexpr std::size_t kVocab = 40;

CaptionerConfig captioner_config() {
  CaptionerConfig c;
  c.vocab_size = kVocab;
  c.hidden_dim = 32;
  c.num_crops = kCrops;
  c.feature_dim = kFeatures;
  c.max_len = 10;
  return c;
}

DiscriminatorConfig discriminator_config(DiscriminatorKind kind) {
  DiscriminatorConfig c;
  c.kind = kind;
  c.vocab_size = kVocab;
  c.hidden_dim = 32;
  c.num_crops = kCrops;
  c.feature_dim = kFeatures;
  return c;
}

Tensor features(Rng& rng) { return uniform_tensor({kCrops, kFeatures}, 1.0, rng); }

const TokenSequence kCaption{{2, 7, 11, 3, 19, 5, 1}, true};

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = uniform_tensor({n, n}, 1.0, rng), b = uniform_tensor({n, n}, 1.0, rng);
  for (auto _ : state) {
    Tape t;
    const Var out = sum(matmul(t.leaf(a), t.leaf(b)));
    t.backward(out);
    benchmark::DoNotOptimize(out.value());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oNCubed);

void BM_DecodeStep(benchmark::State& state) {
  const Captioner g = Captioner::init(captioner_config(), 1);
  Rng rng(2);
  const Tensor f = features(rng);
  const DecoderState s0 = initial_decoder_state(g.config());
  for (auto _ : state) benchmark::DoNotOptimize(decode_step(g, s0, 0, f).logits);
}
BENCHMARK(BM_DecodeStep);

void BM_GreedyDecode(benchmark::State& state) {
  const Captioner g = Captioner::init(captioner_config(), 1);
  Rng rng(3);
  const Tensor f = features(rng);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_decode(g, f));
}
BENCHMARK(BM_GreedyDecode);

void BM_CoattScore(benchmark::State& state) {
  const Discriminator d = Discriminator::init(discriminator_config(DiscriminatorKind::kCoAttention), 1);
  Rng rng(4);
  const Tensor f = features(rng);
  for (auto _ : state) benchmark::DoNotOptimize(coatt_score(d, f, kCaption));
}
BENCHMARK(BM_CoattScore);

void BM_JointEmbScore(benchmark::State& state) {
  const Discriminator d = Discriminator::init(discriminator_config(DiscriminatorKind::kJointEmbedding), 1);
  Rng rng(5);
  const Tensor f = features(rng);
  for (auto _ : state) benchmark::DoNotOptimize(jointemb_score(d, f, kCaption));
}
BENCHMARK(BM_JointEmbScore);

void BM_CiderD(benchmark::State& state) {
  std::vector<std::vector<Words>> corpus;
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    std::vector<Words> refs;
    for (int r = 0; r < 5; ++r) {
      Words w;
      for (int k = 0; k < 8; ++k) w.push_back(2 + rng.below(kVocab - 2));
      refs.push_back(w);
    }
    corpus.push_back(refs);
  }
  const NGramIdf idf = NGramIdf::fit(corpus);
  const Words candidate(corpus[0][0].begin(), corpus[0][0].begin() + 6);
  for (auto _ : state) benchmark::DoNotOptimize(cider_d(candidate, corpus[0], idf));
}
BENCHMARK(BM_CiderD);

void BM_ScstGrad(benchmark::State& state) {
  const Captioner g = Captioner::init(captioner_config(), 1);
  const Discriminator d = Discriminator::init(discriminator_config(DiscriminatorKind::kCoAttention), 2);
  Rng rng(7);
  const Tensor f = features(rng);
  const RewardContext ctx{&d, nullptr, nullptr, RewardKind::kLogD, 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(scst_grad(g, f, ctx, rng).grad);
}
BENCHMARK(BM_ScstGrad);

void BM_GumbelStGrad(benchmark::State& state) {
  const Captioner g = Captioner::init(captioner_config(), 1);
  const Discriminator d = Discriminator::init(discriminator_config(DiscriminatorKind::kCoAttention), 2);
  Rng rng(8);
  const Tensor f = features(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gumbel_grad(g, d, f, rng, {GumbelMode::kStraightThrough, 0.5, 0.0, 0.0}).grad);
  }
}
BENCHMARK(BM_GumbelStGrad);

}  // namespace
}  // namespace seqgan

// The packaged benchmark_main archive carries LTO bytecode from another GCC.
BENCHMARK_MAIN();
