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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "seqgan/autodiff.hpp"
#include "seqgan/captioner.hpp"
#include "seqgan/dataset.hpp"
#include "seqgan/discriminator.hpp"
#include "seqgan/metrics.hpp"
#include "seqgan/optimizer.hpp"
#include "seqgan/params.hpp"
#include "seqgan/rng.hpp"

namespace seqgan {

enum class Estimator { kScst, kGumbelSoft, kGumbelSt };
enum class RewardKind {
  kLogD,          // log D(I, w)
  kLogDPlusCider, // log D(I, w) + cider_weight * CIDEr(w)
  kCider,         // CIDEr(w) alone; the non-adversarial RL baseline
};
enum class GumbelMode { kSoft, kStraightThrough };

std::string to_string(Estimator e);
std::string to_string(RewardKind r);
Estimator estimator_from_string(const std::string& name);
RewardKind reward_from_string(const std::string& name);

// Clamp applied to discriminator scores before any log.
inline constexpr double kScoreEpsilon = 1e-7;

struct GanConfig {
  Estimator estimator = Estimator::kScst;
  RewardKind reward = RewardKind::kLogD;
  double cider_weight = 5.0;
  double temperature = 0.5;
  // Feature matching is active when either weight is positive.
  double fm_image_weight = 1.0;
  double fm_sentence_weight = 1.0;
  double generator_lr = 1e-3;
  double discriminator_lr = 1e-3;
  std::size_t batch_size = 8;
  std::size_t epochs = 1;
  std::size_t d_pretrain_epochs = 0;
  std::uint64_t seed = 0;

  // Throws ParameterError on an invalid combination.
  void validate() const;
  bool feature_matching() const { return fm_image_weight > 0.0 || fm_sentence_weight > 0.0; }

  friend bool operator==(const GanConfig&, const GanConfig&) = default;
};

struct CeConfig {
  std::size_t epochs = 1;
  double lr = 5e-3;
  std::size_t batch_size = 8;

  void validate() const;

  friend bool operator==(const CeConfig&, const CeConfig&) = default;
};

struct RewardRecord {
  double sample_reward = 0.0;
  double baseline_reward = 0.0;
  double advantage = 0.0;  // sample_reward - baseline_reward
};

// ---- Discriminator objective ----------------------------------------------

struct DiscriminatorObjective {
  Var value;  // log D(real) + 1/2 log(1 - D(fake)) + 1/2 log(1 - D(mismatched))
  double real_score = 0.0;
  double fake_score = 0.0;
  double mismatched_score = 0.0;
  bool clamped = false;  // some score fell outside [eps, 1 - eps]
};

DiscriminatorObjective discriminator_objective(DiscriminatorGraph& graph,
                                               const Tensor& image_features,
                                               const TokenSequence& real,
                                               const TokenSequence& fake,
                                               const TokenSequence& mismatched);

struct DiscriminatorLoss {
  double value = 0.0;
  bool clamped = false;
};

// Value of the objective above; the trainer ascends it.
DiscriminatorLoss discriminator_loss(const Discriminator& d, const Tensor& image_features,
                                     const TokenSequence& real, const TokenSequence& fake,
                                     const TokenSequence& mismatched);

// ---- Generator gradients ---------------------------------------------------
//
// All generator gradients below are gradients of an objective to *maximize*.

struct GeneratorGradient {
  ParamSet grad;
  double objective = 0.0;
  // d(objective)/d(logits), one 1 x K row per decoding step.
  std::vector<Tensor> logit_grads;
  RewardRecord reward;
};

// L2 norm over all steps of logit_grads.
double logit_grad_norm(const GeneratorGradient& g);

// Scalar reward of a finished caption for one image.
struct RewardContext {
  const Discriminator* discriminator = nullptr;  // required for log(D) rewards
  const std::vector<TokenSequence>* references = nullptr;  // required for CIDEr rewards
  const NGramIdf* idf = nullptr;
  RewardKind kind = RewardKind::kLogD;
  double cider_weight = 5.0;
};

double sequence_reward(const RewardContext& ctx, const Tensor& image_features,
                       const TokenSequence& seq);

// Gradient of weight * log p(seq | image).
GeneratorGradient reinforce_gradient(const Captioner& g, const Tensor& image_features,
                                     const TokenSequence& seq, double weight);

// SCST with a given sample and a greedy baseline: (r(sample) - r(baseline)) *
// grad log p(sample). `reward` maps a caption to its scalar reward.
GeneratorGradient scst_gradient_for(const Captioner& g, const Tensor& image_features,
                                    const TokenSequence& sample, const TokenSequence& baseline,
                                    const std::function<double(const TokenSequence&)>& reward);

// One sample per image, greedy baseline.
GeneratorGradient scst_grad(const Captioner& g, const Tensor& image_features,
                            const RewardContext& ctx, Rng& rng);

struct GumbelSample {
  Tensor soft;          // 1 x K relaxed sample
  std::size_t hard = 0; // argmax of the relaxed sample
  Tensor forward;       // value fed forward: soft, or one-hot(hard) in ST mode
};

// y = softmax((logits + g) / tau) with g ~ Gumbel(0, 1).
GumbelSample gumbel_sample(const Tensor& logits, double temperature, Rng& rng, GumbelMode mode);

// Tape version. In ST mode the forward value is one-hot and the backward pass
// treats the one-hot as identity in the soft sample. `hard` receives the argmax.
Var gumbel_relax(Var logits, double temperature, Rng& rng, GumbelMode mode, std::size_t* hard);

struct GumbelOptions {
  GumbelMode mode = GumbelMode::kSoft;
  double temperature = 0.5;
  double fm_image_weight = 0.0;
  double fm_sentence_weight = 0.0;
};

// Unrolls the decoder on its own relaxed samples, scores them with D, and
// differentiates log D(I, y) - fm penalties. `ground_truth` is required when
// a feature-matching weight is positive.
GeneratorGradient gumbel_grad(const Captioner& g, const Discriminator& d,
                              const Tensor& image_features, Rng& rng, const GumbelOptions& options,
                              const TokenSequence* ground_truth = nullptr);

// ---- Cross-entropy ---------------------------------------------------------

// Mean per-token negative log-likelihood and its gradient (to be minimized).
struct CeGradient {
  ParamSet grad;
  double loss = 0.0;
  std::size_t tokens = 0;
};

CeGradient ce_gradient(const Captioner& g, const Tensor& image_features, const TokenSequence& seq);

// One pass over `examples` in shuffled minibatches; one random reference per
// image per visit. Returns the mean per-token loss over the epoch.
double ce_epoch(Captioner& g, AdamState& adam, const std::vector<Example>& examples,
                const CeConfig& cfg, Rng& rng);

// Per-epoch mean losses. epochs == 0 leaves the params unchanged.
std::vector<double> ce_pretrain(Captioner& g, const std::vector<Example>& examples,
                                const CeConfig& cfg, Rng& rng);

// ---- Adversarial training --------------------------------------------------

struct GanState {
  Captioner generator;
  Discriminator discriminator;
  AdamState generator_adam;
  AdamState discriminator_adam;
};

struct EpochStats {
  double d_objective = 0.0;  // mean over examples
  double g_objective = 0.0;  // mean over examples (0 during D pretraining)
  double d_real = 0.0;
  double d_fake = 0.0;
  double d_mismatched = 0.0;
  std::size_t clamped = 0;  // examples whose D objective hit the score clamp
};

// A real caption of a different image, chosen uniformly.
const TokenSequence& mismatched_caption(const std::vector<Example>& examples, std::size_t index,
                                        Rng& rng);

// D-only epoch: one ascent step of the discriminator objective per minibatch.
EpochStats discriminator_epoch(GanState& state, const std::vector<Example>& examples,
                               const GanConfig& cfg, Rng& rng);

// Alternating epoch: per minibatch, one D ascent step then one G step with
// the configured estimator.
EpochStats gan_epoch(GanState& state, const std::vector<Example>& examples, const GanConfig& cfg,
                     const NGramIdf& idf, Rng& rng);

// d_pretrain_epochs of D-only training followed by cfg.epochs alternating
// epochs; one record per epoch in that order.
std::vector<EpochStats> train_gan(GanState& state, const std::vector<Example>& examples,
                                  const GanConfig& cfg, const NGramIdf& idf, Rng& rng);

// ---- Diagnostics -----------------------------------------------------------

struct ProbeOptions {
  Estimator estimator = Estimator::kScst;
  RewardKind reward = RewardKind::kLogD;
  double cider_weight = 5.0;
  double temperature = 0.5;
  std::size_t n_batches = 200;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
};

struct ProbeResult {
  std::vector<double> norms;               // mean per-example logit-gradient norm per minibatch
  std::vector<std::uint64_t> batch_hashes;  // identifies the examples in each minibatch
};

// No parameter update. Minibatch membership depends only on options.seed, so
// probes with different estimators see the same minibatches.
ProbeResult grad_norm_probe(const Captioner& g, const Discriminator& d,
                            const std::vector<Example>& examples, const NGramIdf& idf,
                            const ProbeOptions& options);

// Mean and (population) variance of a series.
struct SeriesSummary {
  double mean = 0.0;
  double variance = 0.0;
};
SeriesSummary summarize(const std::vector<double>& values);

}  // namespace seqgan
