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

#include "seqgan/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

double clamp_score(double s) { return std::clamp(s, kScoreEpsilon, 1.0 - kScoreEpsilon); }

bool outside_clamp(double s) { return s < kScoreEpsilon || s > 1.0 - kScoreEpsilon; }

Var clamped_log(Var p) { return log(clamp(p, kScoreEpsilon, 1.0 - kScoreEpsilon)); }

std::vector<TokenId> words_of(const TokenSequence& seq, TokenId eos) {
  return strip_eos(seq.tokens, eos);
}

GeneratorGradient collect(const CaptionerGraph& graph, const std::vector<Var>& logits,
                          double objective) {
  GeneratorGradient out;
  out.grad = graph.params().gradients();
  out.objective = objective;
  out.logit_grads.reserve(logits.size());
  for (const Var& l : logits) out.logit_grads.push_back(l.grad());
  return out;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  return order;
}

const TokenSequence& pick_reference(const Example& ex, Rng& rng) {
  if (ex.references.empty()) throw InputError("example has no reference captions");
  return ex.references[rng.below(ex.references.size())];
}

// Per-example gradients are summed in batch order, then averaged.
void descend(ParamSet& params, ParamSet& ascent_grad, AdamState& adam, double lr) {
  ascent_grad.scale(-1.0);
  adam_step(params, ascent_grad, adam, lr);
}

struct DStepResult {
  double objective = 0.0;
  double real = 0.0, fake = 0.0, mismatched = 0.0;
  std::size_t clamped = 0;
};

DStepResult discriminator_step(GanState& state, const std::vector<Example>& examples,
                               const std::vector<std::size_t>& batch, const GanConfig& cfg,
                               Rng& rng) {
  DStepResult r;
  ParamSet total = state.discriminator.params().zeros_like();
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i : batch) {
    const Example& ex = examples[i];
    const TokenSequence fake = sample_sentence(state.generator, ex.scene.features, rng).sequence;
    const TokenSequence& mismatched = mismatched_caption(examples, i, rng);
    const TokenSequence& real = pick_reference(ex, rng);
    Tape tape;
    DiscriminatorGraph graph(state.discriminator, tape, true);
    auto obj = discriminator_objective(graph, ex.scene.features, real, fake, mismatched);
    tape.backward(obj.value);
    total.axpy(inv, graph.params().gradients());
    r.objective += obj.value.value().item() * inv;
    r.real += obj.real_score * inv;
    r.fake += obj.fake_score * inv;
    r.mismatched += obj.mismatched_score * inv;
    r.clamped += obj.clamped ? 1 : 0;
  }
  descend(state.discriminator.params(), total, state.discriminator_adam, cfg.discriminator_lr);
  return r;
}

GeneratorGradient generator_gradient(const Captioner& g, const Discriminator& d,
                                     const Example& ex, Estimator estimator, RewardKind reward,
                                     double cider_weight, const GumbelOptions& gumbel,
                                     const NGramIdf& idf, Rng& rng) {
  if (estimator == Estimator::kScst) {
    RewardContext ctx{&d, &ex.references, &idf, reward, cider_weight};
    return scst_grad(g, ex.scene.features, ctx, rng);
  }
  const bool fm = gumbel.fm_image_weight > 0.0 || gumbel.fm_sentence_weight > 0.0;
  const TokenSequence* truth = fm ? &pick_reference(ex, rng) : nullptr;
  return gumbel_grad(g, d, ex.scene.features, rng, gumbel, truth);
}

GumbelOptions gumbel_options(Estimator e, double temperature, double fm_i, double fm_s) {
  return GumbelOptions{e == Estimator::kGumbelSt ? GumbelMode::kStraightThrough : GumbelMode::kSoft,
                       temperature, fm_i, fm_s};
}

void add_stats(EpochStats& s, const DStepResult& r, double weight) {
  s.d_objective += r.objective * weight;
  s.d_real += r.real * weight;
  s.d_fake += r.fake * weight;
  s.d_mismatched += r.mismatched * weight;
  s.clamped += r.clamped;
}

}  // namespace

// ---- Names -----------------------------------------------------------------

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::kScst: return "scst";
    case Estimator::kGumbelSoft: return "gumbel_soft";
    case Estimator::kGumbelSt: return "gumbel_st";
  }
  return "?";
}

std::string to_string(RewardKind r) {
  switch (r) {
    case RewardKind::kLogD: return "logD";
    case RewardKind::kLogDPlusCider: return "logD_plus_cider";
    case RewardKind::kCider: return "cider";
  }
  return "?";
}

Estimator estimator_from_string(const std::string& name) {
  if (name == "scst") return Estimator::kScst;
  if (name == "gumbel_soft") return Estimator::kGumbelSoft;
  if (name == "gumbel_st") return Estimator::kGumbelSt;
  throw ParameterError("unknown estimator '" + name + "' (expected scst, gumbel_soft, gumbel_st)");
}

RewardKind reward_from_string(const std::string& name) {
  if (name == "logD") return RewardKind::kLogD;
  if (name == "logD_plus_cider") return RewardKind::kLogDPlusCider;
  if (name == "cider") return RewardKind::kCider;
  throw ParameterError("unknown reward '" + name + "' (expected logD, logD_plus_cider, cider)");
}

void GanConfig::validate() const {
  if (!(temperature > 0.0)) throw ParameterError("temperature must be > 0");
  if (!(cider_weight >= 0.0)) throw ParameterError("cider_weight must be >= 0");
  if (!(fm_image_weight >= 0.0) || !(fm_sentence_weight >= 0.0)) {
    throw ParameterError("feature-matching weights must be >= 0");
  }
  if (!(generator_lr > 0.0) || !(discriminator_lr > 0.0)) {
    throw ParameterError("learning rates must be > 0");
  }
  if (batch_size == 0) throw ParameterError("batch_size must be >= 1");
  if (estimator != Estimator::kScst && reward != RewardKind::kLogD) {
    throw ParameterError("gumbel estimators differentiate log(D) only; reward must be logD");
  }
}

void CeConfig::validate() const {
  if (!(lr > 0.0)) throw ParameterError("ce lr must be > 0");
  if (batch_size == 0) throw ParameterError("ce batch_size must be >= 1");
}

// ---- Discriminator objective -------------------------------------------------

DiscriminatorObjective discriminator_objective(DiscriminatorGraph& graph,
                                               const Tensor& image_features,
                                               const TokenSequence& real,
                                               const TokenSequence& fake,
                                               const TokenSequence& mismatched) {
  Var d_real = graph.score(image_features, graph.embed_tokens(real)).score;
  Var d_fake = graph.score(image_features, graph.embed_tokens(fake)).score;
  Var d_mis = graph.score(image_features, graph.embed_tokens(mismatched)).score;
  Tape& tape = *d_real.tape();
  Var one = tape.constant(Tensor({1, 1}, 1.0));

  DiscriminatorObjective out;
  out.real_score = d_real.value().item();
  out.fake_score = d_fake.value().item();
  out.mismatched_score = d_mis.value().item();
  out.clamped = outside_clamp(out.real_score) || outside_clamp(out.fake_score) ||
                outside_clamp(out.mismatched_score);
  out.value = add(clamped_log(d_real), add(scale(clamped_log(sub(one, d_fake)), 0.5),
                                            scale(clamped_log(sub(one, d_mis)), 0.5)));
  return out;
}

DiscriminatorLoss discriminator_loss(const Discriminator& d, const Tensor& image_features,
                                     const TokenSequence& real, const TokenSequence& fake,
                                     const TokenSequence& mismatched) {
  Tape tape;
  DiscriminatorGraph graph(d, tape, false);
  auto obj = discriminator_objective(graph, image_features, real, fake, mismatched);
  return DiscriminatorLoss{obj.value.value().item(), obj.clamped};
}

// ---- Generator gradients -------------------------------------------------------

double logit_grad_norm(const GeneratorGradient& g) {
  double s = 0.0;
  for (const Tensor& t : g.logit_grads) s += t.squared_norm();
  return std::sqrt(s);
}

double sequence_reward(const RewardContext& ctx, const Tensor& image_features,
                       const TokenSequence& seq) {
  const auto log_d = [&] {
    if (ctx.discriminator == nullptr) throw InputError("log(D) reward needs a discriminator");
    return std::log(clamp_score(score(*ctx.discriminator, image_features, seq)));
  };
  const auto cider = [&] {
    if (ctx.references == nullptr || ctx.idf == nullptr) {
      throw InputError("CIDEr reward needs references and an idf table");
    }
    // CIDEr compares words only; the EOS id is the same in every caption.
    std::vector<Words> refs;
    refs.reserve(ctx.references->size());
    const TokenId eos = Vocabulary::kEos;
    for (const auto& r : *ctx.references) refs.push_back(words_of(r, eos));
    const auto cand = words_of(seq, eos);
    return cider_d(cand, refs, *ctx.idf);
  };
  switch (ctx.kind) {
    case RewardKind::kLogD: return log_d();
    case RewardKind::kLogDPlusCider: return log_d() + ctx.cider_weight * cider();
    case RewardKind::kCider: return cider();
  }
  return 0.0;
}

GeneratorGradient reinforce_gradient(const Captioner& g, const Tensor& image_features,
                                     const TokenSequence& seq, double weight) {
  Tape tape;
  CaptionerGraph graph(g, tape, true);
  auto image = graph.encode_image(image_features);
  auto lp = graph.log_prob(image, seq);
  Var objective = scale(lp.total, weight);
  tape.backward(objective);
  return collect(graph, lp.logits, objective.value().item());
}

GeneratorGradient scst_gradient_for(const Captioner& g, const Tensor& image_features,
                                    const TokenSequence& sample, const TokenSequence& baseline,
                                    const std::function<double(const TokenSequence&)>& reward) {
  RewardRecord rec;
  rec.sample_reward = reward(sample);
  rec.baseline_reward = reward(baseline);
  rec.advantage = rec.sample_reward - rec.baseline_reward;
  GeneratorGradient out = reinforce_gradient(g, image_features, sample, rec.advantage);
  out.objective = rec.sample_reward;
  out.reward = rec;
  return out;
}

GeneratorGradient scst_grad(const Captioner& g, const Tensor& image_features,
                            const RewardContext& ctx, Rng& rng) {
  const TokenSequence sample = sample_sentence(g, image_features, rng).sequence;
  const TokenSequence baseline = greedy_decode(g, image_features);
  return scst_gradient_for(g, image_features, sample, baseline, [&](const TokenSequence& s) {
    return sequence_reward(ctx, image_features, s);
  });
}

namespace {

struct Relaxed {
  Var soft;
  Var forward;
  std::size_t hard = 0;
};

Relaxed relax(Var logits, double temperature, Rng& rng, GumbelMode mode) {
  if (!(temperature > 0.0)) throw ParameterError("gumbel temperature must be > 0");
  Tape& tape = *logits.tape();
  Tensor noise(logits.shape());
  for (double& v : noise.data()) v = rng.gumbel();
  Relaxed r;
  r.soft = softmax(add(logits, tape.constant(std::move(noise))), temperature);
  r.hard = argmax(r.soft.value().data());
  if (mode == GumbelMode::kSoft) {
    r.forward = r.soft;
  } else {
    Tensor one_hot = Tensor::zeros_like(r.soft.value());
    one_hot[r.hard] = 1.0;
    r.forward = straight_through(r.soft, one_hot);
  }
  return r;
}

}  // namespace

Var gumbel_relax(Var logits, double temperature, Rng& rng, GumbelMode mode, std::size_t* hard) {
  Relaxed r = relax(logits, temperature, rng, mode);
  if (hard != nullptr) *hard = r.hard;
  return r.forward;
}

GumbelSample gumbel_sample(const Tensor& logits, double temperature, Rng& rng, GumbelMode mode) {
  Tape tape;
  Var l = tape.constant(logits.rank() == 1 ? logits.reshaped({1, logits.size()}) : logits);
  Relaxed r = relax(l, temperature, rng, mode);
  return GumbelSample{r.soft.value(), r.hard, r.forward.value()};
}

GeneratorGradient gumbel_grad(const Captioner& g, const Discriminator& d,
                              const Tensor& image_features, Rng& rng, const GumbelOptions& options,
                              const TokenSequence* ground_truth) {
  const bool fm = options.fm_image_weight > 0.0 || options.fm_sentence_weight > 0.0;
  if (fm && ground_truth == nullptr) {
    throw InputError("feature matching needs a ground-truth caption");
  }
  const auto& cfg = g.config();
  Tape tape;
  CaptionerGraph cg(g, tape, true);
  DiscriminatorGraph dg(d, tape, false);
  auto image = cg.encode_image(image_features);
  auto state = cg.initial_state();
  Var input = cg.embed(cfg.bos_id);
  std::vector<Var> logits, samples;
  for (std::size_t t = 0; t < cfg.max_len; ++t) {
    auto s = cg.step(state, input, image);
    logits.push_back(s.logits);
    std::size_t hard = 0;
    Var y = gumbel_relax(s.logits, options.temperature, rng, options.mode, &hard);
    samples.push_back(y);
    state = s.state;
    if (hard == cfg.eos_id) break;
    input = cg.embed_soft(y);
  }
  auto out = dg.score(image_features, dg.embed_soft(concat_rows(samples)));
  Var objective = clamped_log(out.score);
  if (fm) {
    auto truth = dg.score(image_features, dg.embed_tokens(*ground_truth));
    if (options.fm_image_weight > 0.0) {
      Var diff = sub(truth.image_embedding, out.image_embedding);
      objective = sub(objective, scale(sum(mul(diff, diff)), options.fm_image_weight));
    }
    if (options.fm_sentence_weight > 0.0) {
      Var diff = sub(truth.sentence_embedding, out.sentence_embedding);
      objective = sub(objective, scale(sum(mul(diff, diff)), options.fm_sentence_weight));
    }
  }
  tape.backward(objective);
  GeneratorGradient result = collect(cg, logits, objective.value().item());
  result.reward.sample_reward = result.objective;
  result.reward.advantage = result.objective;
  return result;
}

// ---- Cross-entropy ---------------------------------------------------------------

CeGradient ce_gradient(const Captioner& g, const Tensor& image_features, const TokenSequence& seq) {
  Tape tape;
  CaptionerGraph graph(g, tape, true);
  auto image = graph.encode_image(image_features);
  auto lp = graph.log_prob(image, seq);
  const double inv = 1.0 / static_cast<double>(seq.size());
  Var loss = scale(lp.total, -inv);
  tape.backward(loss);
  return CeGradient{graph.params().gradients(), loss.value().item(), seq.size()};
}

double ce_epoch(Captioner& g, AdamState& adam, const std::vector<Example>& examples,
                const CeConfig& cfg, Rng& rng) {
  cfg.validate();
  if (examples.empty()) throw InputError("ce training needs a non-empty dataset");
  const auto order = shuffled_indices(examples.size(), rng);
  double loss_sum = 0.0;
  std::size_t token_sum = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
    const double inv = 1.0 / static_cast<double>(end - begin);
    ParamSet total = g.params().zeros_like();
    for (std::size_t k = begin; k < end; ++k) {
      const Example& ex = examples[order[k]];
      auto ce = ce_gradient(g, ex.scene.features, pick_reference(ex, rng));
      total.axpy(inv, ce.grad);
      loss_sum += ce.loss * static_cast<double>(ce.tokens);
      token_sum += ce.tokens;
    }
    adam_step(g.params(), total, adam, cfg.lr);
  }
  return loss_sum / static_cast<double>(token_sum);
}

std::vector<double> ce_pretrain(Captioner& g, const std::vector<Example>& examples,
                                const CeConfig& cfg, Rng& rng) {
  if (examples.empty()) throw InputError("ce training needs a non-empty dataset");
  AdamState adam;
  std::vector<double> curve;
  for (std::size_t e = 0; e < cfg.epochs; ++e) curve.push_back(ce_epoch(g, adam, examples, cfg, rng));
  return curve;
}

// ---- Adversarial training ----------------------------------------------------------

const TokenSequence& mismatched_caption(const std::vector<Example>& examples, std::size_t index,
                                        Rng& rng) {
  if (examples.size() < 2) throw InputError("mismatched captions need at least two images");
  std::size_t j = rng.below(examples.size() - 1);
  if (j >= index) ++j;
  return pick_reference(examples[j], rng);
}

EpochStats discriminator_epoch(GanState& state, const std::vector<Example>& examples,
                               const GanConfig& cfg, Rng& rng) {
  cfg.validate();
  EpochStats stats;
  const auto order = shuffled_indices(examples.size(), rng);
  for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
    const std::vector<std::size_t> batch(order.begin() + static_cast<long>(begin),
                                         order.begin() + static_cast<long>(end));
    const auto r = discriminator_step(state, examples, batch, cfg, rng);
    add_stats(stats, r, static_cast<double>(batch.size()) / static_cast<double>(order.size()));
  }
  return stats;
}

EpochStats gan_epoch(GanState& state, const std::vector<Example>& examples, const GanConfig& cfg,
                     const NGramIdf& idf, Rng& rng) {
  cfg.validate();
  EpochStats stats;
  const auto gumbel =
      gumbel_options(cfg.estimator, cfg.temperature, cfg.fm_image_weight, cfg.fm_sentence_weight);
  const auto order = shuffled_indices(examples.size(), rng);
  const double n = static_cast<double>(order.size());
  for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
    const std::vector<std::size_t> batch(order.begin() + static_cast<long>(begin),
                                         order.begin() + static_cast<long>(end));
    const double share = static_cast<double>(batch.size()) / n;
    add_stats(stats, discriminator_step(state, examples, batch, cfg, rng), share);

    ParamSet total = state.generator.params().zeros_like();
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i : batch) {
      auto gg = generator_gradient(state.generator, state.discriminator, examples[i],
                                   cfg.estimator, cfg.reward, cfg.cider_weight, gumbel, idf, rng);
      total.axpy(inv, gg.grad);
      stats.g_objective += gg.objective / n;
    }
    descend(state.generator.params(), total, state.generator_adam, cfg.generator_lr);
  }
  return stats;
}

std::vector<EpochStats> train_gan(GanState& state, const std::vector<Example>& examples,
                                  const GanConfig& cfg, const NGramIdf& idf, Rng& rng) {
  cfg.validate();
  std::vector<EpochStats> out;
  for (std::size_t e = 0; e < cfg.d_pretrain_epochs; ++e) {
    out.push_back(discriminator_epoch(state, examples, cfg, rng));
  }
  for (std::size_t e = 0; e < cfg.epochs; ++e) out.push_back(gan_epoch(state, examples, cfg, idf, rng));
  return out;
}

// ---- Diagnostics -------------------------------------------------------------------

ProbeResult grad_norm_probe(const Captioner& g, const Discriminator& d,
                            const std::vector<Example>& examples, const NGramIdf& idf,
                            const ProbeOptions& options) {
  if (options.n_batches == 0) throw ParameterError("n_batches must be >= 1");
  if (options.batch_size == 0) throw ParameterError("batch_size must be >= 1");
  if (examples.empty()) throw InputError("grad probe needs a non-empty dataset");
  if (options.estimator != Estimator::kScst && options.reward != RewardKind::kLogD) {
    throw ParameterError("gumbel estimators differentiate log(D) only; reward must be logD");
  }
  Rng batch_rng(derive_seed(options.seed, 1));
  Rng noise_rng(derive_seed(options.seed, 2));
  const auto gumbel = gumbel_options(options.estimator, options.temperature, 0.0, 0.0);
  ProbeResult out;
  for (std::size_t b = 0; b < options.n_batches; ++b) {
    std::uint64_t hash = 14695981039346656037ull;  // FNV-1a over example indices
    double norm_sum = 0.0;
    for (std::size_t k = 0; k < options.batch_size; ++k) {
      const std::size_t i = batch_rng.below(examples.size());
      for (int byte = 0; byte < 8; ++byte) {
        hash ^= (static_cast<std::uint64_t>(i) >> (8 * byte)) & 0xffu;
        hash *= 1099511628211ull;
      }
      auto gg = generator_gradient(g, d, examples[i], options.estimator, options.reward,
                                   options.cider_weight, gumbel, idf, noise_rng);
      norm_sum += logit_grad_norm(gg);
    }
    out.norms.push_back(norm_sum / static_cast<double>(options.batch_size));
    out.batch_hashes.push_back(hash);
  }
  return out;
}

SeriesSummary summarize(const std::vector<double>& values) {
  SeriesSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  for (double v : values) s.variance += (v - s.mean) * (v - s.mean);
  s.variance /= n;
  return s;
}

}  // namespace seqgan
