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

#include "seqgan/captioner.hpp"

#include <cmath>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

// exp() of anything this far below the row max underflows to exactly zero.
constexpr double kMaskedLogit = -1e9;

struct ParamSpec {
  const char* name;
  std::size_t rows;
  std::size_t cols;
};

std::vector<ParamSpec> param_specs(const CaptionerConfig& c) {
  const std::size_t m = c.hidden_dim;
  const std::size_t k = c.vocab_size;
  const bool sentinel = c.attention != AttentionMode::kAtt2All;
  std::vector<ParamSpec> specs = {
      {"embed", k, m}, {"lstm_wx", 2 * m, 4 * m}, {"lstm_wh", m, 4 * m}, {"lstm_b", 1, 4 * m}};
  if (sentinel) {
    specs.push_back({"sent_wx", 2 * m, m});
    specs.push_back({"sent_wh", m, m});
    specs.push_back({"sent_b", 1, m});
  }
  specs.push_back({"img_proj", c.feature_dim, m});
  specs.push_back({"att_img", m, m});
  specs.push_back({"att_hid", m, m});
  if (sentinel) specs.push_back({"att_sent", m, m});
  specs.push_back({"att_b", 1, m});
  specs.push_back({"att_w", m, 1});
  specs.push_back({"out_w", m, k});
  specs.push_back({"out_b", 1, k});
  return specs;
}

void check_features(const CaptionerConfig& c, const Tensor& f) {
  if (f.rank() != 2 || f.rows() != c.num_crops || f.cols() != c.feature_dim) {
    throw InputError("image features " + to_string(f.shape()) + " do not match config [" +
                     std::to_string(c.num_crops) + "x" + std::to_string(c.feature_dim) + "]");
  }
}

}  // namespace

std::string to_string(AttentionMode mode) {
  switch (mode) {
    case AttentionMode::kContextAware: return "context_aware";
    case AttentionMode::kSentinel: return "sentinel";
    case AttentionMode::kAtt2All: return "att2all";
  }
  return "unknown";
}

AttentionMode attention_mode_from_string(const std::string& name) {
  if (name == "context_aware") return AttentionMode::kContextAware;
  if (name == "sentinel") return AttentionMode::kSentinel;
  if (name == "att2all") return AttentionMode::kAtt2All;
  throw ParameterError("unknown attention mode '" + name + "'");
}

void CaptionerConfig::validate() const {
  if (vocab_size < 2) throw ParameterError("vocab_size must be >= 2");
  if (hidden_dim < 1 || num_crops < 1 || feature_dim < 1 || max_len < 1) {
    throw ParameterError("captioner dimensions must all be >= 1");
  }
  if (bos_id == eos_id) throw ParameterError("bos_id and eos_id must differ");
  if (bos_id >= vocab_size || eos_id >= vocab_size) {
    throw ParameterError("bos_id and eos_id must be < vocab_size");
  }
}

Captioner::Captioner(CaptionerConfig config, ParamSet params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  zero_params(config_).check_compatible(params_);
}

ParamSet Captioner::zero_params(const CaptionerConfig& config) {
  config.validate();
  ParamSet p;
  for (const auto& s : param_specs(config)) p.add(s.name, Tensor({s.rows, s.cols}));
  return p;
}

Captioner Captioner::init(const CaptionerConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.hidden_dim));
  ParamSet p;
  for (const auto& s : param_specs(config)) p.add(s.name, uniform_tensor({s.rows, s.cols}, bound, rng));
  return Captioner(config, std::move(p));
}

// ---- CaptionerGraph --------------------------------------------------------

CaptionerGraph::CaptionerGraph(const Captioner& model, Tape& tape, bool requires_grad)
    : model_(&model), tape_(&tape), params_(tape, model.params(), requires_grad) {
  const auto& c = model.config();
  Tensor mask({1, c.vocab_size});
  mask[c.bos_id] = kMaskedLogit;
  bos_mask_ = tape.constant(std::move(mask));
  embed_ = params_["embed"];
  lstm_wx_ = params_["lstm_wx"];
  lstm_wh_ = params_["lstm_wh"];
  lstm_b_ = params_["lstm_b"];
  if (model.uses_sentinel()) {
    sent_wx_ = params_["sent_wx"];
    sent_wh_ = params_["sent_wh"];
    sent_b_ = params_["sent_b"];
    att_sent_ = params_["att_sent"];
  }
  img_proj_ = params_["img_proj"];
  att_img_ = params_["att_img"];
  att_hid_ = params_["att_hid"];
  att_b_ = params_["att_b"];
  att_w_ = params_["att_w"];
  out_w_ = params_["out_w"];
  out_b_ = params_["out_b"];
}

CaptionerGraph::Image CaptionerGraph::encode_image(const Tensor& features) {
  check_features(model_->config(), features);
  Image img;
  img.projected = matmul(tape_->constant(features), img_proj_);
  img.keys = matmul(img.projected, att_img_);
  img.mean = mean(img.projected, 0, true);
  return img;
}

CaptionerGraph::State CaptionerGraph::initial_state() {
  const std::size_t m = model_->config().hidden_dim;
  return make_state(Tensor({1, m}), Tensor({1, m}), Tensor({1, m}));
}

CaptionerGraph::State CaptionerGraph::make_state(const Tensor& h, const Tensor& c,
                                                 const Tensor& context) {
  const std::size_t m = model_->config().hidden_dim;
  for (const Tensor* t : {&h, &c, &context}) {
    if (t->size() != m) throw InputError("decoder state must have hidden_dim entries");
  }
  return State{tape_->constant(h.reshaped({1, m})), tape_->constant(c.reshaped({1, m})),
               tape_->constant(context.reshaped({1, m}))};
}

Var CaptionerGraph::embed(TokenId token) {
  if (token >= model_->config().vocab_size) {
    throw InputError("token id " + std::to_string(token) + " out of range");
  }
  return row(embed_, token);
}

Var CaptionerGraph::embed_soft(Var soft_row) { return matmul(soft_row, embed_); }

CaptionerGraph::Step CaptionerGraph::step(const State& state, Var input_embedding,
                                          const Image& image) {
  const auto& cfg = model_->config();
  const std::size_t m = cfg.hidden_dim;
  const bool feedback = cfg.attention == AttentionMode::kContextAware;

  Var x = concat_cols(input_embedding, feedback ? state.context : image.mean);
  Var gates = add_row(add(matmul(x, lstm_wx_), matmul(state.h, lstm_wh_)), lstm_b_);
  Var in_gate = sigmoid(slice_cols(gates, 0, m));
  Var forget_gate = sigmoid(slice_cols(gates, m, 2 * m));
  Var out_gate = sigmoid(slice_cols(gates, 2 * m, 3 * m));
  Var candidate = tanh(slice_cols(gates, 3 * m, 4 * m));
  Var c = add(mul(forget_gate, state.c), mul(in_gate, candidate));
  Var tanh_c = tanh(c);
  Var h = mul(out_gate, tanh_c);

  Var query = add(matmul(h, att_hid_), att_b_);
  Var crop_scores = transpose(matmul(tanh(add_row(image.keys, query)), att_w_));  // 1 x C

  Step out;
  if (model_->uses_sentinel()) {
    Var sentinel_gate =
        sigmoid(add_row(add(matmul(x, sent_wx_), matmul(state.h, sent_wh_)), sent_b_));
    Var sentinel = mul(sentinel_gate, tanh_c);
    Var sentinel_score = matmul(tanh(add(matmul(sentinel, att_sent_), query)), att_w_);
    Var weights = softmax(concat_cols(crop_scores, sentinel_score));
    Var mixture = matmul(weights, concat_rows({image.projected, sentinel}));
    out.attention = weights;
    out.sentinel_gate = weights.value()[cfg.num_crops];
    out.state = State{h, c, mixture};
  } else {
    Var weights = softmax(crop_scores);
    Var mixture = matmul(weights, image.projected);
    out.attention = concat_cols(weights, tape_->constant(Tensor({1, 1})));
    out.sentinel_gate = 0.0;
    out.state = State{h, c, mixture};
  }
  out.logits = add(add_row(matmul(add(out.state.context, h), out_w_), out_b_), bos_mask_);
  return out;
}

CaptionerGraph::SequenceLogProb CaptionerGraph::log_prob(const Image& image,
                                                         const TokenSequence& seq) {
  const auto& cfg = model_->config();
  if (seq.empty()) throw InputError("log_prob of an empty sequence");
  if (seq.size() > cfg.max_len) throw InputError("sequence longer than max_len");
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const TokenId tok = seq.tokens[t];
    if (tok >= cfg.vocab_size) throw InputError("token id " + std::to_string(tok) + " out of range");
    if (tok == cfg.bos_id) throw InputError("BOS cannot appear inside a sequence");
    if (tok == cfg.eos_id && t + 1 != seq.size()) throw InputError("EOS before end of sequence");
  }
  SequenceLogProb out;
  State state = initial_state();
  TokenId prev = cfg.bos_id;
  std::vector<Var> terms;
  for (TokenId tok : seq.tokens) {
    Step s = step(state, embed(prev), image);
    out.logits.push_back(s.logits);
    terms.push_back(pick(log_softmax(s.logits), tok));
    state = s.state;
    prev = tok;
  }
  out.total = sum(concat_rows(terms));
  return out;
}

// ---- Value-level API -------------------------------------------------------

DecoderState initial_decoder_state(const CaptionerConfig& config) {
  const std::size_t m = config.hidden_dim;
  return DecoderState{Tensor({1, m}), Tensor({1, m}), Tensor({1, m})};
}

DecodeStep decode_step(const Captioner& model, const DecoderState& state, TokenId prev_token,
                       const Tensor& image_features) {
  if (prev_token >= model.config().vocab_size) {
    throw InputError("token id " + std::to_string(prev_token) + " out of range");
  }
  Tape tape;
  CaptionerGraph g(model, tape, false);
  auto image = g.encode_image(image_features);
  auto s = g.step(g.make_state(state.h, state.c, state.context), g.embed(prev_token), image);
  return DecodeStep{s.logits.value(),
                    DecoderState{s.state.h.value(), s.state.c.value(), s.state.context.value()},
                    s.attention.value(), s.sentinel_gate};
}

TokenSequence greedy_decode(const Captioner& model, const Tensor& image_features) {
  const Captioner* one[] = {&model};
  return ensemble_decode(one, image_features);
}

SampledSentence sample_sentence(const Captioner& model, const Tensor& image_features, Rng& rng) {
  const auto& cfg = model.config();
  Tape tape;
  CaptionerGraph g(model, tape, false);
  auto image = g.encode_image(image_features);
  auto state = g.initial_state();
  TokenId prev = cfg.bos_id;
  SampledSentence out;
  std::vector<Var> terms;
  while (out.sequence.size() < cfg.max_len) {
    auto s = g.step(state, g.embed(prev), image);
    Var logp = log_softmax(s.logits);
    std::vector<double> probs(cfg.vocab_size);
    for (std::size_t j = 0; j < probs.size(); ++j) probs[j] = std::exp(logp.value()[j]);
    const TokenId tok = rng.categorical(probs);
    terms.push_back(pick(logp, tok));
    out.sequence.tokens.push_back(tok);
    state = s.state;
    prev = tok;
    if (tok == cfg.eos_id) break;
  }
  out.sequence.terminated = true;
  out.log_prob = sum(concat_rows(terms)).value().item();
  return out;
}

double log_prob(const Captioner& model, const Tensor& image_features, const TokenSequence& seq) {
  Tape tape;
  CaptionerGraph g(model, tape, false);
  auto image = g.encode_image(image_features);
  return g.log_prob(image, seq).total.value().item();
}

TokenSequence ensemble_decode(std::span<const Captioner* const> models,
                              const Tensor& image_features) {
  if (models.empty()) throw InputError("ensemble_decode needs at least one model");
  const auto& cfg = models.front()->config();
  for (const Captioner* m : models) {
    if (!(m->config() == cfg)) throw InputError("ensemble members have different configs");
  }
  Tape tape;
  std::vector<CaptionerGraph> graphs;
  std::vector<CaptionerGraph::Image> images;
  std::vector<CaptionerGraph::State> states;
  graphs.reserve(models.size());
  for (const Captioner* m : models) {
    graphs.emplace_back(*m, tape, false);
    images.push_back(graphs.back().encode_image(image_features));
    states.push_back(graphs.back().initial_state());
  }
  TokenSequence seq;
  TokenId prev = cfg.bos_id;
  while (seq.size() < cfg.max_len) {
    std::vector<double> avg(cfg.vocab_size, 0.0);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      auto s = graphs[i].step(states[i], graphs[i].embed(prev), images[i]);
      states[i] = s.state;
      Var p = softmax(s.logits);
      for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += p.value()[j];
    }
    for (double& v : avg) v /= static_cast<double>(graphs.size());
    const TokenId tok = argmax(avg);
    seq.tokens.push_back(tok);
    prev = tok;
    if (tok == cfg.eos_id) break;
  }
  seq.terminated = true;
  return seq;
}

}  // namespace seqgan
