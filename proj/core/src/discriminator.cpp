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

#include "seqgan/discriminator.hpp"

#include <cmath>
#include <vector>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

struct ParamSpec {
  const char* name;
  std::size_t rows;
  std::size_t cols;
};

std::vector<ParamSpec> param_specs(const DiscriminatorConfig& c) {
  const std::size_t m = c.hidden_dim;
  std::vector<ParamSpec> specs = {{"embed", c.vocab_size, m},
                                  {"lstm_wx", m, 4 * m},
                                  {"lstm_wh", m, 4 * m},
                                  {"lstm_b", 1, 4 * m},
                                  {"img_w", c.feature_dim, m}};
  if (c.kind == DiscriminatorKind::kCoAttention) {
    const ParamSpec coatt[] = {{"bilinear", m, m}, {"att_img", m, m},   {"att_img_txt", m, m},
                               {"att_txt", m, m},  {"att_txt_img", m, m}, {"alpha_b", 1, m},
                               {"beta_b", 1, m},   {"alpha_w", m, 1},   {"alpha_c", 1, 1},
                               {"beta_w", m, 1},   {"beta_c", 1, 1},    {"u_img", m, m},
                               {"v_txt", m, m}};
    specs.insert(specs.end(), std::begin(coatt), std::end(coatt));
  } else {
    specs.push_back({"joint_w", m, m});
    specs.push_back({"joint_b", 1, 1});
  }
  return specs;
}

}  // namespace

std::string to_string(DiscriminatorKind kind) {
  return kind == DiscriminatorKind::kCoAttention ? "coatt" : "jointemb";
}

DiscriminatorKind discriminator_kind_from_string(const std::string& name) {
  if (name == "coatt") return DiscriminatorKind::kCoAttention;
  if (name == "jointemb") return DiscriminatorKind::kJointEmbedding;
  throw ParameterError("unknown discriminator variant '" + name + "'");
}

void DiscriminatorConfig::validate() const {
  if (vocab_size < 1 || hidden_dim < 1 || num_crops < 1 || feature_dim < 1) {
    throw ParameterError("discriminator dimensions must all be >= 1");
  }
}

Discriminator::Discriminator(DiscriminatorConfig config, ParamSet params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  zero_params(config_).check_compatible(params_);
}

ParamSet Discriminator::zero_params(const DiscriminatorConfig& config) {
  config.validate();
  ParamSet p;
  for (const auto& s : param_specs(config)) p.add(s.name, Tensor({s.rows, s.cols}));
  return p;
}

Discriminator Discriminator::init(const DiscriminatorConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.hidden_dim));
  ParamSet p;
  for (const auto& s : param_specs(config)) p.add(s.name, uniform_tensor({s.rows, s.cols}, bound, rng));
  return Discriminator(config, std::move(p));
}

DiscriminatorGraph::DiscriminatorGraph(const Discriminator& model, Tape& tape, bool requires_grad)
    : model_(&model), tape_(&tape), params_(tape, model.params(), requires_grad) {}

Var DiscriminatorGraph::embed_tokens(const TokenSequence& seq) {
  if (seq.empty()) throw InputError("discriminator input sequence is empty");
  for (TokenId t : seq.tokens) {
    if (t >= model_->config().vocab_size) {
      throw InputError("token id " + std::to_string(t) + " out of range");
    }
  }
  return gather_rows(params_["embed"], seq.tokens);
}

Var DiscriminatorGraph::embed_soft(Var soft_tokens) {
  const Tensor& s = soft_tokens.value();
  if (s.rank() != 2 || s.cols() != model_->config().vocab_size || s.rows() == 0) {
    throw InputError("soft tokens must be T x K with T >= 1, got " + to_string(s.shape()));
  }
  for (double v : s.data()) {
    if (v < 0.0) throw InputError("soft token weights must be nonnegative");
  }
  return matmul(soft_tokens, params_["embed"]);
}

Var DiscriminatorGraph::encode_words(Var word_inputs) {
  const std::size_t m = model_->config().hidden_dim;
  const std::size_t steps = word_inputs.value().rows();
  if (steps == 0) throw InputError("discriminator input sequence is empty");
  const Var wx = params_["lstm_wx"], wh = params_["lstm_wh"], b = params_["lstm_b"];
  // Input projections for all steps at once; only the recurrence is sequential.
  Var projected = add_row(matmul(word_inputs, wx), b);
  Var h = tape_->constant(Tensor({1, m}));
  Var c = tape_->constant(Tensor({1, m}));
  std::vector<Var> hidden;
  hidden.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Var gates = add(row(projected, t), matmul(h, wh));
    Var i = sigmoid(slice_cols(gates, 0, m));
    Var f = sigmoid(slice_cols(gates, m, 2 * m));
    Var o = sigmoid(slice_cols(gates, 2 * m, 3 * m));
    Var g = tanh(slice_cols(gates, 3 * m, 4 * m));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh(c));
    hidden.push_back(h);
  }
  return concat_rows(hidden);
}

DiscriminatorGraph::Output DiscriminatorGraph::score(const Tensor& image_features,
                                                     Var word_inputs) {
  const auto& cfg = model_->config();
  if (image_features.rank() != 2 || image_features.rows() != cfg.num_crops ||
      image_features.cols() != cfg.feature_dim) {
    throw InputError("image features " + to_string(image_features.shape()) +
                     " do not match discriminator config");
  }
  if (word_inputs.value().rank() != 2 || word_inputs.value().cols() != cfg.hidden_dim) {
    throw InputError("word inputs must be T x hidden_dim");
  }
  Var image = tape_->constant(image_features);
  return cfg.kind == DiscriminatorKind::kCoAttention ? score_coatt(image, word_inputs)
                                                     : score_joint(image, word_inputs);
}

DiscriminatorGraph::Output DiscriminatorGraph::score_coatt(Var image, Var words) {
  const BoundParams& p = params_;
  Var hidden = encode_words(words);                   // H: T x m
  Var crops = matmul(image, p["img_w"]);              // I: C x m
  Var corr = tanh(matmul(matmul(crops, p["bilinear"]), transpose(hidden)));  // Y: C x T

  Var alpha_hidden = tanh(add_row(
      add(matmul(crops, p["att_img"]), matmul(matmul(corr, hidden), p["att_img_txt"])),
      p["alpha_b"]));
  Var alpha_logits = add(transpose(matmul(alpha_hidden, p["alpha_w"])), p["alpha_c"]);
  Var alpha = softmax(alpha_logits);  // 1 x C

  Var beta_hidden = tanh(add_row(
      add(matmul(hidden, p["att_txt"]),
          matmul(matmul(transpose(corr), crops), p["att_txt_img"])),
      p["beta_b"]));
  Var beta_logits = add(transpose(matmul(beta_hidden, p["beta_w"])), p["beta_c"]);
  Var beta = softmax(beta_logits);  // 1 x T

  Var image_embedding = matmul(matmul(alpha, crops), p["u_img"]);
  Var sentence_embedding = matmul(matmul(beta, hidden), p["v_txt"]);
  Var logit = matmul(image_embedding, transpose(sentence_embedding));
  return Output{sigmoid(logit), alpha, beta, image_embedding, sentence_embedding};
}

DiscriminatorGraph::Output DiscriminatorGraph::score_joint(Var image, Var words) {
  const BoundParams& p = params_;
  const std::size_t crops = model_->config().num_crops;
  Var hidden = encode_words(words);
  const std::size_t steps = hidden.value().rows();
  Var image_embedding = matmul(mean(image, 0, true), p["img_w"]);
  Var sentence_embedding = row(hidden, steps - 1);
  Var logit = add(matmul(matmul(image_embedding, p["joint_w"]), transpose(sentence_embedding)),
                  p["joint_b"]);
  Tensor beta({1, steps});
  beta[steps - 1] = 1.0;
  return Output{sigmoid(logit),
                tape_->constant(Tensor({1, crops}, 1.0 / static_cast<double>(crops))),
                tape_->constant(std::move(beta)), image_embedding, sentence_embedding};
}

// ---- Value-level -----------------------------------------------------------

Tensor embed_caption(const Discriminator& model, const TokenSequence& seq) {
  Tape tape;
  DiscriminatorGraph g(model, tape, false);
  return g.encode_words(g.embed_tokens(seq)).value();
}

CoAttentionResult coatt_score(const Discriminator& model, const Tensor& image_features,
                              const TokenSequence& seq) {
  if (model.config().kind != DiscriminatorKind::kCoAttention) {
    throw InputError("coatt_score requires a co-attention discriminator");
  }
  Tape tape;
  DiscriminatorGraph g(model, tape, false);
  auto out = g.score(image_features, g.embed_tokens(seq));
  return CoAttentionResult{out.score.value().item(), out.alpha.value(), out.beta.value(),
                           out.image_embedding.value(), out.sentence_embedding.value()};
}

double jointemb_score(const Discriminator& model, const Tensor& image_features,
                      const TokenSequence& seq) {
  if (model.config().kind != DiscriminatorKind::kJointEmbedding) {
    throw InputError("jointemb_score requires a joint-embedding discriminator");
  }
  return score(model, image_features, seq);
}

double score(const Discriminator& model, const Tensor& image_features, const TokenSequence& seq) {
  Tape tape;
  DiscriminatorGraph g(model, tape, false);
  return g.score(image_features, g.embed_tokens(seq)).score.value().item();
}

double score_soft(const Discriminator& model, const Tensor& image_features,
                  const Tensor& soft_tokens) {
  Tape tape;
  DiscriminatorGraph g(model, tape, false);
  return g.score(image_features, g.embed_soft(tape.constant(soft_tokens))).score.value().item();
}

}  // namespace seqgan
