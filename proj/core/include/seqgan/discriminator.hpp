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
#include <string>

#include "seqgan/autodiff.hpp"
#include "seqgan/params.hpp"
#include "seqgan/sequence.hpp"
#include "seqgan/tensor.hpp"

namespace seqgan {

enum class DiscriminatorKind {
  kCoAttention,     // "coatt"
  kJointEmbedding,  // "jointemb"
};

std::string to_string(DiscriminatorKind kind);
DiscriminatorKind discriminator_kind_from_string(const std::string& name);

struct DiscriminatorConfig {
  DiscriminatorKind kind = DiscriminatorKind::kCoAttention;
  std::size_t vocab_size = 0;
  std::size_t hidden_dim = 32;
  std::size_t num_crops = 4;
  std::size_t feature_dim = 16;

  void validate() const;

  friend bool operator==(const DiscriminatorConfig&, const DiscriminatorConfig&) = default;
};

/// Image-caption scorer D(I, w) in (0, 1).
///
/// Both variants share a word LSTM (embed, lstm_wx, lstm_wh, lstm_b) and an
/// image projection img_w (d x m). Co-attention adds
///   bilinear m x m; att_img, att_img_txt, att_txt, att_txt_img m x m;
///   alpha_b, beta_b 1 x m (inside the tanh); alpha_w, beta_w m x 1 and
///   alpha_c, beta_c 1 x 1 (the per-crop / per-word linear heads);
///   u_img, v_txt m x m.
/// Joint embedding adds joint_w m x m and joint_b 1 x 1.
class Discriminator {
 public:
  Discriminator(DiscriminatorConfig config, ParamSet params);

  static Discriminator init(const DiscriminatorConfig& config, std::uint64_t seed);
  static ParamSet zero_params(const DiscriminatorConfig& config);

  const DiscriminatorConfig& config() const noexcept { return config_; }
  const ParamSet& params() const noexcept { return params_; }
  ParamSet& params() noexcept { return params_; }

 private:
  DiscriminatorConfig config_;
  ParamSet params_;
};

class DiscriminatorGraph {
 public:
  struct Output {
    Var score;               // 1 x 1, sigmoid of the similarity
    Var alpha;               // 1 x C crop weights (uniform for joint embedding)
    Var beta;                // 1 x T word weights (one-hot on the last word for joint embedding)
    Var image_embedding;     // E_I, 1 x m
    Var sentence_embedding;  // E_S, 1 x m
  };

  DiscriminatorGraph(const Discriminator& model, Tape& tape, bool requires_grad);

  // Rows of the word embedding table for each token (T x m).
  Var embed_tokens(const TokenSequence& seq);
  // soft_tokens (T x K) times the embedding table. Rows must be nonnegative.
  Var embed_soft(Var soft_tokens);
  // LSTM hidden states after each input row (T x m).
  Var encode_words(Var word_inputs);
  Output score(const Tensor& image_features, Var word_inputs);

  const BoundParams& params() const noexcept { return params_; }

 private:
  Output score_coatt(Var image, Var words);
  Output score_joint(Var image, Var words);

  const Discriminator* model_;
  Tape* tape_;
  BoundParams params_;
};

// ---- Value-level scoring --------------------------------------------------

struct CoAttentionResult {
  double score = 0.0;
  Tensor alpha;  // 1 x C
  Tensor beta;   // 1 x T
  Tensor image_embedding;
  Tensor sentence_embedding;
};

// H: T x m hidden states of the discriminator's word LSTM.
Tensor embed_caption(const Discriminator& model, const TokenSequence& seq);

CoAttentionResult coatt_score(const Discriminator& model, const Tensor& image_features,
                              const TokenSequence& seq);
double jointemb_score(const Discriminator& model, const Tensor& image_features,
                      const TokenSequence& seq);
// Dispatches on the model's kind.
double score(const Discriminator& model, const Tensor& image_features, const TokenSequence& seq);
// Scores a relaxed caption given as T x K rows of token weights.
double score_soft(const Discriminator& model, const Tensor& image_features,
                  const Tensor& soft_tokens);

}  // namespace seqgan
