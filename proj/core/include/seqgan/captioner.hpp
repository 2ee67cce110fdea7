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
#include <span>
#include <string>
#include <vector>

#include "seqgan/autodiff.hpp"
#include "seqgan/params.hpp"
#include "seqgan/rng.hpp"
#include "seqgan/sequence.hpp"
#include "seqgan/tensor.hpp"

namespace seqgan {

enum class AttentionMode {
  kContextAware,  // sentinel attention, previous mixture fed back into the LSTM
  kSentinel,      // sentinel attention, mean image feature fed to the LSTM
  kAtt2All,       // plain attention over crops, mean image feature fed to the LSTM
};

std::string to_string(AttentionMode mode);
AttentionMode attention_mode_from_string(const std::string& name);

struct CaptionerConfig {
  std::size_t vocab_size = 0;
  std::size_t hidden_dim = 512;
  std::size_t num_crops = 196;
  std::size_t feature_dim = 2048;
  std::size_t max_len = 16;
  TokenId bos_id = 0;
  TokenId eos_id = 1;
  AttentionMode attention = AttentionMode::kContextAware;

  // Throws ParameterError on any violated invariant.
  void validate() const;

  friend bool operator==(const CaptionerConfig&, const CaptionerConfig&) = default;
};

/// Generator weights plus the config they were built for.
///
/// Parameters (m = hidden_dim, K = vocab_size, d = feature_dim):
///   embed K x m, lstm_wx 2m x 4m, lstm_wh m x 4m, lstm_b 1 x 4m,
///   sent_wx 2m x m, sent_wh m x m, sent_b 1 x m        (sentinel modes only)
///   img_proj d x m, att_img m x m, att_hid m x m, att_sent m x m (sentinel modes),
///   att_b 1 x m, att_w m x 1, out_w m x K, out_b 1 x K.
class Captioner {
 public:
  Captioner(CaptionerConfig config, ParamSet params);

  // Every entry U(-1/sqrt(m), 1/sqrt(m)), drawn in declaration order.
  static Captioner init(const CaptionerConfig& config, std::uint64_t seed);
  static ParamSet zero_params(const CaptionerConfig& config);

  const CaptionerConfig& config() const noexcept { return config_; }
  const ParamSet& params() const noexcept { return params_; }
  ParamSet& params() noexcept { return params_; }

  bool uses_sentinel() const noexcept { return config_.attention != AttentionMode::kAtt2All; }

 private:
  CaptionerConfig config_;
  ParamSet params_;
};

/// The decoder written against a tape. All public decoding functions below
/// are thin loops over this; the training code uses it directly to get
/// gradients.
class CaptionerGraph {
 public:
  struct State {
    Var h;
    Var c;
    Var context;  // mixture of crops and sentinel from the previous step
  };

  struct Image {
    Var projected;  // C x m
    Var keys;       // C x m, projected * att_img
    Var mean;       // 1 x m
  };

  struct Step {
    Var logits;            // 1 x K, BOS masked to a large negative value
    State state;
    Var attention;         // 1 x (C+1); last entry is the sentinel weight
    double sentinel_gate;  // weight given to the sentinel, in [0, 1]
  };

  struct SequenceLogProb {
    Var total;                // scalar sum of per-token log-probabilities
    std::vector<Var> logits;  // one 1 x K row per emitted token
  };

  CaptionerGraph(const Captioner& model, Tape& tape, bool requires_grad);

  Image encode_image(const Tensor& features);
  State initial_state();
  State make_state(const Tensor& h, const Tensor& c, const Tensor& context);
  Var embed(TokenId token);
  // soft_row (1 x K) times the embedding table.
  Var embed_soft(Var soft_row);
  Step step(const State& state, Var input_embedding, const Image& image);

  // Teacher-forced log p(seq | image). Throws InputError on invalid sequences.
  SequenceLogProb log_prob(const Image& image, const TokenSequence& seq);

  const BoundParams& params() const noexcept { return params_; }
  const Captioner& model() const noexcept { return *model_; }
  Tape& tape() noexcept { return *tape_; }

 private:
  const Captioner* model_;
  Tape* tape_;
  BoundParams params_;
  Var bos_mask_;
  // Cached handles, in the order of Captioner's parameter table.
  Var embed_, lstm_wx_, lstm_wh_, lstm_b_;
  Var sent_wx_, sent_wh_, sent_b_;
  Var img_proj_, att_img_, att_hid_, att_sent_, att_b_, att_w_, out_w_, out_b_;
};

// ---- Value-level decoding -------------------------------------------------

struct DecoderState {
  Tensor h;        // 1 x m
  Tensor c;        // 1 x m
  Tensor context;  // 1 x m; zero before the first step
};

struct DecodeStep {
  Tensor logits;     // 1 x K
  DecoderState state;
  Tensor attention;  // 1 x (C+1)
  double sentinel_gate = 0.0;
};

DecoderState initial_decoder_state(const CaptionerConfig& config);

DecodeStep decode_step(const Captioner& model, const DecoderState& state, TokenId prev_token,
                       const Tensor& image_features);

// Argmax at every step (ties -> lowest id) until EOS or max_len.
TokenSequence greedy_decode(const Captioner& model, const Tensor& image_features);

struct SampledSentence {
  TokenSequence sequence;
  double log_prob = 0.0;
};

SampledSentence sample_sentence(const Captioner& model, const Tensor& image_features, Rng& rng);

double log_prob(const Captioner& model, const Tensor& image_features, const TokenSequence& seq);

// Averages post-softmax distributions of all models at every step before the
// argmax. Models must share one config.
TokenSequence ensemble_decode(std::span<const Captioner* const> models,
                              const Tensor& image_features);

}  // namespace seqgan
