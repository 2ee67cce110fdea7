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

#include "toy.hpp"

#include <atomic>
#include <random>

#include "seqgan/dataset.hpp"

namespace seqgan::testing {

CaptionerConfig tiny_captioner(std::size_t vocab, std::size_t max_len, AttentionMode mode) {
  CaptionerConfig c;
  c.vocab_size = vocab;
  c.hidden_dim = 4;
  c.num_crops = kTinyCrops;
  c.feature_dim = kTinyFeatures;
  c.max_len = max_len;
  c.bos_id = Vocabulary::kBos;
  c.eos_id = Vocabulary::kEos;
  c.attention = mode;
  return c;
}

DiscriminatorConfig tiny_discriminator(DiscriminatorKind kind, std::size_t vocab) {
  DiscriminatorConfig c;
  c.kind = kind;
  c.vocab_size = vocab;
  c.hidden_dim = 4;
  c.num_crops = kTinyCrops;
  c.feature_dim = kTinyFeatures;
  return c;
}

Tensor random_features(Rng& rng, std::size_t crops, std::size_t features) {
  Tensor t({crops, features});
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

TokenSequence random_sequence(Rng& rng, std::size_t vocab, std::size_t words, bool with_eos) {
  TokenSequence s;
  for (std::size_t i = 0; i < words; ++i) s.tokens.push_back(2 + rng.below(vocab - 2));
  if (with_eos) s.tokens.push_back(Vocabulary::kEos);
  s.terminated = with_eos;
  return s;
}

ExperimentConfig toy_task_config(std::uint64_t seed) {
  auto j = nlohmann::json::parse(R"({
    "dataset": {"n_objects": 6, "n_contexts": 4, "n_images": 240, "n_ooc": 40},
    "captioner": {"hidden_dim": 24, "max_len": 10},
    "discriminator": {"hidden_dim": 32},
    "ce": {"epochs": 15, "lr": 0.01, "batch_size": 8},
    "gan": {"epochs": 20, "d_pretrain_epochs": 30, "generator_lr": 0.001,
            "discriminator_lr": 0.01, "batch_size": 8}
  })");
  j["seed"] = seed;
  return ExperimentConfig::from_json(j);
}

ExperimentConfig quick_run_config(std::uint64_t seed, const std::filesystem::path& out_dir) {
  auto j = nlohmann::json::parse(R"({
    "dataset": {"n_objects": 4, "n_contexts": 3, "n_images": 40, "n_ooc": 8},
    "captioner": {"hidden_dim": 8, "max_len": 10},
    "discriminator": {"hidden_dim": 8},
    "ce": {"epochs": 1, "lr": 0.01, "batch_size": 8},
    "gan": {"epochs": 1, "d_pretrain_epochs": 1, "batch_size": 8},
    "metrics": {"cca_rank": 2}
  })");
  j["seed"] = seed;
  j["output_dir"] = out_dir.string();
  return ExperimentConfig::from_json(j);
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("seqgan_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace seqgan::testing
