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
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqgan/captioner.hpp"
#include "seqgan/dataset.hpp"
#include "seqgan/discriminator.hpp"
#include "seqgan/io.hpp"
#include "seqgan/metrics.hpp"
#include "seqgan/semantic.hpp"
#include "seqgan/training.hpp"

namespace seqgan {

inline constexpr const char* kMetricsSchema = "seqgan.metrics.v1";
inline constexpr const char* kEvalSchema = "seqgan.eval.v1";
inline constexpr const char* kProbeSchema = "seqgan.grad_probe.v1";
inline constexpr const char* kPlotSchema = "seqgan.plot.v1";

// Invalid experiment config; `path` names the offending field, e.g. "gan.temperature".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct MetricToggles {
  bool cider = true;
  bool bleu4 = true;
  bool rouge_l = true;
  bool semantic = true;
  bool d_scores = true;
  std::size_t cca_rank = 4;
  std::string eval_split = "val";  // split scored after every epoch

  friend bool operator==(const MetricToggles&, const MetricToggles&) = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";
  DatasetSpec dataset;
  // vocab_size, num_crops and feature_dim are filled from the dataset.
  CaptionerConfig captioner;
  DiscriminatorConfig discriminator;
  CeConfig ce;
  GanConfig gan;
  MetricToggles metrics;

  ExperimentConfig();

  // Strict: unknown keys and wrong types throw ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  // to_json().dump(2); stored verbatim in checkpoints.
  std::string canonical() const;

  std::size_t total_epochs() const { return ce.epochs + gan.d_pretrain_epochs + gan.epochs; }
  // "ce", "d_pretrain" or "gan" for a 1-based epoch.
  std::string phase_of(std::size_t epoch) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Everything derived deterministically from the config before training.
struct ExperimentData {
  DatasetSplit dataset;
  NGramIdf train_idf;  // CIDEr reward table
  SemanticModel semantic;
};

// Captioner and discriminator configs completed with dataset-derived sizes.
ExperimentData prepare_data(ExperimentConfig& config);

ParamSet semantic_to_params(const SemanticModel& model);
SemanticModel semantic_from_params(const ParamSet& params);

// ---- Evaluation ------------------------------------------------------------

struct ImageScore {
  std::size_t image_id = 0;
  std::vector<TokenId> caption;  // EOS stripped
  double cider = 0.0;
  double semantic_score = 0.0;
  double d_score = 0.0;
};

struct ScoreReport {
  double cider = 0.0;
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double semantic_score = 0.0;
  double vocab_coverage = 0.0;
  double d_real = 0.0;    // mean D over the image's references
  double d_fake = 0.0;    // mean D over sampled captions, one per reference
  double d_random = 0.0;  // mean D over the next image's references
  std::vector<ImageScore> per_image;
};

// Greedy (or ensemble) decodes every image. CIDEr idf is fit on the split's
// own references. `rng` drives the sampled captions behind d_fake.
ScoreReport evaluate(std::span<const Captioner* const> models, const Discriminator& d,
                     const SemanticModel* semantic, const std::vector<Example>& examples,
                     const MetricToggles& toggles, Rng& rng);

// ---- Runs ------------------------------------------------------------------

struct RunOptions {
  std::optional<std::filesystem::path> resume_from;
};

struct RunResult {
  std::size_t epochs_completed = 0;
  std::vector<nlohmann::json> records;  // metric records written this run, in order
};

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::size_t epoch);

// CE pretraining, then D pretraining, then GAN epochs. Writes
// ckpt_epoch_000.bin before the first epoch, one checkpoint and one
// metrics.jsonl record per epoch. A resumed run keeps earlier records and
// produces the same files as an uninterrupted one.
RunResult run_experiment(ExperimentConfig config, const RunOptions& options = {});

// Restores models from a checkpoint written by run_experiment.
struct LoadedRun {
  ExperimentConfig config;
  ExperimentData data;
  Checkpoint checkpoint;
  GanState state;
};
LoadedRun load_run(const std::filesystem::path& checkpoint);

// One metrics record; disabled metrics are null.
nlohmann::json metrics_record(std::size_t epoch, const std::string& phase, double loss,
                              const ScoreReport& report, const MetricToggles& toggles);

}  // namespace seqgan
