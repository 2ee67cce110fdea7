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

#include "seqgan/experiment.hpp"

#include <algorithm>
#include <concepts>
#include <fstream>
#include <set>
#include <sstream>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

using nlohmann::json;

// Reads one JSON object field by field and rejects whatever is left over.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where(), "expected an object");
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <std::unsigned_integral T>
  void read(const std::string& key, T& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
        throw ConfigError(where(key), "expected a non-negative integer");
      }
      out = v->get<T>();
    }
  }
  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key), "expected a number");
      out = v->get<double>();
    }
  }
  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  template <typename Enum, typename Parse>
  void read_enum(const std::string& key, Enum& out, Parse parse) {
    std::string name;
    if (find(key) == nullptr) return;
    read(key, name);
    try {
      out = parse(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where(key), e.what());
    }
  }
  std::optional<Fields> section(const std::string& key) {
    if (const json* v = find(key)) return Fields(*v, where(key));
    return std::nullopt;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Wraps a sub-config validate() so its message carries the section path.
template <typename F>
void validated(const std::string& path, F&& check) {
  try {
    check();
  } catch (const ParameterError& e) {
    throw ConfigError(path, e.what());
  }
}

std::vector<Words> stripped(const std::vector<TokenSequence>& refs) {
  std::vector<Words> out;
  out.reserve(refs.size());
  for (const auto& r : refs) out.push_back(strip_eos(r.tokens, Vocabulary::kEos));
  return out;
}

json nullable(bool enabled, double value) { return enabled ? json(value) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

// ---- Config ------------------------------------------------------------------

ExperimentConfig::ExperimentConfig() {
  captioner.hidden_dim = 32;
  captioner.max_len = 10;
  captioner.num_crops = dataset.num_crops;
  captioner.feature_dim = dataset.feature_dim;
  discriminator.num_crops = dataset.num_crops;
  discriminator.feature_dim = dataset.feature_dim;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  Fields root(j, "");
  root.read("seed", c.seed);
  root.read("output_dir", c.output_dir);

  if (auto f = root.section("dataset")) {
    auto& d = c.dataset;
    f->read("n_objects", d.n_objects);
    f->read("n_contexts", d.n_contexts);
    f->read("n_images", d.n_images);
    f->read("n_ooc", d.n_ooc);
    f->read("num_crops", d.num_crops);
    f->read("feature_dim", d.feature_dim);
    f->read("noise", d.noise);
    f->read("context_bias", d.context_bias);
    f->read("holdout_per_object", d.holdout_per_object);
    f->read("train_fraction", d.train_fraction);
    f->read("val_fraction", d.val_fraction);
    f->read("object_synonyms", d.vocab.object_synonyms);
    f->read("context_synonyms", d.vocab.context_synonyms);
    f->finish();
  }
  if (auto f = root.section("captioner")) {
    f->read("hidden_dim", c.captioner.hidden_dim);
    f->read("max_len", c.captioner.max_len);
    f->read_enum("attention", c.captioner.attention, attention_mode_from_string);
    f->finish();
  }
  if (auto f = root.section("discriminator")) {
    f->read_enum("kind", c.discriminator.kind, discriminator_kind_from_string);
    f->read("hidden_dim", c.discriminator.hidden_dim);
    f->finish();
  }
  if (auto f = root.section("ce")) {
    f->read("epochs", c.ce.epochs);
    f->read("lr", c.ce.lr);
    f->read("batch_size", c.ce.batch_size);
    f->finish();
  }
  if (auto f = root.section("gan")) {
    auto& g = c.gan;
    f->read_enum("estimator", g.estimator, estimator_from_string);
    f->read_enum("reward", g.reward, reward_from_string);
    f->read("cider_weight", g.cider_weight);
    f->read("temperature", g.temperature);
    f->read("fm_image_weight", g.fm_image_weight);
    f->read("fm_sentence_weight", g.fm_sentence_weight);
    f->read("generator_lr", g.generator_lr);
    f->read("discriminator_lr", g.discriminator_lr);
    f->read("batch_size", g.batch_size);
    f->read("epochs", g.epochs);
    f->read("d_pretrain_epochs", g.d_pretrain_epochs);
    f->finish();
  }
  if (auto f = root.section("metrics")) {
    auto& m = c.metrics;
    f->read("cider", m.cider);
    f->read("bleu4", m.bleu4);
    f->read("rouge_l", m.rouge_l);
    f->read("semantic", m.semantic);
    f->read("d_scores", m.d_scores);
    f->read("cca_rank", m.cca_rank);
    f->read("eval_split", m.eval_split);
    f->finish();
  }
  root.finish();

  c.gan.seed = c.seed;
  c.dataset.seed = derive_seed(c.seed, 0);
  c.captioner.num_crops = c.discriminator.num_crops = c.dataset.num_crops;
  c.captioner.feature_dim = c.discriminator.feature_dim = c.dataset.feature_dim;

  validated("dataset", [&] { c.dataset.validate(); });
  validated("ce", [&] { c.ce.validate(); });
  validated("gan", [&] { c.gan.validate(); });
  if (c.captioner.hidden_dim == 0) throw ConfigError("captioner.hidden_dim", "must be >= 1");
  if (c.captioner.max_len == 0) throw ConfigError("captioner.max_len", "must be >= 1");
  if (c.discriminator.hidden_dim == 0) throw ConfigError("discriminator.hidden_dim", "must be >= 1");
  if (c.metrics.cca_rank == 0 || c.metrics.cca_rank > c.dataset.feature_dim) {
    throw ConfigError("metrics.cca_rank", "must be in [1, dataset.feature_dim]");
  }
  static const std::set<std::string> kSplits = {"train", "val", "test", "ooc"};
  if (!kSplits.count(c.metrics.eval_split)) {
    throw ConfigError("metrics.eval_split", "expected one of train, val, test, ooc");
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  const auto& d = dataset;
  return json{
      {"seed", seed},
      {"output_dir", output_dir},
      {"dataset",
       {{"n_objects", d.n_objects}, {"n_contexts", d.n_contexts}, {"n_images", d.n_images},
        {"n_ooc", d.n_ooc}, {"num_crops", d.num_crops}, {"feature_dim", d.feature_dim},
        {"noise", d.noise}, {"context_bias", d.context_bias},
        {"holdout_per_object", d.holdout_per_object}, {"train_fraction", d.train_fraction},
        {"val_fraction", d.val_fraction}, {"object_synonyms", d.vocab.object_synonyms},
        {"context_synonyms", d.vocab.context_synonyms}}},
      {"captioner",
       {{"hidden_dim", captioner.hidden_dim}, {"max_len", captioner.max_len},
        {"attention", seqgan::to_string(captioner.attention)}}},
      {"discriminator",
       {{"kind", seqgan::to_string(discriminator.kind)}, {"hidden_dim", discriminator.hidden_dim}}},
      {"ce", {{"epochs", ce.epochs}, {"lr", ce.lr}, {"batch_size", ce.batch_size}}},
      {"gan",
       {{"estimator", seqgan::to_string(gan.estimator)}, {"reward", seqgan::to_string(gan.reward)},
        {"cider_weight", gan.cider_weight}, {"temperature", gan.temperature},
        {"fm_image_weight", gan.fm_image_weight}, {"fm_sentence_weight", gan.fm_sentence_weight},
        {"generator_lr", gan.generator_lr}, {"discriminator_lr", gan.discriminator_lr},
        {"batch_size", gan.batch_size}, {"epochs", gan.epochs},
        {"d_pretrain_epochs", gan.d_pretrain_epochs}}},
      {"metrics",
       {{"cider", metrics.cider}, {"bleu4", metrics.bleu4}, {"rouge_l", metrics.rouge_l},
        {"semantic", metrics.semantic}, {"d_scores", metrics.d_scores},
        {"cca_rank", metrics.cca_rank}, {"eval_split", metrics.eval_split}}},
  };
}

std::string ExperimentConfig::canonical() const { return to_json().dump(2); }

std::string ExperimentConfig::phase_of(std::size_t epoch) const {
  if (epoch == 0 || epoch > total_epochs()) throw InputError("epoch out of schedule");
  if (epoch <= ce.epochs) return "ce";
  if (epoch <= ce.epochs + gan.d_pretrain_epochs) return "d_pretrain";
  return "gan";
}

// ---- Data -------------------------------------------------------------------

ExperimentData prepare_data(ExperimentConfig& config) {
  ExperimentData data;
  data.dataset = generate_dataset(config.dataset);
  const std::size_t vocab = data.dataset.vocab.size();
  config.captioner.vocab_size = vocab;
  config.discriminator.vocab_size = vocab;
  config.captioner.bos_id = Vocabulary::kBos;
  config.captioner.eos_id = Vocabulary::kEos;

  std::size_t longest = 0;
  for (const auto* split : {&data.dataset.train, &data.dataset.val, &data.dataset.test,
                            &data.dataset.ooc}) {
    for (const auto& ex : *split) {
      for (const auto& r : ex.references) longest = std::max(longest, r.size());
    }
  }
  if (config.captioner.max_len < longest) {
    throw ConfigError("captioner.max_len", "must be >= " + std::to_string(longest) +
                                               ", the longest reference caption");
  }
  validated("captioner", [&] { config.captioner.validate(); });
  validated("discriminator", [&] { config.discriminator.validate(); });

  std::vector<std::vector<Words>> corpus;
  std::vector<std::vector<TokenId>> captions;
  std::vector<const Tensor*> images;
  for (const auto& ex : data.dataset.train) {
    corpus.push_back(stripped(ex.references));
    for (const auto& words : corpus.back()) {
      captions.push_back(words);
      images.push_back(&ex.scene.features);
    }
  }
  data.train_idf = NGramIdf::fit(corpus);
  data.semantic = fit_semantic_model(captions, images, vocab, config.metrics.cca_rank);
  return data;
}

ParamSet semantic_to_params(const SemanticModel& model) {
  ParamSet p;
  p.add("token_embeddings", model.token_embeddings);
  p.add("cca_u", model.cca.u);
  p.add("cca_v", model.cca.v);
  p.add("cca_sigma", model.cca.sigma);
  p.add("cca_mean_x", model.cca.mean_x);
  p.add("cca_mean_y", model.cca.mean_y);
  return p;
}

SemanticModel semantic_from_params(const ParamSet& p) {
  SemanticModel m;
  m.token_embeddings = p["token_embeddings"];
  m.cca.u = p["cca_u"];
  m.cca.v = p["cca_v"];
  m.cca.sigma = p["cca_sigma"];
  m.cca.mean_x = p["cca_mean_x"];
  m.cca.mean_y = p["cca_mean_y"];
  return m;
}

// ---- Evaluation -----------------------------------------------------------------

ScoreReport evaluate(std::span<const Captioner* const> models, const Discriminator& d,
                     const SemanticModel* semantic, const std::vector<Example>& examples,
                     const MetricToggles& toggles, Rng& rng) {
  if (models.empty()) throw InputError("evaluate needs at least one model");
  if (examples.empty()) throw InputError("evaluate needs a non-empty split");
  if (toggles.semantic && semantic == nullptr) throw InputError("semantic metric needs a model");
  const Captioner& first = *models.front();

  std::vector<std::vector<Words>> refs;
  refs.reserve(examples.size());
  for (const auto& ex : examples) refs.push_back(stripped(ex.references));
  const NGramIdf idf = NGramIdf::fit(refs);

  ScoreReport report;
  std::vector<Words> generated;
  const double n = static_cast<double>(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    const Tensor& feats = ex.scene.features;
    const TokenSequence caption = ensemble_decode(models, feats);
    ImageScore row;
    row.image_id = ex.scene.image_id;
    row.caption = strip_eos(caption.tokens, Vocabulary::kEos);
    if (toggles.cider) row.cider = cider_d(row.caption, refs[i], idf);
    if (toggles.semantic) row.semantic_score = semantic->score(row.caption, feats).value;
    if (toggles.d_scores) {
      row.d_score = score(d, feats, caption);
      const Example& other = examples[(i + 1) % examples.size()];
      for (const auto& r : ex.references) {
        report.d_real += score(d, feats, r) / (n * static_cast<double>(ex.references.size()));
      }
      for (const auto& r : other.references) {
        report.d_random += score(d, feats, r) / (n * static_cast<double>(other.references.size()));
      }
      // As many samples as references, so d_fake and d_real average alike.
      const std::size_t samples = ex.references.size();
      for (std::size_t k = 0; k < samples; ++k) {
        const TokenSequence fake = sample_sentence(first, feats, rng).sequence;
        report.d_fake += score(d, feats, fake) / (n * static_cast<double>(samples));
      }
    }
    if (toggles.rouge_l) report.rouge_l += rouge_l(row.caption, refs[i]) / n;
    report.cider += row.cider / n;
    report.semantic_score += row.semantic_score / n;
    generated.push_back(row.caption);
    report.per_image.push_back(std::move(row));
  }
  if (toggles.bleu4) report.bleu4 = corpus_bleu4(generated, refs);
  report.vocab_coverage = vocabulary_coverage(generated, first.config().vocab_size);
  return report;
}

json metrics_record(std::size_t epoch, const std::string& phase, double loss,
                    const ScoreReport& r, const MetricToggles& t) {
  return json{{"schema", kMetricsSchema},
              {"epoch", epoch},
              {"phase", phase},
              {"split", t.eval_split},
              {"loss", loss},
              {"cider", nullable(t.cider, r.cider)},
              {"bleu4", nullable(t.bleu4, r.bleu4)},
              {"rouge_l", nullable(t.rouge_l, r.rouge_l)},
              {"semantic_score", nullable(t.semantic, r.semantic_score)},
              {"vocab_coverage", r.vocab_coverage},
              {"d_real", nullable(t.d_scores, r.d_real)},
              {"d_fake", nullable(t.d_scores, r.d_fake)},
              {"d_random", nullable(t.d_scores, r.d_random)}};
}

// ---- Runs ---------------------------------------------------------------------

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::size_t epoch) {
  std::ostringstream name;
  name << "ckpt_epoch_";
  name.width(3);
  name.fill('0');
  name << epoch << ".bin";
  return dir / name.str();
}

namespace {

Checkpoint make_checkpoint(std::size_t epoch, const ExperimentConfig& config, const GanState& s,
                           const Rng& rng, const SemanticModel& semantic) {
  Checkpoint c;
  c.epoch = epoch;
  c.config_json = config.canonical();
  c.captioner = s.generator.params();
  c.discriminator = s.discriminator.params();
  c.captioner_optimizer = s.generator_adam;
  c.discriminator_optimizer = s.discriminator_adam;
  c.rng_state = rng.serialize();
  c.semantic = semantic_to_params(semantic);
  return c;
}

}  // namespace

LoadedRun load_run(const std::filesystem::path& checkpoint) {
  Checkpoint ckpt = load_checkpoint(checkpoint);
  json j;
  try {
    j = json::parse(ckpt.config_json);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint config is not JSON: ") + e.what(), 0);
  }
  ExperimentConfig config = ExperimentConfig::from_json(j);
  ExperimentData data = prepare_data(config);
  GanState state{Captioner(config.captioner, ckpt.captioner),
                 Discriminator(config.discriminator, ckpt.discriminator),
                 ckpt.captioner_optimizer, ckpt.discriminator_optimizer};
  data.semantic = semantic_from_params(ckpt.semantic);
  return LoadedRun{std::move(config), std::move(data), std::move(ckpt), std::move(state)};
}

RunResult run_experiment(ExperimentConfig config, const RunOptions& options) {
  ExperimentData data = prepare_data(config);
  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  const auto metrics_path = dir / "metrics.jsonl";

  GanState state{Captioner::init(config.captioner, derive_seed(config.seed, 1)),
                 Discriminator::init(config.discriminator, derive_seed(config.seed, 2)), {}, {}};
  Rng rng(derive_seed(config.seed, 3));
  std::size_t start = 0;
  std::vector<std::string> kept;

  if (options.resume_from) {
    LoadedRun loaded = load_run(*options.resume_from);
    if (loaded.config.canonical() != config.canonical()) {
      throw ConfigError("<checkpoint>", "checkpoint was written by a different config");
    }
    state = std::move(loaded.state);
    rng = Rng::deserialize(loaded.checkpoint.rng_state);
    start = loaded.checkpoint.epoch;
    if (start > config.total_epochs()) throw InputError("checkpoint is past the end of the schedule");
    for (const auto& line : read_lines(metrics_path)) {
      const json rec = json::parse(line);
      if (rec.at("epoch").get<std::size_t>() <= start) kept.push_back(line);
    }
  } else {
    save_checkpoint(checkpoint_path(dir, 0), make_checkpoint(0, config, state, rng, data.semantic));
  }

  std::string metrics_text;
  for (const auto& line : kept) metrics_text += line + "\n";
  write_text(metrics_path, metrics_text);

  const auto& eval_split = data.dataset.split(config.metrics.eval_split);
  const auto& train = data.dataset.train;
  RunResult result;
  result.epochs_completed = start;
  for (std::size_t epoch = start + 1; epoch <= config.total_epochs(); ++epoch) {
    const std::string phase = config.phase_of(epoch);
    double loss = 0.0;
    if (phase == "ce") {
      loss = ce_epoch(state.generator, state.generator_adam, train, config.ce, rng);
      // The GAN phase fine-tunes with its own optimizer state.
      if (epoch == config.ce.epochs) state.generator_adam = AdamState{};
    } else if (phase == "d_pretrain") {
      loss = -discriminator_epoch(state, train, config.gan, rng).d_objective;
    } else {
      loss = -gan_epoch(state, train, config.gan, data.train_idf, rng).d_objective;
    }
    Rng eval_rng(derive_seed(config.seed, 1000 + epoch));
    const Captioner* models[] = {&state.generator};
    const ScoreReport report =
        evaluate(models, state.discriminator, &data.semantic, eval_split, config.metrics, eval_rng);
    const json record = metrics_record(epoch, phase, loss, report, config.metrics);
    metrics_text += record.dump() + "\n";
    write_text(metrics_path, metrics_text);
    save_checkpoint(checkpoint_path(dir, epoch),
                    make_checkpoint(epoch, config, state, rng, data.semantic));
    result.records.push_back(record);
    result.epochs_completed = epoch;
  }
  return result;
}

}  // namespace seqgan
