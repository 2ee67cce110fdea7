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

#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "seqgan/errors.hpp"
#include "seqgan/experiment.hpp"
#include "seqgan/io.hpp"

namespace seqgan::cli {

namespace {

using nlohmann::json;

// Shortest text that parses back to the same double.
std::string num(double v) { return fmt::format("{}", v); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json load_config_json(const std::filesystem::path& path, const CommonOptions& common) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");
  if (common.seed_override) j["seed"] = *common.seed_override;
  if (common.out_dir) j["output_dir"] = common.out_dir->string();
  return j;
}

std::filesystem::path output_dir(const CommonOptions& common, const std::filesystem::path& fallback) {
  const auto dir = common.out_dir ? *common.out_dir : fallback;
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void configure_logging() {
  auto logger = spdlog::get("seqgan");
  if (!logger) logger = spdlog::stderr_color_mt("seqgan");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("SEQGAN_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (level != "info") spdlog::warn("SEQGAN_LOG='{}' not in {{error,info,debug}}; using info", level);
  }
}

}  // namespace

// ---- train ---------------------------------------------------------------------

void cmd_train(const TrainOptions& options) {
  ExperimentConfig config = ExperimentConfig::from_json(load_config_json(options.config, options.common));
  spdlog::info("training into {} ({} epochs: {} ce, {} d_pretrain, {} gan)", config.output_dir,
               config.total_epochs(), config.ce.epochs, config.gan.d_pretrain_epochs,
               config.gan.epochs);
  RunOptions run;
  run.resume_from = options.resume_checkpoint;
  const RunResult result = run_experiment(config, run);
  for (const auto& rec : result.records) spdlog::info("{}", rec.dump());
  spdlog::info("done: {} epochs completed", result.epochs_completed);
}

// ---- eval ----------------------------------------------------------------------

void cmd_eval(const EvalOptions& options) {
  static const std::set<std::string> kSplits = {"val", "test", "ooc"};
  if (!kSplits.count(options.split)) {
    throw UsageError("unknown split '" + options.split + "' (expected val, test, ooc)");
  }
  if (options.checkpoints.empty()) throw UsageError("eval needs at least one --checkpoint");
  LoadedRun run = load_run(options.checkpoints.front());
  std::vector<Captioner> members;
  members.reserve(options.checkpoints.size());
  members.push_back(run.state.generator);
  for (std::size_t i = 1; i < options.checkpoints.size(); ++i) {
    const Checkpoint other = load_checkpoint(options.checkpoints[i]);
    members.emplace_back(run.config.captioner, other.captioner);
  }
  std::vector<const Captioner*> models;
  for (const auto& m : members) models.push_back(&m);

  const auto& examples = run.data.dataset.split(options.split);
  const std::uint64_t seed = options.common.seed_override.value_or(run.config.seed);
  Rng rng(derive_seed(seed, 2000));
  const ScoreReport report = evaluate(models, run.state.discriminator, &run.data.semantic, examples,
                                      run.config.metrics, rng);

  const auto dir = output_dir(options.common, options.checkpoints.front().parent_path());
  std::string csv = fmt::format("# schema={}\n", kEvalSchema);
  csv += "image_id,caption_tokens,caption_text,cider,semantic_score,d_score\n";
  for (const auto& row : report.per_image) {
    csv += fmt::format("{},{},{},{},{},{}\n", row.image_id, format_tokens(row.caption),
                       csv_field(run.data.dataset.vocab.render(row.caption)), num(row.cider),
                       num(row.semantic_score), num(row.d_score));
  }
  write_text(dir / ("eval_" + options.split + ".csv"), csv);

  json summary = metrics_record(run.checkpoint.epoch, "eval", 0.0, report, run.config.metrics);
  summary["schema"] = kEvalSchema;
  summary["split"] = options.split;
  summary["ensemble_size"] = models.size();
  summary.erase("loss");
  write_text(dir / ("eval_" + options.split + ".json"), summary.dump(2) + "\n");
  fmt::print("{}\n", summary.dump(2));
}

// ---- grad-probe ------------------------------------------------------------------

void cmd_grad_probe(const ProbeOptions& options) {
  if (options.n_batches == 0) throw UsageError("--n-batches must be >= 1");
  std::vector<Estimator> estimators;
  for (const auto& name : options.estimators) {
    try {
      estimators.push_back(estimator_from_string(name));
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
  }
  RewardKind reward;
  try {
    reward = reward_from_string(options.reward);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  LoadedRun run = load_run(options.checkpoint);
  const std::uint64_t seed = options.common.seed_override.value_or(run.config.seed);

  std::string norms = fmt::format("# schema={}\nbatch_index,estimator,l2_norm\n", kProbeSchema);
  std::string hashes = fmt::format("# schema={}\nbatch_index,estimator,batch_hash\n", kProbeSchema);
  json summary = {{"schema", kProbeSchema}, {"n_batches", options.n_batches},
                  {"batch_size", options.batch_size}, {"seed", seed}, {"estimators", json::object()}};
  std::optional<std::vector<std::uint64_t>> reference_hashes;
  for (Estimator e : estimators) {
    seqgan::ProbeOptions probe;
    probe.estimator = e;
    probe.reward = e == Estimator::kScst ? reward : RewardKind::kLogD;
    probe.temperature = options.temperature;
    probe.n_batches = options.n_batches;
    probe.batch_size = options.batch_size;
    probe.seed = seed;
    const ProbeResult r = grad_norm_probe(run.state.generator, run.state.discriminator,
                                          run.data.dataset.train, run.data.train_idf, probe);
    if (reference_hashes && *reference_hashes != r.batch_hashes) {
      throw std::runtime_error("estimators saw different minibatches");
    }
    reference_hashes = r.batch_hashes;
    for (std::size_t b = 0; b < r.norms.size(); ++b) {
      norms += fmt::format("{},{},{}\n", b, to_string(e), num(r.norms[b]));
      hashes += fmt::format("{},{},{:016x}\n", b, to_string(e), r.batch_hashes[b]);
    }
    const SeriesSummary s = summarize(r.norms);
    summary["estimators"][to_string(e)] = {{"mean", s.mean}, {"variance", s.variance}};
    spdlog::info("{}: mean {:.6g}, variance {:.6g}", to_string(e), s.mean, s.variance);
  }
  const auto dir = output_dir(options.common, options.checkpoint.parent_path());
  write_text(dir / "grad_norms.csv", norms);
  write_text(dir / "grad_batches.csv", hashes);
  write_text(dir / "grad_summary.json", summary.dump(2) + "\n");
  fmt::print("{}\n", summary.dump(2));
}

// ---- plots ---------------------------------------------------------------------------

void cmd_plots(const PlotsOptions& options) {
  if (options.metrics_files.empty()) throw UsageError("plots needs at least one metrics file");
  std::optional<std::set<std::string>> fields;
  std::map<std::string, std::size_t> run_ids;
  std::string out = fmt::format("# schema={}\nrun_id,epoch,metric,value\n", kPlotSchema);
  static const std::set<std::string> kKeys = {"schema", "epoch", "phase", "split"};
  for (const auto& path : options.metrics_files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string run_id = path.parent_path().filename().string();
    if (run_id.empty()) run_id = path.stem().string();
    if (const std::size_t seen = run_ids[run_id]++; seen > 0) run_id += "#" + std::to_string(seen);

    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.empty()) continue;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::parse_error& e) {
        throw UsageError(fmt::format("{}:{}: not JSON ({})", path.string(), line_no, e.what()));
      }
      if (!rec.is_object() || rec.value("schema", "") != kMetricsSchema) {
        throw UsageError(fmt::format("{}:{}: schema drift: expected schema '{}'", path.string(),
                                     line_no, kMetricsSchema));
      }
      std::set<std::string> keys;
      for (const auto& [k, v] : rec.items()) keys.insert(k);
      if (!fields) fields = keys;
      if (keys != *fields) {
        std::vector<std::string> diff;
        for (const auto& k : keys) {
          if (!fields->count(k)) diff.push_back("+" + k);
        }
        for (const auto& k : *fields) {
          if (!keys.count(k)) diff.push_back("-" + k);
        }
        throw UsageError(fmt::format("{}:{}: schema drift in fields: {}", path.string(), line_no,
                                     fmt::join(diff, ", ")));
      }
      const auto epoch = rec.at("epoch").get<std::size_t>();
      for (const auto& [k, v] : rec.items()) {
        if (kKeys.count(k) || !v.is_number()) continue;
        out += fmt::format("{},{},{},{}\n", csv_field(run_id), epoch, k, num(v.get<double>()));
      }
    }
  }
  const auto dir = output_dir(options.common, ".");
  write_text(dir / "plot_data.csv", out);
  spdlog::info("wrote {}", (dir / "plot_data.csv").string());
}

// ---- gen-data -------------------------------------------------------------------------

void cmd_gen_data(const GenDataOptions& options) {
  ExperimentConfig config = ExperimentConfig::from_json(load_config_json(options.config, options.common));
  const DatasetSplit data = generate_dataset(config.dataset);
  const auto dir = output_dir(options.common, config.output_dir);
  for (const std::string name : {"train", "val", "test", "ooc"}) {
    const auto& examples = data.split(name);
    std::vector<Tensor> features;
    std::string captions;
    for (const auto& ex : examples) {
      features.push_back(ex.scene.features);
      for (const auto& r : ex.references) {
        captions += fmt::format("{}\t{}\n", ex.scene.image_id, data.vocab.render(r.tokens));
      }
    }
    save_features(dir / ("features_" + name + ".sgf"), features);
    write_text(dir / ("captions_" + name + ".tsv"), captions);
    spdlog::info("{}: {} images", name, examples.size());
  }
  std::string vocab;
  for (const auto& w : data.vocab.words()) vocab += w + "\n";
  write_text(dir / "vocab.txt", vocab);
}

// ---- dispatch ---------------------------------------------------------------------------

int run(int argc, const char* const* argv) {
  configure_logging();
  CLI::App app{"seqgan: adversarial caption-training laboratory"};
  app.require_subcommand(1);

  CommonOptions common;
  std::uint64_t seed = 0;
  std::string out_dir;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed-override", seed, "Replace the config seed");
    sub->add_option("--out-dir", out_dir, "Output directory");
  };

  TrainOptions train;
  std::string resume;
  auto* train_cmd = app.add_subcommand("train", "CE pretrain, D pretrain, then GAN training");
  train_cmd->add_option("--config", train.config, "Experiment config (JSON)")->required();
  train_cmd->add_option("--checkpoint", resume, "Resume from this checkpoint");
  add_common(train_cmd);

  EvalOptions eval;
  std::vector<std::string> eval_ckpts;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint (or an ensemble) on a split");
  eval_cmd->add_option("--checkpoint", eval_ckpts, "Checkpoint; repeat for an ensemble")->required();
  eval_cmd->add_option("--split", eval.split, "val, test or ooc");
  add_common(eval_cmd);

  ProbeOptions probe;
  std::string probe_ckpt;
  auto* probe_cmd = app.add_subcommand("grad-probe", "Logit-gradient norms per estimator");
  probe_cmd->add_option("--checkpoint", probe_ckpt, "Checkpoint to probe")->required();
  probe_cmd->add_option("--estimators", probe.estimators, "scst, gumbel_soft, gumbel_st")
      ->delimiter(',');
  probe_cmd->add_option("--reward", probe.reward, "SCST reward: logD, logD_plus_cider, cider");
  probe_cmd->add_option("--n-batches", probe.n_batches, "Minibatches per estimator");
  probe_cmd->add_option("--batch-size", probe.batch_size, "Examples per minibatch");
  probe_cmd->add_option("--temperature", probe.temperature, "Gumbel temperature");
  add_common(probe_cmd);

  PlotsOptions plots;
  std::vector<std::string> plot_files;
  auto* plots_cmd = app.add_subcommand("plots", "Merge metrics.jsonl files into long-format CSV");
  plots_cmd->add_option("files", plot_files, "metrics.jsonl files")->required();
  add_common(plots_cmd);

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write the synthetic dataset to disk");
  gen_cmd->add_option("--config", gen.config, "Experiment config (JSON)")->required();
  add_common(gen_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed-override")) common.seed_override = seed;
    if (sub->count("--out-dir")) common.out_dir = out_dir;
  }

  try {
    if (*train_cmd) {
      train.common = common;
      if (!resume.empty()) train.resume_checkpoint = resume;
      cmd_train(train);
    } else if (*eval_cmd) {
      eval.common = common;
      eval.checkpoints.assign(eval_ckpts.begin(), eval_ckpts.end());
      cmd_eval(eval);
    } else if (*probe_cmd) {
      probe.common = common;
      probe.checkpoint = probe_ckpt;
      cmd_grad_probe(probe);
    } else if (*plots_cmd) {
      plots.common = common;
      plots.metrics_files.assign(plot_files.begin(), plot_files.end());
      cmd_plots(plots);
    } else if (*gen_cmd) {
      gen.common = common;
      cmd_gen_data(gen);
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    spdlog::error("config error at {}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace seqgan::cli
