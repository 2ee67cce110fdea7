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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   seqgan_acceptance [--expect-fail N[,N...]] [--only N[,N...]]
//
// Exit status is 0 when every criterion passes, except those listed in
// --expect-fail, which must fail (an unexpected pass is an error too, so a
// stale expectation cannot hide).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cases.hpp"
#include "enumeration.hpp"
#include "gradcheck.hpp"
#include "seqgan/errors.hpp"
#include "seqgan/experiment.hpp"
#include "seqgan/training.hpp"
#include "toy.hpp"

namespace {

using namespace seqgan;
using namespace seqgan::testing;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1: gradient correctness ---------------------------------------------------

constexpr int kGradInstances = 20;
constexpr double kGradTolerance = 1e-4;

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::size_t checks = 0;
  auto record = [&](const std::string& name, double err) {
    ++checks;
    if (!(err <= worst)) {
      worst = err;
      worst_name = name;
    }
  };
  for (const auto& c : op_cases()) {
    for (int i = 0; i < kGradInstances; ++i) record(c.name, check_op(c, 1000 + i));
  }
  for (const auto& c : loss_cases()) {
    for (int i = 0; i < kGradInstances; ++i) record(c.name, c.relative_error(2000 + i));
  }
  const double secs = seconds_since(t0);
  const bool pass = worst < kGradTolerance && secs < 60.0;
  return {pass, fmt("%zu checks (%zu ops + %zu losses x %d), worst rel err %.2e (%s), %.1f s",
                    checks, op_cases().size(), loss_cases().size(), kGradInstances, worst,
                    worst_name.c_str(), secs)};
}

// ---- 2, 3: enumerable SCST model ----------------------------------------------

struct Enumerable {
  Captioner g;
  Discriminator d;
  Tensor features;
};

Enumerable enumerable_model(std::uint64_t seed) {
  Rng rng(seed);
  Captioner g = Captioner::init(tiny_captioner(4, 3), rng.next_u64());
  // Wider weights than the default init make the distribution far from uniform.
  for (auto& e : g.params().entries()) e.value = random_tensor(e.value.shape(), rng, -1.5, 1.5);
  Discriminator d = Discriminator::init(tiny_discriminator(DiscriminatorKind::kCoAttention, 4),
                                        rng.next_u64());
  for (auto& e : d.params().entries()) e.value = random_tensor(e.value.shape(), rng, -1.0, 1.0);
  return {std::move(g), std::move(d), random_features(rng)};
}

SequenceReward log_d_reward(const Enumerable& m) {
  return [&m](const TokenSequence& s) {
    RewardContext ctx;
    ctx.discriminator = &m.d;
    ctx.kind = RewardKind::kLogD;
    return sequence_reward(ctx, m.features, s);
  };
}

Outcome scst_unbiasedness() {
  const auto t0 = Clock::now();
  double worst = 0.0, mass_err = 0.0;
  std::size_t sequences = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Enumerable m = enumerable_model(seed);
    const ScstOracle o = scst_oracle(m.g, m.features, log_d_reward(m));
    worst = std::max(worst, max_abs_diff(o.expected_scst, o.exact_gradient));
    mass_err = std::max(mass_err, std::abs(o.total_probability - 1.0));
    sequences = o.sequences;
  }
  const double secs = seconds_since(t0);
  const bool pass = worst < 1e-10 && mass_err < 1e-12 && sequences <= 85 && secs < 30.0;
  return {pass, fmt("5 models, %zu sequences each, max |E[scst] - grad E[r]| = %.2e, "
                    "|sum p - 1| = %.1e, %.2f s",
                    sequences, worst, mass_err, secs)};
}

Outcome variance_reduction() {
  double scst = 0.0, reinforce = 0.0;
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Enumerable m = enumerable_model(seed);
    const auto v = estimator_variance(m.g, m.features, log_d_reward(m));
    scst += v.scst / 5.0;
    reinforce += v.reinforce / 5.0;
    wins += v.scst <= v.reinforce ? 1 : 0;
  }
  return {wins == 5, fmt("mean per-component variance: scst %.4g vs reinforce %.4g; "
                         "baseline lower on %d/5 models",
                         scst, reinforce, wins)};
}

// ---- 4-7: desk-scale training runs --------------------------------------------

constexpr std::uint64_t kToySeed = 11;

struct ToyRuns {
  ExperimentConfig config;
  ExperimentData data;
  Captioner ce_model;
  GanState adversarial;  // log(D) reward
  GanState rl;           // CIDEr reward, no discriminator in the reward
  ProbeResult probe_scst;
  ProbeResult probe_gumbel_st;
  double seconds = 0.0;
};

GanState fine_tune(const ExperimentConfig& config, const ExperimentData& data,
                   const Captioner& ce_model, RewardKind reward, ProbeResult* scst_probe,
                   ProbeResult* gumbel_probe) {
  const auto& train = data.dataset.train;
  GanState s{ce_model, Discriminator::init(config.discriminator, 2), {}, {}};
  GanConfig gc = config.gan;
  gc.reward = reward;
  Rng rng(9);
  for (std::size_t e = 0; e < gc.d_pretrain_epochs; ++e) discriminator_epoch(s, train, gc, rng);
  if (scst_probe != nullptr) {
    // Same CE generator, same pretrained discriminator, identical minibatches.
    ProbeOptions o;
    o.n_batches = 200;
    o.batch_size = 8;
    o.seed = 5;
    o.temperature = gc.temperature;
    o.estimator = Estimator::kScst;
    *scst_probe = grad_norm_probe(s.generator, s.discriminator, train, data.train_idf, o);
    o.estimator = Estimator::kGumbelSt;
    *gumbel_probe = grad_norm_probe(s.generator, s.discriminator, train, data.train_idf, o);
  }
  for (std::size_t e = 0; e < gc.epochs; ++e) gan_epoch(s, train, gc, data.train_idf, rng);
  return s;
}

ToyRuns build_toy_runs() {
  const auto t0 = Clock::now();
  ExperimentConfig config = toy_task_config(kToySeed);
  ExperimentData data = prepare_data(config);
  Captioner ce = Captioner::init(config.captioner, 1);
  Rng rng(3);
  ce_pretrain(ce, data.dataset.train, config.ce, rng);
  ProbeResult scst, gumbel;
  GanState adversarial = fine_tune(config, data, ce, RewardKind::kLogD, &scst, &gumbel);
  GanState rl = fine_tune(config, data, ce, RewardKind::kCider, nullptr, nullptr);
  return ToyRuns{std::move(config), std::move(data), std::move(ce), std::move(adversarial),
                 std::move(rl), std::move(scst), std::move(gumbel), seconds_since(t0)};
}

const ToyRuns& toy_runs() {
  static const ToyRuns runs = build_toy_runs();
  return runs;
}

ScoreReport score_on(const Captioner& g, const Discriminator& d, const std::string& split) {
  const ToyRuns& r = toy_runs();
  const Captioner* models[] = {&g};
  Rng rng(5);
  return evaluate(models, d, &r.data.semantic, r.data.dataset.split(split), r.config.metrics, rng);
}

Outcome gradient_probe() {
  const ToyRuns& r = toy_runs();
  if (r.probe_scst.batch_hashes != r.probe_gumbel_st.batch_hashes) {
    return {false, "estimators saw different minibatches"};
  }
  const auto s = summarize(r.probe_scst.norms);
  const auto g = summarize(r.probe_gumbel_st.norms);
  const bool pass = s.mean < g.mean && s.variance < g.variance;
  return {pass, fmt("200 identical minibatches x 8, tau %.2f: scst logD mean %.4f var %.4g; "
                    "gumbel_st mean %.4f var %.4g",
                    r.config.gan.temperature, s.mean, s.variance, g.mean, g.variance)};
}

Outcome discriminator_ordering() {
  const ToyRuns& r = toy_runs();
  const auto rep = score_on(r.adversarial.generator, r.adversarial.discriminator, "test");
  const bool pass = rep.d_real > rep.d_fake && rep.d_fake > rep.d_random &&
                    rep.d_real - rep.d_random >= 0.3;
  return {pass, fmt("test split after log(D) GAN training: real %.3f > generated %.3f > random "
                    "%.3f, real - random %.3f",
                    rep.d_real, rep.d_fake, rep.d_random, rep.d_real - rep.d_random)};
}

Outcome coverage_trend() {
  const ToyRuns& r = toy_runs();
  const auto ce = score_on(r.ce_model, r.adversarial.discriminator, "test");
  const auto rl = score_on(r.rl.generator, r.rl.discriminator, "test");
  const auto gan = score_on(r.adversarial.generator, r.adversarial.discriminator, "test");
  const bool pass = rl.vocab_coverage < ce.vocab_coverage && gan.vocab_coverage >= rl.vocab_coverage;
  return {pass, fmt("vocabulary coverage on test: CE %.2f%%, CIDEr RL %.2f%%, log(D) GAN %.2f%%",
                    ce.vocab_coverage, rl.vocab_coverage, gan.vocab_coverage)};
}

Outcome ooc_gap() {
  const ToyRuns& r = toy_runs();
  const auto test = score_on(r.ce_model, r.adversarial.discriminator, "test");
  const auto ooc = score_on(r.ce_model, r.adversarial.discriminator, "ooc");
  return {ooc.cider < test.cider,
          fmt("CE model CIDEr-D: ooc %.3f vs test %.3f (toy runs took %.1f s)", ooc.cider,
              test.cider, r.seconds)};
}

// ---- 8: metric oracles ---------------------------------------------------------

Outcome metric_oracles() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  // Corpus of 3 images so that every n-gram of the candidate has nonzero idf.
  const Words cand = {5, 6, 7, 8, 9};
  const NGramIdf idf = NGramIdf::fit({{cand}, {{10, 11, 12, 13}}, {{14, 15, 16}}});
  const double cider = cider_d(cand, {cand}, idf);
  expect(std::abs(cider - 10.0) < 1e-9, fmt("cider identity %.12f", cider));

  expect(std::abs(bleu4(cand, {cand}) - 1.0) < 1e-12, "bleu4 identity");
  expect(std::abs(rouge_l(cand, {cand}) - 1.0) < 1e-12, "rouge_l identity");
  // 6-token candidate vs 7-token reference sharing a 5-token prefix:
  // precisions 5/6, 4/5, 3/4, 2/3 (product 1/3), brevity exp(1 - 7/6);
  // LCS 5 so P = 5/6, R = 5/7.
  const Words c6 = {2, 3, 4, 5, 6, 7}, r7 = {2, 3, 4, 5, 6, 8, 9};
  const double bleu_hand = std::exp(1.0 - 7.0 / 6.0) * std::pow(1.0 / 3.0, 0.25);
  const double p = 5.0 / 6.0, rc = 5.0 / 7.0, b2 = 1.44;
  const double rouge_hand = (1.0 + b2) * p * rc / (rc + b2 * p);
  const double bleu = bleu4(c6, {r7}), rouge = rouge_l(c6, {r7});
  expect(std::abs(bleu - bleu_hand) < 1e-9, fmt("bleu4 hand case %.12f vs %.12f", bleu, bleu_hand));
  expect(std::abs(rouge - rouge_hand) < 1e-9,
         fmt("rouge_l hand case %.12f vs %.12f", rouge, rouge_hand));

  Rng rng(17);
  const Tensor x = random_tensor({200, 4}, rng);
  const CcaModel self = fit_cca(x, x, 4);
  double sigma_err = 0.0;
  for (double s : self.sigma.values()) sigma_err = std::max(sigma_err, std::abs(s - 1.0));
  expect(sigma_err < 1e-8, fmt("cca self-correlation off by %.2e", sigma_err));

  const double auc = semantic_retrieval_auc(23);
  expect(auc > 0.9, fmt("semantic AUC %.3f", auc));

  std::string detail = fmt("cider %.9f, bleu4 %.9f (hand %.9f), rouge_l %.9f (hand %.9f), "
                           "max|sigma-1| %.1e, semantic AUC %.3f",
                           cider, bleu, bleu_hand, rouge, rouge_hand, sigma_err, auc);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

// ---- 9: structural invariants --------------------------------------------------

double simplex_error(const Tensor& t) {
  double s = 0.0, neg = 0.0;
  for (double v : t.values()) {
    s += v;
    neg = std::min(neg, v);
  }
  return std::max(std::abs(s - 1.0), -neg);
}

Outcome structural_invariants() {
  double perm_err = 0.0, alpha_err = 0.0, soft_err = 0.0, simplex = 0.0;
  bool ensemble_ok = true;
  const std::size_t vocab = 7, crops = 4;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(300 + seed);
    auto dc = tiny_discriminator(DiscriminatorKind::kCoAttention, vocab);
    dc.num_crops = crops;
    Discriminator d = Discriminator::init(dc, rng.next_u64());
    for (auto& e : d.params().entries()) e.value = random_tensor(e.value.shape(), rng, -1.0, 1.0);
    const Tensor f = random_features(rng, crops);
    const TokenSequence seq = random_sequence(rng, vocab, 1 + rng.below(5));

    std::vector<std::size_t> perm = {0, 1, 2, 3};
    rng.shuffle(perm);
    Tensor pf({crops, kTinyFeatures});
    for (std::size_t i = 0; i < crops; ++i) {
      for (std::size_t j = 0; j < kTinyFeatures; ++j) pf.at(i, j) = f.at(perm[i], j);
    }
    const auto base = coatt_score(d, f, seq);
    const auto permuted = coatt_score(d, pf, seq);
    perm_err = std::max(perm_err, std::abs(base.score - permuted.score));
    for (std::size_t i = 0; i < crops; ++i) {
      alpha_err = std::max(alpha_err, std::abs(permuted.alpha[i] - base.alpha[perm[i]]));
    }
    simplex = std::max({simplex, simplex_error(base.alpha), simplex_error(base.beta)});

    Tensor one_hot({seq.size(), vocab});
    for (std::size_t t = 0; t < seq.size(); ++t) one_hot.at(t, seq.tokens[t]) = 1.0;
    soft_err = std::max(soft_err, std::abs(score_soft(d, f, one_hot) - base.score));

    auto cc = tiny_captioner(vocab, 6);
    cc.num_crops = crops;
    Captioner g = Captioner::init(cc, rng.next_u64());
    const Captioner* copies[] = {&g, &g, &g};
    ensemble_ok = ensemble_ok && ensemble_decode(copies, f) == greedy_decode(g, f);
    DecoderState st = initial_decoder_state(cc);
    TokenId prev = cc.bos_id;
    for (std::size_t t = 0; t < cc.max_len; ++t) {
      const DecodeStep step = decode_step(g, st, prev, f);
      simplex = std::max(simplex, simplex_error(step.attention));
      if (step.sentinel_gate < 0.0 || step.sentinel_gate > 1.0) simplex = 1.0;
      prev = argmax(step.logits.values());
      st = step.state;
      if (prev == cc.eos_id) break;
    }
  }
  const bool pass = perm_err <= 1e-12 && alpha_err <= 1e-12 && soft_err <= 1e-12 &&
                    ensemble_ok && simplex <= 1e-12;
  return {pass, fmt("20 instances: crop permutation |dscore| %.1e, |dalpha| %.1e; one-hot "
                    "score_soft vs hard %.1e; ensemble of copies %s; max simplex violation %.1e",
                    perm_err, alpha_err, soft_err, ensemble_ok ? "identical" : "DIFFERS", simplex)};
}

// ---- 10: determinism and persistence ------------------------------------------

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

Outcome determinism() {
  TempDir tmp("acceptance");
  // The output directory is part of the stored config, so both runs use one path.
  const auto a = tmp.path() / "run";
  run_experiment(quick_run_config(21, a));
  const auto snap_b = snapshot(a);
  std::filesystem::remove_all(a);
  run_experiment(quick_run_config(21, a));
  const auto snap_a = snapshot(a);
  const bool identical = snap_a == snap_b && snap_a.size() > 2;

  // Simulate a crash after epoch 1: drop later checkpoints and records, then resume.
  const ExperimentConfig cfg = quick_run_config(21, a);
  for (std::size_t e = 2; e <= cfg.total_epochs(); ++e) std::filesystem::remove(checkpoint_path(a, e));
  {
    const std::string& metrics = snap_a.at("metrics.jsonl");
    std::ofstream out(a / "metrics.jsonl", std::ios::binary | std::ios::trunc);
    out << metrics.substr(0, metrics.find('\n') + 1);
  }
  RunOptions resume;
  resume.resume_from = checkpoint_path(a, 1);
  run_experiment(cfg, resume);
  const bool resumed = snapshot(a) == snap_a;
  return {identical && resumed,
          fmt("%zu files per run; two runs byte-identical: %s; resume from epoch 1 of %zu "
              "reproduces every file: %s",
              snap_a.size(), identical ? "yes" : "NO", cfg.total_epochs(), resumed ? "yes" : "NO")};
}

std::set<int> parse_list(const char* s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      expect_fail = parse_list(argv[++i]);
    } else if (arg == "--only" && i + 1 < argc) {
      only = parse_list(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--expect-fail N,...] [--only N,...]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"SCST unbiasedness oracle", scst_unbiasedness},
      {"baseline variance reduction", variance_reduction},
      {"logit-gradient norms, SCST log(D) below Gumbel ST", gradient_probe},
      {"discriminator score ordering", discriminator_ordering},
      {"vocabulary coverage trend", coverage_trend},
      {"out-of-context CIDEr gap", ooc_gap},
      {"metric oracles", metric_oracles},
      {"structural invariants", structural_invariants},
      {"determinism and resume", determinism},
  };
  const auto t0 = Clock::now();
  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected_failure = expect_fail.count(id) > 0;
    if (o.pass == expected_failure) ++unexpected;
    std::printf("criterion %2d %s  %s: %s%s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first,
                o.detail.c_str(),
                expected_failure ? (o.pass ? " [expected FAIL, got PASS]" : " [known failure]")
                                 : "");
    std::fflush(stdout);
  }
  std::printf("total %.1f s\n", seconds_since(t0));
  return unexpected == 0 ? 0 : 1;
}
