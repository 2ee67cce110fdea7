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

#include "seqgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

constexpr double kCiderSigma = 6.0;

struct TfIdfVector {
  std::map<NGram, double> weights[NGramIdf::kMaxOrder];
  double norms[NGramIdf::kMaxOrder] = {};
  std::size_t length = 0;
};

TfIdfVector tfidf(std::span<const TokenId> words, const NGramIdf& idf) {
  TfIdfVector v;
  for (const auto& [gram, count] : count_ngrams(words, NGramIdf::kMaxOrder)) {
    const double w = static_cast<double>(count) * idf.idf(gram);
    v.weights[gram.size() - 1][gram] = w;
    v.norms[gram.size() - 1] += w * w;
  }
  for (double& n : v.norms) n = std::sqrt(n);
  v.length = words.size();
  return v;
}

}  // namespace

std::map<NGram, std::size_t> count_ngrams(std::span<const TokenId> words, std::size_t max_order) {
  std::map<NGram, std::size_t> counts;
  for (std::size_t n = 1; n <= max_order; ++n) {
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      ++counts[NGram(words.begin() + i, words.begin() + i + n)];
    }
  }
  return counts;
}

NGramIdf NGramIdf::fit(const std::vector<std::vector<Words>>& corpus) {
  if (corpus.empty()) throw InputError("cannot fit IDF on an empty corpus");
  NGramIdf out;
  out.corpus_size_ = corpus.size();
  for (const auto& refs : corpus) {
    std::set<NGram> seen;
    for (const auto& ref : refs) {
      for (const auto& entry : count_ngrams(ref, kMaxOrder)) seen.insert(entry.first);
    }
    for (const auto& gram : seen) ++out.df_[gram];
  }
  return out;
}

std::size_t NGramIdf::document_frequency(const NGram& gram) const {
  const auto it = df_.find(gram);
  return it == df_.end() ? 0 : it->second;
}

double NGramIdf::idf(const NGram& gram) const {
  const double df = static_cast<double>(std::max<std::size_t>(1, document_frequency(gram)));
  return std::log(static_cast<double>(corpus_size_)) - std::log(df);
}

double cider_d(std::span<const TokenId> candidate, const std::vector<Words>& refs,
               const NGramIdf& idf) {
  if (refs.empty()) throw InputError("cider_d needs at least one reference");
  if (candidate.empty()) return 0.0;
  const TfIdfVector cand = tfidf(candidate, idf);
  double total = 0.0;
  for (const auto& ref_words : refs) {
    const TfIdfVector ref = tfidf(ref_words, idf);
    const double delta = static_cast<double>(cand.length) - static_cast<double>(ref.length);
    const double penalty = std::exp(-(delta * delta) / (2.0 * kCiderSigma * kCiderSigma));
    for (std::size_t n = 0; n < NGramIdf::kMaxOrder; ++n) {
      double val = 0.0;
      for (const auto& [gram, w] : cand.weights[n]) {
        const auto it = ref.weights[n].find(gram);
        if (it == ref.weights[n].end()) continue;
        val += std::min(w, it->second) * it->second;
      }
      if (cand.norms[n] != 0.0 && ref.norms[n] != 0.0) val /= cand.norms[n] * ref.norms[n];
      total += val * penalty;
    }
  }
  return total / static_cast<double>(NGramIdf::kMaxOrder) / static_cast<double>(refs.size()) *
         10.0;
}

namespace {

struct BleuStats {
  double matches[4] = {};
  double totals[4] = {};
  double cand_len = 0.0;
  double ref_len = 0.0;
};

void accumulate_bleu(std::span<const TokenId> candidate, const std::vector<Words>& refs,
                     BleuStats& stats) {
  if (refs.empty()) throw InputError("bleu needs at least one reference");
  const auto cand_counts = count_ngrams(candidate, 4);
  std::map<NGram, std::size_t> max_ref;
  for (const auto& ref : refs) {
    for (const auto& [gram, count] : count_ngrams(ref, 4)) {
      auto& slot = max_ref[gram];
      slot = std::max(slot, count);
    }
  }
  for (const auto& [gram, count] : cand_counts) {
    const auto it = max_ref.find(gram);
    const std::size_t clip = it == max_ref.end() ? 0 : std::min(count, it->second);
    stats.matches[gram.size() - 1] += static_cast<double>(clip);
  }
  for (std::size_t n = 1; n <= 4; ++n) {
    if (candidate.size() >= n) stats.totals[n - 1] += static_cast<double>(candidate.size() - n + 1);
  }
  // Closest reference length; ties go to the shorter reference.
  std::size_t best = refs.front().size();
  for (const auto& ref : refs) {
    const auto d = [&](std::size_t len) {
      return len > candidate.size() ? len - candidate.size() : candidate.size() - len;
    };
    if (d(ref.size()) < d(best) || (d(ref.size()) == d(best) && ref.size() < best)) best = ref.size();
  }
  stats.cand_len += static_cast<double>(candidate.size());
  stats.ref_len += static_cast<double>(best);
}

double finish_bleu(const BleuStats& s) {
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (s.totals[n] == 0.0 || s.matches[n] == 0.0) return 0.0;
    log_sum += std::log(s.matches[n] / s.totals[n]);
  }
  const double bp = s.cand_len > s.ref_len ? 1.0 : std::exp(1.0 - s.ref_len / s.cand_len);
  return bp * std::exp(log_sum / 4.0);
}

}  // namespace

double bleu4(std::span<const TokenId> candidate, const std::vector<Words>& refs) {
  if (refs.empty()) throw InputError("bleu4 needs at least one reference");
  if (candidate.empty()) return 0.0;
  BleuStats stats;
  accumulate_bleu(candidate, refs, stats);
  return finish_bleu(stats);
}

double corpus_bleu4(const std::vector<Words>& candidates,
                    const std::vector<std::vector<Words>>& refs) {
  if (candidates.size() != refs.size()) {
    throw InputError("corpus_bleu4: candidate and reference counts differ");
  }
  BleuStats stats;
  for (std::size_t i = 0; i < candidates.size(); ++i) accumulate_bleu(candidates[i], refs[i], stats);
  if (stats.cand_len == 0.0) return 0.0;
  return finish_bleu(stats);
}

std::size_t lcs_length(std::span<const TokenId> a, std::span<const TokenId> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(std::span<const TokenId> candidate, const std::vector<Words>& refs) {
  if (refs.empty()) throw InputError("rouge_l needs at least one reference");
  if (candidate.empty()) return 0.0;
  constexpr double kBeta = 1.2;
  double best_prec = 0.0, best_rec = 0.0;
  for (const auto& ref : refs) {
    if (ref.empty()) continue;
    const double lcs = static_cast<double>(lcs_length(candidate, ref));
    best_prec = std::max(best_prec, lcs / static_cast<double>(candidate.size()));
    best_rec = std::max(best_rec, lcs / static_cast<double>(ref.size()));
  }
  if (best_prec == 0.0 || best_rec == 0.0) return 0.0;
  return (1.0 + kBeta * kBeta) * best_prec * best_rec / (best_rec + kBeta * kBeta * best_prec);
}

double vocabulary_coverage(const std::vector<Words>& generated, std::size_t vocab_size) {
  if (vocab_size == 0) throw ParameterError("vocabulary size must be positive");
  std::set<TokenId> used;
  for (const auto& words : generated) used.insert(words.begin(), words.end());
  return 100.0 * static_cast<double>(used.size()) / static_cast<double>(vocab_size);
}

}  // namespace seqgan
