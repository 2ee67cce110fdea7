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
#include <map>
#include <span>
#include <vector>

#include "seqgan/sequence.hpp"

namespace seqgan {

using NGram = std::vector<TokenId>;
using Words = std::vector<TokenId>;

// Counts of all n-grams of order 1..max_order.
std::map<NGram, std::size_t> count_ngrams(std::span<const TokenId> words, std::size_t max_order);

/// Document frequencies for CIDEr. One document is the full reference set of
/// one image, so df(g) counts images whose references contain g.
class NGramIdf {
 public:
  static constexpr std::size_t kMaxOrder = 4;

  NGramIdf() = default;

  // Throws InputError on an empty corpus.
  static NGramIdf fit(const std::vector<std::vector<Words>>& corpus);

  std::size_t corpus_size() const noexcept { return corpus_size_; }
  // 0 for n-grams never seen.
  std::size_t document_frequency(const NGram& gram) const;
  // log(corpus_size / max(1, df)).
  double idf(const NGram& gram) const;
  const std::map<NGram, std::size_t>& frequencies() const noexcept { return df_; }

 private:
  std::size_t corpus_size_ = 0;
  std::map<NGram, std::size_t> df_;
};

// CIDEr-D with clipped tf-idf overlap, Gaussian length penalty (sigma = 6),
// averaged over n = 1..4 and the references, scaled by 10.
double cider_d(std::span<const TokenId> candidate, const std::vector<Words>& refs,
               const NGramIdf& idf);

// Sentence BLEU-4: clipped n-gram precisions, geometric mean, brevity
// penalty against the closest reference length. No smoothing.
double bleu4(std::span<const TokenId> candidate, const std::vector<Words>& refs);

// Corpus BLEU-4: counts and lengths pooled over all pairs before combining.
double corpus_bleu4(const std::vector<Words>& candidates,
                    const std::vector<std::vector<Words>>& refs);

// ROUGE-L F-measure (beta = 1.2) from the best LCS precision and recall over refs.
double rouge_l(std::span<const TokenId> candidate, const std::vector<Words>& refs);

std::size_t lcs_length(std::span<const TokenId> a, std::span<const TokenId> b);

// 100 * |distinct ids in corpus| / vocab_size.
double vocabulary_coverage(const std::vector<Words>& generated, std::size_t vocab_size);

}  // namespace seqgan
