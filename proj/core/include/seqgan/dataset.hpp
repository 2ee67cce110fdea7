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
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seqgan/sequence.hpp"
#include "seqgan/tensor.hpp"

namespace seqgan {

struct VocabSpec {
  std::size_t object_synonyms = 2;
  std::size_t context_synonyms = 2;

  friend bool operator==(const VocabSpec&, const VocabSpec&) = default;
};

struct DatasetSpec {
  std::uint64_t seed = 0;
  std::size_t n_objects = 8;
  std::size_t n_contexts = 5;
  std::size_t n_images = 200;  // split into train / val / test
  std::size_t n_ooc = 40;
  std::size_t num_crops = 4;
  std::size_t feature_dim = 16;
  double noise = 0.1;
  // Probability that an object appears in its home context.
  double context_bias = 0.8;
  // Non-home contexts per object reserved for the out-of-context split.
  std::size_t holdout_per_object = 1;
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  VocabSpec vocab;

  // Throws ParameterError when the request is infeasible.
  void validate() const;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

class Vocabulary {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;

  Vocabulary();
  TokenId add(const std::string& word);
  TokenId id(const std::string& word) const;
  const std::string& word(TokenId id) const;
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  // Words joined by spaces; EOS is dropped.
  std::string render(const std::vector<TokenId>& tokens) const;

 private:
  std::vector<std::string> words_;
};

using ObjectContext = std::pair<std::size_t, std::size_t>;

struct SyntheticScene {
  std::size_t image_id = 0;
  Tensor features;                   // C x d_I
  std::vector<ObjectContext> labels;  // (object id, context id) per object present
};

struct Example {
  SyntheticScene scene;
  std::vector<TokenSequence> references;  // 5 captions, each ending in EOS
};

struct DatasetSplit {
  Vocabulary vocab;
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
  std::vector<Example> ooc;
  std::set<ObjectContext> heldout_pairs;

  const std::vector<Example>& split(const std::string& name) const;
};

// Synthetic compositional captioning data. Each object has a home context
// it appears in with probability context_bias; some (object, context) pairs
// are never generated for train/val/test and form the ooc split.
DatasetSplit generate_dataset(const DatasetSpec& spec);

// Pairs present in a split, for checking the ooc discipline.
std::set<ObjectContext> pairs_in(const std::vector<Example>& examples);

}  // namespace seqgan
