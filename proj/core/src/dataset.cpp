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

#include "seqgan/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "seqgan/errors.hpp"
#include "seqgan/rng.hpp"

namespace seqgan {

namespace {

const std::vector<std::vector<std::string>> kObjectWords = {
    {"dog", "puppy", "hound"},      {"cat", "kitten", "feline"},   {"car", "automobile", "sedan"},
    {"bike", "bicycle", "cycle"},   {"chair", "seat", "stool"},    {"table", "desk", "counter"},
    {"cup", "mug", "glass"},        {"phone", "cellphone", "mobile"}, {"book", "novel", "notebook"},
    {"lamp", "light", "lantern"},   {"horse", "pony", "stallion"}, {"bird", "parrot", "pigeon"},
    {"boat", "ship", "canoe"},      {"ball", "sphere", "globe"},   {"clock", "watch", "timer"},
    {"bottle", "flask", "jar"}};

const std::vector<std::vector<std::string>> kContextWords = {
    {"kitchen", "cookhouse", "galley"}, {"street", "road", "avenue"},  {"beach", "shore", "coast"},
    {"park", "garden", "lawn"},         {"office", "workplace", "studio"}, {"bedroom", "dorm", "loft"},
    {"field", "meadow", "pasture"},     {"river", "stream", "creek"},  {"forest", "woods", "grove"},
    {"snow", "ice", "glacier"}};

const std::vector<std::string> kFunctionWords = {"a",    "the",  "there", "is",  "photo", "of",
                                                 "with", "sits", "in",    "at",  "near"};
const std::vector<std::string> kRelations = {"in", "at", "near"};

std::string synonym(const std::vector<std::vector<std::string>>& table, const char* stem,
                    std::size_t item, std::size_t variant) {
  if (item < table.size() && variant < table[item].size()) return table[item][variant];
  return std::string(stem) + std::to_string(item) + (variant ? "_" + std::to_string(variant) : "");
}

// Gram-Schmidt on Gaussian draws; rows are orthonormal.
std::vector<std::vector<double>> orthonormal_rows(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> rows;
  while (rows.size() < count) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal();
    for (const auto& r : rows) {
      double dot = 0.0;
      for (std::size_t i = 0; i < dim; ++i) dot += v[i] * r[i];
      for (std::size_t i = 0; i < dim; ++i) v[i] -= dot * r[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;
    for (double& x : v) x /= norm;
    rows.push_back(std::move(v));
  }
  return rows;
}

struct Generator {
  const DatasetSpec& spec;
  Rng rng;
  Vocabulary vocab;
  std::vector<std::vector<TokenId>> object_ids;
  std::vector<std::vector<TokenId>> context_ids;
  std::vector<std::vector<double>> prototypes;
  std::vector<std::vector<double>> offsets;
  std::vector<std::size_t> home;

  explicit Generator(const DatasetSpec& s) : spec(s), rng(s.seed) {
    for (const auto& w : kFunctionWords) vocab.add(w);
    for (std::size_t o = 0; o < spec.n_objects; ++o) {
      std::vector<TokenId> ids;
      for (std::size_t v = 0; v < spec.vocab.object_synonyms; ++v) {
        ids.push_back(vocab.add(synonym(kObjectWords, "object", o, v)));
      }
      object_ids.push_back(std::move(ids));
    }
    for (std::size_t c = 0; c < spec.n_contexts; ++c) {
      std::vector<TokenId> ids;
      for (std::size_t v = 0; v < spec.vocab.context_synonyms; ++v) {
        ids.push_back(vocab.add(synonym(kContextWords, "context", c, v)));
      }
      context_ids.push_back(std::move(ids));
    }
    auto basis = orthonormal_rows(spec.n_objects + spec.n_contexts, spec.feature_dim, rng);
    prototypes.assign(basis.begin(), basis.begin() + static_cast<long>(spec.n_objects));
    offsets.assign(basis.begin() + static_cast<long>(spec.n_objects), basis.end());
    for (std::size_t o = 0; o < spec.n_objects; ++o) home.push_back(o % spec.n_contexts);
  }

  Tensor render(std::size_t object, std::size_t context) {
    const std::size_t crops = spec.num_crops, d = spec.feature_dim;
    std::vector<std::size_t> order(crops);
    for (std::size_t i = 0; i < crops; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t object_crops = 1 + rng.below(std::max<std::size_t>(1, crops / 2));
    Tensor f({crops, d});
    for (std::size_t k = 0; k < crops; ++k) {
      const std::size_t crop = order[k];
      const bool has_object = k < object_crops;
      for (std::size_t j = 0; j < d; ++j) {
        double v = offsets[context][j] + spec.noise * rng.normal();
        if (has_object) v += prototypes[object][j];
        f.at(crop, j) = v;
      }
    }
    return f;
  }

  TokenId pick(const std::vector<TokenId>& ids) { return ids[rng.below(ids.size())]; }

  std::vector<TokenSequence> captions(std::size_t object, std::size_t context) {
    const auto w = [&](const char* s) { return vocab.id(s); };
    std::vector<TokenSequence> refs;
    for (int tmpl = 0; tmpl < 5; ++tmpl) {
      const TokenId o = pick(object_ids[object]);
      const TokenId c = pick(context_ids[context]);
      const TokenId r = vocab.id(kRelations[rng.below(kRelations.size())]);
      std::vector<TokenId> t;
      switch (tmpl) {
        case 0: t = {w("a"), o, r, w("the"), c}; break;
        case 1: t = {w("there"), w("is"), w("a"), o, r, w("the"), c}; break;
        case 2: t = {w("a"), w("photo"), w("of"), w("a"), o, r, w("the"), c}; break;
        case 3: t = {w("the"), c, w("with"), w("a"), o}; break;
        default: t = {w("a"), o, w("sits"), r, w("a"), c}; break;
      }
      t.push_back(Vocabulary::kEos);
      refs.push_back(TokenSequence{std::move(t), true});
    }
    return refs;
  }

  Example make(std::size_t image_id, std::size_t object, std::size_t context) {
    Example ex;
    ex.scene.image_id = image_id;
    ex.scene.labels = {{object, context}};
    ex.scene.features = render(object, context);
    ex.references = captions(object, context);
    return ex;
  }
};

}  // namespace

void DatasetSpec::validate() const {
  if (n_objects < 1 || n_contexts < 1) throw ParameterError("need at least one object and context");
  if (n_objects * n_contexts < 4) throw ParameterError("n_objects * n_contexts must be >= 4");
  if (n_objects + n_contexts > feature_dim) {
    throw ParameterError("feature_dim must be >= n_objects + n_contexts for orthogonal prototypes");
  }
  if (num_crops < 1) throw ParameterError("num_crops must be >= 1");
  if (holdout_per_object + 1 > n_contexts) {
    throw ParameterError("holdout_per_object leaves no training context for some object");
  }
  if (n_ooc > 0 && holdout_per_object == 0) {
    throw ParameterError("an ooc split needs holdout_per_object >= 1");
  }
  if (vocab.object_synonyms < 1 || vocab.context_synonyms < 1) {
    throw ParameterError("synonym counts must be >= 1");
  }
  if (!(context_bias >= 0.0 && context_bias <= 1.0)) throw ParameterError("context_bias must be in [0,1]");
  if (!(noise >= 0.0)) throw ParameterError("noise must be >= 0");
  if (!(train_fraction > 0.0 && val_fraction >= 0.0 && train_fraction + val_fraction < 1.0)) {
    throw ParameterError("split fractions must leave a non-empty test split");
  }
  if (n_images < 3) throw ParameterError("n_images must be >= 3");
}

Vocabulary::Vocabulary() : words_{"<bos>", "<eos>"} {}

TokenId Vocabulary::add(const std::string& word) {
  for (TokenId i = 0; i < words_.size(); ++i) {
    if (words_[i] == word) return i;
  }
  words_.push_back(word);
  return words_.size() - 1;
}

TokenId Vocabulary::id(const std::string& word) const {
  for (TokenId i = 0; i < words_.size(); ++i) {
    if (words_[i] == word) return i;
  }
  throw InputError("unknown word '" + word + "'");
}

const std::string& Vocabulary::word(TokenId id) const {
  if (id >= words_.size()) throw InputError("token id " + std::to_string(id) + " out of range");
  return words_[id];
}

std::string Vocabulary::render(const std::vector<TokenId>& tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (t == kEos) break;
    if (!out.empty()) out += ' ';
    out += word(t);
  }
  return out;
}

const std::vector<Example>& DatasetSplit::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test") return test;
  if (name == "ooc") return ooc;
  throw InputError("unknown split '" + name + "'");
}

DatasetSplit generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  Generator gen(spec);

  DatasetSplit out;
  for (std::size_t o = 0; o < spec.n_objects; ++o) {
    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < spec.n_contexts; ++c) {
      if (c != gen.home[o]) others.push_back(c);
    }
    gen.rng.shuffle(others);
    for (std::size_t k = 0; k < spec.holdout_per_object; ++k) out.heldout_pairs.insert({o, others[k]});
  }
  std::vector<std::vector<std::size_t>> allowed(spec.n_objects);
  std::vector<bool> context_seen(spec.n_contexts, false);
  for (std::size_t o = 0; o < spec.n_objects; ++o) {
    for (std::size_t c = 0; c < spec.n_contexts; ++c) {
      if (c == gen.home[o] || out.heldout_pairs.count({o, c})) continue;
      allowed[o].push_back(c);
    }
    context_seen[gen.home[o]] = true;
    for (std::size_t c : allowed[o]) context_seen[c] = true;
  }
  if (std::find(context_seen.begin(), context_seen.end(), false) != context_seen.end()) {
    throw ParameterError("holdout leaves a context with no training object");
  }

  const std::size_t n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(spec.n_images)));
  const std::size_t n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * static_cast<double>(spec.n_images)));
  if (n_train == 0 || n_train + n_val >= spec.n_images) {
    throw ParameterError("split fractions leave an empty train or test split");
  }

  for (std::size_t i = 0; i < spec.n_images; ++i) {
    const std::size_t object = gen.rng.below(spec.n_objects);
    std::size_t context = gen.home[object];
    if (!allowed[object].empty() && gen.rng.uniform() >= spec.context_bias) {
      context = allowed[object][gen.rng.below(allowed[object].size())];
    }
    Example ex = gen.make(i, object, context);
    if (i < n_train) {
      out.train.push_back(std::move(ex));
    } else if (i < n_train + n_val) {
      out.val.push_back(std::move(ex));
    } else {
      out.test.push_back(std::move(ex));
    }
  }
  const std::vector<ObjectContext> heldout(out.heldout_pairs.begin(), out.heldout_pairs.end());
  for (std::size_t i = 0; i < spec.n_ooc; ++i) {
    const auto [object, context] = heldout[gen.rng.below(heldout.size())];
    out.ooc.push_back(gen.make(spec.n_images + i, object, context));
  }

  const auto train_pairs = pairs_in(out.train);
  for (const auto& p : pairs_in(out.ooc)) {
    if (train_pairs.count(p)) throw ContractError("ooc pair leaked into the training split");
  }
  out.vocab = std::move(gen.vocab);
  return out;
}

std::set<ObjectContext> pairs_in(const std::vector<Example>& examples) {
  std::set<ObjectContext> pairs;
  for (const auto& ex : examples) pairs.insert(ex.scene.labels.begin(), ex.scene.labels.end());
  return pairs;
}

}  // namespace seqgan
