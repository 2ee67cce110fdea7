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

#include <cmath>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "seqgan/discriminator.hpp"
#include "seqgan/errors.hpp"
#include "toy.hpp"

namespace seqgan {
namespace {

using testing::random_features;
using testing::random_sequence;
using testing::tiny_discriminator;

Discriminator randomized(DiscriminatorKind kind, std::uint64_t seed, std::size_t vocab = 6) {
  Rng rng(seed);
  Discriminator d = Discriminator::init(tiny_discriminator(kind, vocab), rng.next_u64());
  for (auto& e : d.params().entries()) e.value = testing::random_tensor(e.value.shape(), rng, -1.0, 1.0);
  return d;
}

Tensor permute_rows(const Tensor& f, const std::vector<std::size_t>& perm) {
  Tensor out(f.shape());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) out.at(i, j) = f.at(perm[i], j);
  }
  return out;
}

Tensor one_hot_rows(const TokenSequence& seq, std::size_t vocab) {
  Tensor t({seq.size(), vocab});
  for (std::size_t i = 0; i < seq.size(); ++i) t.at(i, seq.tokens[i]) = 1.0;
  return t;
}

TEST(DiscriminatorConfig, KindNamesRoundTrip) {
  for (auto k : {DiscriminatorKind::kCoAttention, DiscriminatorKind::kJointEmbedding}) {
    EXPECT_EQ(discriminator_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(to_string(DiscriminatorKind::kCoAttention), "coatt");
  EXPECT_EQ(to_string(DiscriminatorKind::kJointEmbedding), "jointemb");
  EXPECT_THROW(discriminator_kind_from_string("lstm"), ParameterError);
}

TEST(EmbedCaption, OneRowPerTokenAndPrefixProperty) {
  const Discriminator d = randomized(DiscriminatorKind::kCoAttention, 1);
  Rng rng(1);
  const TokenSequence seq = random_sequence(rng, 6, 5);
  const Tensor h = embed_caption(d, seq);
  ASSERT_EQ(h.rows(), seq.size());
  EXPECT_EQ(embed_caption(d, seq), h);
  EXPECT_EQ(embed_caption(d, TokenSequence{{3}, false}).rows(), 1u);
  for (std::size_t t = 1; t <= seq.size(); ++t) {
    TokenSequence prefix;
    prefix.tokens.assign(seq.tokens.begin(), seq.tokens.begin() + static_cast<long>(t));
    const Tensor hp = embed_caption(d, prefix);
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t c = 0; c < h.cols(); ++c) EXPECT_EQ(hp.at(r, c), h.at(r, c));
    }
  }
}

TEST(EmbedCaption, EmptyOrOutOfRangeIsInputError) {
  const Discriminator d = randomized(DiscriminatorKind::kCoAttention, 1);
  EXPECT_THROW(embed_caption(d, TokenSequence{}), InputError);
  EXPECT_THROW(embed_caption(d, TokenSequence{{2, 6}, false}), InputError);
}

TEST(CoattScore, AttentionOnSimplexAndScoreInUnitInterval) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Discriminator d = randomized(DiscriminatorKind::kCoAttention, seed);
    Rng rng(seed);
    const auto r = coatt_score(d, random_features(rng), random_sequence(rng, 6, 1 + rng.below(6)));
    EXPECT_GT(r.score, 0.0);
    EXPECT_LT(r.score, 1.0);
    double a = 0.0, b = 0.0;
    for (double v : r.alpha.values()) a += v;
    for (double v : r.beta.values()) b += v;
    EXPECT_NEAR(a, 1.0, 1e-12);
    EXPECT_NEAR(b, 1.0, 1e-12);
  }
}

TEST(CoattScore, ZeroParamsScoreOneHalf) {
  const auto cfg = tiny_discriminator();
  const Discriminator d(cfg, Discriminator::zero_params(cfg));
  Rng rng(2);
  EXPECT_DOUBLE_EQ(coatt_score(d, random_features(rng), random_sequence(rng, 6, 3)).score, 0.5);
  const auto jcfg = tiny_discriminator(DiscriminatorKind::kJointEmbedding);
  const Discriminator j(jcfg, Discriminator::zero_params(jcfg));
  EXPECT_DOUBLE_EQ(jointemb_score(j, random_features(rng), random_sequence(rng, 6, 3)), 0.5);
}

TEST(CoattScore, CropPermutationPermutesAlphaOnly) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Discriminator d = randomized(DiscriminatorKind::kCoAttention, seed);
    Rng rng(seed);
    const Tensor f = random_features(rng);
    const TokenSequence seq = random_sequence(rng, 6, 4);
    std::vector<std::size_t> perm = {0, 1, 2};
    rng.shuffle(perm);
    const auto base = coatt_score(d, f, seq);
    const auto moved = coatt_score(d, permute_rows(f, perm), seq);
    EXPECT_NEAR(moved.score, base.score, 1e-12);
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_NEAR(moved.alpha[i], base.alpha[perm[i]], 1e-12);
    EXPECT_LT(max_abs_diff(moved.beta, base.beta), 1e-12);
  }
}

TEST(JointembScore, CropPermutationInvariant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Discriminator d = randomized(DiscriminatorKind::kJointEmbedding, seed);
    Rng rng(seed);
    const Tensor f = random_features(rng);
    const TokenSequence seq = random_sequence(rng, 6, 4);
    EXPECT_NEAR(jointemb_score(d, permute_rows(f, {2, 0, 1}), seq), jointemb_score(d, f, seq), 1e-12);
  }
}

TEST(Score, WrongVariantOrShapeIsInputError) {
  const Discriminator j = randomized(DiscriminatorKind::kJointEmbedding, 1);
  const Discriminator c = randomized(DiscriminatorKind::kCoAttention, 1);
  Rng rng(1);
  const TokenSequence seq = random_sequence(rng, 6, 2);
  EXPECT_THROW(coatt_score(j, random_features(rng), seq), InputError);
  EXPECT_THROW(jointemb_score(c, random_features(rng), seq), InputError);
  EXPECT_THROW(score(c, Tensor({2, 5}), seq), InputError);
}

class ScoreGradient : public ::testing::TestWithParam<DiscriminatorKind> {};

TEST_P(ScoreGradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Discriminator d = randomized(GetParam(), 10 + seed);
    Rng rng(seed);
    const Tensor f = random_features(rng);
    const TokenSequence seq = random_sequence(rng, 6, 3);
    Tape tape;
    DiscriminatorGraph g(d, tape, true);
    tape.backward(g.score(f, g.embed_tokens(seq)).score);
    const ParamSet numeric = testing::numeric_gradient(d.params(), [&] { return score(d, f, seq); });
    EXPECT_LT(testing::relative_error(g.params().gradients(), numeric), 1e-4);
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, ScoreGradient,
                         ::testing::Values(DiscriminatorKind::kCoAttention,
                                           DiscriminatorKind::kJointEmbedding));

TEST(ScoreSoft, OneHotRowsEqualHardScore) {
  for (auto kind : {DiscriminatorKind::kCoAttention, DiscriminatorKind::kJointEmbedding}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Discriminator d = randomized(kind, seed);
      Rng rng(seed);
      const Tensor f = random_features(rng);
      const TokenSequence seq = random_sequence(rng, 6, 1 + rng.below(5));
      EXPECT_NEAR(score_soft(d, f, one_hot_rows(seq, 6)), score(d, f, seq), 1e-12);
    }
  }
}

TEST(ScoreSoft, SingleWordVocabulary) {
  const Discriminator d = randomized(DiscriminatorKind::kCoAttention, 3, 1);
  Rng rng(3);
  const Tensor f = random_features(rng);
  EXPECT_NEAR(score_soft(d, f, Tensor({2, 1}, 1.0)), score(d, f, TokenSequence{{0, 0}, false}), 1e-12);
}

TEST(ScoreSoft, NegativeOrMisshapenInputIsInputError) {
  const Discriminator d = randomized(DiscriminatorKind::kCoAttention, 3);
  Rng rng(3);
  const Tensor f = random_features(rng);
  Tensor bad({2, 6}, 0.1);
  bad.at(1, 2) = -0.1;
  EXPECT_THROW(score_soft(d, f, bad), InputError);
  EXPECT_THROW(score_soft(d, f, Tensor({2, 5}, 0.2)), InputError);
}

TEST(ScoreSoft, GradientInSoftTokens) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Discriminator d = randomized(DiscriminatorKind::kCoAttention, seed);
    Rng rng(seed);
    const Tensor f = random_features(rng);
    auto r = testing::check_graph(
        [&](Tape& tape, const std::vector<Var>& x) {
          DiscriminatorGraph g(d, tape, false);
          return g.score(f, g.embed_soft(x[0])).score;
        },
        {testing::random_tensor({3, 6}, rng, 0.05, 1.0)});
    EXPECT_LT(r.relative_error, 1e-4);
  }
}

}  // namespace
}  // namespace seqgan
