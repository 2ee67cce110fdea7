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

#include <algorithm>
#include <cstring>

#include <gtest/gtest.h>

#include "seqgan/errors.hpp"
#include "seqgan/io.hpp"
#include "toy.hpp"

namespace seqgan {
namespace {

using testing::TempDir;

Checkpoint sample_checkpoint() {
  Rng rng(1);
  Checkpoint c;
  c.epoch = 7;
  c.config_json = "{\"seed\": 3}";
  c.captioner.add("embed", uniform_tensor({4, 3}, 1.0, rng));
  c.captioner.add("out_b", uniform_tensor({1, 4}, 1.0, rng));
  c.discriminator.add("joint_b", Tensor::scalar(-0.25));
  c.captioner_optimizer.step = 12;
  c.captioner_optimizer.first_moment = c.captioner.zeros_like();
  c.captioner_optimizer.second_moment = c.captioner;
  c.rng_state = rng.serialize();
  c.semantic.add("sigma", Tensor::row({0.9, 0.4}));
  return c;
}

void put_u32(std::vector<std::uint8_t>& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

TEST(Features, RoundTripsAsFloat32) {
  TempDir dir("io");
  Rng rng(2);
  std::vector<Tensor> images;
  for (int i = 0; i < 3; ++i) images.push_back(uniform_tensor({2, 5}, 3.0, rng));
  const auto path = dir.path() / "f.sgf";
  save_features(path, images);
  EXPECT_EQ(std::filesystem::file_size(path), 16u + 3u * 2u * 5u * 4u);
  const auto scenes = load_features(path, FeatureShape{2, 5});
  ASSERT_EQ(scenes.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(scenes[i].image_id, i);
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_EQ(scenes[i].features[j], static_cast<double>(static_cast<float>(images[i][j])));
    }
  }
}

TEST(Features, HeaderIsLittleEndian) {
  TempDir dir("io");
  const auto path = dir.path() / "f.sgf";
  save_features(path, {Tensor::matrix({{1.0, 2.0}})});
  const auto b = read_file(path);
  ASSERT_EQ(b.size(), 24u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "SGF1");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[8], 1);
  EXPECT_EQ(b[12], 2);
  float first = 0;
  std::memcpy(&first, b.data() + 16, 4);
  EXPECT_EQ(first, 1.0f);
}

TEST(Features, ShapeMismatchReportsOffset) {
  TempDir dir("io");
  const auto path = dir.path() / "f.sgf";
  save_features(path, {Tensor({3, 4})});
  try {
    load_features(path, FeatureShape{3, 5});
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 12u);
  }
  try {
    load_features(path, FeatureShape{2, 4});
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
  EXPECT_THROW(save_features(path, {Tensor({3, 4}), Tensor({2, 4})}), DimensionError);
}

TEST(Features, TruncationAndBadMagic) {
  TempDir dir("io");
  const auto path = dir.path() / "f.sgf";
  save_features(path, {Tensor({2, 2}, 1.0), Tensor({2, 2}, 2.0)});
  auto bytes = read_file(path);
  bytes.resize(bytes.size() - 3);
  write_file(path, bytes);
  EXPECT_THROW(load_features(path), FormatError);
  bytes.resize(10);
  write_file(path, bytes);
  try {
    load_features(path);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
  bytes[0] = 'X';
  write_file(path, bytes);
  EXPECT_THROW(load_features(path), FormatError);
}

TEST(Checkpoint, RoundTripIsExact) {
  TempDir dir("io");
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(dir.path() / "c.bin", c);
  const Checkpoint back = load_checkpoint(dir.path() / "c.bin");
  EXPECT_EQ(back, c);
  EXPECT_EQ(Rng::deserialize(back.rng_state), Rng::deserialize(c.rng_state));
  EXPECT_EQ(encode_checkpoint(back), encode_checkpoint(c));
}

TEST(Checkpoint, EmptyStateRoundTrips) {
  const Checkpoint c;
  EXPECT_EQ(decode_checkpoint(encode_checkpoint(c)), c);
}

TEST(Checkpoint, BadMagicAndVersionAreVersionErrors) {
  auto b = encode_checkpoint(sample_checkpoint());
  auto wrong_version = b;
  put_u32(wrong_version, 4, kCheckpointVersion + 1);
  EXPECT_THROW(decode_checkpoint(wrong_version), VersionError);
  b[1] = 'X';
  EXPECT_THROW(decode_checkpoint(b), VersionError);
  EXPECT_THROW(decode_checkpoint({}), VersionError);
}

TEST(Checkpoint, TruncationIsFormatErrorAtEveryLength) {
  const auto full = encode_checkpoint(sample_checkpoint());
  for (std::size_t len = 4; len < full.size(); len += 7) {
    const std::vector<std::uint8_t> cut(full.begin(), full.begin() + static_cast<long>(len));
    EXPECT_THROW(decode_checkpoint(cut), FormatError) << "length " << len;
  }
}

TEST(Checkpoint, CorruptTensorSizeIsCaught) {
  // Inflating a dimension must not allocate past the section.
  const Checkpoint c = sample_checkpoint();
  auto b = encode_checkpoint(c);
  // First tensor of the captioner section: find the "embed" name.
  const std::string needle = "embed";
  const auto it = std::search(b.begin(), b.end(), needle.begin(), needle.end());
  ASSERT_NE(it, b.end());
  const std::size_t dim_at = static_cast<std::size_t>(it - b.begin()) + needle.size() + 4;
  b[dim_at + 5] = 0x7f;
  EXPECT_THROW(decode_checkpoint(b), FormatError);
}

TEST(Files, MissingFileThrows) {
  TempDir dir("io");
  EXPECT_THROW(read_file(dir.path() / "nope.bin"), std::runtime_error);
  EXPECT_THROW(load_checkpoint(dir.path() / "nope.bin"), std::runtime_error);
}

}  // namespace
}  // namespace seqgan
