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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqgan/dataset.hpp"
#include "seqgan/optimizer.hpp"
#include "seqgan/params.hpp"
#include "seqgan/tensor.hpp"

namespace seqgan {

// ---- Feature files ----------------------------------------------------------
//
// "SGF1", then little-endian u32 count, u32 C, u32 d_I, then count*C*d_I
// little-endian f32 values (image-major, then crop, then feature).

struct FeatureShape {
  std::uint32_t num_crops = 0;
  std::uint32_t feature_dim = 0;
};

void save_features(const std::filesystem::path& path, const std::vector<Tensor>& images);

// Throws FormatError (with byte offset) on a malformed or truncated file, or
// when `expected` is given and the header disagrees with it.
std::vector<SyntheticScene> load_features(const std::filesystem::path& path,
                                          std::optional<FeatureShape> expected = std::nullopt);

// ---- Checkpoints ------------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint64_t epoch = 0;  // completed epochs
  std::string config_json;  // the experiment config, verbatim
  ParamSet captioner;
  ParamSet discriminator;
  AdamState captioner_optimizer;
  AdamState discriminator_optimizer;
  std::string rng_state;
  ParamSet semantic;  // token embeddings and CCA matrices

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
// Throws VersionError on bad magic or an unsupported version, FormatError on
// structural damage.
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace seqgan
