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

#include "seqgan/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

constexpr char kFeatureMagic[4] = {'S', 'G', 'F', '1'};
constexpr char kCheckpointMagic[4] = {'S', 'G', 'C', 'K'};

class ByteWriter {
 public:
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  template <typename T>
  void little(T value) {
    using U = std::make_unsigned_t<T>;
    U u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(u & 0xff));
      if constexpr (sizeof(T) > 1) u = static_cast<U>(u >> 8);
    }
  }
  void f32(float v) { little(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { little(std::bit_cast<std::uint64_t>(v)); }
  void string16(const std::string& s) {
    little(static_cast<std::uint16_t>(s.size()));
    raw(s.data(), s.size());
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, std::size_t begin, std::size_t end)
      : bytes_(bytes), pos_(begin), end_(end) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return end_ - pos_; }

  void need(std::size_t n, const char* what) const {
    if (end_ - pos_ < n) throw FormatError(std::string("truncated ") + what, pos_);
  }
  template <typename T>
  T little(const char* what) {
    need(sizeof(T), what);
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float f32(const char* what) { return std::bit_cast<float>(little<std::uint32_t>(what)); }
  double f64(const char* what) { return std::bit_cast<double>(little<std::uint64_t>(what)); }
  std::string string(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::string string16(const char* what) { return string(little<std::uint16_t>(what), what); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_;
  std::size_t end_;
};

// ---- ParamSet blob: u32 count, then per tensor: u16 name length, name,
// u32 rank, u64 dims, f64 values.

void write_params(ByteWriter& w, const ParamSet& params) {
  w.little(static_cast<std::uint32_t>(params.size()));
  for (const auto& e : params.entries()) {
    w.string16(e.name);
    w.little(static_cast<std::uint32_t>(e.value.rank()));
    for (std::size_t d : e.value.shape()) w.little(static_cast<std::uint64_t>(d));
    for (double v : e.value.data()) w.f64(v);
  }
}

ParamSet read_params(ByteReader& r) {
  ParamSet params;
  const auto count = r.little<std::uint32_t>("parameter count");
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.string16("parameter name");
    const auto rank = r.little<std::uint32_t>("tensor rank");
    if (rank > 8) throw FormatError("implausible tensor rank " + std::to_string(rank), r.offset());
    Shape shape;
    std::uint64_t total = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      const auto dim = r.little<std::uint64_t>("tensor dimension");
      total *= dim;
      shape.push_back(static_cast<std::size_t>(dim));
    }
    if (total > r.remaining() / 8) throw FormatError("tensor data exceeds section", r.offset());
    std::vector<double> data(total);
    for (auto& v : data) v = r.f64("tensor data");
    params.add(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  return params;
}

void write_adam(ByteWriter& w, const AdamState& s) {
  w.little(s.step);
  write_params(w, s.first_moment);
  write_params(w, s.second_moment);
}

AdamState read_adam(ByteReader& r) {
  AdamState s;
  s.step = r.little<std::uint64_t>("optimizer step");
  s.first_moment = read_params(r);
  s.second_moment = read_params(r);
  return s;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// ---- Features ----------------------------------------------------------------

void save_features(const std::filesystem::path& path, const std::vector<Tensor>& images) {
  ByteWriter w;
  w.raw(kFeatureMagic, 4);
  const std::uint32_t crops = images.empty() ? 0 : static_cast<std::uint32_t>(images[0].rows());
  const std::uint32_t dim = images.empty() ? 0 : static_cast<std::uint32_t>(images[0].cols());
  w.little(static_cast<std::uint32_t>(images.size()));
  w.little(crops);
  w.little(dim);
  for (const Tensor& img : images) {
    if (img.rank() != 2 || img.rows() != crops || img.cols() != dim) {
      throw DimensionError("all images in a feature file must share one shape");
    }
    for (double v : img.data()) w.f32(static_cast<float>(v));
  }
  write_file(path, w.bytes());
}

std::vector<SyntheticScene> load_features(const std::filesystem::path& path,
                                          std::optional<FeatureShape> expected) {
  const auto bytes = read_file(path);
  ByteReader r(bytes, 0, bytes.size());
  if (r.string(4, "magic") != std::string(kFeatureMagic, 4)) {
    throw FormatError("bad feature-file magic", 0);
  }
  const auto count = r.little<std::uint32_t>("image count");
  const auto crops = r.little<std::uint32_t>("crop count");
  const std::size_t dim_offset = r.offset();
  const auto dim = r.little<std::uint32_t>("feature dimension");
  if (expected) {
    if (crops != expected->num_crops) {
      throw FormatError("crop count " + std::to_string(crops) + " != expected " +
                            std::to_string(expected->num_crops), dim_offset - 4);
    }
    if (dim != expected->feature_dim) {
      throw FormatError("feature dimension " + std::to_string(dim) + " != expected " +
                            std::to_string(expected->feature_dim), dim_offset);
    }
  }
  const std::uint64_t values = std::uint64_t{count} * crops * dim;
  if (values * 4 != r.remaining()) {
    throw FormatError("payload holds " + std::to_string(r.remaining()) + " bytes, header implies " +
                          std::to_string(values * 4), r.offset());
  }
  std::vector<SyntheticScene> scenes;
  scenes.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    SyntheticScene s;
    s.image_id = i;
    s.features = Tensor({crops, dim});
    for (double& v : s.features.data()) v = r.f32("feature data");
    scenes.push_back(std::move(s));
  }
  return scenes;
}

// ---- Checkpoints ---------------------------------------------------------------

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> sections;
  {
    ByteWriter w;
    w.little(ckpt.epoch);
    sections.emplace_back("epoch", std::move(w.bytes()));
  }
  sections.emplace_back("config", std::vector<std::uint8_t>(ckpt.config_json.begin(), ckpt.config_json.end()));
  {
    ByteWriter w;
    write_params(w, ckpt.captioner);
    sections.emplace_back("captioner", std::move(w.bytes()));
  }
  {
    ByteWriter w;
    write_params(w, ckpt.discriminator);
    sections.emplace_back("discriminator", std::move(w.bytes()));
  }
  {
    ByteWriter w;
    write_adam(w, ckpt.captioner_optimizer);
    sections.emplace_back("adam_captioner", std::move(w.bytes()));
  }
  {
    ByteWriter w;
    write_adam(w, ckpt.discriminator_optimizer);
    sections.emplace_back("adam_discriminator", std::move(w.bytes()));
  }
  sections.emplace_back("rng", std::vector<std::uint8_t>(ckpt.rng_state.begin(), ckpt.rng_state.end()));
  {
    ByteWriter w;
    write_params(w, ckpt.semantic);
    sections.emplace_back("semantic", std::move(w.bytes()));
  }

  std::size_t table_size = 0;
  for (const auto& [name, body] : sections) table_size += 2 + name.size() + 8 + 8;
  const std::size_t header_size = 4 + 4 + 4 + table_size;

  ByteWriter w;
  w.raw(kCheckpointMagic, 4);
  w.little(kCheckpointVersion);
  w.little(static_cast<std::uint32_t>(sections.size()));
  std::uint64_t offset = header_size;
  for (const auto& [name, body] : sections) {
    w.string16(name);
    w.little(offset);
    w.little(static_cast<std::uint64_t>(body.size()));
    offset += body.size();
  }
  for (const auto& [name, body] : sections) w.raw(body.data(), body.size());
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw VersionError("not a seqgan checkpoint (bad magic bytes)");
  }
  ByteReader r(bytes, 4, bytes.size());
  const auto version = r.little<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw VersionError("unsupported checkpoint version " + std::to_string(version) +
                       " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const auto count = r.little<std::uint32_t>("section count");
  struct Entry {
    std::string name;
    std::uint64_t offset;
    std::uint64_t size;
  };
  std::vector<Entry> table;
  for (std::uint32_t i = 0; i < count; ++i) {
    Entry e;
    e.name = r.string16("section name");
    e.offset = r.little<std::uint64_t>("section offset");
    e.size = r.little<std::uint64_t>("section size");
    if (e.offset > bytes.size() || e.size > bytes.size() - e.offset) {
      throw FormatError("section '" + e.name + "' extends past end of file", r.offset());
    }
    table.push_back(std::move(e));
  }
  const auto section = [&](const std::string& name) {
    for (const auto& e : table) {
      if (e.name == name) return ByteReader(bytes, e.offset, e.offset + e.size);
    }
    throw FormatError("missing checkpoint section '" + name + "'", r.offset());
  };
  const auto text = [&](const std::string& name) {
    ByteReader s = section(name);
    return s.string(s.remaining(), name.c_str());
  };

  Checkpoint ckpt;
  {
    ByteReader s = section("epoch");
    ckpt.epoch = s.little<std::uint64_t>("epoch");
  }
  ckpt.config_json = text("config");
  {
    ByteReader s = section("captioner");
    ckpt.captioner = read_params(s);
  }
  {
    ByteReader s = section("discriminator");
    ckpt.discriminator = read_params(s);
  }
  {
    ByteReader s = section("adam_captioner");
    ckpt.captioner_optimizer = read_adam(s);
  }
  {
    ByteReader s = section("adam_discriminator");
    ckpt.discriminator_optimizer = read_adam(s);
  }
  ckpt.rng_state = text("rng");
  {
    ByteReader s = section("semantic");
    ckpt.semantic = read_params(s);
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace seqgan
