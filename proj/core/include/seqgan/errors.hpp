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
#include <stdexcept>
#include <string>

namespace seqgan {

// Shape or axis mismatch between tensors.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Value outside an operation's mathematical domain (e.g. log of x <= 0).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Invalid hyperparameter or configuration value.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed caller input: out-of-range token ids, empty sequences, etc.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Violated API contract (e.g. backward called twice on one tape).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Numerical failure the algorithm cannot repair.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed binary file; carries the byte offset where parsing stopped.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Unrecognized magic bytes or container version.
struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace seqgan
