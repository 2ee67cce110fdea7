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
#include <string>
#include <vector>

namespace seqgan {

using TokenId = std::size_t;

/// A sentence as token ids. BOS is implicit and never stored; EOS is stored
/// as the last token when the sentence ended on it.
struct TokenSequence {
  std::vector<TokenId> tokens;
  // Ended on EOS or reached the length limit.
  bool terminated = false;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Space-separated ids, e.g. "4 9 1".
std::string format_tokens(const std::vector<TokenId>& tokens);

// Tokens with a trailing EOS removed.
std::vector<TokenId> strip_eos(const std::vector<TokenId>& tokens, TokenId eos_id);

}  // namespace seqgan
