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
#include <vector>

#include "seqgan/sequence.hpp"
#include "seqgan/tensor.hpp"

namespace seqgan {

/// Canonical correlation model between caption embeddings (x) and image
/// embeddings (y).
struct CcaModel {
  Tensor u;       // d_x x r
  Tensor v;       // d_y x r
  Tensor sigma;   // r canonical correlations in [0, 1], descending
  Tensor mean_x;  // d_x
  Tensor mean_y;  // d_y

  std::size_t rank() const noexcept { return sigma.size(); }

  friend bool operator==(const CcaModel&, const CcaModel&) = default;
};

// Eigenvalue floor applied when whitening covariances.
inline constexpr double kCcaRidge = 1e-6;

// Fits CCA on paired rows of x (n x d_x) and y (n x d_y). Covariance
// eigenvalues below kCcaRidge are raised to it; a covariance whose
// eigenvalues all fall below it throws NumericError.
CcaModel fit_cca(const Tensor& x, const Tensor& y, std::size_t rank);

// Sample covariance (n - 1 normalization) of rows after centering.
Tensor covariance(const Tensor& a, const Tensor& b);

struct SemanticScore {
  double value = 0.0;  // in [-1, 1]
  bool degenerate = false;  // a projection had zero norm; value is 0
};

// Cosine between sigma * U^T (x - mean_x) and V^T (y - mean_y).
SemanticScore semantic_score(const CcaModel& model, const Tensor& x, const Tensor& y);

/// Desk-scale semantic scorer: a caption is embedded as the mean of its token
/// vectors, an image as the mean of its crop features, and the pair is scored
/// in CCA space.
struct SemanticModel {
  Tensor token_embeddings;  // K x d
  CcaModel cca;

  Tensor caption_embedding(const std::vector<TokenId>& words) const;
  static Tensor image_embedding(const Tensor& image_features);
  SemanticScore score(const std::vector<TokenId>& words, const Tensor& image_features) const;

  friend bool operator==(const SemanticModel&, const SemanticModel&) = default;
};

// Token vector = mean image embedding over the training captions containing
// that token (zero for unseen tokens); then CCA on (caption, image) pairs.
SemanticModel fit_semantic_model(const std::vector<std::vector<TokenId>>& captions,
                                 const std::vector<const Tensor*>& images, std::size_t vocab_size,
                                 std::size_t rank);

}  // namespace seqgan
