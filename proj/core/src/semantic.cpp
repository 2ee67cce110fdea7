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

#include "seqgan/semantic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Matrix to_eigen(const Tensor& t) {
  Matrix m(t.rows(), t.cols());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m(i, j) = t.at(i, j);
  return m;
}

Tensor from_eigen(const Matrix& m) {
  Tensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.at(i, j) = m(i, j);
  return t;
}

Tensor from_eigen_vector(const Vector& v) {
  Tensor t({static_cast<std::size_t>(v.size())});
  for (Eigen::Index i = 0; i < v.size(); ++i) t[i] = v(i);
  return t;
}

// Inverse square root of a symmetric PSD matrix with eigenvalues floored at kCcaRidge.
Matrix inverse_sqrt(const Matrix& cov, const char* which) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw NumericError(std::string("eigendecomposition of ") + which + " covariance failed");
  }
  const Vector& lambda = eig.eigenvalues();
  if (!lambda.allFinite() || lambda.maxCoeff() < kCcaRidge) {
    throw NumericError(std::string(which) + " covariance is degenerate beyond ridge repair");
  }
  Vector scale(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    scale(i) = 1.0 / std::sqrt(std::max(lambda(i), kCcaRidge));
  }
  const Matrix& q = eig.eigenvectors();
  return q * scale.asDiagonal() * q.transpose();
}

Matrix centered(const Matrix& m) { return m.rowwise() - m.colwise().mean(); }

}  // namespace

Tensor covariance(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.rows() < 2) {
    throw InputError("covariance needs matching row counts >= 2");
  }
  const Matrix ca = centered(to_eigen(a));
  const Matrix cb = centered(to_eigen(b));
  return from_eigen(ca.transpose() * cb / static_cast<double>(a.rows() - 1));
}

CcaModel fit_cca(const Tensor& x, const Tensor& y, std::size_t rank) {
  if (x.rank() != 2 || y.rank() != 2) throw InputError("fit_cca expects n x d matrices");
  const std::size_t n = x.rows();
  if (y.rows() != n) throw InputError("fit_cca: X and Y have different sample counts");
  if (rank < 1) throw ParameterError("CCA rank must be >= 1");
  if (n < rank || n < 2) throw InputError("fit_cca needs at least max(rank, 2) samples");
  if (rank > std::min(x.cols(), y.cols())) {
    throw ParameterError("CCA rank exceeds min(d_x, d_y)");
  }
  const Matrix mx = to_eigen(x);
  const Matrix my = to_eigen(y);
  const Vector mean_x = mx.colwise().mean().transpose();
  const Vector mean_y = my.colwise().mean().transpose();
  const Matrix cx = centered(mx);
  const Matrix cy = centered(my);
  const double denom = static_cast<double>(n - 1);
  const Matrix cxx = cx.transpose() * cx / denom;
  const Matrix cyy = cy.transpose() * cy / denom;
  const Matrix cxy = cx.transpose() * cy / denom;

  const Matrix wx = inverse_sqrt(cxx, "caption");
  const Matrix wy = inverse_sqrt(cyy, "image");
  Eigen::JacobiSVD<Matrix> svd(wx * cxy * wy, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index r = static_cast<Eigen::Index>(rank);

  CcaModel model;
  model.u = from_eigen(wx * svd.matrixU().leftCols(r));
  model.v = from_eigen(wy * svd.matrixV().leftCols(r));
  Vector sigma = svd.singularValues().head(r);
  for (Eigen::Index i = 0; i < r; ++i) sigma(i) = std::clamp(sigma(i), 0.0, 1.0);
  model.sigma = from_eigen_vector(sigma);
  model.mean_x = from_eigen_vector(mean_x);
  model.mean_y = from_eigen_vector(mean_y);
  if (!model.u.all_finite() || !model.v.all_finite()) {
    throw NumericError("CCA produced non-finite projections");
  }
  return model;
}

SemanticScore semantic_score(const CcaModel& model, const Tensor& x, const Tensor& y) {
  const std::size_t dx = model.u.rows(), dy = model.v.rows(), r = model.rank();
  if (x.size() != dx || y.size() != dy) {
    throw InputError("semantic_score: embedding sizes do not match the CCA model");
  }
  std::vector<double> a(r, 0.0), b(r, 0.0);
  for (std::size_t k = 0; k < r; ++k) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < dx; ++i) sa += model.u.at(i, k) * (x[i] - model.mean_x[i]);
    for (std::size_t i = 0; i < dy; ++i) sb += model.v.at(i, k) * (y[i] - model.mean_y[i]);
    a[k] = model.sigma[k] * sa;
    b[k] = sb;
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return SemanticScore{0.0, true};
  const double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  return SemanticScore{std::clamp(cosine, -1.0, 1.0), false};
}

Tensor SemanticModel::caption_embedding(const std::vector<TokenId>& words) const {
  const std::size_t d = token_embeddings.cols();
  Tensor out({d});
  if (words.empty()) return out;
  for (TokenId w : words) {
    if (w >= token_embeddings.rows()) throw InputError("token id out of range for semantic model");
    for (std::size_t j = 0; j < d; ++j) out[j] += token_embeddings.at(w, j);
  }
  for (double& v : out.data()) v /= static_cast<double>(words.size());
  return out;
}

Tensor SemanticModel::image_embedding(const Tensor& image_features) {
  const std::size_t c = image_features.rows(), d = image_features.cols();
  Tensor out({d});
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < d; ++j) out[j] += image_features.at(i, j);
  for (double& v : out.data()) v /= static_cast<double>(c);
  return out;
}

SemanticScore SemanticModel::score(const std::vector<TokenId>& words,
                                   const Tensor& image_features) const {
  return semantic_score(cca, caption_embedding(words), image_embedding(image_features));
}

SemanticModel fit_semantic_model(const std::vector<std::vector<TokenId>>& captions,
                                 const std::vector<const Tensor*>& images, std::size_t vocab_size,
                                 std::size_t rank) {
  if (captions.size() != images.size() || captions.empty()) {
    throw InputError("fit_semantic_model needs one image per caption");
  }
  const std::size_t d = images.front()->cols();
  std::vector<Tensor> image_emb;
  image_emb.reserve(images.size());
  for (const Tensor* img : images) image_emb.push_back(SemanticModel::image_embedding(*img));

  SemanticModel model;
  model.token_embeddings = Tensor({vocab_size, d});
  std::vector<double> counts(vocab_size, 0.0);
  for (std::size_t i = 0; i < captions.size(); ++i) {
    for (TokenId w : captions[i]) {
      if (w >= vocab_size) throw InputError("token id out of range for semantic model");
      counts[w] += 1.0;
      for (std::size_t j = 0; j < d; ++j) model.token_embeddings.at(w, j) += image_emb[i][j];
    }
  }
  for (std::size_t w = 0; w < vocab_size; ++w) {
    if (counts[w] == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) model.token_embeddings.at(w, j) /= counts[w];
  }
  Tensor x({captions.size(), d}), y({captions.size(), d});
  for (std::size_t i = 0; i < captions.size(); ++i) {
    const Tensor cx = model.caption_embedding(captions[i]);
    for (std::size_t j = 0; j < d; ++j) {
      x.at(i, j) = cx[j];
      y.at(i, j) = image_emb[i][j];
    }
  }
  model.cca = fit_cca(x, y, rank);
  return model;
}

}  // namespace seqgan
