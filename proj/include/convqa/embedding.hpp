// Copyright 2025 The convqa Authors.
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

#ifndef CONVQA_EMBEDDING_HPP_
#define CONVQA_EMBEDDING_HPP_

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace convqa::embedding {

struct EmbeddingVector {
  Eigen::VectorXd values;
  std::string provider_id;
};

enum class ProviderKind { LocalHash, Http };

// LocalHash is a deterministic offline embedder: character n-grams
// (n = 1..3) of the normalized text are hashed with FNV-1a-64 into
// `dimension` buckets and the count vector is L2-normalized. Http talks to
// an embeddings service (POST {base_url}/embeddings).
struct ProviderConfig {
  ProviderKind kind = ProviderKind::LocalHash;
  int dimension = 1024;  // required > 0 for LocalHash; 0 = accept server size
  std::string base_url;
  std::string model_name;
  int batch_size = 16;
  int max_retries = 3;
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds backoff_base{200};
  std::string api_key_env = "EMBED_API_KEY";

  // Throws ConfigError when the combination is unusable.
  void validate() const;
  std::string provider_id() const;
};

std::string to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(std::string_view name);

/// Embeds each text, order-preserving: result[i] corresponds to texts[i].
/// LocalHash is pure and bit-deterministic; Http batches requests and
/// retries with exponential backoff. Throws HttpError / DimensionMismatch
/// / ConfigError.
std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts,
                                         const ProviderConfig& cfg);

/// dot(a,b) / (|a|*|b|), 0 when either norm is 0, clamped to [-1, 1].
/// Throws DimensionMismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// FNV-1a over the bytes: offset basis 14695981039346656037,
// prime 1099511628211.
std::uint64_t fnv1a64(std::string_view bytes);

// The LocalHash path for a single text, exposed for direct checks.
Eigen::VectorXd local_hash_embed(std::string_view text, int dimension);

}  // namespace convqa::embedding

#endif  // CONVQA_EMBEDDING_HPP_
