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

#include "convqa/embedding.hpp"

// httplib pulls in resolv.h whose _res macro collides with Eigen's
// parameter names; Eigen must be preprocessed first (via embedding.hpp).
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "convqa/errors.hpp"
#include "convqa/textproc.hpp"

namespace convqa::embedding {

namespace {

constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

struct UrlParts {
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // possibly empty, no trailing slash
};

UrlParts split_base_url(const std::string& base_url) {
  const std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base_url must include a scheme: " + base_url);
  }
  const std::size_t path_start = base_url.find('/', scheme_end + 3);
  UrlParts parts;
  if (path_start == std::string::npos) {
    parts.origin = base_url;
  } else {
    parts.origin = base_url.substr(0, path_start);
    parts.path_prefix = base_url.substr(path_start);
    while (!parts.path_prefix.empty() && parts.path_prefix.back() == '/') {
      parts.path_prefix.pop_back();
    }
  }
  return parts;
}

std::vector<Eigen::VectorXd> parse_embedding_response(const std::string& body,
                                                      std::size_t expected_count) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("data") || !j["data"].is_array()) {
    throw DimensionMismatch("embedding response is not a {\"data\": [...]} object");
  }
  const nlohmann::json& data = j["data"];
  if (data.size() != expected_count) {
    throw DimensionMismatch("embedding response has " + std::to_string(data.size()) +
                            " entries, expected " + std::to_string(expected_count));
  }
  std::vector<Eigen::VectorXd> out(expected_count);
  std::vector<bool> filled(expected_count, false);
  for (const nlohmann::json& entry : data) {
    if (!entry.is_object() || !entry.contains("index") || !entry.contains("embedding") ||
        !entry["embedding"].is_array()) {
      throw DimensionMismatch("malformed embedding response entry");
    }
    const std::size_t index = entry["index"].get<std::size_t>();
    if (index >= expected_count || filled[index]) {
      throw DimensionMismatch("embedding response index out of range or duplicated");
    }
    const nlohmann::json& vec = entry["embedding"];
    Eigen::VectorXd v(static_cast<Eigen::Index>(vec.size()));
    for (std::size_t i = 0; i < vec.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = vec[i].get<double>();
    }
    out[index] = std::move(v);  // responses re-sorted by index
    filled[index] = true;
  }
  return out;
}

std::vector<EmbeddingVector> embed_http(std::span<const std::string> texts,
                                        const ProviderConfig& cfg) {
  const UrlParts url = split_base_url(cfg.base_url);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  client.set_connection_timeout(secs.count(), 0);
  client.set_read_timeout(secs.count(), 0);
  client.set_write_timeout(secs.count(), 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const std::string endpoint = url.path_prefix + "/embeddings";
  const std::size_t batch = cfg.batch_size > 0 ? static_cast<std::size_t>(cfg.batch_size) : 16;

  std::vector<EmbeddingVector> result;
  result.reserve(texts.size());
  Eigen::Index dimension = cfg.dimension > 0 ? cfg.dimension : -1;

  for (std::size_t start = 0; start < texts.size(); start += batch) {
    const std::size_t count = std::min(batch, texts.size() - start);
    nlohmann::json request{{"model", cfg.model_name}, {"input", nlohmann::json::array()}};
    for (std::size_t i = 0; i < count; ++i) {
      request["input"].push_back(texts[start + i]);
    }
    const std::string body = request.dump();

    httplib::Result res;
    int attempts = 0;
    for (;;) {
      ++attempts;
      res = client.Post(endpoint, headers, body, "application/json");
      if (res && res->status == 200) {
        break;
      }
      if (attempts > cfg.max_retries) {
        throw HttpError(res ? res->status : 0, attempts);
      }
      std::this_thread::sleep_for(cfg.backoff_base * (1 << (attempts - 1)));
    }

    std::vector<Eigen::VectorXd> vectors = parse_embedding_response(res->body, count);
    for (Eigen::VectorXd& v : vectors) {
      if (dimension < 0) {
        dimension = v.size();
      } else if (v.size() != dimension) {
        throw DimensionMismatch("service returned vectors of inconsistent length (" +
                                std::to_string(v.size()) + " vs " + std::to_string(dimension) +
                                ")");
      }
      result.push_back({std::move(v), cfg.provider_id()});
    }
  }
  return result;
}

}  // namespace

void ProviderConfig::validate() const {
  if (kind == ProviderKind::LocalHash && dimension <= 0) {
    throw ConfigError("local hash provider requires dimension > 0");
  }
  if (kind == ProviderKind::Http && base_url.empty()) {
    throw ConfigError("http provider requires base_url");
  }
}

std::string ProviderConfig::provider_id() const {
  if (kind == ProviderKind::LocalHash) {
    return "localhash-" + std::to_string(dimension);
  }
  return model_name.empty() ? "http" : "http-" + model_name;
}

std::string to_string(ProviderKind kind) {
  return kind == ProviderKind::LocalHash ? "localhash" : "http";
}

ProviderKind provider_kind_from_string(std::string_view name) {
  if (name == "localhash") return ProviderKind::LocalHash;
  if (name == "http") return ProviderKind::Http;
  throw ConfigError("unknown provider \"" + std::string(name) + "\" (expected localhash|http)");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = kFnvOffsetBasis;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

Eigen::VectorXd local_hash_embed(std::string_view text, int dimension) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension);
  const std::string normalized = textproc::normalize(text).normalized;
  const std::u32string cps = textproc::decode_utf8(normalized);
  const std::uint64_t d = static_cast<std::uint64_t>(dimension);
  for (std::size_t n = 1; n <= 3; ++n) {
    if (cps.size() < n) {
      break;
    }
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      const std::string gram =
          textproc::encode_utf8(std::u32string_view(cps).substr(i, n));
      v[static_cast<Eigen::Index>(fnv1a64(gram) % d)] += 1.0;
    }
  }
  const double norm = v.norm();
  if (norm > 0.0) {
    v /= norm;
  }
  return v;
}

std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts,
                                         const ProviderConfig& cfg) {
  cfg.validate();
  if (texts.empty()) {
    return {};
  }
  if (cfg.kind == ProviderKind::LocalHash) {
    std::vector<EmbeddingVector> result;
    result.reserve(texts.size());
    const std::string id = cfg.provider_id();
    for (const std::string& text : texts) {
      result.push_back({local_hash_embed(text, cfg.dimension), id});
    }
    return result;
  }
  return embed_http(texts, cfg);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size()) {
    throw DimensionMismatch("cosine of vectors with dimensions " +
                            std::to_string(a.values.size()) + " and " +
                            std::to_string(b.values.size()));
  }
  const double sq_a = a.values.squaredNorm();
  const double sq_b = b.values.squaredNorm();
  if (sq_a == 0.0 || sq_b == 0.0) {
    return 0.0;
  }
  const double value = a.values.dot(b.values) / std::sqrt(sq_a * sq_b);
  return std::clamp(value, -1.0, 1.0);
}

}  // namespace convqa::embedding
