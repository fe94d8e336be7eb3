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

#ifndef CONVQA_FILTER_HPP_
#define CONVQA_FILTER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "convqa/corpus.hpp"
#include "convqa/embedding.hpp"

namespace convqa::filter {

enum class Indicator { Cosine, WordRougeL, CharRougeL };

enum class FlagKind { HighRelevance, LowRelevance };

// A document is flagged when an indicator score reaches the high threshold
// (near-duplicate of the question) or falls to the low one (irrelevant).
struct Flag {
  FlagKind kind = FlagKind::HighRelevance;
  Indicator indicator = Indicator::Cosine;

  bool operator==(const Flag&) const = default;
};

std::string to_string(const Flag& flag);

// Screening band for one indicator: score >= tau_high flags HighRelevance,
// score <= tau_low flags LowRelevance. An absent threshold disables that
// side.
struct ThresholdBand {
  std::optional<double> tau_high;
  std::optional<double> tau_low;
};

struct FilterConfig {
  enum class Action { ReportOnly, Drop };

  ThresholdBand cosine{0.95, 0.05};
  ThresholdBand word_rouge{0.90, std::nullopt};
  ThresholdBand char_rouge{0.90, std::nullopt};
  // Embed the question together with the dialogue history instead of the
  // question alone when thresholding the cosine indicator.
  bool embed_with_history = false;
  Action action = Action::ReportOnly;

  // Enforces 0 <= tau_low < tau_high <= 1 per indicator (where present).
  void validate() const;
};

// Per-document indicator scores. Lexical scores use the question as
// reference and the document as hypothesis; both cosines are recorded, the
// config decides which one is thresholded.
struct DocScorecard {
  std::string sample_id;
  std::size_t doc_index = 0;
  double cos_q = 0.0;
  double cos_qh = 0.0;
  double wrl_q = 0.0;
  double crl_q = 0.0;
  std::vector<Flag> flags;
};

/// Scores every document of the sample, in document order.
std::vector<DocScorecard> score_documents(const corpus::Sample& s, const FilterConfig& cfg,
                                          const embedding::ProviderConfig& provider);

struct FilterReport {
  std::vector<DocScorecard> flagged;
  std::size_t n_flagged = 0;
  std::size_t n_dropped = 0;
  // Removed-document counts keyed by flag name (Drop action only).
  std::vector<std::pair<std::string, std::size_t>> dropped_by_flag;
};

// {"flagged": [{"sample_id", "doc_index", "scores": {...}, "flags": [str]}],
//  "n_flagged": int, "n_dropped": int, "dropped_by_flag": {...}}
nlohmann::json report_to_json(const FilterReport& report);

struct FilterResult {
  std::vector<corpus::Sample> kept;
  FilterReport report;
};

/// ReportOnly keeps the dataset untouched and lists flagged documents for
/// review. Drop removes flagged documents; surviving documents keep their
/// relative order. Throws CardMismatch when cards do not cover every
/// (sample, document) pair.
FilterResult apply_filter(std::span<const corpus::Sample> samples,
                          std::span<const DocScorecard> cards, const FilterConfig& cfg);

}  // namespace convqa::filter

#endif  // CONVQA_FILTER_HPP_
