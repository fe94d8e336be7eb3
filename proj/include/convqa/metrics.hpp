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

#ifndef CONVQA_METRICS_HPP_
#define CONVQA_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "convqa/corpus.hpp"
#include "convqa/textproc.hpp"

namespace convqa::metrics {

// LCS-based F-measure between a reference X (length m) and a hypothesis Y
// (length n):
//   recall    = LCS(X,Y) / m
//   precision = LCS(X,Y) / n
//   f         = (1 + beta^2) * recall * precision / (recall + beta^2 * precision)
// All fields are 0 when either side is empty or the f denominator is 0.
struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f = 0.0;
  double beta = 1.0;
};

// Fraction of reference keywords (total = m) found in the answer
// (matched = n); value = matched / total.
struct KRScore {
  std::size_t matched = 0;
  std::size_t total = 0;
  double value = 0.0;
};

/// Longest common subsequence length of two token sequences at the same
/// level. Dispatches to the bit-parallel path; lcs_len_dp and
/// lcs_len_bitparallel expose both routes, which are bit-identical.
std::size_t lcs_len(const textproc::TokenSeq& a, const textproc::TokenSeq& b);

/// Classic O(|a|*|b|) dynamic program, O(min) memory.
std::size_t lcs_len_dp(const textproc::TokenSeq& a, const textproc::TokenSeq& b);

/// Bit-parallel row DP (Allison-Dix): processes 64 reference positions per
/// machine word.
std::size_t lcs_len_bitparallel(const textproc::TokenSeq& a, const textproc::TokenSeq& b);

// Id-sequence entry points used by both public routes; exposed so
// benchmarks and equivalence tests can drive them directly.
std::size_t lcs_len_dp_ids(std::span<const std::int32_t> a, std::span<const std::int32_t> b);
std::size_t lcs_len_bitparallel_ids(std::span<const std::int32_t> a,
                                    std::span<const std::int32_t> b);

// Maps both sequences onto a shared token-id vocabulary.
std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>> intern_tokens(
    const textproc::TokenSeq& a, const textproc::TokenSeq& b);

/// ROUGE-L of hypothesis y against reference x.
RougeScore rouge_l(const textproc::TokenSeq& x, const textproc::TokenSeq& y, double beta = 1.0);

struct KeywordMatchOptions {
  // Require space-or-edge boundaries around the match instead of plain
  // substring containment.
  bool word_boundary = false;
  textproc::NormalizeOptions norm;
};

/// Counts keywords whose normalized form occurs in the normalized answer.
/// Throws EmptyKeywordList when keywords is empty (such samples are
/// excluded from KR aggregation, not scored 0).
KRScore keywords_recall(std::span<const std::string> keywords, std::string_view answer,
                        const KeywordMatchOptions& opts = {});

struct SampleScore {
  std::string sample_id;
  RougeScore w_rouge_l;
  RougeScore c_rouge_l;
  std::optional<KRScore> kr;
  // An empty reference or hypothesis scored 0 by convention.
  bool degenerate = false;
};

// Per-sample scores plus macro-averages in input order. Samples without
// keywords are excluded from the KR mean only.
struct MetricReport {
  std::vector<SampleScore> per_sample;
  double w_rouge_l_f = 0.0;
  double c_rouge_l_f = 0.0;
  double kr = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_kr_samples = 0;
};

struct EvaluateOptions {
  double beta = 1.0;
  unsigned workers = 0;  // 0 = available parallelism
  KeywordMatchOptions keywords;
  textproc::NormalizeOptions norm;
};

/// Scores every hypothesis against its reference. Per-sample work may fan
/// out across workers; reduction happens in input order, so the report is
/// byte-identical regardless of the worker count.
/// Throws MissingHypothesis / UnknownSampleId / MissingGoldAnswer /
/// DuplicateSampleId.
MetricReport evaluate_corpus(std::span<const corpus::Sample> refs,
                             std::span<const corpus::Prediction> hyps,
                             const EvaluateOptions& opts = {});

nlohmann::json rouge_to_json(const RougeScore& s);
nlohmann::json report_to_json(const MetricReport& report);

}  // namespace convqa::metrics

#endif  // CONVQA_METRICS_HPP_
