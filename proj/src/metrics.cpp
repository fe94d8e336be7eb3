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

#include "convqa/metrics.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "convqa/errors.hpp"
#include "convqa/parallel.hpp"

namespace convqa::metrics {

namespace {

void check_levels(const textproc::TokenSeq& a, const textproc::TokenSeq& b) {
  if (a.level != b.level) {
    throw std::invalid_argument("token sequences are at different levels");
  }
}

// True iff `needle` occurs in `haystack` with a space or string edge on
// both sides. Both strings are already normalized.
bool contains_word_bounded(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) {
    return true;
  }
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
    const bool left_ok = pos == 0 || haystack[pos - 1] == ' ';
    const std::size_t end = pos + needle.size();
    const bool right_ok = end == haystack.size() || haystack[end] == ' ';
    if (left_ok && right_ok) {
      return true;
    }
    ++pos;
  }
  return false;
}

}  // namespace

std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>> intern_tokens(
    const textproc::TokenSeq& a, const textproc::TokenSeq& b) {
  std::unordered_map<std::string_view, std::int32_t> vocab;
  vocab.reserve(a.size() + b.size());
  auto intern = [&](const std::vector<std::string>& tokens) {
    std::vector<std::int32_t> ids;
    ids.reserve(tokens.size());
    for (const std::string& tok : tokens) {
      auto [it, _] = vocab.try_emplace(tok, static_cast<std::int32_t>(vocab.size()));
      ids.push_back(it->second);
    }
    return ids;
  };
  return {intern(a.tokens), intern(b.tokens)};
}

std::size_t lcs_len_dp_ids(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  if (a.empty() || b.empty()) {
    return 0;
  }
  // Keep the shorter sequence on the inner dimension.
  if (a.size() < b.size()) {
    std::swap(a, b);
  }
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    const std::int32_t ai = a[i - 1];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = ai == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Allison-Dix bit-vector LCS. Bit i of `row` tracks whether the DP value
// increases at reference position i; after consuming all of b,
// popcount(row) is the LCS length. Words carry both the left-shift bit and
// the subtraction borrow across limb boundaries.
std::size_t lcs_len_bitparallel_ids(std::span<const std::int32_t> a,
                                    std::span<const std::int32_t> b) {
  if (a.empty() || b.empty()) {
    return 0;
  }
  if (a.size() < b.size()) {
    std::swap(a, b);  // bits index the longer sequence; result is symmetric
  }
  const std::size_t m = a.size();
  const std::size_t words = (m + 63) / 64;

  std::unordered_map<std::int32_t, std::vector<std::uint64_t>> match;
  match.reserve(std::min(m, static_cast<std::size_t>(4096)));
  for (std::size_t i = 0; i < m; ++i) {
    auto [it, _] = match.try_emplace(a[i], words, 0);
    it->second[i >> 6] |= std::uint64_t{1} << (i & 63);
  }

  std::vector<std::uint64_t> row(words, 0);
  for (const std::int32_t c : b) {
    auto it = match.find(c);
    const std::uint64_t* mv = it == match.end() ? nullptr : it->second.data();
    std::uint64_t shift_in = 1;  // (row << 1) | 1
    std::uint64_t borrow = 0;
    for (std::size_t k = 0; k < words; ++k) {
      const std::uint64_t r = row[k];
      const std::uint64_t x = r | (mv ? mv[k] : 0);
      const std::uint64_t y = (r << 1) | shift_in;
      shift_in = r >> 63;
      const std::uint64_t d0 = x - y;
      const std::uint64_t b0 = x < y ? 1 : 0;
      const std::uint64_t d1 = d0 - borrow;
      const std::uint64_t b1 = d0 < borrow ? 1 : 0;
      borrow = b0 | b1;
      row[k] = x & ~d1;
    }
  }

  std::size_t total = 0;
  for (const std::uint64_t w : row) {
    total += static_cast<std::size_t>(std::popcount(w));
  }
  return total;
}

std::size_t lcs_len(const textproc::TokenSeq& a, const textproc::TokenSeq& b) {
  check_levels(a, b);
  auto [ia, ib] = intern_tokens(a, b);
  return lcs_len_bitparallel_ids(ia, ib);
}

std::size_t lcs_len_dp(const textproc::TokenSeq& a, const textproc::TokenSeq& b) {
  check_levels(a, b);
  auto [ia, ib] = intern_tokens(a, b);
  return lcs_len_dp_ids(ia, ib);
}

std::size_t lcs_len_bitparallel(const textproc::TokenSeq& a, const textproc::TokenSeq& b) {
  check_levels(a, b);
  auto [ia, ib] = intern_tokens(a, b);
  return lcs_len_bitparallel_ids(ia, ib);
}

RougeScore rouge_l(const textproc::TokenSeq& x, const textproc::TokenSeq& y, double beta) {
  if (beta <= 0.0) {
    throw std::invalid_argument("beta must be positive");
  }
  RougeScore score;
  score.beta = beta;
  const std::size_t m = x.size();
  const std::size_t n = y.size();
  if (m == 0 || n == 0) {
    return score;
  }
  const double lcs = static_cast<double>(lcs_len(x, y));
  score.recall = lcs / static_cast<double>(m);
  score.precision = lcs / static_cast<double>(n);
  const double b2 = beta * beta;
  const double denom = score.recall + b2 * score.precision;
  if (denom > 0.0) {
    score.f = (1.0 + b2) * score.recall * score.precision / denom;
  }
  return score;
}

KRScore keywords_recall(std::span<const std::string> keywords, std::string_view answer,
                        const KeywordMatchOptions& opts) {
  if (keywords.empty()) {
    throw EmptyKeywordList();
  }
  const std::string norm_answer = textproc::normalize(answer, opts.norm).normalized;
  KRScore score;
  score.total = keywords.size();
  for (const std::string& keyword : keywords) {
    const std::string norm_kw = textproc::normalize(keyword, opts.norm).normalized;
    const bool hit = opts.word_boundary
                         ? contains_word_bounded(norm_answer, norm_kw)
                         : norm_answer.find(norm_kw) != std::string::npos;
    if (hit) {
      ++score.matched;
    }
  }
  score.value = static_cast<double>(score.matched) / static_cast<double>(score.total);
  return score;
}

MetricReport evaluate_corpus(std::span<const corpus::Sample> refs,
                             std::span<const corpus::Prediction> hyps,
                             const EvaluateOptions& opts) {
  std::unordered_map<std::string_view, std::size_t> ref_index;
  ref_index.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!ref_index.emplace(refs[i].sample_id, i).second) {
      throw DuplicateSampleId(refs[i].sample_id);
    }
  }

  std::vector<const corpus::Prediction*> by_ref(refs.size(), nullptr);
  for (const corpus::Prediction& h : hyps) {
    auto it = ref_index.find(h.sample_id);
    if (it == ref_index.end()) {
      throw UnknownSampleId(h.sample_id);
    }
    if (by_ref[it->second] != nullptr) {
      throw DuplicateSampleId(h.sample_id);
    }
    by_ref[it->second] = &h;
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (by_ref[i] == nullptr) {
      throw MissingHypothesis(refs[i].sample_id);
    }
    if (!refs[i].answer.has_value()) {
      throw MissingGoldAnswer(refs[i].sample_id);
    }
  }

  MetricReport report;
  report.n_samples = refs.size();
  report.per_sample.resize(refs.size());

  parallel_for(refs.size(), opts.workers, [&](std::size_t i) {
    const corpus::Sample& ref = refs[i];
    const std::string& hyp = by_ref[i]->answer;
    SampleScore& out = report.per_sample[i];
    out.sample_id = ref.sample_id;

    const textproc::NormalizedText gold_norm = textproc::normalize(*ref.answer, opts.norm);
    const textproc::NormalizedText hyp_norm = textproc::normalize(hyp, opts.norm);
    const textproc::TokenSeq gold_words = textproc::tokenize_words(gold_norm);
    const textproc::TokenSeq hyp_words = textproc::tokenize_words(hyp_norm);
    const textproc::TokenSeq gold_chars = textproc::tokenize_chars(gold_norm);
    const textproc::TokenSeq hyp_chars = textproc::tokenize_chars(hyp_norm);

    out.w_rouge_l = rouge_l(gold_words, hyp_words, opts.beta);
    out.c_rouge_l = rouge_l(gold_chars, hyp_chars, opts.beta);
    out.degenerate = gold_chars.empty() || hyp_chars.empty();

    KeywordMatchOptions kw_opts = opts.keywords;
    kw_opts.norm = opts.norm;
    if (ref.keywords.has_value() && !ref.keywords->empty()) {
      out.kr = keywords_recall(*ref.keywords, hyp, kw_opts);
    }
  });

  // Reduce in input order so aggregates are deterministic.
  double w_sum = 0.0;
  double c_sum = 0.0;
  double kr_sum = 0.0;
  for (const SampleScore& s : report.per_sample) {
    w_sum += s.w_rouge_l.f;
    c_sum += s.c_rouge_l.f;
    if (s.kr.has_value()) {
      kr_sum += s.kr->value;
      ++report.n_kr_samples;
    }
  }
  if (report.n_samples > 0) {
    report.w_rouge_l_f = w_sum / static_cast<double>(report.n_samples);
    report.c_rouge_l_f = c_sum / static_cast<double>(report.n_samples);
  }
  if (report.n_kr_samples > 0) {
    report.kr = kr_sum / static_cast<double>(report.n_kr_samples);
  }
  return report;
}

nlohmann::json rouge_to_json(const RougeScore& s) {
  return nlohmann::json{
      {"recall", s.recall}, {"precision", s.precision}, {"f", s.f}, {"beta", s.beta}};
}

nlohmann::json report_to_json(const MetricReport& report) {
  nlohmann::json per_sample = nlohmann::json::array();
  for (const SampleScore& s : report.per_sample) {
    nlohmann::json entry{{"sample_id", s.sample_id},
                         {"w_rouge_l", rouge_to_json(s.w_rouge_l)},
                         {"c_rouge_l", rouge_to_json(s.c_rouge_l)},
                         {"degenerate", s.degenerate}};
    if (s.kr.has_value()) {
      entry["kr"] = {{"matched", s.kr->matched}, {"total", s.kr->total}, {"value", s.kr->value}};
    } else {
      entry["kr"] = nullptr;
    }
    per_sample.push_back(std::move(entry));
  }
  return nlohmann::json{{"aggregate",
                         {{"w_rouge_l_f", report.w_rouge_l_f},
                          {"c_rouge_l_f", report.c_rouge_l_f},
                          {"kr", report.kr},
                          {"n_kr_samples", report.n_kr_samples}}},
                        {"n_samples", report.n_samples},
                        {"per_sample", std::move(per_sample)}};
}

}  // namespace convqa::metrics
