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

#include <doctest.h>

#include <random>

#include "convqa/errors.hpp"
#include "oracles.hpp"

using namespace convqa;
using textproc::TokenLevel;
using textproc::TokenSeq;

namespace {

// Builds a char-level TokenSeq directly from ASCII, no normalization.
TokenSeq chars_of(std::string_view s) {
  TokenSeq seq;
  seq.level = TokenLevel::Char;
  for (const char c : s) {
    seq.tokens.emplace_back(1, c);
  }
  return seq;
}

TokenSeq words_of(std::vector<std::string> tokens) {
  TokenSeq seq;
  seq.level = TokenLevel::Word;
  seq.tokens = std::move(tokens);
  return seq;
}

corpus::Sample make_ref(std::string id, std::string answer,
                        std::optional<std::vector<std::string>> keywords = std::nullopt) {
  corpus::Sample s;
  s.sample_id = std::move(id);
  s.question = "q";
  s.answer = std::move(answer);
  s.keywords = std::move(keywords);
  s.split = corpus::Split::Eval;
  return s;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("lcs_len on the classic pair, checked against exhaustive enumeration") {
  const TokenSeq a = chars_of("abcbdab");
  const TokenSeq b = chars_of("bdcaba");
  auto [ia, ib] = metrics::intern_tokens(a, b);
  CHECK(oracles::lcs_exhaustive<std::int32_t>(ia, ib) == 4);
  CHECK(metrics::lcs_len(a, b) == 4);
  CHECK(metrics::lcs_len_dp(a, b) == 4);
  CHECK(metrics::lcs_len_bitparallel(a, b) == 4);
}

TEST_CASE("lcs_len identity and empty cases") {
  const TokenSeq s = chars_of("subsequence");
  CHECK(metrics::lcs_len(s, s) == s.size());
  CHECK(metrics::lcs_len(s, chars_of("")) == 0);
  CHECK(metrics::lcs_len(chars_of(""), chars_of("")) == 0);
}

TEST_CASE("lcs_len rejects mixed levels") {
  CHECK_THROWS_AS(metrics::lcs_len(chars_of("ab"), words_of({"ab"})), std::invalid_argument);
}

TEST_CASE("lcs properties: symmetry, upper bound, common extension") {
  std::mt19937_64 rng(20250510);
  for (int iter = 0; iter < 300; ++iter) {
    const auto a = oracles::random_id_seq(rng, 60, 5);
    const auto b = oracles::random_id_seq(rng, 60, 5);
    const std::size_t ab = metrics::lcs_len_bitparallel_ids(a, b);
    CHECK(ab == metrics::lcs_len_bitparallel_ids(b, a));
    CHECK(ab <= std::min(a.size(), b.size()));

    auto a2 = a;
    auto b2 = b;
    a2.push_back(99);
    b2.push_back(99);
    CHECK(metrics::lcs_len_bitparallel_ids(a2, b2) == ab + 1);
  }
}

TEST_CASE("bit-parallel LCS equals the DP across word-boundary lengths") {
  std::mt19937_64 rng(20250511);
  for (const std::size_t len : {1u, 63u, 64u, 65u, 127u, 128u, 129u, 200u, 500u}) {
    for (int iter = 0; iter < 20; ++iter) {
      std::uniform_int_distribution<std::int32_t> alpha_dist(2, 40);
      const std::int32_t alphabet = alpha_dist(rng);
      auto a = oracles::random_id_seq(rng, len, alphabet);
      auto b = oracles::random_id_seq(rng, len, alphabet);
      a.resize(len);
      b.resize(len);
      CHECK(metrics::lcs_len_bitparallel_ids(a, b) == metrics::lcs_len_dp_ids(a, b));
    }
  }
}

TEST_CASE("both LCS routes agree with the exhaustive oracle on short pairs") {
  std::mt19937_64 rng(20250512);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto a = oracles::random_id_seq(rng, 9, 4);
    const auto b = oracles::random_id_seq(rng, 12, 4);
    const std::size_t expected = oracles::lcs_exhaustive<std::int32_t>(a, b);
    CHECK(metrics::lcs_len_dp_ids(a, b) == expected);
    CHECK(metrics::lcs_len_bitparallel_ids(a, b) == expected);
  }
}

TEST_CASE("rouge_l on identical sentences is 1.0") {
  const TokenSeq x = words_of({"the", "cat", "sat"});
  const metrics::RougeScore s = metrics::rouge_l(x, x, 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.precision == 1.0);
  CHECK(s.f == 1.0);
}

TEST_CASE("rouge_l worked example: two of three tokens shared") {
  // LCS("the cat sat", "the cat ran") = 2, frozen via the exhaustive oracle.
  const TokenSeq x = words_of({"the", "cat", "sat"});
  const TokenSeq y = words_of({"the", "cat", "ran"});
  auto [ix, iy] = metrics::intern_tokens(x, y);
  REQUIRE(oracles::lcs_exhaustive<std::int32_t>(ix, iy) == 2);

  const metrics::RougeScore s = metrics::rouge_l(x, y, 1.0);
  CHECK(s.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.f == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("rouge_l degenerate inputs score zero") {
  const metrics::RougeScore s = metrics::rouge_l(chars_of("abc"), chars_of(""), 1.0);
  CHECK(s.recall == 0.0);
  CHECK(s.precision == 0.0);
  CHECK(s.f == 0.0);
}

TEST_CASE("rouge_l rejects non-positive beta") {
  CHECK_THROWS_AS(metrics::rouge_l(chars_of("a"), chars_of("a"), 0.0), std::invalid_argument);
}

TEST_CASE("rouge_l swap exchanges recall and precision; beta=1 f is symmetric") {
  std::mt19937_64 rng(20250513);
  for (int iter = 0; iter < 200; ++iter) {
    TokenSeq x;
    TokenSeq y;
    x.level = y.level = TokenLevel::Word;
    std::uniform_int_distribution<std::size_t> len(0, 12);
    for (std::size_t i = len(rng); i > 0; --i) x.tokens.push_back(oracles::random_ascii_word(rng, 2));
    for (std::size_t i = len(rng); i > 0; --i) y.tokens.push_back(oracles::random_ascii_word(rng, 2));
    for (const double beta : {0.5, 1.0, 2.0}) {
      const metrics::RougeScore ab = metrics::rouge_l(x, y, beta);
      const metrics::RougeScore ba = metrics::rouge_l(y, x, beta);
      CHECK(ab.recall == ba.precision);
      CHECK(ab.precision == ba.recall);
      if (beta == 1.0) {
        CHECK(ab.f == doctest::Approx(ba.f).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("rouge_l f is 1.0 iff the non-empty sequences are equal") {
  std::mt19937_64 rng(20250514);
  for (int iter = 0; iter < 300; ++iter) {
    TokenSeq x;
    TokenSeq y;
    x.level = y.level = TokenLevel::Word;
    std::uniform_int_distribution<std::size_t> len(1, 6);
    for (std::size_t i = len(rng); i > 0; --i) x.tokens.push_back(oracles::random_ascii_word(rng, 2));
    for (std::size_t i = len(rng); i > 0; --i) y.tokens.push_back(oracles::random_ascii_word(rng, 2));
    const metrics::RougeScore s = metrics::rouge_l(x, y, 1.0);
    CHECK((s.f == 1.0) == (x.tokens == y.tokens));
  }
}

TEST_CASE("keywords_recall direct counts") {
  const std::vector<std::string> kws = {"cat", "sat", "mat"};
  const metrics::KRScore s = metrics::keywords_recall(kws, "the cat sat down");
  CHECK(s.matched == 2);
  CHECK(s.total == 3);
  CHECK(s.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const std::vector<std::string> one = {"a"};
  CHECK(metrics::keywords_recall(one, "a").value == 1.0);
}

TEST_CASE("keywords_recall matches after NFKC + case folding") {
  // Fullwidth "Cat" normalizes to "cat".
  const std::vector<std::string> kws = {"Ｃａｔ"};
  CHECK(metrics::keywords_recall(kws, "the cat").value == 1.0);
}

TEST_CASE("keywords_recall rejects an empty keyword list") {
  CHECK_THROWS_AS(metrics::keywords_recall({}, "anything"), EmptyKeywordList);
}

TEST_CASE("keywords_recall word-boundary mode") {
  const std::vector<std::string> kws = {"cat"};
  metrics::KeywordMatchOptions bounded;
  bounded.word_boundary = true;
  CHECK(metrics::keywords_recall(kws, "the catalog").value == 1.0);  // substring default
  CHECK(metrics::keywords_recall(kws, "the catalog", bounded).value == 0.0);
  CHECK(metrics::keywords_recall(kws, "a cat sat", bounded).value == 1.0);
  CHECK(metrics::keywords_recall(kws, "cat", bounded).value == 1.0);
}

TEST_CASE("keywords_recall is monotone under answer extension") {
  std::mt19937_64 rng(20250515);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<std::string> kws;
    std::uniform_int_distribution<std::size_t> n_kws(1, 5);
    for (std::size_t i = n_kws(rng); i > 0; --i) kws.push_back(oracles::random_text(rng, 4));
    const std::string answer = oracles::random_text(rng, 20);
    const std::string extended = answer + oracles::random_text(rng, 10);
    CHECK(metrics::keywords_recall(kws, extended).value >=
          metrics::keywords_recall(kws, answer).value);
  }
}

TEST_CASE("evaluate_corpus: perfect hypotheses score 1.0 everywhere") {
  const std::vector<corpus::Sample> refs = {
      make_ref("a", "the cat sat", std::vector<std::string>{"cat"}),
      make_ref("b", "猫坐在垫子上"),
  };
  const std::vector<corpus::Prediction> hyps = {{"a", "the cat sat"}, {"b", "猫坐在垫子上"}};
  const metrics::MetricReport report = metrics::evaluate_corpus(refs, hyps);
  CHECK(report.n_samples == 2);
  CHECK(report.n_kr_samples == 1);
  CHECK(report.w_rouge_l_f == 1.0);
  CHECK(report.c_rouge_l_f == 1.0);
  CHECK(report.kr == 1.0);
}

TEST_CASE("evaluate_corpus: empty hypothesis scores zero and is flagged degenerate") {
  const std::vector<corpus::Sample> refs = {
      make_ref("a", "gold answer", std::vector<std::string>{"gold"})};
  const std::vector<corpus::Prediction> hyps = {{"a", ""}};
  const metrics::MetricReport report = metrics::evaluate_corpus(refs, hyps);
  CHECK(report.w_rouge_l_f == 0.0);
  CHECK(report.c_rouge_l_f == 0.0);
  CHECK(report.kr == 0.0);
  CHECK(report.per_sample[0].degenerate);
}

TEST_CASE("evaluate_corpus: aggregate is the arithmetic mean in input order") {
  // Sample 1 scores f = 0.5 ("a b" vs "a c": LCS 1 of 2), sample 2 scores 1.0.
  const std::vector<corpus::Sample> refs = {make_ref("s1", "aa bb"), make_ref("s2", "xx yy")};
  const std::vector<corpus::Prediction> hyps = {{"s1", "aa cc"}, {"s2", "xx yy"}};
  const metrics::MetricReport report = metrics::evaluate_corpus(refs, hyps);
  CHECK(report.w_rouge_l_f == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("evaluate_corpus error paths") {
  const std::vector<corpus::Sample> refs = {make_ref("a", "x")};
  CHECK_THROWS_AS(
      metrics::evaluate_corpus(refs, std::vector<corpus::Prediction>{}), MissingHypothesis);
  CHECK_THROWS_AS(metrics::evaluate_corpus(
                      refs, std::vector<corpus::Prediction>{{"a", "x"}, {"zz", "y"}}),
                  UnknownSampleId);
  CHECK_THROWS_AS(metrics::evaluate_corpus(
                      refs, std::vector<corpus::Prediction>{{"a", "x"}, {"a", "y"}}),
                  DuplicateSampleId);

  std::vector<corpus::Sample> no_gold = refs;
  no_gold[0].answer.reset();
  CHECK_THROWS_AS(metrics::evaluate_corpus(
                      no_gold, std::vector<corpus::Prediction>{{"a", "x"}}),
                  MissingGoldAnswer);
}

TEST_CASE("evaluate_corpus: samples with empty keyword lists are excluded from KR") {
  std::vector<corpus::Sample> refs = {
      make_ref("a", "x", std::vector<std::string>{}),
      make_ref("b", "y", std::vector<std::string>{"y"}),
  };
  const std::vector<corpus::Prediction> hyps = {{"a", "x"}, {"b", "y"}};
  const metrics::MetricReport report = metrics::evaluate_corpus(refs, hyps);
  CHECK(report.n_kr_samples == 1);
  CHECK(report.kr == 1.0);
  CHECK_FALSE(report.per_sample[0].kr.has_value());
}

TEST_CASE("evaluate_corpus is byte-deterministic across worker counts") {
  std::mt19937_64 rng(20250516);
  std::vector<corpus::Sample> refs;
  std::vector<corpus::Prediction> hyps;
  for (int i = 0; i < 40; ++i) {
    const std::string id = "s" + std::to_string(i);
    refs.push_back(make_ref(id, oracles::random_text(rng, 30),
                            std::vector<std::string>{oracles::random_text(rng, 4)}));
    hyps.push_back({id, oracles::random_text(rng, 30)});
  }
  metrics::EvaluateOptions one;
  one.workers = 1;
  metrics::EvaluateOptions many;
  many.workers = 7;
  const std::string a = metrics::report_to_json(metrics::evaluate_corpus(refs, hyps, one)).dump();
  const std::string b = metrics::report_to_json(metrics::evaluate_corpus(refs, hyps, many)).dump();
  CHECK(a == b);
}

}  // TEST_SUITE
