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

#include "convqa/ensemble.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

#include "convqa/errors.hpp"
#include "convqa/metrics.hpp"
#include "oracles.hpp"

using namespace convqa;
using ensemble::CandidateSet;
using ensemble::EnsembleDecision;
using ensemble::Quantizer;

namespace {

embedding::ProviderConfig provider() {
  embedding::ProviderConfig cfg;
  cfg.dimension = 256;
  return cfg;
}

CandidateSet cands(std::vector<std::string> texts) {
  CandidateSet set;
  set.sample_id = "s";
  set.candidates = std::move(texts);
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    set.source_ids.push_back("m" + std::to_string(i));
  }
  return set;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("identical candidates score 1.0 off-diagonal, 0 on the diagonal") {
  const Eigen::MatrixXd s =
      ensemble::pairwise_scores(cands({"same answer", "same answer"}), Quantizer::WordAF);
  CHECK(s(0, 1) == 1.0);
  CHECK(s(1, 0) == 1.0);
  CHECK(s(0, 0) == 0.0);
  CHECK(s(1, 1) == 0.0);
}

TEST_CASE("disjoint character sets score 0 under char_a_f") {
  const Eigen::MatrixXd s =
      ensemble::pairwise_scores(cands({"abc", "xyz"}), Quantizer::CharAF);
  CHECK(s(0, 1) == 0.0);
  CHECK(s(1, 0) == 0.0);
}

TEST_CASE("worked example: two of three words shared") {
  const CandidateSet set = cands({"the cat sat", "the cat ran"});
  // LCS frozen by the exhaustive oracle over the word id sequences.
  const auto x = textproc::tokenize("the cat sat", textproc::TokenLevel::Word);
  const auto y = textproc::tokenize("the cat ran", textproc::TokenLevel::Word);
  auto [ix, iy] = metrics::intern_tokens(x, y);
  REQUIRE(oracles::lcs_exhaustive<std::int32_t>(ix, iy) == 2);

  const Eigen::MatrixXd s = ensemble::pairwise_scores(set, Quantizer::WordAF);
  CHECK(s(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("pairwise matrices are symmetric for every quantizer") {
  std::mt19937_64 rng(20250550);
  const embedding::ProviderConfig cfg = provider();
  for (int iter = 0; iter < 30; ++iter) {
    std::vector<std::string> texts;
    std::uniform_int_distribution<std::size_t> m_dist(1, 6);
    for (std::size_t i = m_dist(rng); i > 0; --i) {
      texts.push_back(oracles::random_text(rng, 15));
    }
    const CandidateSet set = cands(texts);
    for (const Quantizer q : {Quantizer::EmbAS, Quantizer::WordAF, Quantizer::CharAF}) {
      const Eigen::MatrixXd s = ensemble::pairwise_scores(set, q, &cfg);
      CHECK(oracles::exactly_equal(s, s.transpose().eval()));
      CHECK(s.diagonal().isZero());
    }
  }
}

TEST_CASE("emb_a_s requires a provider") {
  CHECK_THROWS_AS(ensemble::pairwise_scores(cands({"a"}), Quantizer::EmbAS, nullptr),
                  ConfigError);
}

TEST_CASE("select_best on a single candidate") {
  const EnsembleDecision d = ensemble::select_best(cands({"only"}), Quantizer::WordAF);
  CHECK(d.chosen_index == 0);
  CHECK(d.quality == std::vector<double>{0.0});
}

TEST_CASE("select_best rejects an empty candidate set") {
  CHECK_THROWS_AS(ensemble::select_best(cands({}), Quantizer::WordAF), EmptyCandidateSet);
}

TEST_CASE("three identical candidates tie and the lowest index wins") {
  const EnsembleDecision d =
      ensemble::select_best(cands({"same", "same", "same"}), Quantizer::WordAF);
  CHECK(d.chosen_index == 0);
  for (const double q : d.quality) {
    CHECK(q == 2.0);
  }
}

TEST_CASE("majority duplicate beats the odd one out") {
  // q_A = 1 + s(A,B) > q_B = 2 s(A,B) whenever s < 1.
  const EnsembleDecision d = ensemble::select_best(
      cands({"alpha beta gamma", "alpha beta gamma", "alpha beta delta"}), Quantizer::WordAF);
  CHECK(d.chosen_index == 0);
  CHECK(d.quality[0] > d.quality[2]);
  CHECK(d.quality[0] == d.quality[1]);
}

TEST_CASE("quality sums match a direct recomputation") {
  std::mt19937_64 rng(20250551);
  const embedding::ProviderConfig cfg = provider();
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<std::string> texts;
    std::uniform_int_distribution<std::size_t> m_dist(2, 6);
    for (std::size_t i = m_dist(rng); i > 0; --i) {
      texts.push_back(oracles::random_text(rng, 12));
    }
    const CandidateSet set = cands(texts);
    for (const Quantizer q : {Quantizer::EmbAS, Quantizer::WordAF, Quantizer::CharAF}) {
      const Eigen::MatrixXd s = ensemble::pairwise_scores(set, q, &cfg);
      const EnsembleDecision d = ensemble::select_best(set, q, &cfg);
      for (std::size_t i = 0; i < texts.size(); ++i) {
        double expected = 0.0;
        for (std::size_t j = 0; j < texts.size(); ++j) {
          if (j != i) {
            expected += s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          }
        }
        CHECK(d.quality[i] == doctest::Approx(expected).epsilon(1e-12));
      }
      CHECK(d.quality[d.chosen_index] ==
            *std::max_element(d.quality.begin(), d.quality.end()));
      // The winner is always one of the candidates.
      CHECK(d.chosen_index < texts.size());
    }
  }
}

TEST_CASE("permuting candidates permutes quality and keeps the chosen text") {
  std::mt19937_64 rng(20250552);
  for (int iter = 0; iter < 40; ++iter) {
    std::vector<std::string> texts;
    std::uniform_int_distribution<std::size_t> m_dist(2, 6);
    for (std::size_t i = m_dist(rng); i > 0; --i) {
      texts.push_back(oracles::random_text(rng, 10));
    }
    const EnsembleDecision base = ensemble::select_best(cands(texts), Quantizer::CharAF);

    // Unique argmax? Then the chosen text is permutation-invariant.
    int n_max = 0;
    for (const double q : base.quality) {
      if (q == base.quality[base.chosen_index]) {
        ++n_max;
      }
    }
    std::vector<std::string> shuffled = texts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const EnsembleDecision perm = ensemble::select_best(cands(shuffled), Quantizer::CharAF);

    std::vector<double> sorted_base = base.quality;
    std::vector<double> sorted_perm = perm.quality;
    std::sort(sorted_base.begin(), sorted_base.end());
    std::sort(sorted_perm.begin(), sorted_perm.end());
    for (std::size_t i = 0; i < sorted_base.size(); ++i) {
      CHECK(sorted_base[i] == doctest::Approx(sorted_perm[i]).epsilon(1e-12));
    }
    if (n_max == 1) {
      CHECK(texts[base.chosen_index] == shuffled[perm.chosen_index]);
    }
  }
}

TEST_CASE("ensemble_corpus passthrough: identical files reproduce the input") {
  std::vector<corpus::Prediction> file;
  for (int i = 0; i < 5; ++i) {
    file.push_back({"s" + std::to_string(i), "answer 猫 " + std::to_string(i)});
  }
  std::vector<std::vector<corpus::Prediction>> files(8, file);

  ensemble::EnsembleOptions opts;
  opts.quantizer = Quantizer::EmbAS;
  opts.provider = provider();
  const ensemble::CorpusEnsembleResult result = ensemble::ensemble_corpus(files, opts);
  REQUIRE(result.selections.size() == file.size());
  for (std::size_t i = 0; i < file.size(); ++i) {
    CHECK(result.selections[i].sample_id == file[i].sample_id);
    CHECK(result.selections[i].answer == file[i].answer);
  }
}

TEST_CASE("ensemble_corpus picks the majority answer per sample") {
  const std::vector<std::vector<corpus::Prediction>> files = {
      {{"a", "the cat sat on the mat"}, {"b", "blue"}},
      {{"a", "the cat sat on the mat"}, {"b", "red"}},
      {{"a", "a dog ran"}, {"b", "blue"}},
  };
  ensemble::EnsembleOptions opts;
  opts.quantizer = Quantizer::WordAF;
  const ensemble::CorpusEnsembleResult result = ensemble::ensemble_corpus(files, opts);
  CHECK(result.selections[0].answer == "the cat sat on the mat");
  CHECK(result.selections[1].answer == "blue");
  CHECK(result.decisions[0].chosen_index == 0);
}

TEST_CASE("ensemble_corpus rejects mismatched and duplicated sample ids") {
  const std::vector<std::vector<corpus::Prediction>> mismatched = {
      {{"a", "x"}, {"b", "y"}},
      {{"a", "x"}, {"c", "y"}},
  };
  ensemble::EnsembleOptions opts;
  opts.quantizer = Quantizer::WordAF;
  CHECK_THROWS_AS(ensemble::ensemble_corpus(mismatched, opts), SampleIdMismatch);

  const std::vector<std::vector<corpus::Prediction>> duplicated = {
      {{"a", "x"}, {"a", "y"}},
  };
  CHECK_THROWS_AS(ensemble::ensemble_corpus(duplicated, opts), DuplicateSampleId);
}

TEST_CASE("decision JSON layout") {
  EnsembleDecision d;
  d.sample_id = "s";
  d.quality = {0.5, 1.5};
  d.chosen_index = 1;
  d.quantizer = Quantizer::CharAF;
  const nlohmann::json j = ensemble::decision_to_json(d);
  CHECK(j["sample_id"] == "s");
  CHECK(j["chosen_index"] == 1);
  CHECK(j["quantizer"] == "char_a_f");
  CHECK(j["quality"][1] == 1.5);
}

TEST_CASE("quantizer names round-trip") {
  for (const Quantizer q : {Quantizer::EmbAS, Quantizer::WordAF, Quantizer::CharAF}) {
    CHECK(ensemble::quantizer_from_string(ensemble::to_string(q)) == q);
  }
  CHECK_THROWS_AS(ensemble::quantizer_from_string("bleu"), ConfigError);
}

}  // TEST_SUITE
