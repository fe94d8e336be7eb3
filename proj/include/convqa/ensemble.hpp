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

#ifndef CONVQA_ENSEMBLE_HPP_
#define CONVQA_ENSEMBLE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "convqa/corpus.hpp"
#include "convqa/embedding.hpp"

namespace convqa::ensemble {

// Pairwise relevance quantizer between candidate answers: embedding cosine
// (emb_a_s), word-level ROUGE-L f (word_a_f), or char-level ROUGE-L f
// (char_a_f). The ROUGE f uses beta = 1, so every quantizer is symmetric.
enum class Quantizer { EmbAS, WordAF, CharAF };

std::string to_string(Quantizer q);
Quantizer quantizer_from_string(std::string_view name);

struct CandidateSet {
  std::string sample_id;
  std::vector<std::string> candidates;  // r_1 .. r_M
  std::vector<std::string> source_ids;  // which model produced each candidate
};

// quality[i] sums candidate i's similarity to every other candidate; the
// chosen index maximizes it, ties broken by lowest index.
struct EnsembleDecision {
  std::string sample_id;
  std::vector<double> quality;
  std::size_t chosen_index = 0;
  Quantizer quantizer = Quantizer::EmbAS;
};

/// M x M similarity matrix with a zero diagonal (self-pairs are excluded
/// from the quality sum). provider is required iff quantizer == EmbAS;
/// each candidate is embedded once.
Eigen::MatrixXd pairwise_scores(const CandidateSet& cands, Quantizer quantizer,
                                const embedding::ProviderConfig* provider = nullptr);

/// Throws EmptyCandidateSet when M == 0.
EnsembleDecision select_best(const CandidateSet& cands, Quantizer quantizer,
                             const embedding::ProviderConfig* provider = nullptr);

struct EnsembleOptions {
  Quantizer quantizer = Quantizer::EmbAS;
  embedding::ProviderConfig provider;
  unsigned workers = 0;
  std::vector<std::string> source_labels;  // defaults to file-<k>
};

struct CorpusEnsembleResult {
  std::vector<corpus::Prediction> selections;
  std::vector<EnsembleDecision> decisions;
};

/// Selects one answer per sample from M aligned prediction files. Files
/// must cover identical sample_id sets; output follows the first file's
/// sample order. Throws SampleIdMismatch / DuplicateSampleId.
CorpusEnsembleResult ensemble_corpus(std::span<const std::vector<corpus::Prediction>> files,
                                     const EnsembleOptions& opts);

// {"sample_id": str, "quality": [float], "chosen_index": int, "quantizer": str}
nlohmann::json decision_to_json(const EnsembleDecision& decision);

}  // namespace convqa::ensemble

#endif  // CONVQA_ENSEMBLE_HPP_
