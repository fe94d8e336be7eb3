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

#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "convqa/errors.hpp"
#include "convqa/metrics.hpp"
#include "convqa/parallel.hpp"
#include "convqa/textproc.hpp"

namespace convqa::ensemble {

std::string to_string(Quantizer q) {
  switch (q) {
    case Quantizer::EmbAS:
      return "emb_a_s";
    case Quantizer::WordAF:
      return "word_a_f";
    case Quantizer::CharAF:
      return "char_a_f";
  }
  return "emb_a_s";
}

Quantizer quantizer_from_string(std::string_view name) {
  if (name == "emb_a_s") return Quantizer::EmbAS;
  if (name == "word_a_f") return Quantizer::WordAF;
  if (name == "char_a_f") return Quantizer::CharAF;
  throw ConfigError("unknown quantizer \"" + std::string(name) +
                    "\" (expected emb_a_s|word_a_f|char_a_f)");
}

Eigen::MatrixXd pairwise_scores(const CandidateSet& cands, Quantizer quantizer,
                                const embedding::ProviderConfig* provider) {
  const std::size_t m = cands.candidates.size();
  const Eigen::Index mi = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(mi, mi);

  if (quantizer == Quantizer::EmbAS) {
    if (provider == nullptr) {
      throw ConfigError("emb_a_s quantizer requires an embedding provider");
    }
    const auto vectors = embedding::embed_texts(cands.candidates, *provider);
    for (Eigen::Index i = 0; i < mi; ++i) {
      for (Eigen::Index j = i + 1; j < mi; ++j) {
        const double s = embedding::cosine(vectors[i], vectors[j]);
        scores(i, j) = s;
        scores(j, i) = s;
      }
    }
    return scores;
  }

  const textproc::TokenLevel level =
      quantizer == Quantizer::WordAF ? textproc::TokenLevel::Word : textproc::TokenLevel::Char;
  std::vector<textproc::TokenSeq> tokens;
  tokens.reserve(m);
  for (const std::string& candidate : cands.candidates) {
    tokens.push_back(textproc::tokenize(candidate, level));
  }
  for (Eigen::Index i = 0; i < mi; ++i) {
    for (Eigen::Index j = i + 1; j < mi; ++j) {
      // beta = 1 makes the f-score symmetric, so orientation is irrelevant.
      const double s = metrics::rouge_l(tokens[i], tokens[j], 1.0).f;
      scores(i, j) = s;
      scores(j, i) = s;
    }
  }
  return scores;
}

EnsembleDecision select_best(const CandidateSet& cands, Quantizer quantizer,
                             const embedding::ProviderConfig* provider) {
  if (cands.candidates.empty()) {
    throw EmptyCandidateSet();
  }
  const Eigen::MatrixXd scores = pairwise_scores(cands, quantizer, provider);

  EnsembleDecision decision;
  decision.sample_id = cands.sample_id;
  decision.quantizer = quantizer;
  decision.quality.resize(cands.candidates.size());
  std::size_t best = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double q = scores.row(i).sum();  // diagonal is 0, so j != i
    decision.quality[static_cast<std::size_t>(i)] = q;
    if (q > decision.quality[best]) {
      best = static_cast<std::size_t>(i);
    }
  }
  decision.chosen_index = best;
  return decision;
}

CorpusEnsembleResult ensemble_corpus(std::span<const std::vector<corpus::Prediction>> files,
                                     const EnsembleOptions& opts) {
  if (files.empty()) {
    throw EmptyCandidateSet();
  }

  std::vector<std::unordered_map<std::string_view, std::string_view>> by_id(files.size());
  for (std::size_t f = 0; f < files.size(); ++f) {
    by_id[f].reserve(files[f].size());
    for (const corpus::Prediction& p : files[f]) {
      if (!by_id[f].emplace(p.sample_id, p.answer).second) {
        throw DuplicateSampleId(p.sample_id);
      }
    }
  }
  for (std::size_t f = 1; f < files.size(); ++f) {
    std::string missing;
    std::string extra;
    for (const corpus::Prediction& p : files[0]) {
      if (!by_id[f].contains(p.sample_id)) {
        missing += (missing.empty() ? "" : ", ") + p.sample_id;
      }
    }
    for (const corpus::Prediction& p : files[f]) {
      if (!by_id[0].contains(p.sample_id)) {
        extra += (extra.empty() ? "" : ", ") + p.sample_id;
      }
    }
    if (!missing.empty() || !extra.empty()) {
      throw SampleIdMismatch("prediction file " + std::to_string(f) +
                             " does not match file 0: missing [" + missing + "], extra [" +
                             extra + "]");
    }
  }

  std::vector<std::string> labels = opts.source_labels;
  if (labels.size() != files.size()) {
    labels.resize(files.size());
    for (std::size_t f = 0; f < files.size(); ++f) {
      labels[f] = "file-" + std::to_string(f);
    }
  }

  CorpusEnsembleResult result;
  result.selections.resize(files[0].size());
  result.decisions.resize(files[0].size());

  parallel_for(files[0].size(), opts.workers, [&](std::size_t i) {
    const corpus::Prediction& anchor = files[0][i];
    CandidateSet cands;
    cands.sample_id = anchor.sample_id;
    cands.candidates.reserve(files.size());
    for (std::size_t f = 0; f < files.size(); ++f) {
      cands.candidates.emplace_back(by_id[f].at(anchor.sample_id));
    }
    cands.source_ids = labels;

    EnsembleDecision decision = select_best(cands, opts.quantizer, &opts.provider);
    result.selections[i] = {anchor.sample_id, cands.candidates[decision.chosen_index]};
    result.decisions[i] = std::move(decision);
  });

  return result;
}

nlohmann::json decision_to_json(const EnsembleDecision& decision) {
  return nlohmann::json{{"sample_id", decision.sample_id},
                        {"quality", decision.quality},
                        {"chosen_index", decision.chosen_index},
                        {"quantizer", to_string(decision.quantizer)}};
}

}  // namespace convqa::ensemble
