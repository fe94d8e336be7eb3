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

#include "convqa/filter.hpp"

#include <map>
#include <stdexcept>
#include <utility>

#include "convqa/errors.hpp"
#include "convqa/metrics.hpp"

namespace convqa::filter {

namespace {

std::string indicator_name(Indicator indicator) {
  switch (indicator) {
    case Indicator::Cosine:
      return "cosine";
    case Indicator::WordRougeL:
      return "word_rouge_l";
    case Indicator::CharRougeL:
      return "char_rouge_l";
  }
  return "cosine";
}

void check_band(const ThresholdBand& band, Indicator indicator) {
  const std::string name = indicator_name(indicator);
  if (band.tau_high && (*band.tau_high < 0.0 || *band.tau_high > 1.0)) {
    throw ConfigError("tau_high for " + name + " out of [0,1]");
  }
  if (band.tau_low && (*band.tau_low < 0.0 || *band.tau_low > 1.0)) {
    throw ConfigError("tau_low for " + name + " out of [0,1]");
  }
  if (band.tau_high && band.tau_low && !(*band.tau_low < *band.tau_high)) {
    throw ConfigError("tau_low must be strictly below tau_high for " + name);
  }
}

void apply_band(const ThresholdBand& band, Indicator indicator, double score,
                std::vector<Flag>& flags) {
  if (band.tau_high && score >= *band.tau_high) {
    flags.push_back({FlagKind::HighRelevance, indicator});
  }
  if (band.tau_low && score <= *band.tau_low) {
    flags.push_back({FlagKind::LowRelevance, indicator});
  }
}

// History turns and the final question, in dialogue order.
std::string question_with_history(const corpus::Sample& s) {
  std::string text;
  for (const corpus::Turn& turn : s.history) {
    text += turn.question;
    text += ' ';
    text += turn.answer;
    text += ' ';
  }
  text += s.question;
  return text;
}

}  // namespace

std::string to_string(const Flag& flag) {
  const std::string side = flag.kind == FlagKind::HighRelevance ? "high" : "low";
  return side + "_" + indicator_name(flag.indicator);
}

void FilterConfig::validate() const {
  check_band(cosine, Indicator::Cosine);
  check_band(word_rouge, Indicator::WordRougeL);
  check_band(char_rouge, Indicator::CharRougeL);
}

std::vector<DocScorecard> score_documents(const corpus::Sample& s, const FilterConfig& cfg,
                                          const embedding::ProviderConfig& provider) {
  cfg.validate();
  if (s.documents.empty()) {
    throw std::invalid_argument("sample \"" + s.sample_id + "\" has no documents");
  }

  // One provider call per sample: question, question+history, documents.
  std::vector<std::string> texts;
  texts.reserve(s.documents.size() + 2);
  texts.push_back(s.question);
  texts.push_back(question_with_history(s));
  texts.insert(texts.end(), s.documents.begin(), s.documents.end());
  const std::vector<embedding::EmbeddingVector> vectors = embedding::embed_texts(texts, provider);
  const embedding::EmbeddingVector& q_vec = vectors[0];
  const embedding::EmbeddingVector& qh_vec = vectors[1];

  const textproc::NormalizedText q_norm = textproc::normalize(s.question);
  const textproc::TokenSeq q_words = textproc::tokenize_words(q_norm);
  const textproc::TokenSeq q_chars = textproc::tokenize_chars(q_norm);

  std::vector<DocScorecard> cards;
  cards.reserve(s.documents.size());
  for (std::size_t i = 0; i < s.documents.size(); ++i) {
    DocScorecard card;
    card.sample_id = s.sample_id;
    card.doc_index = i;
    card.cos_q = embedding::cosine(vectors[i + 2], q_vec);
    card.cos_qh = embedding::cosine(vectors[i + 2], qh_vec);

    const textproc::NormalizedText doc_norm = textproc::normalize(s.documents[i]);
    card.wrl_q = metrics::rouge_l(q_words, textproc::tokenize_words(doc_norm), 1.0).f;
    card.crl_q = metrics::rouge_l(q_chars, textproc::tokenize_chars(doc_norm), 1.0).f;

    const double active_cos = cfg.embed_with_history ? card.cos_qh : card.cos_q;
    apply_band(cfg.cosine, Indicator::Cosine, active_cos, card.flags);
    apply_band(cfg.word_rouge, Indicator::WordRougeL, card.wrl_q, card.flags);
    apply_band(cfg.char_rouge, Indicator::CharRougeL, card.crl_q, card.flags);
    cards.push_back(std::move(card));
  }
  return cards;
}

nlohmann::json report_to_json(const FilterReport& report) {
  nlohmann::json flagged = nlohmann::json::array();
  for (const DocScorecard& card : report.flagged) {
    nlohmann::json flags = nlohmann::json::array();
    for (const Flag& flag : card.flags) {
      flags.push_back(to_string(flag));
    }
    flagged.push_back({{"sample_id", card.sample_id},
                       {"doc_index", card.doc_index},
                       {"scores",
                        {{"cos_q", card.cos_q},
                         {"cos_qh", card.cos_qh},
                         {"wrl_q", card.wrl_q},
                         {"crl_q", card.crl_q}}},
                       {"flags", std::move(flags)}});
  }
  nlohmann::json by_flag = nlohmann::json::object();
  for (const auto& [name, count] : report.dropped_by_flag) {
    by_flag[name] = count;
  }
  return nlohmann::json{{"flagged", std::move(flagged)},
                        {"n_flagged", report.n_flagged},
                        {"n_dropped", report.n_dropped},
                        {"dropped_by_flag", std::move(by_flag)}};
}

FilterResult apply_filter(std::span<const corpus::Sample> samples,
                          std::span<const DocScorecard> cards, const FilterConfig& cfg) {
  cfg.validate();

  std::map<std::pair<std::string_view, std::size_t>, const DocScorecard*> by_key;
  for (const DocScorecard& card : cards) {
    by_key[{card.sample_id, card.doc_index}] = &card;
  }
  auto find_card = [&](const corpus::Sample& s, std::size_t doc) -> const DocScorecard& {
    auto it = by_key.find({s.sample_id, doc});
    if (it == by_key.end()) {
      throw CardMismatch("no scorecard for sample \"" + s.sample_id + "\" document " +
                         std::to_string(doc));
    }
    return *it->second;
  };

  FilterResult result;
  result.kept.reserve(samples.size());
  std::map<std::string, std::size_t> dropped_by_flag;

  for (const corpus::Sample& s : samples) {
    corpus::Sample kept = s;
    std::vector<std::string> surviving;
    surviving.reserve(s.documents.size());
    for (std::size_t doc = 0; doc < s.documents.size(); ++doc) {
      const DocScorecard& card = find_card(s, doc);
      if (card.flags.empty()) {
        surviving.push_back(s.documents[doc]);
        continue;
      }
      result.report.flagged.push_back(card);
      if (cfg.action == FilterConfig::Action::Drop) {
        ++result.report.n_dropped;
        for (const Flag& flag : card.flags) {
          ++dropped_by_flag[to_string(flag)];
        }
      } else {
        surviving.push_back(s.documents[doc]);
      }
    }
    if (cfg.action == FilterConfig::Action::Drop) {
      kept.documents = std::move(surviving);  // relative order preserved
    }
    result.kept.push_back(std::move(kept));
  }

  result.report.n_flagged = result.report.flagged.size();
  result.report.dropped_by_flag.assign(dropped_by_flag.begin(), dropped_by_flag.end());
  return result;
}

}  // namespace convqa::filter
