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

#ifndef CONVQA_CORPUS_HPP_
#define CONVQA_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace convqa::corpus {

enum class Split { Train, Eval, Test };

std::string to_string(Split split);
Split split_from_string(std::string_view name);

// One past question/answer exchange of the dialogue history.
struct Turn {
  std::string question;
  std::string answer;
};

// One dialogue instance: history turns, reference documents, the final
// question, and (depending on the split) a gold answer and keywords.
// Document order is ingestion order and is never permuted.
struct Sample {
  std::string sample_id;
  std::vector<Turn> history;
  std::vector<std::string> documents;
  std::string question;
  std::optional<std::string> answer;
  std::optional<std::vector<std::string>> keywords;
  Split split = Split::Train;
  bool pseudo = false;  // answer was produced by a model, not an annotator
};

// A (sample_id, answer) pair as found in prediction files.
struct Prediction {
  std::string sample_id;
  std::string answer;
};

// --- JSONL ingestion ---
//
// One JSON object per line:
//   {"sample_id": str?, "history": [{"question": str, "answer": str}],
//    "documents": [str], "question": str, "answer": str?, "keywords": [str]?}
// plus an optional "pseudo": bool written by the merge step. A leading
// {"_meta": ...} line is skipped. sample_id defaults to "line-<N>".
//
// Throws SchemaViolation / DuplicateSampleId / IoError.
std::vector<Sample> load_jsonl(const std::filesystem::path& path, Split split);
std::vector<Sample> parse_jsonl(std::istream& in, Split split);

nlohmann::json sample_to_json(const Sample& s);
void write_jsonl(std::ostream& out, std::span<const Sample> samples);

std::vector<Prediction> load_predictions(const std::filesystem::path& path);
std::vector<Prediction> parse_predictions(std::istream& in);

// --- Prompt assembly ---

enum class PromptMode { SingleTurn, MultiTurn };

std::string to_string(PromptMode mode);
PromptMode prompt_mode_from_string(std::string_view name);

// Half-open [begin, end) offsets in Unicode scalar values (not bytes).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct SegmentDecor {
  std::string prefix;
  std::string suffix;
};

// Owns every delimiter around the concatenated segments; the concatenation
// order itself (history turns, final question, documents, answer) is fixed.
struct PromptTemplate {
  std::string id;
  std::string preamble;
  std::string separator;
  SegmentDecor history_question;
  SegmentDecor history_answer;
  SegmentDecor final_question;
  SegmentDecor document;
  SegmentDecor final_answer;

  // Single-space joins, no decorations. Used by all tests.
  static PromptTemplate plain();
  // Minimal chat-style role markers.
  static PromptTemplate chat();
  // Throws ConfigError for unknown ids.
  static PromptTemplate by_id(std::string_view id);
};

// Assembled input plus the loss-mask regions. Spans cover answer content
// only (no delimiters): every history answer plus the final answer in
// MultiTurn mode, the final answer alone in SingleTurn mode. A sample
// without an answer gets an empty terminal span marking the insertion
// point for generation.
struct PromptRecord {
  std::string sample_id;
  std::string assembled;
  std::vector<Span> target_spans;
  PromptMode mode = PromptMode::MultiTurn;
  std::string template_id;
};

PromptRecord assemble_prompt(const Sample& s, PromptMode mode, const PromptTemplate& tpl);

// {"sample_id": str, "text": str, "target_spans": [[int,int]],
//  "mode": "single"|"multi", "template_id": str}
nlohmann::json prompt_record_to_json(const PromptRecord& record);

// --- Hybrid-training merge ---

struct MergeOptions {
  // Merging test-split samples is rejected unless explicitly overridden.
  bool allow_test = false;
};

// Returns train ++ (eval samples relabeled with their predicted answers,
// pseudo = true, split = Train, keywords dropped). Inputs are not mutated;
// train order is preserved as a prefix and gold history answers are
// untouched. Throws TestSplitRejected / MissingPrediction.
std::vector<Sample> merge_pseudo_labels(std::span<const Sample> train,
                                        std::span<const Sample> eval_samples,
                                        std::span<const Prediction> predictions,
                                        const MergeOptions& opts = {});

}  // namespace convqa::corpus

#endif  // CONVQA_CORPUS_HPP_
