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

#include "convqa/corpus.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "convqa/errors.hpp"
#include "convqa/textproc.hpp"

namespace convqa::corpus {

namespace {

using nlohmann::json;

bool is_meta_line(const json& j) { return j.is_object() && j.contains("_meta"); }

json parse_line(std::string_view line, std::size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw SchemaViolation(line_no, "json", "line is not valid JSON");
  }
  if (!j.is_object()) {
    throw SchemaViolation(line_no, "json", "line is not a JSON object");
  }
  return j;
}

std::string require_string(const json& j, const char* field, std::size_t line_no,
                           bool non_empty) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) {
    throw SchemaViolation(line_no, field, "missing required field");
  }
  if (!it->is_string()) {
    throw SchemaViolation(line_no, field, "expected a string");
  }
  std::string value = it->get<std::string>();
  if (non_empty && value.empty()) {
    throw SchemaViolation(line_no, field, "must be non-empty");
  }
  return value;
}

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::Train:
      return "train";
    case Split::Eval:
      return "eval";
    case Split::Test:
      return "test";
  }
  return "train";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "eval") return Split::Eval;
  if (name == "test") return Split::Test;
  throw ConfigError("unknown split \"" + std::string(name) + "\" (expected train|eval|test)");
}

std::vector<Sample> load_jsonl(const std::filesystem::path& path, Split split) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return parse_jsonl(in, split);
}

std::vector<Sample> parse_jsonl(std::istream& in, Split split) {
  std::vector<Sample> samples;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json j = parse_line(line, line_no);
    if (is_meta_line(j)) {
      continue;
    }

    Sample s;
    s.split = split;
    if (auto it = j.find("sample_id"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw SchemaViolation(line_no, "sample_id", "expected a string");
      }
      s.sample_id = it->get<std::string>();
    } else {
      s.sample_id = "line-" + std::to_string(line_no);
    }
    if (!seen_ids.insert(s.sample_id).second) {
      throw DuplicateSampleId(s.sample_id);
    }

    if (auto it = j.find("history"); it != j.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw SchemaViolation(line_no, "history", "expected an array");
      }
      for (std::size_t k = 0; k < it->size(); ++k) {
        const json& turn = (*it)[k];
        const std::string path = "history[" + std::to_string(k) + "]";
        if (!turn.is_object()) {
          throw SchemaViolation(line_no, path, "expected an object");
        }
        Turn t;
        t.question = require_string(turn, "question", line_no, /*non_empty=*/true);
        t.answer = require_string(turn, "answer", line_no, /*non_empty=*/false);
        s.history.push_back(std::move(t));
      }
    }

    if (auto it = j.find("documents"); it != j.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw SchemaViolation(line_no, "documents", "expected an array");
      }
      for (std::size_t k = 0; k < it->size(); ++k) {
        const json& doc = (*it)[k];
        if (!doc.is_string()) {
          throw SchemaViolation(line_no, "documents[" + std::to_string(k) + "]",
                                "expected a string");
        }
        s.documents.push_back(doc.get<std::string>());
      }
    }

    s.question = require_string(j, "question", line_no, /*non_empty=*/true);

    if (auto it = j.find("answer"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw SchemaViolation(line_no, "answer", "expected a string");
      }
      s.answer = it->get<std::string>();
    }
    if (split == Split::Train && !s.answer.has_value()) {
      throw SchemaViolation(line_no, "answer", "train split requires an answer");
    }

    if (auto it = j.find("keywords"); it != j.end() && !it->is_null()) {
      if (split == Split::Train) {
        throw SchemaViolation(line_no, "keywords", "keywords are an eval/test-only field");
      }
      if (!it->is_array()) {
        throw SchemaViolation(line_no, "keywords", "expected an array");
      }
      std::vector<std::string> kws;
      for (std::size_t k = 0; k < it->size(); ++k) {
        const json& kw = (*it)[k];
        if (!kw.is_string()) {
          throw SchemaViolation(line_no, "keywords[" + std::to_string(k) + "]",
                                "expected a string");
        }
        kws.push_back(kw.get<std::string>());
      }
      s.keywords = std::move(kws);
    }

    if (auto it = j.find("pseudo"); it != j.end() && !it->is_null()) {
      if (!it->is_boolean()) {
        throw SchemaViolation(line_no, "pseudo", "expected a boolean");
      }
      s.pseudo = it->get<bool>();
    }

    samples.push_back(std::move(s));
  }
  return samples;
}

nlohmann::json sample_to_json(const Sample& s) {
  json j;
  j["sample_id"] = s.sample_id;
  json history = json::array();
  for (const Turn& t : s.history) {
    history.push_back({{"question", t.question}, {"answer", t.answer}});
  }
  j["history"] = std::move(history);
  j["documents"] = s.documents;
  j["question"] = s.question;
  if (s.answer) {
    j["answer"] = *s.answer;
  }
  if (s.keywords) {
    j["keywords"] = *s.keywords;
  }
  if (s.pseudo) {
    j["pseudo"] = true;
  }
  return j;
}

void write_jsonl(std::ostream& out, std::span<const Sample> samples) {
  for (const Sample& s : samples) {
    out << sample_to_json(s).dump() << '\n';
  }
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return parse_predictions(in);
}

std::vector<Prediction> parse_predictions(std::istream& in) {
  std::vector<Prediction> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json j = parse_line(line, line_no);
    if (is_meta_line(j)) {
      continue;
    }
    Prediction p;
    p.sample_id = require_string(j, "sample_id", line_no, /*non_empty=*/true);
    p.answer = require_string(j, "answer", line_no, /*non_empty=*/false);
    preds.push_back(std::move(p));
  }
  return preds;
}

std::string to_string(PromptMode mode) {
  return mode == PromptMode::SingleTurn ? "single" : "multi";
}

PromptMode prompt_mode_from_string(std::string_view name) {
  if (name == "single") return PromptMode::SingleTurn;
  if (name == "multi") return PromptMode::MultiTurn;
  throw ConfigError("unknown prompt mode \"" + std::string(name) + "\" (expected single|multi)");
}

PromptTemplate PromptTemplate::plain() {
  PromptTemplate tpl;
  tpl.id = "plain";
  tpl.separator = " ";
  return tpl;
}

PromptTemplate PromptTemplate::chat() {
  PromptTemplate tpl;
  tpl.id = "chat";
  tpl.preamble = "<|system|>Answer the question using the documents.<|end|>";
  tpl.separator = "\n";
  tpl.history_question = {"<|user|>", "<|end|>"};
  tpl.history_answer = {"<|assistant|>", "<|end|>"};
  tpl.final_question = {"<|user|>", "<|end|>"};
  tpl.document = {"<|document|>", "<|end|>"};
  tpl.final_answer = {"<|assistant|>", "<|end|>"};
  return tpl;
}

PromptTemplate PromptTemplate::by_id(std::string_view id) {
  if (id == "plain") return plain();
  if (id == "chat") return chat();
  throw ConfigError("unknown template \"" + std::string(id) + "\" (expected plain|chat)");
}

PromptRecord assemble_prompt(const Sample& s, PromptMode mode, const PromptTemplate& tpl) {
  PromptRecord record;
  record.sample_id = s.sample_id;
  record.mode = mode;
  record.template_id = tpl.id;

  std::string& out = record.assembled;
  std::size_t cp = 0;
  bool first = true;

  auto append_raw = [&](std::string_view text) {
    out.append(text);
    cp += textproc::codepoint_count(text);
  };
  // Spans cover `content` exactly, never the decorations around it.
  auto append_segment = [&](const SegmentDecor& decor, std::string_view content,
                            bool span_target) {
    if (!first) {
      append_raw(tpl.separator);
    }
    first = false;
    append_raw(decor.prefix);
    const std::size_t begin = cp;
    append_raw(content);
    if (span_target) {
      record.target_spans.push_back({begin, cp});
    }
    append_raw(decor.suffix);
  };

  if (!tpl.preamble.empty()) {
    append_raw(tpl.preamble);
    first = false;
  }

  const bool mask_history = mode == PromptMode::MultiTurn;
  for (const Turn& turn : s.history) {
    append_segment(tpl.history_question, turn.question, false);
    append_segment(tpl.history_answer, turn.answer, mask_history);
  }
  append_segment(tpl.final_question, s.question, false);
  for (const std::string& doc : s.documents) {
    append_segment(tpl.document, doc, false);
  }
  if (s.answer) {
    append_segment(tpl.final_answer, *s.answer, true);
  } else {
    // Inference record: empty terminal span marks the insertion point.
    append_raw(tpl.final_answer.prefix);
    record.target_spans.push_back({cp, cp});
  }
  return record;
}

nlohmann::json prompt_record_to_json(const PromptRecord& record) {
  json spans = json::array();
  for (const Span& span : record.target_spans) {
    spans.push_back({span.begin, span.end});
  }
  return json{{"sample_id", record.sample_id},
              {"text", record.assembled},
              {"target_spans", std::move(spans)},
              {"mode", to_string(record.mode)},
              {"template_id", record.template_id}};
}

std::vector<Sample> merge_pseudo_labels(std::span<const Sample> train,
                                        std::span<const Sample> eval_samples,
                                        std::span<const Prediction> predictions,
                                        const MergeOptions& opts) {
  if (!opts.allow_test) {
    for (const Sample& s : train) {
      if (s.split == Split::Test) {
        throw TestSplitRejected(s.sample_id);
      }
    }
    for (const Sample& s : eval_samples) {
      if (s.split == Split::Test) {
        throw TestSplitRejected(s.sample_id);
      }
    }
  }

  std::unordered_map<std::string_view, const Prediction*> by_id;
  by_id.reserve(predictions.size());
  for (const Prediction& p : predictions) {
    if (!by_id.emplace(p.sample_id, &p).second) {
      throw DuplicateSampleId(p.sample_id);
    }
  }

  std::vector<Sample> merged;
  merged.reserve(train.size() + eval_samples.size());
  merged.assign(train.begin(), train.end());
  for (const Sample& e : eval_samples) {
    auto it = by_id.find(e.sample_id);
    if (it == by_id.end()) {
      throw MissingPrediction(e.sample_id);
    }
    Sample s = e;
    s.answer = it->second->answer;
    s.pseudo = true;
    s.split = Split::Train;
    s.keywords.reset();
    merged.push_back(std::move(s));
  }
  return merged;
}

}  // namespace convqa::corpus
