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

#ifndef CONVQA_ERRORS_HPP_
#define CONVQA_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace convqa {

// Root of all toolkit errors. The CLI maps each subclass to a distinct
// exit code; see cli.hpp.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Invalid or inconsistent configuration (bad flag value, unknown template
// or quantizer name, malformed threshold band, missing provider settings).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// A JSONL line failed schema validation. Carries the 1-based line number
// and the offending field.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::size_t line, std::string field, const std::string& detail)
      : Error("line " + std::to_string(line) + ", field \"" + field + "\": " + detail),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class DuplicateSampleId : public Error {
 public:
  explicit DuplicateSampleId(const std::string& id)
      : Error("duplicate sample_id \"" + id + "\""), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// A reference sample has no hypothesis.
class MissingHypothesis : public Error {
 public:
  explicit MissingHypothesis(const std::string& id)
      : Error("no hypothesis for sample_id \"" + id + "\""), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// A hypothesis names a sample_id absent from the references.
class UnknownSampleId : public Error {
 public:
  explicit UnknownSampleId(const std::string& id)
      : Error("unknown sample_id \"" + id + "\""), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class MissingGoldAnswer : public Error {
 public:
  explicit MissingGoldAnswer(const std::string& id)
      : Error("reference sample \"" + id + "\" has no gold answer"), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Keywords Recall is undefined for an empty keyword list; the sample must
// be excluded from KR aggregation rather than scored 0.
class EmptyKeywordList : public Error {
 public:
  EmptyKeywordList() : Error("empty keyword list") {}
};

class MissingPrediction : public Error {
 public:
  explicit MissingPrediction(const std::string& id)
      : Error("no prediction for sample_id \"" + id + "\""), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Test-split samples may not enter hybrid-training merges unless the
// caller sets the explicit override.
class TestSplitRejected : public Error {
 public:
  explicit TestSplitRejected(const std::string& id)
      : Error("sample \"" + id + "\" belongs to the test split; refusing to merge"), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Prediction files passed to the ensemble cover different sample_id sets.
class SampleIdMismatch : public Error {
 public:
  explicit SampleIdMismatch(const std::string& what) : Error(what) {}
};

// Document scorecards do not cover every (sample, document) pair.
class CardMismatch : public Error {
 public:
  explicit CardMismatch(const std::string& what) : Error(what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class EmptyCandidateSet : public Error {
 public:
  EmptyCandidateSet() : Error("candidate set is empty") {}
};

// HTTP embedding request failed after exhausting retries. status == 0
// means the connection itself failed.
class HttpError : public Error {
 public:
  HttpError(int status, int attempts)
      : Error("embedding request failed with status " + std::to_string(status) + " after " +
              std::to_string(attempts) + " attempt(s)"),
        status_(status),
        attempts_(attempts) {}

  int status() const { return status_; }
  int attempts() const { return attempts_; }

 private:
  int status_;
  int attempts_;
};

}  // namespace convqa

#endif  // CONVQA_ERRORS_HPP_
