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

#ifndef CONVQA_TEXTPROC_HPP_
#define CONVQA_TEXTPROC_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace convqa::textproc {

// Normalization applied before any metric or filter computation:
// NFKC + full case folding (unless disabled), every Unicode whitespace
// run collapsed to a single ASCII space, leading/trailing space stripped.
// The result is a fixpoint: normalizing it again changes nothing.
struct NormalizeOptions {
  // NFKC compatibility normalization plus case folding. Turning this off
  // ("strict mode") leaves codepoints untouched except for whitespace
  // handling.
  bool compatibility_fold = true;
};

struct NormalizedText {
  std::string original;
  std::string normalized;
};

enum class TokenLevel { Word, Char };

// An ordered token list at Word or Char granularity.
//   Word: maximal runs of non-space, non-ideograph codepoints; every CJK
//         ideograph is its own token.
//   Char: one token per non-space Unicode scalar value.
struct TokenSeq {
  std::vector<std::string> tokens;
  TokenLevel level = TokenLevel::Word;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

NormalizedText normalize(std::string_view raw, const NormalizeOptions& opts = {});

TokenSeq tokenize_words(const NormalizedText& t);
TokenSeq tokenize_chars(const NormalizedText& t);

// Convenience: normalize then tokenize at the requested level.
TokenSeq tokenize(std::string_view raw, TokenLevel level, const NormalizeOptions& opts = {});

// --- Codepoint utilities shared across modules ---

// Decodes UTF-8; malformed byte sequences become U+FFFD.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view codepoints);
std::string encode_utf8(char32_t codepoint);

// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t codepoint_count(std::string_view utf8);

// Substring by codepoint offsets [begin, end), mirroring how prompt spans
// are measured.
std::string substr_codepoints(std::string_view utf8, std::size_t begin, std::size_t end);

// Unicode White_Space property.
bool is_unicode_space(char32_t c);

// CJK ideographs (Unicode Ideographic property) tokenize one per character.
bool is_cjk_ideograph(char32_t c);

}  // namespace convqa::textproc

#endif  // CONVQA_TEXTPROC_HPP_
