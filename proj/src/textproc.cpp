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

#include "convqa/textproc.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utypes.h>

#include <stdexcept>

namespace convqa::textproc {

namespace {

const icu::Normalizer2& nfkc_casefold() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU NFKC_Casefold normalizer unavailable");
  }
  return *n;
}

std::string apply_nfkc_casefold(std::string_view raw) {
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString folded = nfkc_casefold().normalize(input, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU normalization failed");
  }
  std::string out;
  folded.toUTF8String(out);
  return out;
}

// Collapses every White_Space run to one ASCII space and trims the ends.
std::string collapse_whitespace(std::string_view utf8) {
  std::u32string cps = decode_utf8(utf8);
  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  bool emitted = false;
  for (char32_t c : cps) {
    if (is_unicode_space(c)) {
      pending_space = emitted;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out += encode_utf8(c);
    emitted = true;
  }
  return out;
}

}  // namespace

NormalizedText normalize(std::string_view raw, const NormalizeOptions& opts) {
  NormalizedText result;
  result.original.assign(raw);
  std::string stage = opts.compatibility_fold ? apply_nfkc_casefold(raw) : std::string(raw);
  result.normalized = collapse_whitespace(stage);
  return result;
}

TokenSeq tokenize_words(const NormalizedText& t) {
  TokenSeq seq;
  seq.level = TokenLevel::Word;
  std::u32string cps = decode_utf8(t.normalized);
  std::u32string run;
  auto flush = [&] {
    if (!run.empty()) {
      seq.tokens.push_back(encode_utf8(run));
      run.clear();
    }
  };
  for (char32_t c : cps) {
    if (c == U' ') {
      flush();
    } else if (is_cjk_ideograph(c)) {
      flush();
      seq.tokens.push_back(encode_utf8(c));
    } else {
      run.push_back(c);
    }
  }
  flush();
  return seq;
}

TokenSeq tokenize_chars(const NormalizedText& t) {
  TokenSeq seq;
  seq.level = TokenLevel::Char;
  std::u32string cps = decode_utf8(t.normalized);
  seq.tokens.reserve(cps.size());
  for (char32_t c : cps) {
    if (c != U' ') {
      seq.tokens.push_back(encode_utf8(c));
    }
  }
  return seq;
}

TokenSeq tokenize(std::string_view raw, TokenLevel level, const NormalizeOptions& opts) {
  NormalizedText t = normalize(raw, opts);
  return level == TokenLevel::Word ? tokenize_words(t) : tokenize_chars(t);
}

std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  const std::size_t n = utf8.size();
  while (i < n) {
    const unsigned char b0 = static_cast<unsigned char>(utf8[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(0xFFFD);
      break;
    }
    bool valid = true;
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char bk = static_cast<unsigned char>(utf8[i + k]);
      if ((bk & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!valid || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    // Reject overlong encodings.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
  return out;
}

std::string encode_utf8(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t c : codepoints) {
    out += encode_utf8(c);
  }
  return out;
}

std::size_t codepoint_count(std::string_view utf8) {
  std::size_t count = 0;
  for (unsigned char b : utf8) {
    if ((b & 0xC0) != 0x80) {
      ++count;
    }
  }
  return count;
}

std::string substr_codepoints(std::string_view utf8, std::size_t begin, std::size_t end) {
  if (begin >= end) {
    return {};
  }
  std::size_t cp = 0;
  std::size_t byte_begin = utf8.size();
  std::size_t byte_end = utf8.size();
  for (std::size_t i = 0; i < utf8.size(); ++i) {
    if ((static_cast<unsigned char>(utf8[i]) & 0xC0) == 0x80) {
      continue;
    }
    if (cp == begin) {
      byte_begin = i;
    }
    if (cp == end) {
      byte_end = i;
      break;
    }
    ++cp;
  }
  if (byte_begin >= byte_end) {
    return {};
  }
  return std::string(utf8.substr(byte_begin, byte_end - byte_begin));
}

bool is_unicode_space(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

bool is_cjk_ideograph(char32_t c) {
  return u_hasBinaryProperty(static_cast<UChar32>(c), UCHAR_IDEOGRAPHIC) != 0;
}

}  // namespace convqa::textproc
