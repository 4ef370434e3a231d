// Copyright 2026 The Praisetag Authors.
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

#include "praisetag/tokenizer.h"

#include <cstdint>
#include <vector>

namespace praisetag {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t byte_start;
  std::size_t byte_end;
};

// Lenient UTF-8 decoding: a malformed byte becomes U+FFFD spanning one byte.
std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<std::uint8_t>(text[i]);
    std::size_t len = 0;
    char32_t value = 0;
    if (lead < 0x80) {
      len = 1;
      value = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      value = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      value = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      value = lead & 0x07;
    }
    bool valid = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto cont = static_cast<std::uint8_t>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        valid = false;
      } else {
        value = (value << 6) | (cont & 0x3F);
      }
    }
    if (!valid) {
      out.push_back({U'\uFFFD', i, i + 1});
      ++i;
      continue;
    }
    out.push_back({value, i, i + len});
    i += len;
  }
  return out;
}

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 ||
         c == 0xBB || c == 0xBF || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011);
}

}  // namespace

std::size_t char_length(std::string_view text) { return decode(text).size(); }

bool is_punctuation_token(std::string_view text) {
  const auto cps = decode(text);
  if (cps.empty()) return false;
  for (const auto& cp : cps) {
    if (!is_punct(cp.value)) return false;
  }
  return true;
}

TokenSequence tokenize(std::string_view text) {
  const auto cps = decode(text);
  TokenSequence tokens;

  auto emit = [&](std::size_t first, std::size_t last) {
    Token token;
    token.char_start = first;
    token.char_end = last;
    token.byte_start = cps[first].byte_start;
    token.byte_end = cps[last - 1].byte_end;
    token.text = std::string(text.substr(token.byte_start, token.byte_end - token.byte_start));
    tokens.push_back(std::move(token));
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < cps.size() && !is_space(cps[end].value)) ++end;

    std::size_t lo = i;
    std::size_t hi = end;
    while (lo < hi && is_punct(cps[lo].value)) {
      emit(lo, lo + 1);
      ++lo;
    }
    while (hi > lo && is_punct(cps[hi - 1].value)) --hi;
    if (lo < hi) emit(lo, hi);
    for (std::size_t k = hi; k < end && hi > lo; ++k) emit(k, k + 1);

    i = end;
  }
  return tokens;
}

}  // namespace praisetag
