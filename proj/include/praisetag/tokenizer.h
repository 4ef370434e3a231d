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

#ifndef PRAISETAG_TOKENIZER_H_
#define PRAISETAG_TOKENIZER_H_

#include <string_view>

#include "praisetag/annotation.h"

namespace praisetag {

// Word-level tokenizer. Splits on whitespace, then peels leading and
// trailing punctuation off each chunk one character per token. Apostrophes
// and hyphens inside a word stay attached ("you're", "well-done").
// Invalid UTF-8 bytes count as one character each.
TokenSequence tokenize(std::string_view text);

// True when every character of `text` is punctuation.
bool is_punctuation_token(std::string_view text);

// Number of Unicode scalar values in `text`.
std::size_t char_length(std::string_view text);

}  // namespace praisetag

#endif  // PRAISETAG_TOKENIZER_H_
