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

#ifndef PRAISETAG_ERROR_H_
#define PRAISETAG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace praisetag {

enum class ErrorCode {
  kInvalidArgument,
  kLengthMismatch,
  kIllFormedTags,
  kOverlappingSpans,
  kOutOfRange,
  kParse,
  kInvariantViolation,
  kEmptyInput,
  kMissingConfidence,
  kTemplateMissing,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Data and contract errors raised by the library. Adapter failures use
// AdapterError (adapter.h) so callers can tell them apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace praisetag

#endif  // PRAISETAG_ERROR_H_
