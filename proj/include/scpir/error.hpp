// Copyright 2026 The scpir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scpir {

enum class ErrorCode {
  kInvalidParameter,
  kMessageLengthIncompatible,
  kNotDivisible,
  kSubpacketization,
  kPrivacyBreakingQuery,
  kDecodeFailure,
  kBudgetExceeded,
  kInvalidPlacement,
  kInternal,
  kIo,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kMessageLengthIncompatible: return "message-length-incompatible";
    case ErrorCode::kNotDivisible: return "not-divisible";
    case ErrorCode::kSubpacketization: return "subpacketization-error";
    case ErrorCode::kPrivacyBreakingQuery: return "privacy-breaking-query";
    case ErrorCode::kDecodeFailure: return "decode-failure";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kInvalidPlacement: return "invalid-placement";
    case ErrorCode::kInternal: return "internal-error";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

// Library failure tagged with one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace scpir
