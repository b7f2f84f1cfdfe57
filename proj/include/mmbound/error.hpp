//
// Copyright 2026 The mmbound Authors
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
//

#ifndef MMBOUND_ERROR_HPP_
#define MMBOUND_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmbound {

enum class ErrorCode {
  kNonSymmetric,
  kNonFinite,
  kNotPsd,
  kDimOutOfRange,
  kIndexOutOfRange,
  kDimensionMismatch,
  kEmptyCuboidList,
  kGramOnly,
  kGramOnlyL1,
  kSupportViolation,
  kSubsetTooLarge,
  kFamilyTooLarge,
  kNotVariableAgnostic,
  kNotPowerOfTwo,
  kNotPredicate,
  kTooLarge,
  kInvalidArgument,
  kParse,
};

constexpr std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonSymmetric: return "NonSymmetric";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNotPsd: return "NotPSD";
    case ErrorCode::kDimOutOfRange: return "DimOutOfRange";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyCuboidList: return "EmptyCuboidList";
    case ErrorCode::kGramOnly: return "GramOnly";
    case ErrorCode::kGramOnlyL1: return "GramOnlyL1";
    case ErrorCode::kSupportViolation: return "SupportViolation";
    case ErrorCode::kSubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::kFamilyTooLarge: return "FamilyTooLarge";
    case ErrorCode::kNotVariableAgnostic: return "NotVariableAgnostic";
    case ErrorCode::kNotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorCode::kNotPredicate: return "NotPredicate";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

// Every failure in the library is reported through this exception type. The
// code identifies the condition; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return ErrorName(code_); }

 private:
  ErrorCode code_;
};

namespace internal {

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace internal
}  // namespace mmbound

#endif  // MMBOUND_ERROR_HPP_
