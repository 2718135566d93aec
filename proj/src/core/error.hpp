/*
 * Copyright 2026 The tkgr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tkgr {

// Stable error taxonomy shared by the C++ core, the C API, and the CLI's
// machine-readable error output. Values are part of the C ABI.
enum class ErrorCode : int {
  kOk = 0,
  kConfig = 1,
  kIo = 2,
  kParse = 3,
  kInvalidArgument = 4,
  kDanglingEndpoint = 5,
  kDuplicateUid = 6,
  kInvariantViolation = 7,
  kUnknownEntity = 8,
  kUnknownTriple = 9,
  kMissingDate = 10,
  kInsufficientHistory = 11,
  kEmptyLabelTable = 12,
  kEmptyRuleBank = 13,
  kEmptyIntersection = 14,
  kInsufficientTickers = 15,
  kZeroVariance = 16,
  kNoTextEvidence = 17,
  kNoMatchedRule = 18,
  kSpecInvalid = 19,
  kInternal = 20,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// ParseError carries the 1-based line number of the offending input line
// (0 when not line-oriented).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kParse,
              line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tkgr
