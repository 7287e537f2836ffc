// Copyright 2026 The fedgraph Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedgraph {

// Every failure the library reports carries one of these codes. The CLI maps
// the code's category onto its exit status.
enum class ErrorCode {
  // graph-core
  kOutOfRangeNode,
  kShapeMismatch,
  kNoEdges,
  kUnlabeledEndpoint,
  kParseError,
  kInvariantViolation,
  // datazoo
  kTooManyClients,
  kUnknownAttribute,
  kTooFewGroups,
  kEmptyClass,
  kMissingProps,
  kInvalidParams,
  // nn-engine
  kEmptyMask,
  kStaleCache,
  kMissingGrads,
  // fed-runtime
  kDuplicateHandler,
  kUnknownMessageType,
  kDeadlock,
  kMalformedFrame,
  kVersionMismatch,
  kFrameTooLarge,
  kTransportError,
  // fed-algos
  kEmptyUpdateSet,
  kUncoveredName,
  kKTooLarge,
  // monitor
  kZeroAggregateGradient,
  kTooFewClients,
  kIoError,
  // tuner
  kConfigHashMismatch,
  kCorruptCheckpoint,
  kRunnerFailure,
  // config
  kConfigError,
};

enum class ErrorCategory { kConfig, kData, kRuntime };

std::string_view error_code_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace fedgraph
