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

#include "fedgraph/common/error.hpp"

namespace fedgraph {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfRangeNode: return "OutOfRangeNode";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNoEdges: return "NoEdges";
    case ErrorCode::kUnlabeledEndpoint: return "UnlabeledEndpoint";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kTooManyClients: return "TooManyClients";
    case ErrorCode::kUnknownAttribute: return "UnknownAttribute";
    case ErrorCode::kTooFewGroups: return "TooFewGroups";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kMissingProps: return "MissingProps";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kStaleCache: return "StaleCache";
    case ErrorCode::kMissingGrads: return "MissingGrads";
    case ErrorCode::kDuplicateHandler: return "DuplicateHandler";
    case ErrorCode::kUnknownMessageType: return "UnknownMessageType";
    case ErrorCode::kDeadlock: return "Deadlock";
    case ErrorCode::kMalformedFrame: return "MalformedFrame";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kFrameTooLarge: return "FrameTooLarge";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kEmptyUpdateSet: return "EmptyUpdateSet";
    case ErrorCode::kUncoveredName: return "UncoveredName";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kZeroAggregateGradient: return "ZeroAggregateGradient";
    case ErrorCode::kTooFewClients: return "TooFewClients";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigHashMismatch: return "ConfigHashMismatch";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kRunnerFailure: return "RunnerFailure";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kConfigHashMismatch:
    case ErrorCode::kUncoveredName:
    case ErrorCode::kKTooLarge:
    case ErrorCode::kDuplicateHandler:
    case ErrorCode::kInvalidParams:
      return ErrorCategory::kConfig;
    case ErrorCode::kOutOfRangeNode:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kNoEdges:
    case ErrorCode::kUnlabeledEndpoint:
    case ErrorCode::kParseError:
    case ErrorCode::kInvariantViolation:
    case ErrorCode::kTooManyClients:
    case ErrorCode::kUnknownAttribute:
    case ErrorCode::kTooFewGroups:
    case ErrorCode::kEmptyClass:
    case ErrorCode::kMissingProps:
    case ErrorCode::kEmptyMask:
    case ErrorCode::kCorruptCheckpoint:
    case ErrorCode::kIoError:
      return ErrorCategory::kData;
    default:
      return ErrorCategory::kRuntime;
  }
}

}  // namespace fedgraph
