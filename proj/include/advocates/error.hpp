/*
 * Copyright 2026 The Advocates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
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

namespace advocates {

enum class ErrorKind {
  // debate-core
  EmptyDebate,
  InvalidScore,
  InvalidItem,
  // agents
  MissingSlot,
  UnknownSlot,
  BackendUnreachable,
  BackendHTTPError,
  ScriptExhausted,
  Timeout,
  NoTupleFound,
  OutOfRange,
  InvalidVote,
  SummaryDroppedScores,
  // protocols
  ProtocolFailed,
  InvalidConfig,
  // aggregation / gap-model
  EmptyInput,
  NonpositiveTau,
  InvalidSuccessCount,
  NonpositiveEpsilon,
  InvalidParameter,
  // harness
  FileNotFound,
  MalformedRow,
  InvalidLabel,
  EmptyDataset,
  LengthMismatch,
  DegenerateDifferences,
  TooFewSamples,
  BatchAborted,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyDebate: return "EmptyDebate";
    case ErrorKind::InvalidScore: return "InvalidScore";
    case ErrorKind::InvalidItem: return "InvalidItem";
    case ErrorKind::MissingSlot: return "MissingSlot";
    case ErrorKind::UnknownSlot: return "UnknownSlot";
    case ErrorKind::BackendUnreachable: return "BackendUnreachable";
    case ErrorKind::BackendHTTPError: return "BackendHTTPError";
    case ErrorKind::ScriptExhausted: return "ScriptExhausted";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::NoTupleFound: return "NoTupleFound";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidVote: return "InvalidVote";
    case ErrorKind::SummaryDroppedScores: return "SummaryDroppedScores";
    case ErrorKind::ProtocolFailed: return "ProtocolFailed";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NonpositiveTau: return "NonpositiveTau";
    case ErrorKind::InvalidSuccessCount: return "InvalidSuccessCount";
    case ErrorKind::NonpositiveEpsilon: return "NonpositiveEpsilon";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::InvalidLabel: return "InvalidLabel";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateDifferences: return "DegenerateDifferences";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::BatchAborted: return "BatchAborted";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is the stable, testable part;
/// the message carries context (slot names, line numbers, HTTP status, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace advocates
