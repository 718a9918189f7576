// Copyright 2026 The obamet Authors
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

namespace obamet {

enum class ErrorCode {
  kUnknownKeyword,
  kInvalidTaxonomy,
  kInvalidKeyword,
  kSourceUnavailable,
  kPersonaRejected,
  kInsufficientSources,
  kEmptyPool,
  kHarvesterFailure,
  kInvalidConfig,
  kMissingCleanProfile,
  kEmptyTrainingSet,
  kNoImpressions,
  kMissingGroundTruth,
  kDegenerateSeries,
  kKeyMismatch,
  kIncompleteCorpus,
  kCorpusError,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownKeyword: return "UnknownKeyword";
    case ErrorCode::kInvalidTaxonomy: return "InvalidTaxonomy";
    case ErrorCode::kInvalidKeyword: return "InvalidKeyword";
    case ErrorCode::kSourceUnavailable: return "SourceUnavailable";
    case ErrorCode::kPersonaRejected: return "PersonaRejected";
    case ErrorCode::kInsufficientSources: return "InsufficientSources";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kHarvesterFailure: return "HarvesterFailure";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kMissingCleanProfile: return "MissingCleanProfile";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kNoImpressions: return "NoImpressions";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kDegenerateSeries: return "DegenerateSeries";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kIncompleteCorpus: return "IncompleteCorpus";
    case ErrorCode::kCorpusError: return "CorpusError";
  }
  return "Unknown";
}

// All library failures surface as Error; code() tells callers which contract
// was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace obamet
