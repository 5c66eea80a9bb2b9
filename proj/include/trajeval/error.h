/* Copyright 2026 The Trajeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TRAJEVAL_ERROR_H_
#define TRAJEVAL_ERROR_H_

#include <stdexcept>
#include <string>

namespace trajeval {

// Error categories raised by the library. Parse and validation errors carry
// a message naming the offending record path (e.g. "tracks[2].states").
enum class ErrorCode {
  kMalformedSyntax,
  kSchemaViolation,
  kInvariantViolation,
  kDegenerateBox,
  kTooFewPoints,
  kEmptyInput,
  kAgentInvalidAtPredictionTime,
  kNoValidGroundTruthSteps,
  kGroundTruthInvalidAtHorizon,
  kTooFewValidSteps,
  kZeroGroundTruth,
  kEmptyEvaluation,
  kMissingPrediction,
  kEmptyMarginalSet,
  kParentTooShort,
  kUnboundNegation,
  kNoLanes,
  kInvalidArgument,
  kIoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trajeval

#endif  // TRAJEVAL_ERROR_H_
