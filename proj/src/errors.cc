// Copyright 2026 The gradplay Authors
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

#include "gradplay/errors.h"

namespace gradplay {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRowNotStochastic: return "RowNotStochastic";
    case ErrorCode::kNegativeProbability: return "NegativeProbability";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kSolveFailure: return "SolveFailure";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kNotStrictNE: return "NotStrictNE";
    case ErrorCode::kRhoHasZeroMass: return "RhoHasZeroMass";
    case ErrorCode::kNotFullyMixed: return "NotFullyMixed";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace gradplay
