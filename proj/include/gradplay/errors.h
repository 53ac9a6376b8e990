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

#ifndef GRADPLAY_ERRORS_H_
#define GRADPLAY_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gradplay {

enum class ErrorCode {
  kRowNotStochastic,
  kNegativeProbability,
  kShapeMismatch,
  kDomainError,
  kSolveFailure,
  kBudgetExceeded,
  kNotStrictNE,
  kRhoHasZeroMass,
  kNotFullyMixed,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception; the code lets
// callers (and the CLI exit-status mapping) dispatch on the failure kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gradplay

#endif  // GRADPLAY_ERRORS_H_
