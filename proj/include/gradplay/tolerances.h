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

#ifndef GRADPLAY_TOLERANCES_H_
#define GRADPLAY_TOLERANCES_H_

// Numerical thresholds shared across the library. Identity and inequality
// checks sit well above the linear-solve residuals so they do not flake.
namespace gradplay::tol {

// Game validation.
inline constexpr double kStochasticRow = 1e-12;

// Policy rows and determinism.
inline constexpr double kPolicyRow = 1e-9;
inline constexpr double kDeterministic = 1e-9;

// Exact evaluation.
inline constexpr double kBellmanResidual = 1e-9;
inline constexpr double kVisitationSum = 1e-9;
inline constexpr double kVisitationFloor = 1e-12;

// Property checks.
inline constexpr double kIdentity = 1e-7;
inline constexpr double kDomination = 1e-7;
inline constexpr double kSmoothnessSlack = 1e-6;
inline constexpr double kPotentialVerified = 1e-7;

// Equilibrium analysis.
inline constexpr double kStrictMargin = 1e-10;
inline constexpr double kMarginZero = 1e-9;
inline constexpr double kBestResponseTie = 1e-12;
inline constexpr double kSaddleGain = 1e-10;
inline constexpr double kFullyMixedFloor = 1e-6;

// Experiments: D-metric threshold for "converged to this NE".
inline constexpr double kConvergedD = 1e-3;

}  // namespace gradplay::tol

#endif  // GRADPLAY_TOLERANCES_H_
