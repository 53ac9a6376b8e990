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

#ifndef GRADPLAY_PROJECTION_H_
#define GRADPLAY_PROJECTION_H_

#include <Eigen/Dense>

#include "gradplay/exact_eval.h"
#include "gradplay/game.h"

namespace gradplay {

// Euclidean projection onto the probability simplex (sort-based algorithm).
Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& y);

// Row-wise projection of a raw table onto the product of simplices.
Policy ProjectPolicy(const Game& game, const PolicyTable& raw);

struct GradientMappingResult {
  PolicyTable mapping;  // (Proj(theta + eta grad) - theta) / eta
  double norm = 0.0;
  Policy next;          // Proj(theta + eta grad)
};

GradientMappingResult GradientMapping(const Game& game, const Policy& policy,
                                      double eta);
GradientMappingResult GradientMapping(const PolicyEvaluation& eval,
                                      double eta);

}  // namespace gradplay

#endif  // GRADPLAY_PROJECTION_H_
