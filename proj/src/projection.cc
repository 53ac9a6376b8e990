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

#include "gradplay/projection.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gradplay/errors.h"

namespace gradplay {

Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& y) {
  const int m = static_cast<int>(y.size());
  if (m < 1) throw Error(ErrorCode::kShapeMismatch, "empty vector");
  if (!y.allFinite()) {
    throw Error(ErrorCode::kDomainError, "cannot project non-finite vector");
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return y[a] > y[b]; });

  double prefix = 0.0;
  double rho_prefix = 0.0;
  int rho = 0;
  for (int j = 1; j <= m; ++j) {
    const double u = y[order[j - 1]];
    prefix += u;
    if (u + (1.0 - prefix) / j > 0.0) {
      rho = j;
      rho_prefix = prefix;
    }
  }
  const double lambda = (1.0 - rho_prefix) / rho;
  return (y.array() + lambda).cwiseMax(0.0).cwiseMin(1.0).matrix();
}

Policy ProjectPolicy(const Game& game, const PolicyTable& raw) {
  CheckTableShape(game, raw);
  PolicyTable table = raw;
  for (auto& block : table) {
    for (int s = 0; s < block.rows(); ++s) {
      block.row(s) = ProjectSimplex(block.row(s).transpose()).transpose();
    }
  }
  return Policy(game, std::move(table));
}

GradientMappingResult GradientMapping(const PolicyEvaluation& eval,
                                      double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::kDomainError, "eta must be positive");
  }
  const Game& game = eval.game();
  const PolicyTable& theta = eval.policy().table();
  PolicyTable raw = theta;
  for (int i = 0; i < game.num_agents(); ++i) raw[i] += eta * eval.gradient(i);
  Policy next = ProjectPolicy(game, raw);
  PolicyTable mapping = Difference(next.table(), theta);
  for (auto& block : mapping) block /= eta;
  const double norm = std::sqrt(SquaredNorm(mapping));
  return {std::move(mapping), norm, std::move(next)};
}

GradientMappingResult GradientMapping(const Game& game, const Policy& policy,
                                      double eta) {
  return GradientMapping(PolicyEvaluation(game, policy), eta);
}

}  // namespace gradplay
