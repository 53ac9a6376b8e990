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

#ifndef GRADPLAY_GRADIENT_PLAY_H_
#define GRADPLAY_GRADIENT_PLAY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradplay/exact_eval.h"
#include "gradplay/game.h"
#include "gradplay/ne_analysis.h"

namespace gradplay {

struct RunConfig {
  double eta = 0.1;
  int max_iters = 1000;
  std::optional<double> stop_grad_norm;
  std::optional<double> stop_ne_gap;
  // NE-gap is recorded every ne_gap_stride iterations and at the last one.
  // 0 disables it.
  int ne_gap_stride = 10;
  // Keep every k-th iterate (and the last). 0 keeps only the last.
  int iterate_stride = 0;
  std::optional<Policy> reference;  // for the D-metric column
};

enum class Termination { kGradNorm, kNeGap, kMaxIters };

std::string_view TerminationName(Termination t);

struct TrajectoryRow {
  int iter = 0;
  std::vector<double> total_rewards;
  std::optional<double> phi;
  double grad_map_norm = 0.0;
  std::optional<double> ne_gap;
  std::optional<double> d_metric;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<int> iterate_iters;
  std::vector<Policy> iterates;
  Termination termination = Termination::kMaxIters;

  const Policy& final_policy() const { return iterates.back(); }
};

// One simultaneous projected gradient step.
Policy Step(const Game& game, const Policy& policy, double eta);

Trajectory Run(const Game& game, const Policy& theta0, const RunConfig& config,
               const PotentialSpec* potential = nullptr);

// max_i max_s ||theta_{i,s} - theta'_{i,s}||_1
double DMetric(const PolicyTable& a, const PolicyTable& b);
double DMetric(const Policy& a, const Policy& b);

void WriteTrajectoryCsv(const Trajectory& trajectory, int num_agents,
                        const std::string& path);
std::string TrajectoryCsv(const Trajectory& trajectory, int num_agents);

// 2 sum_i |A_i| / (1 - gamma)^3
double SmoothnessConstant(const Game& game);

struct PotentialRange {
  double min = 0.0;
  double max = 0.0;
  bool exact = false;  // false: +-||phi||_inf / (1 - gamma)
};

PotentialRange PotentialBounds(const Game& game,
                               const PotentialSpec& potential);

struct ProbeTrial {
  double d0 = 0.0;
  int step_bound = 0;
  int steps = -1;  // first t with D = 0, or -1
  double worst_decrement_excess = 0.0;
  bool decrement_ok = false;
  bool step_bound_ok = false;
};

struct ProbeReport {
  double radius = 0.0;
  double theorem_radius = 0.0;
  double eta = 0.0;
  double delta_star = 0.0;
  bool outside_guaranteed_region = false;
  bool rewards_outside_unit = false;
  std::uint64_t seed = 0;
  std::vector<ProbeTrial> trials;
  bool all_pass = false;
};

// Samples starts with D(theta0 || theta*) <= radius and checks the per-step
// decrement and step-count bound. Throws NotStrictNE.
ProbeReport LocalConvergenceProbe(const Game& game, const Policy& strict_ne,
                                  double radius, double eta, int trials,
                                  std::uint64_t seed);

}  // namespace gradplay

#endif  // GRADPLAY_GRADIENT_PLAY_H_
