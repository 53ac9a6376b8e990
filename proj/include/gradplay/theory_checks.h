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

#ifndef GRADPLAY_THEORY_CHECKS_H_
#define GRADPLAY_THEORY_CHECKS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradplay/game.h"
#include "gradplay/serialization.h"

namespace gradplay {

struct CheckReport {
  std::string name;
  int trials = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  bool pass = false;
  // Set when a constant is applied outside the regime it was derived for, or
  // when the check could not run to completion.
  std::string caveat;
  Json witness;  // worst instance, replayable with ReplayWitness
};

Json CheckReportToJson(const CheckReport& report);

// Per-instance violations. Positive values mean the inequality or identity
// is off by that much.
double PerformanceDifferenceViolation(const Game& game, const Policy& theta,
                                      const Policy& theta_prime, int agent);
// Returns nullopt when d_theta has a state below the visitation floor.
std::optional<double> GradientDominationViolation(const Game& game,
                                                  const Policy& theta,
                                                  const Eigen::MatrixXd& rows,
                                                  int agent);
double AdvantageZeroMeanViolation(const Game& game, const Policy& theta);
double OccupancyIdentityViolation(const Game& game, const Policy& theta);
// ||g(theta') - g(theta)|| / ||theta' - theta||
double GradientLipschitzRatio(const Game& game, const Policy& theta,
                              const Policy& theta_prime);
// KKT residual of ProjectSimplex(y).
double ProjectionKktViolation(const Eigen::VectorXd& y);
// min{1, theta_k + delta/2} - Proj(theta + g)_k, clipped below at 0.
double AuxiliaryLemmaViolation(const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& g, int k, double delta);

// Random instance family shared by the checks.
struct InstanceOptions {
  int max_agents = 3;
  int max_states = 4;
  int max_actions = 3;
  double max_gamma = 0.95;
  double min_rho = 0.0;
  bool identical_rewards = false;
};
Game SampleCheckGame(Rng& rng, const InstanceOptions& options);

CheckReport CheckPerformanceDifference(int trials, std::uint64_t seed);
CheckReport CheckGradientDomination(int trials, std::uint64_t seed);
CheckReport CheckAdvantageZeroMean(int trials, std::uint64_t seed);
CheckReport CheckOccupancyIdentity(int trials, std::uint64_t seed);
CheckReport CheckSmoothness(int trials, std::uint64_t seed);
// Smoothness on a fixed game; the bound is scaled by max |r| when rewards
// leave [0, 1], and the caveat is set.
CheckReport CheckSmoothnessOn(const Game& game, int trials, std::uint64_t seed);
CheckReport CheckProjectionOptimality(int trials, std::uint64_t seed);
CheckReport CheckAuxiliaryLemma(int trials, std::uint64_t seed);

struct IterationBoundOptions {
  int games = 10;
  int num_states = 2;
  std::vector<int> num_actions{2, 2};
  double gamma = 0.5;
  double epsilon = 0.05;
  double min_rho = 0.05;
  std::int64_t iteration_cap = 10'000'000;
};

struct IterationBoundTrial {
  double bound_t = 0.0;       // guaranteed iteration count
  std::int64_t hit_iter = -1;  // first t >= 1 with NE-gap <= epsilon
  double min_gap = 0.0;
  bool budget_exceeded = false;
};

CheckReport CheckIterationBound(
    const IterationBoundOptions& options, std::uint64_t seed,
    std::vector<IterationBoundTrial>* trials = nullptr);

// Recomputes the violation stored in a witness.
double ReplayWitness(const Json& witness);

std::vector<CheckReport> RunAllChecks(int trials, std::uint64_t seed);

}  // namespace gradplay

#endif  // GRADPLAY_THEORY_CHECKS_H_
