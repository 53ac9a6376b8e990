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

#ifndef GRADPLAY_NE_ANALYSIS_H_
#define GRADPLAY_NE_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gradplay/exact_eval.h"
#include "gradplay/game.h"

namespace gradplay {

// Single-agent MDP seen by one agent when the others are held fixed.
struct InducedMdp {
  int agent = 0;
  int num_states = 0;
  int num_actions = 0;
  // Row s * num_actions + a holds Pbar(.|s, a).
  Eigen::MatrixXd transition;
  Eigen::MatrixXd reward;  // |S| x |A_i|
  double gamma = 0.0;
  Eigen::VectorXd rho;
};

InducedMdp BuildInducedMdp(const Game& game, const Policy& policy, int agent);

// Exact value of a deterministic policy on an induced MDP.
Eigen::VectorXd EvaluateDeterministic(const InducedMdp& mdp,
                                      const std::vector<int>& actions);

struct BestResponse {
  int agent = 0;
  double value = 0.0;          // max over agent's policies of J_i
  double current_value = 0.0;  // J_i at the given policy
  std::vector<int> actions;    // deterministic maximizer, one per state
  Eigen::VectorXd values;      // optimal V on the induced MDP
  int iterations = 0;
  InducedMdp mdp;
};

BestResponse ComputeBestResponse(const Game& game, const Policy& policy,
                                 int agent);
BestResponse ComputeBestResponse(const PolicyEvaluation& eval, int agent);

struct NeGap {
  std::vector<double> gaps;
  double max_gap = 0.0;
};

NeGap ComputeNeGap(const Game& game, const Policy& policy);
NeGap ComputeNeGap(const PolicyEvaluation& eval);

struct StrictNeCertificate {
  Policy policy;
  std::vector<std::vector<int>> actions;  // [agent][state]
  std::vector<Eigen::MatrixXd> margins;   // averaged advantage, |S| x |A_i|
  std::vector<Eigen::VectorXd> agent_state_delta;  // min off-optimal gap
  Eigen::VectorXd visitation;
  double delta_star = 0.0;
  double radius = 0.0;
  // max |margin| at the optimal actions
  double optimal_margin_error = 0.0;
  // d > 0 everywhere for every one-agent-perturbed policy that was tried
  bool perturbed_visitation_positive = false;
};

enum class MarginVerdict { kStrict, kBorderline, kViolated };

struct MarginCheck {
  MarginVerdict verdict = MarginVerdict::kViolated;
  // Filled for kStrict and kBorderline.
  std::optional<StrictNeCertificate> certificate;
};

// Checks the strict margin conditions at a deterministic policy.
MarginCheck ClassifyMargins(const Game& game, const Policy& policy);

// Throws NotStrictNE if the policy is not a strict NE.
StrictNeCertificate CertifyStrictNe(const Game& game, const Policy& policy);

struct StrictNeEnumeration {
  std::vector<StrictNeCertificate> strict;
  std::vector<Policy> borderline;  // non-strict candidates
  std::uint64_t examined = 0;
};

inline constexpr std::uint64_t kEnumerationBudget = std::uint64_t{1} << 24;

StrictNeEnumeration EnumerateStrictNes(
    const Game& game, std::uint64_t budget = kEnumerationBudget);

// min_i min_s d(s) Delta_i(s) / (1 - gamma), recomputed from the certificate.
double DeltaStar(const Game& game, const StrictNeCertificate& certificate);
// Per agent, per state: d(s) Delta_i(s) / (1 - gamma).
std::vector<Eigen::VectorXd> DeltaComponents(
    const Game& game, const StrictNeCertificate& certificate);
// Delta (1 - gamma)^3 / (8 n |S| sum_i |A_i|)
double AttractionRadius(const Game& game, double delta_star);

// 1 / ((1 - gamma) min_s rho(s)). Throws RhoHasZeroMass.
double MismatchBound(const Game& game);

struct StationarityVerdict {
  // max over feasible theta_i' of (theta_i' - theta_i) . grad_i J_i
  std::vector<double> slack;
  std::vector<bool> agent_stationary;
  bool stationary = false;
};

StationarityVerdict StationarityTest(const Game& game, const Policy& policy,
                                     double tol);
StationarityVerdict StationarityTest(const PolicyEvaluation& eval, double tol);

struct SaddleCertificate {
  bool found = false;
  std::optional<Policy> perturbed;
  double gain = 0.0;  // Phi(perturbed) - Phi(theta*)
  double distance = 0.0;
  int evaluations = 0;
  std::string method;  // "index_set" or "random"
  std::vector<int> index_set;
  int state = -1;
};

SaddleCertificate FindSaddleCertificate(const Game& game,
                                        const PotentialSpec& potential,
                                        const Policy& fully_mixed_ne,
                                        double radius, int search_budget,
                                        std::uint64_t seed);

}  // namespace gradplay

#endif  // GRADPLAY_NE_ANALYSIS_H_
