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

#ifndef GRADPLAY_EXACT_EVAL_H_
#define GRADPLAY_EXACT_EVAL_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gradplay/game.h"
#include "gradplay/random.h"

namespace gradplay {

// pi(a|s) over joint actions, |S| x |A|.
Eigen::MatrixXd JointPolicyMatrix(const Game& game, const Policy& policy);

// P_pi(s'|s) = sum_a pi(a|s) P(s'|s,a).
Eigen::MatrixXd PolicyTransition(const Game& game, const Policy& policy);

// All closed-form quantities for one (game, policy) pair. The factorization of
// (I - gamma P_pi) is computed once and reused by every solve.
class PolicyEvaluation {
 public:
  PolicyEvaluation(const Game& game, const Policy& policy);

  const Game& game() const { return *game_; }
  const Policy& policy() const { return policy_; }
  const Eigen::MatrixXd& joint_policy() const { return joint_policy_; }
  const Eigen::MatrixXd& policy_transition() const { return p_pi_; }

  const Eigen::VectorXd& values(int agent) const { return values_[agent]; }
  // |S| x |A| joint-action Q.
  const Eigen::MatrixXd& q(int agent) const { return q_[agent]; }
  // |S| x |A_i|, other agents marginalized out.
  const Eigen::MatrixXd& avg_q(int agent) const { return avg_q_[agent]; }
  Eigen::MatrixXd avg_advantage(int agent) const;
  const Eigen::VectorXd& visitation() const { return visitation_; }
  Eigen::VectorXd VisitationFrom(const Eigen::VectorXd& mu) const;
  double total_reward(int agent) const { return total_rewards_[agent]; }
  const std::vector<double>& total_rewards() const { return total_rewards_; }
  // d(s) avg_q(s, a_i) / (1 - gamma).
  Eigen::MatrixXd gradient(int agent) const;
  PolicyTable gradients() const;

  // V for an arbitrary |S| x |A| reward table, reusing the factorization.
  Eigen::VectorXd ValuesFor(const Eigen::MatrixXd& reward) const;
  // Averages an |S| x |A| table over the other agents' policies.
  Eigen::MatrixXd Marginalize(const Eigen::MatrixXd& joint_table,
                              int agent) const;
  // max_i ||(I - gamma P_pi) V_i - rbar_i||_inf
  double BellmanResidual() const;

 private:
  const Game* game_;
  Policy policy_;
  Eigen::MatrixXd joint_policy_;
  Eigen::MatrixXd p_pi_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<Eigen::VectorXd> values_;
  std::vector<Eigen::MatrixXd> q_;
  std::vector<Eigen::MatrixXd> avg_q_;
  Eigen::VectorXd visitation_;
  std::vector<double> total_rewards_;
};

std::vector<Eigen::VectorXd> ValueFunctions(const Game& game,
                                            const Policy& policy);
std::vector<Eigen::MatrixXd> QFunctions(const Game& game, const Policy& policy);
std::vector<Eigen::MatrixXd> AveragedQ(const Game& game, const Policy& policy);
std::vector<Eigen::MatrixXd> AveragedAdvantage(const Game& game,
                                               const Policy& policy);
Eigen::VectorXd Visitation(const Game& game, const Policy& policy,
                           const Eigen::VectorXd& mu);
std::vector<double> TotalReward(const Game& game, const Policy& policy);
PolicyTable PolicyGradient(const Game& game, const Policy& policy);

struct PotentialSpec {
  enum class Provenance { kIdenticalReward, kUserSupplied };

  Eigen::MatrixXd phi;  // |S| x |A|
  Provenance provenance = Provenance::kUserSupplied;

  // phi = r_1. Throws DomainError if rewards are not identical.
  static PotentialSpec FromIdenticalRewards(const Game& game);
};

double TotalPotential(const Game& game, const PotentialSpec& potential,
                      const Policy& policy);
double TotalPotential(const PolicyEvaluation& eval,
                      const PotentialSpec& potential);

struct PotentialReport {
  int trials = 0;
  double max_violation = 0.0;
  bool verified = false;
  std::uint64_t seed = 0;
};

PotentialReport VerifyPotential(const Game& game,
                                const PotentialSpec& potential, int trials,
                                std::uint64_t seed);

// One random row: uniform on the simplex, or a vertex with probability
// vertex_rate.
Eigen::VectorXd SamplePolicyRow(Rng& rng, int m, double vertex_rate);
Policy RandomPolicy(const Game& game, Rng& rng, double vertex_rate = 0.2);

}  // namespace gradplay

#endif  // GRADPLAY_EXACT_EVAL_H_
