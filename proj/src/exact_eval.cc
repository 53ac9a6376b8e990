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

#include "gradplay/exact_eval.h"

#include <algorithm>
#include <cmath>

#include "gradplay/errors.h"
#include "gradplay/tolerances.h"

namespace gradplay {

Eigen::MatrixXd JointPolicyMatrix(const Game& game, const Policy& policy) {
  const JointActionIndex& joint = game.joint();
  Eigen::MatrixXd pi(game.num_states(), game.num_joint_actions());
  for (int s = 0; s < game.num_states(); ++s) {
    for (int a = 0; a < joint.num_joint(); ++a) {
      double p = 1.0;
      for (int i = 0; i < game.num_agents(); ++i) {
        p *= policy.prob(i, s, joint.ActionOf(a, i));
      }
      pi(s, a) = p;
    }
  }
  return pi;
}

Eigen::MatrixXd PolicyTransition(const Game& game, const Policy& policy) {
  const Eigen::MatrixXd pi = JointPolicyMatrix(game, policy);
  Eigen::MatrixXd p_pi(game.num_states(), game.num_states());
  for (int s = 0; s < game.num_states(); ++s) {
    p_pi.row(s) = pi.row(s) * game.transition_from(s);
  }
  return p_pi;
}

PolicyEvaluation::PolicyEvaluation(const Game& game, const Policy& policy)
    : game_(&game), policy_(policy) {
  CheckTableShape(game, policy.table());
  const int ns = game.num_states();
  const int n = game.num_agents();
  const double gamma = game.gamma();
  joint_policy_ = JointPolicyMatrix(game, policy);
  p_pi_.resize(ns, ns);
  for (int s = 0; s < ns; ++s) {
    p_pi_.row(s) = joint_policy_.row(s) * game.transition_from(s);
  }
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(ns, ns) - gamma * p_pi_;
  lu_.compute(system);
  const double rcond = lu_.rcond();
  if (!std::isfinite(rcond) || rcond < 1e-14) {
    throw Error(ErrorCode::kSolveFailure,
                "I - gamma P_pi is numerically singular (rcond " +
                    std::to_string(rcond) + ")");
  }

  values_.reserve(n);
  q_.reserve(n);
  avg_q_.reserve(n);
  for (int i = 0; i < n; ++i) {
    values_.push_back(ValuesFor(game.rewards(i)));
    Eigen::MatrixXd q = game.rewards(i);
    for (int s = 0; s < ns; ++s) {
      q.row(s) += gamma * (game.transition_from(s) * values_[i]).transpose();
    }
    avg_q_.push_back(Marginalize(q, i));
    q_.push_back(std::move(q));
  }
  visitation_ = VisitationFrom(game.rho());
  total_rewards_.resize(n);
  for (int i = 0; i < n; ++i) total_rewards_[i] = game.rho().dot(values_[i]);
}

Eigen::VectorXd PolicyEvaluation::ValuesFor(
    const Eigen::MatrixXd& reward) const {
  if (reward.rows() != game_->num_states() ||
      reward.cols() != game_->num_joint_actions()) {
    throw Error(ErrorCode::kShapeMismatch, "reward table is not |S| x |A|");
  }
  const Eigen::VectorXd rbar = (joint_policy_.cwiseProduct(reward)).rowwise().sum();
  Eigen::VectorXd v = lu_.solve(rbar);
  if (!v.allFinite()) {
    throw Error(ErrorCode::kSolveFailure, "value solve produced non-finite");
  }
  return v;
}

Eigen::VectorXd PolicyEvaluation::VisitationFrom(
    const Eigen::VectorXd& mu) const {
  if (mu.size() != game_->num_states()) {
    throw Error(ErrorCode::kShapeMismatch, "mu has wrong length");
  }
  Eigen::VectorXd d = lu_.transpose().solve(mu);
  d *= 1.0 - game_->gamma();
  if (!d.allFinite()) {
    throw Error(ErrorCode::kSolveFailure, "visitation solve produced non-finite");
  }
  // Clip round-off below zero.
  return d.cwiseMax(0.0);
}

Eigen::MatrixXd PolicyEvaluation::Marginalize(
    const Eigen::MatrixXd& joint_table, int agent) const {
  const Game& game = *game_;
  const JointActionIndex& joint = game.joint();
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(game.num_states(), game.num_actions(agent));
  for (int s = 0; s < game.num_states(); ++s) {
    for (int a = 0; a < joint.num_joint(); ++a) {
      double w = 1.0;
      for (int j = 0; j < game.num_agents(); ++j) {
        if (j != agent) w *= policy_.prob(j, s, joint.ActionOf(a, j));
      }
      if (w != 0.0) out(s, joint.ActionOf(a, agent)) += w * joint_table(s, a);
    }
  }
  return out;
}

Eigen::MatrixXd PolicyEvaluation::avg_advantage(int agent) const {
  return avg_q_[agent].colwise() - values_[agent];
}

Eigen::MatrixXd PolicyEvaluation::gradient(int agent) const {
  return (avg_q_[agent].array().colwise() * visitation_.array()).matrix() /
         (1.0 - game_->gamma());
}

PolicyTable PolicyEvaluation::gradients() const {
  PolicyTable out;
  for (int i = 0; i < game_->num_agents(); ++i) out.push_back(gradient(i));
  return out;
}

double PolicyEvaluation::BellmanResidual() const {
  const int ns = game_->num_states();
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(ns, ns) - game_->gamma() * p_pi_;
  double worst = 0.0;
  for (int i = 0; i < game_->num_agents(); ++i) {
    const Eigen::VectorXd rbar =
        (joint_policy_.cwiseProduct(game_->rewards(i))).rowwise().sum();
    worst = std::max(worst,
                     (system * values_[i] - rbar).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

std::vector<Eigen::VectorXd> ValueFunctions(const Game& game,
                                            const Policy& policy) {
  PolicyEvaluation eval(game, policy);
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < game.num_agents(); ++i) out.push_back(eval.values(i));
  return out;
}

std::vector<Eigen::MatrixXd> QFunctions(const Game& game,
                                        const Policy& policy) {
  PolicyEvaluation eval(game, policy);
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < game.num_agents(); ++i) out.push_back(eval.q(i));
  return out;
}

std::vector<Eigen::MatrixXd> AveragedQ(const Game& game,
                                       const Policy& policy) {
  PolicyEvaluation eval(game, policy);
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < game.num_agents(); ++i) out.push_back(eval.avg_q(i));
  return out;
}

std::vector<Eigen::MatrixXd> AveragedAdvantage(const Game& game,
                                               const Policy& policy) {
  PolicyEvaluation eval(game, policy);
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < game.num_agents(); ++i) {
    out.push_back(eval.avg_advantage(i));
  }
  return out;
}

Eigen::VectorXd Visitation(const Game& game, const Policy& policy,
                           const Eigen::VectorXd& mu) {
  return PolicyEvaluation(game, policy).VisitationFrom(mu);
}

std::vector<double> TotalReward(const Game& game, const Policy& policy) {
  return PolicyEvaluation(game, policy).total_rewards();
}

PolicyTable PolicyGradient(const Game& game, const Policy& policy) {
  return PolicyEvaluation(game, policy).gradients();
}

PotentialSpec PotentialSpec::FromIdenticalRewards(const Game& game) {
  if (!game.HasIdenticalRewards()) {
    throw Error(ErrorCode::kDomainError,
                "game does not have identical rewards");
  }
  PotentialSpec spec;
  spec.phi = game.rewards(0);
  spec.provenance = Provenance::kIdenticalReward;
  return spec;
}

double TotalPotential(const PolicyEvaluation& eval,
                      const PotentialSpec& potential) {
  if (potential.phi.rows() != eval.game().num_states() ||
      potential.phi.cols() != eval.game().num_joint_actions()) {
    throw Error(ErrorCode::kShapeMismatch, "phi is not |S| x |A|");
  }
  return eval.game().rho().dot(eval.ValuesFor(potential.phi));
}

double TotalPotential(const Game& game, const PotentialSpec& potential,
                      const Policy& policy) {
  return TotalPotential(PolicyEvaluation(game, policy), potential);
}

Eigen::VectorXd SamplePolicyRow(Rng& rng, int m, double vertex_rate) {
  if (Uniform01(rng) < vertex_rate) return SampleVertex(rng, m);
  return SampleSimplex(rng, m);
}

Policy RandomPolicy(const Game& game, Rng& rng, double vertex_rate) {
  PolicyTable table = ZeroTable(game);
  for (int i = 0; i < game.num_agents(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) {
      table[i].row(s) =
          SamplePolicyRow(rng, game.num_actions(i), vertex_rate).transpose();
    }
  }
  return Policy(game, std::move(table));
}

PotentialReport VerifyPotential(const Game& game,
                                const PotentialSpec& potential, int trials,
                                std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::kDomainError, "trials must be >= 1");
  PotentialReport report;
  report.trials = trials;
  report.seed = seed;
  Rng rng(MixSeed(seed));
  for (int t = 0; t < trials; ++t) {
    const Policy base = RandomPolicy(game, rng);
    const int agent =
        static_cast<int>(rng() % static_cast<std::uint64_t>(game.num_agents()));
    const Policy other = RandomPolicy(game, rng);
    const Policy moved = base.WithAgent(game, agent, other.agent(agent));
    const PolicyEvaluation before(game, base);
    const PolicyEvaluation after(game, moved);
    const double dj = after.total_reward(agent) - before.total_reward(agent);
    const double dphi =
        TotalPotential(after, potential) - TotalPotential(before, potential);
    report.max_violation = std::max(report.max_violation, std::abs(dj - dphi));
  }
  report.verified = report.max_violation <= tol::kPotentialVerified;
  return report;
}

}  // namespace gradplay
