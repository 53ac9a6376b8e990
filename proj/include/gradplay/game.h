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

#ifndef GRADPLAY_GAME_H_
#define GRADPLAY_GAME_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gradplay {

// Joint actions are indexed row-major over (a_1, ..., a_n) with agent 0 the
// slowest-varying coordinate. Every module that touches joint actions goes
// through this class.
class JointActionIndex {
 public:
  JointActionIndex() = default;
  explicit JointActionIndex(std::vector<int> num_actions);

  int num_agents() const { return static_cast<int>(num_actions_.size()); }
  int num_joint() const { return num_joint_; }
  int num_actions(int agent) const { return num_actions_[agent]; }
  int stride(int agent) const { return strides_[agent]; }

  int ActionOf(int joint, int agent) const {
    return (joint / strides_[agent]) % num_actions_[agent];
  }
  int Encode(std::span<const int> actions) const;
  std::vector<int> Decode(int joint) const;

 private:
  std::vector<int> num_actions_;
  std::vector<int> strides_;
  int num_joint_ = 1;
};

// An n-agent tabular stochastic game. Immutable after construction; the
// constructor validates every invariant and throws gradplay::Error.
class Game {
 public:
  // transition[s] is |A| x |S| (row a holds P(.|s,a)).
  // rewards[i] is |S| x |A|.
  Game(int num_states, std::vector<int> num_actions,
       std::vector<Eigen::MatrixXd> transition,
       std::vector<Eigen::MatrixXd> rewards, double gamma,
       Eigen::VectorXd rho);

  int num_agents() const { return joint_.num_agents(); }
  int num_states() const { return num_states_; }
  int num_actions(int agent) const { return joint_.num_actions(agent); }
  const std::vector<int>& action_counts() const { return num_actions_; }
  int num_joint_actions() const { return joint_.num_joint(); }
  int total_actions() const;  // sum_i |A_i|
  const JointActionIndex& joint() const { return joint_; }

  double transition(int s, int a, int next) const {
    return transition_[s](a, next);
  }
  const Eigen::MatrixXd& transition_from(int s) const { return transition_[s]; }
  double reward(int agent, int s, int a) const { return rewards_[agent](s, a); }
  const Eigen::MatrixXd& rewards(int agent) const { return rewards_[agent]; }
  double gamma() const { return gamma_; }
  const Eigen::VectorXd& rho() const { return rho_; }

  bool HasIdenticalRewards() const;
  // (min, max) over all agents' rewards.
  std::pair<double, double> RewardRange() const;

  Game WithRho(Eigen::VectorXd rho) const;
  Game WithRewards(std::vector<Eigen::MatrixXd> rewards) const;

 private:
  int num_states_;
  std::vector<int> num_actions_;
  JointActionIndex joint_;
  std::vector<Eigen::MatrixXd> transition_;
  std::vector<Eigen::MatrixXd> rewards_;
  double gamma_;
  Eigen::VectorXd rho_;
};

// Per-agent |S| x |A_i| tables. Unconstrained: used for raw (pre-projection)
// updates and gradients as well as for policy parameters.
using PolicyTable = std::vector<Eigen::MatrixXd>;

// Direct distributed parameterization: theta_i(s, a_i) = pi_i(a_i | s).
// Every row is validated to be a probability vector.
class Policy {
 public:
  Policy(const Game& game, PolicyTable table);

  static Policy Uniform(const Game& game);
  // actions[i][s] is agent i's action at state s.
  static Policy Deterministic(const Game& game,
                              const std::vector<std::vector<int>>& actions);

  int num_agents() const { return static_cast<int>(table_.size()); }
  const Eigen::MatrixXd& agent(int i) const { return table_[i]; }
  const PolicyTable& table() const { return table_; }
  double prob(int agent, int s, int a) const { return table_[agent](s, a); }

  bool IsDeterministic() const;
  // For a deterministic policy: actions[i][s]. Throws DomainError otherwise.
  std::vector<std::vector<int>> DeterministicActions() const;
  bool IsFullyMixed(double floor) const;

  Policy WithAgent(const Game& game, int agent, Eigen::MatrixXd rows) const;

  bool operator==(const Policy& other) const;

 private:
  PolicyTable table_;
};

// Validates shapes of a table against a game; throws ShapeMismatch.
void CheckTableShape(const Game& game, const PolicyTable& table);
PolicyTable ZeroTable(const Game& game);
double SquaredNorm(const PolicyTable& table);
PolicyTable Difference(const PolicyTable& a, const PolicyTable& b);

// Deterministic policies, enumerated in mixed radix over (agent, state) with
// agent 0 / state 0 slowest.
std::uint64_t NumDeterministicPolicies(const Game& game);  // saturates at 2^63
Policy DeterministicPolicyAt(const Game& game, std::uint64_t index);

// Declarative description of a game: either a named builder or dense arrays.
struct BuilderSpec {
  std::string name;  // "coordination" or "prisoners_dilemma"
  double epsilon = 0.0;
};

struct GameSpec {
  int num_agents = 0;
  int num_states = 0;
  std::vector<int> num_actions;
  double gamma = 0.0;
  std::vector<double> rho;
  std::optional<BuilderSpec> builder;
  std::vector<std::vector<std::vector<double>>> transition;  // [s][a][s']
  std::vector<std::vector<std::vector<double>>> rewards;     // [i][s][a]
};

Game BuildGame(const GameSpec& spec);
// Dense description of an existing game.
GameSpec SpecFromGame(const Game& game);

// Coordination game: two agents, S = {1,2}^2, each agent steers its own
// state component (P(s_i' = 1 | a_i = 1) = 1 - eps,
// P(s_i' = 1 | a_i = 2) = eps), identical state-only reward r(1,1) = 2, r(2,2) = 1, else 0. Requires 0 < eps < 1/2.
// States are (s1, s2) row-major: 0=(1,1), 1=(1,2), 2=(2,1), 3=(2,2).
Game BuildCoordinationGame(double epsilon, double gamma,
                           std::optional<Eigen::VectorXd> rho = std::nullopt);

// Repeated prisoner's dilemma with a noisy "both cooperated" state.
// Action 0 = cooperate, 1 = betray. Requires 0 < eps < 1.
Game BuildPrisonersDilemma(double epsilon, double gamma,
                           std::optional<Eigen::VectorXd> rho = std::nullopt);

// Fully mixed NE of the coordination game: every agent joins network 1 with
// probability (1 - 3 eps) / (3 (1 - 2 eps)) at every state. Requires eps < 1/3.
Policy CoordinationMixedNe(const Game& game, double epsilon);
// Prisoner's dilemma cooperative equilibrium: cooperate at s=1, betray at s=2.
Policy PrisonersCooperativeNe(const Game& game);
Policy PrisonersAllBetray(const Game& game);

struct RandomGameOptions {
  int num_agents = 2;
  int num_states = 2;
  std::vector<int> num_actions{2, 2};
  bool identical_rewards = false;
  double gamma = 0.9;
  // rho = min_rho + (1 - |S| min_rho) * (uniform simplex sample).
  double min_rho = 0.0;
};

// Deterministic in (options, seed). Transition rows are uniform draws
// normalized to one; rewards are uniform in [0, 1].
Game RandomGame(const RandomGameOptions& options, std::uint64_t seed);

}  // namespace gradplay

#endif  // GRADPLAY_GAME_H_
