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

#include "gradplay/game.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gradplay/errors.h"
#include "gradplay/random.h"
#include "gradplay/tolerances.h"

namespace gradplay {
namespace {

std::string Fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

void CheckDistribution(const Eigen::Ref<const Eigen::VectorXd>& row,
                       const std::string& where) {
  for (int k = 0; k < row.size(); ++k) {
    if (!std::isfinite(row[k])) {
      throw Error(ErrorCode::kDomainError,
                  where + ": non-finite probability at index " +
                      std::to_string(k));
    }
    if (row[k] < 0.0) {
      throw Error(ErrorCode::kNegativeProbability,
                  where + ": entry " + std::to_string(k) + " = " +
                      Fmt(row[k]));
    }
  }
  const double total = row.sum();
  if (std::abs(total - 1.0) > tol::kStochasticRow) {
    throw Error(ErrorCode::kRowNotStochastic,
                where + " sums to " + Fmt(total));
  }
}

Eigen::VectorXd UniformRho(int num_states) {
  return Eigen::VectorXd::Constant(num_states, 1.0 / num_states);
}

}  // namespace

JointActionIndex::JointActionIndex(std::vector<int> num_actions)
    : num_actions_(std::move(num_actions)) {
  const int n = static_cast<int>(num_actions_.size());
  strides_.assign(n, 1);
  num_joint_ = 1;
  for (int i = n - 1; i >= 0; --i) {
    strides_[i] = num_joint_;
    num_joint_ *= num_actions_[i];
  }
}

int JointActionIndex::Encode(std::span<const int> actions) const {
  int joint = 0;
  for (int i = 0; i < num_agents(); ++i) joint += actions[i] * strides_[i];
  return joint;
}

std::vector<int> JointActionIndex::Decode(int joint) const {
  std::vector<int> actions(num_agents());
  for (int i = 0; i < num_agents(); ++i) actions[i] = ActionOf(joint, i);
  return actions;
}

Game::Game(int num_states, std::vector<int> num_actions,
           std::vector<Eigen::MatrixXd> transition,
           std::vector<Eigen::MatrixXd> rewards, double gamma,
           Eigen::VectorXd rho)
    : num_states_(num_states),
      num_actions_(std::move(num_actions)),
      transition_(std::move(transition)),
      rewards_(std::move(rewards)),
      gamma_(gamma),
      rho_(std::move(rho)) {
  if (num_states_ <= 0) {
    throw Error(ErrorCode::kShapeMismatch, "num_states must be positive");
  }
  if (num_actions_.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "num_agents must be positive");
  }
  for (std::size_t i = 0; i < num_actions_.size(); ++i) {
    if (num_actions_[i] <= 0) {
      throw Error(ErrorCode::kShapeMismatch,
                  "agent " + std::to_string(i) + " has no actions");
    }
  }
  joint_ = JointActionIndex(num_actions_);
  const int na = joint_.num_joint();
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) {
    throw Error(ErrorCode::kDomainError,
                "gamma must lie in [0, 1), got " + Fmt(gamma_));
  }
  if (static_cast<int>(transition_.size()) != num_states_) {
    throw Error(ErrorCode::kShapeMismatch,
                "transition has " + std::to_string(transition_.size()) +
                    " state blocks, expected " + std::to_string(num_states_));
  }
  for (int s = 0; s < num_states_; ++s) {
    if (transition_[s].rows() != na || transition_[s].cols() != num_states_) {
      throw Error(ErrorCode::kShapeMismatch,
                  "transition block for state " + std::to_string(s) +
                      " is not |A| x |S|");
    }
    for (int a = 0; a < na; ++a) {
      CheckDistribution(transition_[s].row(a).transpose(),
                        "P(.|s=" + std::to_string(s) +
                            ",a=" + std::to_string(a) + ")");
    }
  }
  if (static_cast<int>(rewards_.size()) != num_agents()) {
    throw Error(ErrorCode::kShapeMismatch,
                "expected one reward table per agent");
  }
  for (int i = 0; i < num_agents(); ++i) {
    if (rewards_[i].rows() != num_states_ || rewards_[i].cols() != na) {
      throw Error(ErrorCode::kShapeMismatch,
                  "reward table of agent " + std::to_string(i) +
                      " is not |S| x |A|");
    }
    if (!rewards_[i].allFinite()) {
      throw Error(ErrorCode::kDomainError,
                  "reward table of agent " + std::to_string(i) +
                      " has non-finite entries");
    }
  }
  if (rho_.size() != num_states_) {
    throw Error(ErrorCode::kShapeMismatch, "rho has wrong length");
  }
  CheckDistribution(rho_, "rho");
}

int Game::total_actions() const {
  int total = 0;
  for (int m : num_actions_) total += m;
  return total;
}

bool Game::HasIdenticalRewards() const {
  for (int i = 1; i < num_agents(); ++i) {
    if (rewards_[i] != rewards_[0]) return false;
  }
  return true;
}

std::pair<double, double> Game::RewardRange() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& r : rewards_) {
    lo = std::min(lo, r.minCoeff());
    hi = std::max(hi, r.maxCoeff());
  }
  return {lo, hi};
}

Game Game::WithRho(Eigen::VectorXd rho) const {
  return Game(num_states_, num_actions_, transition_, rewards_, gamma_,
              std::move(rho));
}

Game Game::WithRewards(std::vector<Eigen::MatrixXd> rewards) const {
  return Game(num_states_, num_actions_, transition_, std::move(rewards),
              gamma_, rho_);
}

void CheckTableShape(const Game& game, const PolicyTable& table) {
  if (static_cast<int>(table.size()) != game.num_agents()) {
    throw Error(ErrorCode::kShapeMismatch,
                "table has " + std::to_string(table.size()) +
                    " agents, game has " +
                    std::to_string(game.num_agents()));
  }
  for (int i = 0; i < game.num_agents(); ++i) {
    if (table[i].rows() != game.num_states() ||
        table[i].cols() != game.num_actions(i)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "table block of agent " + std::to_string(i) +
                      " is not |S| x |A_i|");
    }
  }
}

PolicyTable ZeroTable(const Game& game) {
  PolicyTable table;
  for (int i = 0; i < game.num_agents(); ++i) {
    table.push_back(Eigen::MatrixXd::Zero(game.num_states(),
                                          game.num_actions(i)));
  }
  return table;
}

double SquaredNorm(const PolicyTable& table) {
  double total = 0.0;
  for (const auto& block : table) total += block.squaredNorm();
  return total;
}

PolicyTable Difference(const PolicyTable& a, const PolicyTable& b) {
  PolicyTable out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Policy::Policy(const Game& game, PolicyTable table) : table_(std::move(table)) {
  CheckTableShape(game, table_);
  for (int i = 0; i < num_agents(); ++i) {
    for (int s = 0; s < table_[i].rows(); ++s) {
      const auto row = table_[i].row(s);
      const std::string where =
          "policy row (agent " + std::to_string(i) + ", state " +
          std::to_string(s) + ")";
      for (int a = 0; a < row.size(); ++a) {
        if (!std::isfinite(row[a])) {
          throw Error(ErrorCode::kDomainError, where + " is not finite");
        }
        if (row[a] < 0.0 || row[a] > 1.0) {
          throw Error(ErrorCode::kNegativeProbability,
                      where + " entry " + std::to_string(a) + " = " +
                          Fmt(row[a]));
        }
      }
      if (std::abs(row.sum() - 1.0) > tol::kPolicyRow) {
        throw Error(ErrorCode::kRowNotStochastic,
                    where + " sums to " + Fmt(row.sum()));
      }
    }
  }
}

Policy Policy::Uniform(const Game& game) {
  PolicyTable table;
  for (int i = 0; i < game.num_agents(); ++i) {
    table.push_back(Eigen::MatrixXd::Constant(
        game.num_states(), game.num_actions(i), 1.0 / game.num_actions(i)));
  }
  return Policy(game, std::move(table));
}

Policy Policy::Deterministic(const Game& game,
                             const std::vector<std::vector<int>>& actions) {
  if (static_cast<int>(actions.size()) != game.num_agents()) {
    throw Error(ErrorCode::kShapeMismatch, "one action list per agent");
  }
  PolicyTable table = ZeroTable(game);
  for (int i = 0; i < game.num_agents(); ++i) {
    if (static_cast<int>(actions[i].size()) != game.num_states()) {
      throw Error(ErrorCode::kShapeMismatch, "one action per state");
    }
    for (int s = 0; s < game.num_states(); ++s) {
      const int a = actions[i][s];
      if (a < 0 || a >= game.num_actions(i)) {
        throw Error(ErrorCode::kShapeMismatch,
                    "action out of range for agent " + std::to_string(i));
      }
      table[i](s, a) = 1.0;
    }
  }
  return Policy(game, std::move(table));
}

bool Policy::IsDeterministic() const {
  for (const auto& block : table_) {
    for (int s = 0; s < block.rows(); ++s) {
      if (block.row(s).maxCoeff() < 1.0 - tol::kDeterministic) return false;
    }
  }
  return true;
}

std::vector<std::vector<int>> Policy::DeterministicActions() const {
  if (!IsDeterministic()) {
    throw Error(ErrorCode::kDomainError, "policy is not deterministic");
  }
  std::vector<std::vector<int>> actions(num_agents());
  for (int i = 0; i < num_agents(); ++i) {
    for (int s = 0; s < table_[i].rows(); ++s) {
      Eigen::Index best;
      table_[i].row(s).maxCoeff(&best);
      actions[i].push_back(static_cast<int>(best));
    }
  }
  return actions;
}

bool Policy::IsFullyMixed(double floor) const {
  for (const auto& block : table_) {
    if (block.minCoeff() < floor) return false;
  }
  return true;
}

Policy Policy::WithAgent(const Game& game, int agent,
                         Eigen::MatrixXd rows) const {
  PolicyTable table = table_;
  table.at(agent) = std::move(rows);
  return Policy(game, std::move(table));
}

bool Policy::operator==(const Policy& other) const {
  if (table_.size() != other.table_.size()) return false;
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i].rows() != other.table_[i].rows() ||
        table_[i].cols() != other.table_[i].cols() ||
        table_[i] != other.table_[i]) {
      return false;
    }
  }
  return true;
}

std::uint64_t NumDeterministicPolicies(const Game& game) {
  constexpr std::uint64_t kCap = std::uint64_t{1} << 63;
  std::uint64_t count = 1;
  for (int i = 0; i < game.num_agents(); ++i) {
    for (int s = 0; s < game.num_states(); ++s) {
      const auto m = static_cast<std::uint64_t>(game.num_actions(i));
      if (count > kCap / m) return kCap;
      count *= m;
    }
  }
  return count;
}

Policy DeterministicPolicyAt(const Game& game, std::uint64_t index) {
  std::vector<std::vector<int>> actions(
      game.num_agents(), std::vector<int>(game.num_states()));
  for (int i = game.num_agents() - 1; i >= 0; --i) {
    for (int s = game.num_states() - 1; s >= 0; --s) {
      const auto m = static_cast<std::uint64_t>(game.num_actions(i));
      actions[i][s] = static_cast<int>(index % m);
      index /= m;
    }
  }
  return Policy::Deterministic(game, actions);
}

Game BuildGame(const GameSpec& spec) {
  if (spec.num_agents <= 0 ||
      static_cast<int>(spec.num_actions.size()) != spec.num_agents) {
    throw Error(ErrorCode::kShapeMismatch,
                "num_actions must list one count per agent");
  }
  std::optional<Eigen::VectorXd> rho;
  if (!spec.rho.empty()) {
    rho = Eigen::Map<const Eigen::VectorXd>(
        spec.rho.data(), static_cast<Eigen::Index>(spec.rho.size()));
  }
  if (spec.builder) {
    Game game = [&] {
      if (spec.builder->name == "coordination") {
        return BuildCoordinationGame(spec.builder->epsilon, spec.gamma, rho);
      }
      if (spec.builder->name == "prisoners_dilemma") {
        return BuildPrisonersDilemma(spec.builder->epsilon, spec.gamma, rho);
      }
      throw Error(ErrorCode::kDomainError,
                  "unknown builder '" + spec.builder->name + "'");
    }();
    if (game.num_states() != spec.num_states ||
        game.action_counts() != spec.num_actions) {
      throw Error(ErrorCode::kShapeMismatch,
                  "declared dimensions do not match builder '" +
                      spec.builder->name + "'");
    }
    return game;
  }

  const int ns = spec.num_states;
  const JointActionIndex joint(spec.num_actions);
  const int na = joint.num_joint();
  if (static_cast<int>(spec.transition.size()) != ns) {
    throw Error(ErrorCode::kShapeMismatch, "transition must have |S| blocks");
  }
  std::vector<Eigen::MatrixXd> transition;
  for (int s = 0; s < ns; ++s) {
    if (static_cast<int>(spec.transition[s].size()) != na) {
      throw Error(ErrorCode::kShapeMismatch,
                  "transition[" + std::to_string(s) + "] must have |A| rows");
    }
    Eigen::MatrixXd block(na, ns);
    for (int a = 0; a < na; ++a) {
      const auto& row = spec.transition[s][a];
      if (static_cast<int>(row.size()) != ns) {
        throw Error(ErrorCode::kShapeMismatch,
                    "transition[" + std::to_string(s) + "][" +
                        std::to_string(a) + "] must have |S| entries");
      }
      for (int t = 0; t < ns; ++t) block(a, t) = row[t];
    }
    transition.push_back(std::move(block));
  }
  if (static_cast<int>(spec.rewards.size()) != spec.num_agents) {
    throw Error(ErrorCode::kShapeMismatch, "rewards must have n blocks");
  }
  std::vector<Eigen::MatrixXd> rewards;
  for (int i = 0; i < spec.num_agents; ++i) {
    if (static_cast<int>(spec.rewards[i].size()) != ns) {
      throw Error(ErrorCode::kShapeMismatch,
                  "rewards[" + std::to_string(i) + "] must have |S| rows");
    }
    Eigen::MatrixXd block(ns, na);
    for (int s = 0; s < ns; ++s) {
      if (static_cast<int>(spec.rewards[i][s].size()) != na) {
        throw Error(ErrorCode::kShapeMismatch,
                    "rewards[" + std::to_string(i) + "][" +
                        std::to_string(s) + "] must have |A| entries");
      }
      for (int a = 0; a < na; ++a) block(s, a) = spec.rewards[i][s][a];
    }
    rewards.push_back(std::move(block));
  }
  return Game(ns, spec.num_actions, std::move(transition), std::move(rewards),
              spec.gamma, rho.value_or(UniformRho(ns)));
}

GameSpec SpecFromGame(const Game& game) {
  GameSpec spec;
  spec.num_agents = game.num_agents();
  spec.num_states = game.num_states();
  spec.num_actions = game.action_counts();
  spec.gamma = game.gamma();
  spec.rho.assign(game.rho().data(), game.rho().data() + game.rho().size());
  const int ns = game.num_states();
  const int na = game.num_joint_actions();
  spec.transition.assign(ns, std::vector<std::vector<double>>(
                                 na, std::vector<double>(ns)));
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      for (int t = 0; t < ns; ++t) {
        spec.transition[s][a][t] = game.transition(s, a, t);
      }
    }
  }
  spec.rewards.assign(game.num_agents(), std::vector<std::vector<double>>(
                                             ns, std::vector<double>(na)));
  for (int i = 0; i < game.num_agents(); ++i) {
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) spec.rewards[i][s][a] = game.reward(i, s, a);
    }
  }
  return spec;
}

Game BuildCoordinationGame(double epsilon, double gamma,
                           std::optional<Eigen::VectorXd> rho) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorCode::kDomainError,
                "coordination game needs 0 < epsilon < 1/2, got " +
                    Fmt(epsilon));
  }
  constexpr int kStates = 4;
  const JointActionIndex joint({2, 2});
  // Probability that an agent's next state component is "1" given its action.
  const double to_one[2] = {1.0 - epsilon, epsilon};
  std::vector<Eigen::MatrixXd> transition;
  for (int s = 0; s < kStates; ++s) {
    Eigen::MatrixXd block(joint.num_joint(), kStates);
    for (int a = 0; a < joint.num_joint(); ++a) {
      const double p1 = to_one[joint.ActionOf(a, 0)];
      const double p2 = to_one[joint.ActionOf(a, 1)];
      block(a, 0) = p1 * p2;
      block(a, 1) = p1 * (1.0 - p2);
      block(a, 2) = (1.0 - p1) * p2;
      block(a, 3) = (1.0 - p1) * (1.0 - p2);
    }
    transition.push_back(std::move(block));
  }
  Eigen::MatrixXd reward = Eigen::MatrixXd::Zero(kStates, joint.num_joint());
  reward.row(0).setConstant(2.0);
  reward.row(3).setConstant(1.0);
  return Game(kStates, {2, 2}, std::move(transition), {reward, reward}, gamma,
              rho.value_or(UniformRho(kStates)));
}

Game BuildPrisonersDilemma(double epsilon, double gamma,
                           std::optional<Eigen::VectorXd> rho) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kDomainError,
                "prisoner's dilemma needs 0 < epsilon < 1, got " +
                    Fmt(epsilon));
  }
  constexpr int kStates = 2;
  const JointActionIndex joint({2, 2});
  std::vector<Eigen::MatrixXd> transition;
  for (int s = 0; s < kStates; ++s) {
    Eigen::MatrixXd block(joint.num_joint(), kStates);
    for (int a = 0; a < joint.num_joint(); ++a) {
      const double p = (a == 0) ? 1.0 - epsilon : epsilon;
      block(a, 0) = p;
      block(a, 1) = 1.0 - p;
    }
    transition.push_back(std::move(block));
  }
  // Joint actions (1,1), (1,2), (2,1), (2,2).
  const double r1[4] = {-1.0, -3.0, 0.0, -2.0};
  const double r2[4] = {-1.0, 0.0, -3.0, -2.0};
  Eigen::MatrixXd reward1(kStates, 4), reward2(kStates, 4);
  for (int s = 0; s < kStates; ++s) {
    for (int a = 0; a < 4; ++a) {
      reward1(s, a) = r1[a];
      reward2(s, a) = r2[a];
    }
  }
  return Game(kStates, {2, 2}, std::move(transition), {reward1, reward2},
              gamma, rho.value_or(UniformRho(kStates)));
}

Policy CoordinationMixedNe(const Game& game, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 3.0)) {
    throw Error(ErrorCode::kDomainError,
                "mixed NE formula needs 0 < epsilon < 1/3");
  }
  const double p = (1.0 - 3.0 * epsilon) / (3.0 * (1.0 - 2.0 * epsilon));
  PolicyTable table = ZeroTable(game);
  for (auto& block : table) {
    block.col(0).setConstant(p);
    block.col(1).setConstant(1.0 - p);
  }
  return Policy(game, std::move(table));
}

Policy PrisonersCooperativeNe(const Game& game) {
  return Policy::Deterministic(game, {{0, 1}, {0, 1}});
}

Policy PrisonersAllBetray(const Game& game) {
  return Policy::Deterministic(game, {{1, 1}, {1, 1}});
}

Game RandomGame(const RandomGameOptions& options, std::uint64_t seed) {
  if (options.num_agents <= 0 || options.num_states <= 0 ||
      static_cast<int>(options.num_actions.size()) != options.num_agents) {
    throw Error(ErrorCode::kShapeMismatch, "invalid random game dimensions");
  }
  for (int m : options.num_actions) {
    if (m <= 0) throw Error(ErrorCode::kShapeMismatch, "empty action set");
  }
  if (options.min_rho * options.num_states > 1.0) {
    throw Error(ErrorCode::kDomainError, "min_rho too large for |S|");
  }
  Rng rng(MixSeed(seed));
  const int ns = options.num_states;
  const JointActionIndex joint(options.num_actions);
  const int na = joint.num_joint();

  std::vector<Eigen::MatrixXd> transition;
  for (int s = 0; s < ns; ++s) {
    Eigen::MatrixXd block(na, ns);
    for (int a = 0; a < na; ++a) {
      for (int t = 0; t < ns; ++t) block(a, t) = Uniform01(rng) + 1e-3;
      block.row(a) /= block.row(a).sum();
    }
    transition.push_back(std::move(block));
  }
  std::vector<Eigen::MatrixXd> rewards;
  for (int i = 0; i < options.num_agents; ++i) {
    if (options.identical_rewards && i > 0) {
      rewards.push_back(rewards.front());
      continue;
    }
    Eigen::MatrixXd block(ns, na);
    for (int s = 0; s < ns; ++s) {
      for (int a = 0; a < na; ++a) block(s, a) = Uniform01(rng);
    }
    rewards.push_back(std::move(block));
  }
  Eigen::VectorXd rho =
      Eigen::VectorXd::Constant(ns, options.min_rho) +
      (1.0 - ns * options.min_rho) * SampleSimplex(rng, ns);
  rho /= rho.sum();
  return Game(ns, options.num_actions, std::move(transition),
              std::move(rewards), options.gamma, std::move(rho));
}

}  // namespace gradplay
