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

#include <gtest/gtest.h>

#include <cmath>

#include "gradplay/errors.h"
#include "gradplay/exact_eval.h"
#include "gradplay/random.h"
#include "oracles.h"

namespace gradplay {
namespace {

Game SmallRandomGame(std::uint64_t seed, int agents = 2, double gamma = 0.8) {
  RandomGameOptions options;
  options.num_agents = agents;
  options.num_states = 3;
  options.num_actions.assign(agents, 2);
  if (agents > 1) options.num_actions[1] = 3;
  options.gamma = gamma;
  return RandomGame(options, seed);
}

TEST(PolicyTransitionTest, DeterministicSelectsRows) {
  const Game game = SmallRandomGame(1);
  const Policy p = Policy::Deterministic(game, {{1, 0, 1}, {2, 0, 1}});
  const Eigen::MatrixXd pp = PolicyTransition(game, p);
  EXPECT_EQ(pp.row(0), game.transition_from(0).row(1 * 3 + 2));
  EXPECT_EQ(pp.row(2), game.transition_from(2).row(1 * 3 + 1));
}

TEST(PolicyTransitionTest, UniformPrisonersDilemma) {
  const double eps = 0.1;
  const Game game = BuildPrisonersDilemma(eps, 0.95);
  const Eigen::MatrixXd pp = PolicyTransition(game, Policy::Uniform(game));
  const double to_first = 0.25 * (1 - eps) + 0.75 * eps;
  EXPECT_NEAR(pp(0, 0), to_first, 1e-15);
  EXPECT_NEAR(pp(1, 1), 1 - to_first, 1e-15);
}

TEST(PolicyTransitionTest, RowsStochastic) {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const Game game = SmallRandomGame(k);
    const Eigen::MatrixXd pp = PolicyTransition(game, RandomPolicy(game, rng));
    for (int s = 0; s < pp.rows(); ++s) EXPECT_NEAR(pp.row(s).sum(), 1.0, 1e-12);
  }
}

TEST(ValueFunctionsTest, GammaZeroIsExpectedReward) {
  const Game game = SmallRandomGame(3, 2, 0.0);
  Rng rng(1);
  const Policy p = RandomPolicy(game, rng);
  const auto v = ValueFunctions(game, p);
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd r = oracle::ExpectedReward(game, p, game.rewards(i));
    EXPECT_LT((v[i] - r).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ValueFunctionsTest, CoordinationMixedNeClosedForm) {
  const double eps = 0.1, gamma = 0.95;
  const Game game = BuildCoordinationGame(eps, gamma);
  const PolicyEvaluation eval(game, CoordinationMixedNe(game, eps));
  const double tail = 2 * gamma / (3 * (1 - gamma));
  const double r[4] = {2, 0, 0, 1};
  for (int s = 0; s < 4; ++s) {
    EXPECT_NEAR(eval.values(0)[s], r[s] + tail, 1e-8);
  }
  EXPECT_NEAR(eval.values(0)[0], 14.0 + 2.0 / 3.0, 1e-8);
}

TEST(ValueFunctionsTest, MatchesPowerSeries) {
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const Game game = SmallRandomGame(100 + k, 2, 0.9);
    const Policy p = RandomPolicy(game, rng);
    const PolicyEvaluation eval(game, p);
    EXPECT_LE(eval.BellmanResidual(), 1e-9);
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd series =
          oracle::SeriesValues(game, p, game.rewards(i));
      EXPECT_LT((eval.values(i) - series).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_GE(eval.values(i).minCoeff(), 0.0);
      EXPECT_LE(eval.values(i).maxCoeff(), 1.0 / (1 - game.gamma()) + 1e-9);
    }
  }
}

TEST(QFunctionsTest, ValueIsPolicyAverageOfQ) {
  Rng rng(12);
  for (int k = 0; k < 20; ++k) {
    const Game game = SmallRandomGame(200 + k);
    const Policy p = RandomPolicy(game, rng);
    const PolicyEvaluation eval(game, p);
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd avg =
          eval.joint_policy().cwiseProduct(eval.q(i)).rowwise().sum();
      EXPECT_LT((avg - eval.values(i)).cwiseAbs().maxCoeff(), 1e-8);
      const Eigen::MatrixXd adv = eval.avg_advantage(i);
      EXPECT_LT((adv - (eval.avg_q(i).colwise() - eval.values(i)))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-15);
    }
  }
}

TEST(AveragedQTest, SingleAgentEqualsQ) {
  const Game game = SmallRandomGame(4, 1);
  Rng rng(2);
  const PolicyEvaluation eval(game, RandomPolicy(game, rng));
  EXPECT_LT((eval.avg_q(0) - eval.q(0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AveragedQTest, MatchesBruteForce) {
  Rng rng(13);
  for (int k = 0; k < 30; ++k) {
    const Game game = SmallRandomGame(300 + k);
    const Policy p = RandomPolicy(game, rng);
    const auto avg = AveragedQ(game, p);
    for (int i = 0; i < 2; ++i) {
      EXPECT_LT((avg[i] - oracle::BruteAvgQ(game, p, i)).cwiseAbs().maxCoeff(),
                1e-8);
    }
  }
}

TEST(AveragedQTest, CoordinationMixedNeIsIndifferent) {
  const double eps = 0.1;
  const Game game = BuildCoordinationGame(eps, 0.95);
  const PolicyEvaluation eval(game, CoordinationMixedNe(game, eps));
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(eval.avg_advantage(i).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(VisitationTest, GammaZeroAndSingleState) {
  const Game game = SmallRandomGame(5, 2, 0.0);
  Rng rng(3);
  const Policy p = RandomPolicy(game, rng);
  Eigen::VectorXd mu(3);
  mu << 0.2, 0.3, 0.5;
  EXPECT_LT((Visitation(game, p, mu) - mu).cwiseAbs().maxCoeff(), 1e-15);

  RandomGameOptions options;
  options.num_states = 1;
  const Game one = RandomGame(options, 9);
  EXPECT_NEAR(Visitation(one, Policy::Uniform(one), one.rho())[0], 1.0, 1e-15);
}

TEST(VisitationTest, MatchesPowerSeries) {
  Rng rng(14);
  for (int k = 0; k < 50; ++k) {
    const Game game = SmallRandomGame(400 + k, 2, 0.9);
    const Policy p = RandomPolicy(game, rng);
    const Eigen::VectorXd mu = SampleSimplex(rng, 3);
    const Eigen::VectorXd d = Visitation(game, p, mu);
    EXPECT_NEAR(d.sum(), 1.0, 1e-9);
    EXPECT_GE(d.minCoeff(), 0.0);
    EXPECT_LT((d - oracle::SeriesVisitation(game, p, mu)).cwiseAbs().maxCoeff(),
              1e-8);
  }
}

TEST(TotalRewardTest, PointMassAndIdenticalRewards) {
  RandomGameOptions options;
  options.num_states = 3;
  options.identical_rewards = true;
  Game game = RandomGame(options, 21);
  Rng rng(4);
  const Policy p = RandomPolicy(game, rng);
  const auto j = TotalReward(game, p);
  EXPECT_EQ(j[0], j[1]);
  Eigen::VectorXd point = Eigen::VectorXd::Zero(3);
  point[1] = 1.0;
  const Game pointed = game.WithRho(point);
  EXPECT_NEAR(TotalReward(pointed, p)[0], ValueFunctions(pointed, p)[0][1],
              1e-15);
}

TEST(TotalRewardTest, OccupancyIdentity) {
  Rng rng(15);
  for (int k = 0; k < 30; ++k) {
    const Game game = SmallRandomGame(500 + k);
    const Policy p = RandomPolicy(game, rng);
    const PolicyEvaluation eval(game, p);
    const Eigen::VectorXd d = oracle::SeriesVisitation(game, p, game.rho());
    for (int i = 0; i < 2; ++i) {
      double occ = 0.0;
      for (int s = 0; s < 3; ++s) {
        for (int a = 0; a < game.num_joint_actions(); ++a) {
          occ += d[s] * oracle::JointProb(game, p, s, a) * game.reward(i, s, a);
        }
      }
      EXPECT_NEAR(eval.total_reward(i), occ / (1 - game.gamma()), 1e-8);
    }
  }
}

TEST(PolicyGradientTest, GammaZeroStaticGame) {
  const Game game = SmallRandomGame(6, 2, 0.0);
  Rng rng(5);
  const Policy p = RandomPolicy(game, rng);
  const PolicyTable g = PolicyGradient(game, p);
  for (int s = 0; s < 3; ++s) {
    for (int a1 = 0; a1 < 2; ++a1) {
      double expect = 0.0;
      for (int a2 = 0; a2 < 3; ++a2) {
        expect += p.prob(1, s, a2) * game.reward(0, s, a1 * 3 + a2);
      }
      EXPECT_NEAR(g[0](s, a1), game.rho()[s] * expect, 1e-15);
    }
  }
}

TEST(PolicyGradientTest, MatchesFiniteDifferences) {
  Rng rng(16);
  int checked = 0;
  for (int k = 0; k < 100; ++k) {
    const Game game = SmallRandomGame(600 + k, 2, 0.7);
    // Interior policy so the +-h perturbations stay feasible.
    PolicyTable table = ZeroTable(game);
    for (int i = 0; i < 2; ++i) {
      for (int s = 0; s < 3; ++s) {
        table[i].row(s) =
            (0.9 * SampleSimplex(rng, game.num_actions(i)).array() +
             0.1 / game.num_actions(i)).matrix().transpose();
      }
    }
    const Policy p(game, table);
    const PolicyTable g = PolicyGradient(game, p);
    const int i = k % 2;
    const int s = static_cast<int>(rng() % 3);
    const int m = game.num_actions(i);
    const int a = static_cast<int>(rng() % m);
    const int b = (a + 1) % m;
    const double fd = oracle::DirectionalFd(game, p, i, s, a, b, 1e-6);
    const double exact = g[i](s, a) - g[i](s, b);
    EXPECT_LE(std::abs(fd - exact), 1e-4 * std::max(1.0, std::abs(exact)))
        << "instance " << k;
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(PolicyGradientTest, CoordinationMixedNeRowsAreFlat) {
  const double eps = 0.1;
  const Game game = BuildCoordinationGame(eps, 0.95);
  const PolicyTable g = PolicyGradient(game, CoordinationMixedNe(game, eps));
  for (int i = 0; i < 2; ++i) {
    for (int s = 0; s < 4; ++s) EXPECT_NEAR(g[i](s, 0), g[i](s, 1), 1e-8);
  }
}

TEST(TotalPotentialTest, IdenticalRewardsAndZero) {
  const double eps = 0.1, gamma = 0.95;
  const Game game = BuildCoordinationGame(eps, gamma);
  const PotentialSpec phi = PotentialSpec::FromIdenticalRewards(game);
  const Policy mixed = CoordinationMixedNe(game, eps);
  EXPECT_NEAR(TotalPotential(game, phi, mixed), TotalReward(game, mixed)[0],
              1e-12);
  EXPECT_NEAR(TotalPotential(game, phi, mixed),
              0.75 + 2 * gamma / (3 * (1 - gamma)), 1e-8);
  PotentialSpec zero;
  zero.phi = Eigen::MatrixXd::Zero(4, 4);
  EXPECT_EQ(TotalPotential(game, zero, mixed), 0.0);
  PotentialSpec wrong;
  wrong.phi = Eigen::MatrixXd::Zero(4, 3);
  EXPECT_THROW(TotalPotential(game, wrong, mixed), Error);
  EXPECT_THROW(PotentialSpec::FromIdenticalRewards(BuildPrisonersDilemma(0.1, 0.9)),
               Error);
}

TEST(VerifyPotentialTest, Outcomes) {
  const Game coord = BuildCoordinationGame(0.1, 0.95);
  const PotentialReport ok =
      VerifyPotential(coord, PotentialSpec::FromIdenticalRewards(coord), 50, 1);
  EXPECT_TRUE(ok.verified);
  EXPECT_LE(ok.max_violation, 1e-9);

  const Game pd = BuildPrisonersDilemma(0.1, 0.95);
  PotentialSpec r1;
  r1.phi = pd.rewards(0);
  EXPECT_FALSE(VerifyPotential(pd, r1, 50, 2).verified);

  const Game flat = pd.WithRewards({Eigen::MatrixXd::Zero(2, 4),
                                    Eigen::MatrixXd::Zero(2, 4)});
  PotentialSpec zero;
  zero.phi = Eigen::MatrixXd::Zero(2, 4);
  EXPECT_TRUE(VerifyPotential(flat, zero, 20, 3).verified);
}

}  // namespace
}  // namespace gradplay
