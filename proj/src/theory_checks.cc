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

#include "gradplay/theory_checks.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "gradplay/errors.h"
#include "gradplay/exact_eval.h"
#include "gradplay/gradient_play.h"
#include "gradplay/ne_analysis.h"
#include "gradplay/projection.h"
#include "gradplay/random.h"
#include "gradplay/tolerances.h"

namespace gradplay {
namespace {

constexpr double kLemmaSlack = 1e-12;

int UniformInt(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

Json InstanceWitness(const std::string& check, const Game& game,
                     const Policy& theta, const Policy* theta_prime,
                     int agent) {
  Json w;
  w["check"] = check;
  w["game"] = GameSpecToJson(SpecFromGame(game));
  w["theta"] = PolicyToJson(theta);
  if (theta_prime != nullptr) w["theta_prime"] = PolicyToJson(*theta_prime);
  w["agent"] = agent;
  return w;
}

// Tracks the worst instance of a check.
class Tracker {
 public:
  Tracker(std::string name, int trials, double tolerance, std::uint64_t seed) {
    report_.name = std::move(name);
    report_.trials = trials;
    report_.tolerance = tolerance;
    report_.seed = seed;
    report_.max_violation = 0.0;
  }

  void Observe(double violation, const std::function<Json()>& witness) {
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    if (report_.witness.is_null() || violation > report_.max_violation) {
      report_.max_violation = std::max(report_.max_violation, violation);
      report_.witness = witness();
    }
  }

  CheckReport& report() { return report_; }

  CheckReport Finish() {
    report_.pass = report_.max_violation <= report_.tolerance;
    return report_;
  }

 private:
  CheckReport report_;
};

Eigen::VectorXd FlattenGradients(const PolicyEvaluation& eval) {
  std::vector<double> flat;
  for (const auto& g : eval.gradients()) {
    for (int s = 0; s < g.rows(); ++s) {
      for (int a = 0; a < g.cols(); ++a) flat.push_back(g(s, a));
    }
  }
  return Eigen::Map<Eigen::VectorXd>(flat.data(),
                                     static_cast<Eigen::Index>(flat.size()));
}

Policy Mix(const Game& game, const Policy& a, const Policy& b, double t) {
  PolicyTable table = a.table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    table[i] = (1.0 - t) * a.agent(static_cast<int>(i)) +
               t * b.agent(static_cast<int>(i));
  }
  return Policy(game, std::move(table));
}

}  // namespace

Json CheckReportToJson(const CheckReport& report) {
  Json j;
  j["name"] = report.name;
  j["trials"] = report.trials;
  j["max_violation"] = report.max_violation;
  j["tolerance"] = report.tolerance;
  j["seed"] = report.seed;
  j["pass"] = report.pass;
  if (!report.caveat.empty()) j["caveat"] = report.caveat;
  j["witness"] = report.witness;
  return j;
}

double PerformanceDifferenceViolation(const Game& game, const Policy& theta,
                                      const Policy& theta_prime, int agent) {
  const PolicyEvaluation base(game, theta);
  const PolicyEvaluation moved(game, theta_prime);
  const double lhs = moved.total_reward(agent) - base.total_reward(agent);
  // Joint advantage of theta, averaged under theta' occupancy.
  const Eigen::MatrixXd adv =
      base.q(agent).colwise() - base.values(agent);
  double rhs = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    rhs += moved.visitation()[s] * moved.joint_policy().row(s).dot(adv.row(s));
  }
  rhs /= 1.0 - game.gamma();
  return std::abs(lhs - rhs);
}

std::optional<double> GradientDominationViolation(const Game& game,
                                                  const Policy& theta,
                                                  const Eigen::MatrixXd& rows,
                                                  int agent) {
  const PolicyEvaluation base(game, theta);
  if (base.visitation().minCoeff() < tol::kVisitationFloor) return std::nullopt;
  const Policy moved_policy = theta.WithAgent(game, agent, rows);
  const PolicyEvaluation moved(game, moved_policy);
  const double lhs = moved.total_reward(agent) - base.total_reward(agent);
  const double ratio =
      moved.visitation().cwiseQuotient(base.visitation()).maxCoeff();
  const Eigen::MatrixXd g = base.gradient(agent);
  double best = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    best += g.row(s).maxCoeff() - theta.agent(agent).row(s).dot(g.row(s));
  }
  return lhs - ratio * best;
}

double AdvantageZeroMeanViolation(const Game& game, const Policy& theta) {
  const PolicyEvaluation eval(game, theta);
  double worst = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    const Eigen::MatrixXd adv = eval.avg_advantage(i);
    for (int s = 0; s < game.num_states(); ++s) {
      worst = std::max(worst, std::abs(theta.agent(i).row(s).dot(adv.row(s))));
    }
  }
  return worst;
}

double OccupancyIdentityViolation(const Game& game, const Policy& theta) {
  const PolicyEvaluation eval(game, theta);
  double worst = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    double occupancy = 0.0;
    for (int s = 0; s < game.num_states(); ++s) {
      occupancy += eval.visitation()[s] *
                   eval.joint_policy().row(s).dot(game.rewards(i).row(s));
    }
    occupancy /= 1.0 - game.gamma();
    worst = std::max(worst, std::abs(occupancy - eval.total_reward(i)));
  }
  return worst;
}

double GradientLipschitzRatio(const Game& game, const Policy& theta,
                              const Policy& theta_prime) {
  const double dist = std::sqrt(
      SquaredNorm(Difference(theta_prime.table(), theta.table())));
  if (dist == 0.0) return 0.0;
  const Eigen::VectorXd g0 = FlattenGradients(PolicyEvaluation(game, theta));
  const Eigen::VectorXd g1 =
      FlattenGradients(PolicyEvaluation(game, theta_prime));
  return (g1 - g0).norm() / dist;
}

double ProjectionKktViolation(const Eigen::VectorXd& y) {
  const Eigen::VectorXd x = ProjectSimplex(y);
  double violation = std::abs(x.sum() - 1.0);
  violation = std::max(violation, std::max(0.0, -x.minCoeff()));
  double tau = 0.0;
  int support = 0;
  for (int k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0) {
      tau += y[k] - x[k];
      ++support;
    }
  }
  tau /= std::max(support, 1);
  for (int k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0) {
      violation = std::max(violation, std::abs(y[k] - x[k] - tau));
    } else {
      violation = std::max(violation, y[k] - tau);
    }
  }
  return violation;
}

double AuxiliaryLemmaViolation(const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& g, int k, double delta) {
  const Eigen::VectorXd next = ProjectSimplex(theta + g);
  return std::max(0.0, std::min(1.0, theta[k] + delta / 2.0) - next[k]);
}

Game SampleCheckGame(Rng& rng, const InstanceOptions& options) {
  RandomGameOptions game_options;
  game_options.num_agents = UniformInt(rng, 1, options.max_agents);
  game_options.num_states = UniformInt(rng, 1, options.max_states);
  game_options.num_actions.clear();
  for (int i = 0; i < game_options.num_agents; ++i) {
    game_options.num_actions.push_back(UniformInt(rng, 1, options.max_actions));
  }
  game_options.identical_rewards = options.identical_rewards;
  game_options.gamma = Uniform01(rng) * options.max_gamma;
  game_options.min_rho =
      std::min(options.min_rho, 1.0 / game_options.num_states);
  return RandomGame(game_options, rng());
}

CheckReport CheckPerformanceDifference(int trials, std::uint64_t seed) {
  Tracker tracker("performance_difference", trials, tol::kIdentity, seed);
  Rng rng(MixSeed(seed));
  for (int t = 0; t < trials; ++t) {
    InstanceOptions options;
    options.identical_rewards = (t % 4 == 3);
    const Game game = SampleCheckGame(rng, options);
    const Policy theta = RandomPolicy(game, rng);
    const Policy theta_prime = RandomPolicy(game, rng);
    const int agent = UniformInt(rng, 0, game.num_agents() - 1);
    const double v =
        PerformanceDifferenceViolation(game, theta, theta_prime, agent);
    tracker.Observe(v, [&] {
      return InstanceWitness("performance_difference", game, theta,
                             &theta_prime, agent);
    });
  }
  return tracker.Finish();
}

CheckReport CheckGradientDomination(int trials, std::uint64_t seed) {
  Tracker tracker("gradient_domination", trials, tol::kDomination, seed);
  Rng rng(MixSeed(seed));
  int skipped = 0;
  for (int t = 0; t < trials; ++t) {
    InstanceOptions options;
    options.min_rho = 0.05;
    const Game game = SampleCheckGame(rng, options);
    const Policy theta = RandomPolicy(game, rng);
    const int agent = UniformInt(rng, 0, game.num_agents() - 1);
    const Policy other = RandomPolicy(game, rng);
    const auto v =
        GradientDominationViolation(game, theta, other.agent(agent), agent);
    if (!v) {
      ++skipped;
      continue;
    }
    const Policy theta_prime = theta.WithAgent(game, agent, other.agent(agent));
    tracker.Observe(std::max(0.0, *v), [&] {
      return InstanceWitness("gradient_domination", game, theta, &theta_prime,
                             agent);
    });
  }
  if (skipped > 0) {
    tracker.report().caveat = std::to_string(skipped) +
                              " instances skipped: visitation below floor";
  }
  return tracker.Finish();
}

CheckReport CheckAdvantageZeroMean(int trials, std::uint64_t seed) {
  Tracker tracker("advantage_zero_mean", trials, 1e-8, seed);
  Rng rng(MixSeed(seed));
  for (int t = 0; t < trials; ++t) {
    const Game game = SampleCheckGame(rng, InstanceOptions{});
    const Policy theta = RandomPolicy(game, rng);
    tracker.Observe(AdvantageZeroMeanViolation(game, theta), [&] {
      return InstanceWitness("advantage_zero_mean", game, theta, nullptr, 0);
    });
  }
  return tracker.Finish();
}

CheckReport CheckOccupancyIdentity(int trials, std::uint64_t seed) {
  Tracker tracker("occupancy_identity", trials, 1e-8, seed);
  Rng rng(MixSeed(seed));
  for (int t = 0; t < trials; ++t) {
    const Game game = SampleCheckGame(rng, InstanceOptions{});
    const Policy theta = RandomPolicy(game, rng);
    tracker.Observe(OccupancyIdentityViolation(game, theta), [&] {
      return InstanceWitness("occupancy_identity", game, theta, nullptr, 0);
    });
  }
  return tracker.Finish();
}

namespace {

void ObserveSmoothness(Tracker& tracker, const Game& game, double bound,
                       const Policy& theta, const Policy& theta_prime) {
  const double ratio = GradientLipschitzRatio(game, theta, theta_prime);
  tracker.Observe(std::max(0.0, ratio - bound), [&] {
    Json w = InstanceWitness("smoothness", game, theta, &theta_prime, 0);
    w["ratio"] = ratio;
    w["bound"] = bound;
    return w;
  });
}

}  // namespace

CheckReport CheckSmoothness(int trials, std::uint64_t seed) {
  Tracker tracker("smoothness", trials, tol::kSmoothnessSlack, seed);
  Rng rng(MixSeed(seed));
  const double scales[] = {1.0, 1e-1, 1e-3};
  for (int t = 0; t < trials; ++t) {
    const Game game = SampleCheckGame(rng, InstanceOptions{});
    const Policy theta = RandomPolicy(game, rng);
    const Policy target = RandomPolicy(game, rng);
    const Policy theta_prime = Mix(game, theta, target, scales[t % 3]);
    ObserveSmoothness(tracker, game, SmoothnessConstant(game), theta,
                      theta_prime);
  }
  return tracker.Finish();
}

CheckReport CheckSmoothnessOn(const Game& game, int trials,
                              std::uint64_t seed) {
  Tracker tracker("smoothness", trials, tol::kSmoothnessSlack, seed);
  const auto [lo, hi] = game.RewardRange();
  double scale = 1.0;
  if (lo < 0.0 || hi > 1.0) {
    scale = std::max(std::abs(lo), std::abs(hi));
    tracker.report().caveat =
        "rewards outside [0, 1]; bound scaled by max |r|";
  }
  const double bound = scale * SmoothnessConstant(game);
  Rng rng(MixSeed(seed));
  const double scales[] = {1.0, 1e-1, 1e-3};
  for (int t = 0; t < trials; ++t) {
    const Policy theta = RandomPolicy(game, rng);
    const Policy target = RandomPolicy(game, rng);
    ObserveSmoothness(tracker, game, bound, theta,
                      Mix(game, theta, target, scales[t % 3]));
  }
  return tracker.Finish();
}

CheckReport CheckProjectionOptimality(int trials, std::uint64_t seed) {
  Tracker tracker("projection_optimality", trials, 1e-12, seed);
  Rng rng(MixSeed(seed));
  for (int t = 0; t < trials; ++t) {
    const int m = UniformInt(rng, 1, 6);
    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) y[k] = 4.0 * Uniform01(rng) - 2.0;
    const double v = ProjectionKktViolation(y);
    tracker.Observe(v, [&] {
      Json w;
      w["check"] = "projection_optimality";
      w["y"] = VectorToJson(y);
      return w;
    });
  }
  return tracker.Finish();
}

CheckReport CheckAuxiliaryLemma(int trials, std::uint64_t seed) {
  Tracker tracker("auxiliary_lemma", trials, kLemmaSlack, seed);
  Rng rng(MixSeed(seed));
  for (int t = 0; t < trials; ++t) {
    const int m = UniformInt(rng, 2, 6);
    const Eigen::VectorXd theta = SamplePolicyRow(rng, m, 0.2);
    Eigen::Index k;
    theta.maxCoeff(&k);
    const double delta = 2.0 * Uniform01(rng) + 1e-6;
    Eigen::VectorXd g(m);
    for (int a = 0; a < m; ++a) g[a] = 4.0 * Uniform01(rng) - 2.0;
    double others = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a) {
      if (a != k) others = std::max(others, g[a]);
    }
    g[k] = others + delta + Uniform01(rng) * delta;
    const double v = AuxiliaryLemmaViolation(theta, g, static_cast<int>(k),
                                             delta);
    tracker.Observe(v, [&] {
      Json w;
      w["check"] = "auxiliary_lemma";
      w["theta"] = VectorToJson(theta);
      w["g"] = VectorToJson(g);
      w["k"] = static_cast<int>(k);
      w["delta"] = delta;
      return w;
    });
  }
  return tracker.Finish();
}

CheckReport CheckIterationBound(const IterationBoundOptions& options,
                                std::uint64_t seed,
                                std::vector<IterationBoundTrial>* trials) {
  Tracker tracker("iteration_bound", options.games, 0.0, seed);
  int exceeded = 0;
  for (int k = 0; k < options.games; ++k) {
    RandomGameOptions game_options;
    game_options.num_agents = static_cast<int>(options.num_actions.size());
    game_options.num_states = options.num_states;
    game_options.num_actions = options.num_actions;
    game_options.identical_rewards = true;
    game_options.gamma = options.gamma;
    game_options.min_rho = options.min_rho;
    const Game game = RandomGame(game_options, DeriveSeed(seed, k, 0));
    const PotentialSpec potential = PotentialSpec::FromIdenticalRewards(game);
    const PotentialRange range = PotentialBounds(game, potential);
    const double m = MismatchBound(game);
    const double g = 1.0 - game.gamma();
    const double bound_t = std::ceil(
        64.0 * m * m * (range.max - range.min) * game.num_states() *
        game.total_actions() /
        (g * g * g * options.epsilon * options.epsilon));
    const std::int64_t horizon = static_cast<std::int64_t>(
        std::min<double>(std::max(bound_t, 1.0),
                         static_cast<double>(options.iteration_cap)));
    const double eta = 1.0 / SmoothnessConstant(game);

    Rng rng(DeriveSeed(seed, k, 1));
    Policy theta = RandomPolicy(game, rng, 0.0);
    const Policy theta0 = theta;
    IterationBoundTrial trial;
    trial.bound_t = bound_t;
    trial.min_gap = std::numeric_limits<double>::infinity();
    for (std::int64_t t = 0;; ++t) {
      const PolicyEvaluation eval(game, theta);
      if (t >= 1) {
        const double gap = ComputeNeGap(eval).max_gap;
        trial.min_gap = std::min(trial.min_gap, gap);
        if (gap <= options.epsilon) {
          trial.hit_iter = t;
          break;
        }
      }
      if (t >= horizon) break;
      theta = GradientMapping(eval, eta).next;
    }
    if (trial.hit_iter < 0 && bound_t > options.iteration_cap) {
      trial.budget_exceeded = true;
      ++exceeded;
    } else {
      const double v = std::max(0.0, trial.min_gap - options.epsilon);
      tracker.Observe(v, [&] {
        Json w = InstanceWitness("iteration_bound", game, theta0, nullptr, 0);
        w["epsilon"] = options.epsilon;
        w["bound_t"] = bound_t;
        w["hit_iter"] = trial.hit_iter;
        return w;
      });
    }
    if (trials != nullptr) trials->push_back(trial);
  }
  if (exceeded > 0) {
    tracker.report().caveat =
        std::string(ErrorCodeName(ErrorCode::kBudgetExceeded)) + ": " +
        std::to_string(exceeded) + " games had T above the iteration cap";
  }
  return tracker.Finish();
}

double ReplayWitness(const Json& witness) {
  const std::string check = witness.at("check").get<std::string>();
  if (check == "projection_optimality") {
    const auto y = witness.at("y").get<std::vector<double>>();
    return ProjectionKktViolation(Eigen::Map<const Eigen::VectorXd>(
        y.data(), static_cast<Eigen::Index>(y.size())));
  }
  if (check == "auxiliary_lemma") {
    const auto theta = witness.at("theta").get<std::vector<double>>();
    const auto g = witness.at("g").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(theta.size());
    return AuxiliaryLemmaViolation(
        Eigen::Map<const Eigen::VectorXd>(theta.data(), n),
        Eigen::Map<const Eigen::VectorXd>(g.data(), n),
        witness.at("k").get<int>(), witness.at("delta").get<double>());
  }
  const Game game = BuildGame(GameSpecFromJson(witness.at("game")));
  const Policy theta = PolicyFromJson(game, witness.at("theta"));
  const int agent = witness.value("agent", 0);
  if (check == "performance_difference") {
    return PerformanceDifferenceViolation(
        game, theta, PolicyFromJson(game, witness.at("theta_prime")), agent);
  }
  if (check == "gradient_domination") {
    const Policy theta_prime = PolicyFromJson(game, witness.at("theta_prime"));
    return std::max(0.0, GradientDominationViolation(
                             game, theta, theta_prime.agent(agent), agent)
                             .value_or(0.0));
  }
  if (check == "advantage_zero_mean") {
    return AdvantageZeroMeanViolation(game, theta);
  }
  if (check == "occupancy_identity") {
    return OccupancyIdentityViolation(game, theta);
  }
  if (check == "smoothness") {
    const double ratio = GradientLipschitzRatio(
        game, theta, PolicyFromJson(game, witness.at("theta_prime")));
    return std::max(0.0, ratio - witness.at("bound").get<double>());
  }
  throw Error(ErrorCode::kDomainError,
              "witness for '" + check + "' cannot be replayed");
}

std::vector<CheckReport> RunAllChecks(int trials, std::uint64_t seed) {
  return {
      CheckPerformanceDifference(trials, DeriveSeed(seed, 1)),
      CheckGradientDomination(trials, DeriveSeed(seed, 2)),
      CheckAdvantageZeroMean(trials, DeriveSeed(seed, 3)),
      CheckOccupancyIdentity(trials, DeriveSeed(seed, 4)),
      CheckSmoothness(trials, DeriveSeed(seed, 5)),
      CheckProjectionOptimality(trials, DeriveSeed(seed, 6)),
      CheckAuxiliaryLemma(trials, DeriveSeed(seed, 7)),
  };
}

}  // namespace gradplay
