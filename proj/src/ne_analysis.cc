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

#include "gradplay/ne_analysis.h"

#include <algorithm>
#include <cmath>
#include <bit>
#include <limits>

#include "gradplay/errors.h"
#include "gradplay/random.h"
#include "gradplay/tolerances.h"

namespace gradplay {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int GreedyAction(const Eigen::RowVectorXd& q) {
  const double best = q.maxCoeff();
  const double slack = tol::kBestResponseTie * std::max(1.0, std::abs(best));
  for (int a = 0; a < q.size(); ++a) {
    if (q[a] >= best - slack) return a;
  }
  return 0;
}

}  // namespace

InducedMdp BuildInducedMdp(const Game& game, const Policy& policy, int agent) {
  CheckTableShape(game, policy.table());
  if (agent < 0 || agent >= game.num_agents()) {
    throw Error(ErrorCode::kShapeMismatch, "agent index out of range");
  }
  const JointActionIndex& joint = game.joint();
  const int ns = game.num_states();
  const int m = game.num_actions(agent);
  InducedMdp mdp;
  mdp.agent = agent;
  mdp.num_states = ns;
  mdp.num_actions = m;
  mdp.transition = Eigen::MatrixXd::Zero(ns * m, ns);
  mdp.reward = Eigen::MatrixXd::Zero(ns, m);
  mdp.gamma = game.gamma();
  mdp.rho = game.rho();
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < joint.num_joint(); ++a) {
      double w = 1.0;
      for (int j = 0; j < game.num_agents(); ++j) {
        if (j != agent) w *= policy.prob(j, s, joint.ActionOf(a, j));
      }
      if (w == 0.0) continue;
      const int ai = joint.ActionOf(a, agent);
      mdp.transition.row(s * m + ai) += w * game.transition_from(s).row(a);
      mdp.reward(s, ai) += w * game.reward(agent, s, a);
    }
  }
  return mdp;
}

Eigen::VectorXd EvaluateDeterministic(const InducedMdp& mdp,
                                      const std::vector<int>& actions) {
  const int ns = mdp.num_states;
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(ns, ns);
  Eigen::VectorXd r(ns);
  for (int s = 0; s < ns; ++s) {
    const int row = s * mdp.num_actions + actions[s];
    system.row(s) -= mdp.gamma * mdp.transition.row(row);
    r[s] = mdp.reward(s, actions[s]);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd v = lu.solve(r);
  if (!v.allFinite()) {
    throw Error(ErrorCode::kSolveFailure, "induced MDP solve failed");
  }
  return v;
}

BestResponse ComputeBestResponse(const PolicyEvaluation& eval, int agent) {
  const Game& game = eval.game();
  BestResponse out;
  out.agent = agent;
  out.mdp = BuildInducedMdp(game, eval.policy(), agent);
  out.current_value = eval.total_reward(agent);
  const InducedMdp& mdp = out.mdp;
  const int ns = mdp.num_states;
  const int m = mdp.num_actions;

  // Start from the greedy policy with respect to the current averaged Q.
  std::vector<int> actions(ns);
  for (int s = 0; s < ns; ++s) {
    actions[s] = GreedyAction(eval.avg_q(agent).row(s));
  }
  const int cap = 100 + 10 * ns * m;
  Eigen::VectorXd v;
  for (int it = 1; it <= cap; ++it) {
    out.iterations = it;
    v = EvaluateDeterministic(mdp, actions);
    std::vector<int> next(ns);
    for (int s = 0; s < ns; ++s) {
      Eigen::RowVectorXd q(m);
      for (int a = 0; a < m; ++a) {
        q[a] = mdp.reward(s, a) +
               mdp.gamma * mdp.transition.row(s * m + a).dot(v);
      }
      next[s] = GreedyAction(q);
    }
    if (next == actions) break;
    actions = std::move(next);
  }
  out.actions = actions;
  out.values = v;
  out.value = mdp.rho.dot(v);
  return out;
}

BestResponse ComputeBestResponse(const Game& game, const Policy& policy,
                                 int agent) {
  return ComputeBestResponse(PolicyEvaluation(game, policy), agent);
}

NeGap ComputeNeGap(const PolicyEvaluation& eval) {
  NeGap out;
  out.max_gap = -kInf;
  for (int i = 0; i < eval.game().num_agents(); ++i) {
    const BestResponse br = ComputeBestResponse(eval, i);
    out.gaps.push_back(br.value - br.current_value);
    out.max_gap = std::max(out.max_gap, out.gaps.back());
  }
  return out;
}

NeGap ComputeNeGap(const Game& game, const Policy& policy) {
  return ComputeNeGap(PolicyEvaluation(game, policy));
}

MarginCheck ClassifyMargins(const Game& game, const Policy& policy) {
  MarginCheck out;
  if (!policy.IsDeterministic()) return out;
  const PolicyEvaluation eval(game, policy);
  const int n = game.num_agents();
  const int ns = game.num_states();
  StrictNeCertificate cert{policy, policy.DeterministicActions(), {}, {}, {}};
  bool strict = true;
  bool borderline_ok = true;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd margins = eval.avg_advantage(i);
    Eigen::VectorXd delta(ns);
    for (int s = 0; s < ns; ++s) {
      const int best = cert.actions[i][s];
      cert.optimal_margin_error =
          std::max(cert.optimal_margin_error, std::abs(margins(s, best)));
      double worst_off = -kInf;
      for (int a = 0; a < game.num_actions(i); ++a) {
        if (a != best) worst_off = std::max(worst_off, margins(s, a));
      }
      delta[s] = -worst_off;
      if (worst_off > -tol::kStrictMargin) strict = false;
      if (worst_off > tol::kMarginZero) borderline_ok = false;
    }
    cert.margins.push_back(std::move(margins));
    cert.agent_state_delta.push_back(std::move(delta));
  }
  if (!strict && !borderline_ok) return out;
  if (cert.optimal_margin_error > tol::kMarginZero) return out;
  out.verdict = strict ? MarginVerdict::kStrict : MarginVerdict::kBorderline;

  cert.visitation = eval.visitation();
  cert.delta_star = DeltaStar(game, cert);
  cert.radius = AttractionRadius(game, cert.delta_star);
  cert.perturbed_visitation_positive = true;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(
        ns, game.num_actions(i), 1.0 / game.num_actions(i));
    const PolicyEvaluation perturbed(game,
                                     policy.WithAgent(game, i, uniform));
    if (perturbed.visitation().minCoeff() <= tol::kVisitationFloor) {
      cert.perturbed_visitation_positive = false;
    }
  }
  out.certificate = std::move(cert);
  return out;
}

StrictNeCertificate CertifyStrictNe(const Game& game, const Policy& policy) {
  MarginCheck check = ClassifyMargins(game, policy);
  if (check.verdict != MarginVerdict::kStrict) {
    throw Error(ErrorCode::kNotStrictNE,
                policy.IsDeterministic()
                    ? "margin conditions fail"
                    : "policy is not deterministic");
  }
  return std::move(*check.certificate);
}

StrictNeEnumeration EnumerateStrictNes(const Game& game,
                                       std::uint64_t budget) {
  const std::uint64_t count = NumDeterministicPolicies(game);
  if (count > budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                std::to_string(count) +
                    " deterministic policies exceed the budget of " +
                    std::to_string(budget));
  }
  StrictNeEnumeration out;
  for (std::uint64_t k = 0; k < count; ++k) {
    const Policy candidate = DeterministicPolicyAt(game, k);
    MarginCheck check = ClassifyMargins(game, candidate);
    if (check.verdict == MarginVerdict::kStrict) {
      out.strict.push_back(std::move(*check.certificate));
    } else if (check.verdict == MarginVerdict::kBorderline) {
      out.borderline.push_back(candidate);
    }
    ++out.examined;
  }
  return out;
}

std::vector<Eigen::VectorXd> DeltaComponents(
    const Game& game, const StrictNeCertificate& certificate) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& delta : certificate.agent_state_delta) {
    out.push_back(certificate.visitation.cwiseProduct(delta) /
                  (1.0 - game.gamma()));
  }
  return out;
}

double DeltaStar(const Game& game, const StrictNeCertificate& certificate) {
  double best = kInf;
  for (const auto& component : DeltaComponents(game, certificate)) {
    best = std::min(best, component.minCoeff());
  }
  return best;
}

double AttractionRadius(const Game& game, double delta_star) {
  const double g = 1.0 - game.gamma();
  return delta_star * g * g * g /
         (8.0 * game.num_agents() * game.num_states() * game.total_actions());
}

double MismatchBound(const Game& game) {
  const double lo = game.rho().minCoeff();
  if (!(lo > 0.0)) {
    throw Error(ErrorCode::kRhoHasZeroMass,
                "rho has a state with zero mass; the bound is undefined");
  }
  return 1.0 / ((1.0 - game.gamma()) * lo);
}

StationarityVerdict StationarityTest(const PolicyEvaluation& eval,
                                     double tol) {
  const Game& game = eval.game();
  StationarityVerdict out;
  out.stationary = true;
  for (int i = 0; i < game.num_agents(); ++i) {
    const Eigen::MatrixXd g = eval.gradient(i);
    const Eigen::MatrixXd& theta = eval.policy().agent(i);
    double slack = 0.0;
    for (int s = 0; s < game.num_states(); ++s) {
      slack += g.row(s).maxCoeff() - theta.row(s).dot(g.row(s));
    }
    out.slack.push_back(slack);
    out.agent_stationary.push_back(slack <= tol);
    if (slack > tol) out.stationary = false;
  }
  return out;
}

StationarityVerdict StationarityTest(const Game& game, const Policy& policy,
                                     double tol) {
  return StationarityTest(PolicyEvaluation(game, policy), tol);
}

SaddleCertificate FindSaddleCertificate(const Game& game,
                                        const PotentialSpec& potential,
                                        const Policy& fully_mixed_ne,
                                        double radius, int search_budget,
                                        std::uint64_t seed) {
  if (!fully_mixed_ne.IsFullyMixed(tol::kFullyMixedFloor)) {
    throw Error(ErrorCode::kNotFullyMixed,
                "policy has an entry below " +
                    std::to_string(tol::kFullyMixedFloor));
  }
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kDomainError, "radius must be positive");
  }
  const PolicyEvaluation base(game, fully_mixed_ne);
  if (!StationarityTest(base, 1e-8).stationary) {
    throw Error(ErrorCode::kDomainError, "policy is not first-order stationary");
  }
  const double phi0 = TotalPotential(base, potential);
  const int n = game.num_agents();
  const int ns = game.num_states();
  SaddleCertificate out;

  // Moves toward `target` by at most `radius`; returns true on ascent.
  auto try_target = [&](const PolicyTable& target) {
    const PolicyTable dir = Difference(target, fully_mixed_ne.table());
    const double len = std::sqrt(SquaredNorm(dir));
    if (len == 0.0) return false;
    const double eta = std::min(1.0, radius / len);
    PolicyTable moved = fully_mixed_ne.table();
    for (int i = 0; i < n; ++i) moved[i] += eta * dir[i];
    for (auto& block : moved) block = block.cwiseMax(0.0).cwiseMin(1.0);
    const Policy candidate(game, std::move(moved));
    const double gain = TotalPotential(game, potential, candidate) - phi0;
    ++out.evaluations;
    if (gain > tol::kSaddleGain) {
      out.found = true;
      out.perturbed = candidate;
      out.gain = gain;
      out.distance = eta * len;
      return true;
    }
    return false;
  };

  // Deterministic deviations by a subset of agents at one state, smallest
  // subsets first.
  if (n < 20) {
    std::vector<std::uint32_t> subsets;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      subsets.push_back(mask);
    }
    std::stable_sort(subsets.begin(), subsets.end(),
                     [](std::uint32_t a, std::uint32_t b) {
                       return std::popcount(a) < std::popcount(b);
                     });
    for (std::uint32_t mask : subsets) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) members.push_back(i);
      }
      for (int s = 0; s < ns; ++s) {
        std::vector<int> choice(members.size(), 0);
        while (true) {
          if (out.evaluations >= search_budget) return out;
          PolicyTable target = fully_mixed_ne.table();
          for (std::size_t k = 0; k < members.size(); ++k) {
            target[members[k]].row(s).setZero();
            target[members[k]](s, choice[k]) = 1.0;
          }
          if (try_target(target)) {
            out.method = "index_set";
            out.index_set = members;
            out.state = s;
            return out;
          }
          std::size_t k = 0;
          for (; k < members.size(); ++k) {
            if (++choice[k] < game.num_actions(members[k])) break;
            choice[k] = 0;
          }
          if (k == members.size()) break;
        }
      }
    }
  }

  Rng rng(MixSeed(seed));
  while (out.evaluations < search_budget) {
    if (try_target(RandomPolicy(game, rng).table())) {
      out.method = "random";
      return out;
    }
  }
  return out;
}

}  // namespace gradplay
