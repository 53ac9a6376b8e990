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

#include "gradplay/gradient_play.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gradplay/errors.h"
#include "gradplay/projection.h"
#include "gradplay/random.h"
#include "gradplay/tolerances.h"

namespace gradplay {
namespace {

constexpr double kProbeSlack = 1e-12;

std::string FormatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string_view TerminationName(Termination t) {
  switch (t) {
    case Termination::kGradNorm:
      return "grad_norm";
    case Termination::kNeGap:
      return "ne_gap";
    case Termination::kMaxIters:
      return "max_iters";
  }
  return "unknown";
}

Policy Step(const Game& game, const Policy& policy, double eta) {
  return GradientMapping(game, policy, eta).next;
}

Trajectory Run(const Game& game, const Policy& theta0, const RunConfig& config,
               const PotentialSpec* potential) {
  if (!(config.eta > 0.0)) {
    throw Error(ErrorCode::kDomainError, "eta must be positive");
  }
  if (config.max_iters < 0) {
    throw Error(ErrorCode::kDomainError, "max_iters must be non-negative");
  }
  CheckTableShape(game, theta0.table());
  Trajectory out;
  Policy theta = theta0;
  for (int t = 0;; ++t) {
    const PolicyEvaluation eval(game, theta);
    GradientMappingResult gm = GradientMapping(eval, config.eta);
    const bool last = t == config.max_iters;

    TrajectoryRow row;
    row.iter = t;
    row.total_rewards = eval.total_rewards();
    if (potential != nullptr) row.phi = TotalPotential(eval, *potential);
    row.grad_map_norm = gm.norm;
    const bool want_gap =
        config.stop_ne_gap.has_value() ||
        (config.ne_gap_stride > 0 && (t % config.ne_gap_stride == 0));
    bool stop_gap = false;
    bool stop_grad =
        config.stop_grad_norm.has_value() && gm.norm <= *config.stop_grad_norm;
    if (want_gap || (config.ne_gap_stride > 0 && (last || stop_grad))) {
      row.ne_gap = ComputeNeGap(eval).max_gap;
      stop_gap = config.stop_ne_gap.has_value() &&
                 *row.ne_gap <= *config.stop_ne_gap;
    }
    if (config.reference) row.d_metric = DMetric(theta, *config.reference);
    out.rows.push_back(std::move(row));

    const bool done = stop_grad || stop_gap || last;
    if (done || (config.iterate_stride > 0 && t % config.iterate_stride == 0)) {
      out.iterate_iters.push_back(t);
      out.iterates.push_back(theta);
    }
    if (done) {
      out.termination = stop_grad  ? Termination::kGradNorm
                        : stop_gap ? Termination::kNeGap
                                   : Termination::kMaxIters;
      break;
    }
    theta = std::move(gm.next);
  }
  return out;
}

double DMetric(const PolicyTable& a, const PolicyTable& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "policies have different agents");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "policy blocks differ for agent " + std::to_string(i));
    }
    if (a[i].size() == 0) continue;
    worst = std::max(worst,
                     (a[i] - b[i]).cwiseAbs().rowwise().sum().maxCoeff());
  }
  return worst;
}

double DMetric(const Policy& a, const Policy& b) {
  return DMetric(a.table(), b.table());
}

std::string TrajectoryCsv(const Trajectory& trajectory, int num_agents) {
  std::ostringstream out;
  out << "iter";
  for (int i = 1; i <= num_agents; ++i) out << ",J_" << i;
  out << ",phi,grad_map_norm,ne_gap,d_metric\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string();
  };
  for (const auto& row : trajectory.rows) {
    out << row.iter;
    for (double j : row.total_rewards) out << ',' << FormatDouble(j);
    out << ',' << opt(row.phi) << ',' << FormatDouble(row.grad_map_norm)
        << ',' << opt(row.ne_gap) << ',' << opt(row.d_metric) << '\n';
  }
  return out.str();
}

void WriteTrajectoryCsv(const Trajectory& trajectory, int num_agents,
                        const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path);
  file << TrajectoryCsv(trajectory, num_agents);
  if (!file) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

double SmoothnessConstant(const Game& game) {
  const double g = 1.0 - game.gamma();
  return 2.0 * game.total_actions() / (g * g * g);
}

PotentialRange PotentialBounds(const Game& game,
                               const PotentialSpec& potential) {
  constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 20;
  const std::uint64_t count = NumDeterministicPolicies(game);
  PotentialRange out;
  if (count <= kExactLimit) {
    out.exact = true;
    out.min = std::numeric_limits<double>::infinity();
    out.max = -out.min;
    for (std::uint64_t k = 0; k < count; ++k) {
      const double phi =
          TotalPotential(game, potential, DeterministicPolicyAt(game, k));
      out.min = std::min(out.min, phi);
      out.max = std::max(out.max, phi);
    }
    return out;
  }
  const double bound =
      potential.phi.cwiseAbs().maxCoeff() / (1.0 - game.gamma());
  out.min = -bound;
  out.max = bound;
  return out;
}

ProbeReport LocalConvergenceProbe(const Game& game, const Policy& strict_ne,
                                  double radius, double eta, int trials,
                                  std::uint64_t seed) {
  const StrictNeCertificate cert = CertifyStrictNe(game, strict_ne);
  if (!(eta > 0.0)) throw Error(ErrorCode::kDomainError, "eta must be positive");
  if (!(radius >= 0.0)) {
    throw Error(ErrorCode::kDomainError, "radius must be non-negative");
  }
  ProbeReport report;
  report.radius = radius;
  report.theorem_radius = cert.radius;
  report.eta = eta;
  report.delta_star = cert.delta_star;
  report.seed = seed;
  report.outside_guaranteed_region = radius > cert.radius * (1.0 + 1e-12);
  const auto [rmin, rmax] = game.RewardRange();
  report.rewards_outside_unit = rmin < 0.0 || rmax > 1.0;

  const double step = eta * cert.delta_star / 2.0;
  Rng rng(MixSeed(seed));
  report.all_pass = true;
  for (int trial = 0; trial < trials; ++trial) {
    // Each row moves a fraction u <= radius / 2 of its mass off the optimal
    // action, so its l1 distance is at most radius.
    PolicyTable table = strict_ne.table();
    for (int i = 0; i < game.num_agents(); ++i) {
      for (int s = 0; s < game.num_states(); ++s) {
        const double u = Uniform01(rng) * radius / 2.0;
        const Eigen::VectorXd q = SampleSimplex(rng, game.num_actions(i));
        table[i].row(s) = (1.0 - u) * table[i].row(s) + u * q.transpose();
      }
    }
    Policy theta(game, std::move(table));
    ProbeTrial result;
    result.d0 = DMetric(theta, strict_ne);
    result.step_bound =
        static_cast<int>(std::ceil(2.0 * result.d0 / (eta * cert.delta_star)));
    result.decrement_ok = true;
    double d = result.d0;
    if (d <= kProbeSlack) result.steps = 0;
    const int horizon = 2 * result.step_bound + 10;
    for (int t = 1; t <= horizon && result.steps < 0; ++t) {
      theta = Step(game, theta, eta);
      const double next = DMetric(theta, strict_ne);
      const double excess = next - std::max(d - step, 0.0);
      result.worst_decrement_excess =
          std::max(result.worst_decrement_excess, excess);
      if (excess > kProbeSlack) result.decrement_ok = false;
      d = next;
      if (d <= kProbeSlack) result.steps = t;
    }
    result.step_bound_ok =
        result.steps >= 0 && result.steps <= result.step_bound;
    if (!result.decrement_ok || !result.step_bound_ok) report.all_pass = false;
    report.trials.push_back(result);
  }
  return report;
}

}  // namespace gradplay
