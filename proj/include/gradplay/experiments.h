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

#ifndef GRADPLAY_EXPERIMENTS_H_
#define GRADPLAY_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gradplay/game.h"
#include "gradplay/gradient_play.h"
#include "gradplay/ne_analysis.h"
#include "gradplay/serialization.h"

namespace gradplay {

enum class InitScheme { kUniform, kNearPolicy, kPrisoners };

struct InitSpec {
  InitScheme scheme = InitScheme::kUniform;
  // For kNearPolicy: "coordination_mixed_ne" or an explicit policy table.
  std::string reference_name;
  std::optional<PolicyTable> reference_table;
  double delta = 0.0;
};

struct ExperimentConfig {
  GameSpec game;
  double eta = 0.1;
  int max_iters = 3000;
  int trials = 20;
  InitSpec init;
  std::uint64_t seed = 0;
  std::string out_dir;  // empty: no files are written
  std::vector<double> epsilons{0.1, 0.05, 0.01};
  int batches = 10;
  int trials_per_batch = 100;
  int ne_gap_stride = 10;
  double stop_grad_norm = 1e-10;
  int threads = 0;  // 0: hardware concurrency
};

Json ConfigToJson(const ExperimentConfig& config);
ExperimentConfig ConfigFromJson(const Json& j);

// Presets used by the CLI when no config file is given.
ExperimentConfig CoordinationRunPreset();
ExperimentConfig SaddleDemoPreset();
ExperimentConfig RatioSweepPreset();

// D-metric threshold for calling a run converged to a policy.
inline constexpr double kDestinationRadius = 1e-3;

Policy InitialPolicy(const Game& game, const InitSpec& init,
                     std::uint64_t seed);

// Index of the certificate within kDestinationRadius, or -1.
int ClassifyDestination(const Policy& policy,
                        const std::vector<StrictNeCertificate>& nes);
std::string DestinationLabel(int index);

void ParallelFor(int count, int threads, const std::function<void(int)>& fn);

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  Termination termination = Termination::kMaxIters;
  double final_ne_gap = 0.0;
  std::vector<double> final_rewards;
  int destination = -1;
  bool monotone = false;
  double worst_decrease = 0.0;  // largest drop of any J_i between steps
  std::string csv_path;
};

struct RunSummary {
  std::vector<TrialResult> trials;
  int num_strict_nes = 0;
  bool all_monotone = false;
  double max_final_ne_gap = 0.0;
  Json json;
};

RunSummary CmdRun(const ExperimentConfig& config);

struct SaddleDemoResult {
  Trajectory trajectory;
  double max_distance = 0.0;
  int first_exit_iter = -1;  // first iteration with D > 10 delta
  double final_ne_gap = 0.0;
  int destination = -1;
  bool final_deterministic = false;
  bool left_ball = false;
  bool pass = false;
  Json json;
};

SaddleDemoResult CmdSaddleDemo(const ExperimentConfig& config);

struct RhoSweepPoint {
  double rho_first = 0.0;
  double delta_star = 0.0;
};

struct RatioRow {
  double epsilon = 0.0;
  double delta_star = 0.0;
  double first_state_component = 0.0;  // min_i d(s_1) Delta_i(s_1) / (1-g)
  double first_state_unnormalized = 0.0;  // same, divided again by (1-g)
  std::vector<RhoSweepPoint> rho_sweep;
  std::vector<double> batch_ratios;
  double mean = 0.0;
  double std = 0.0;
};

struct RatioSweepResult {
  std::vector<RatioRow> rows;
  Json json;
};

RatioSweepResult CmdRatioSweep(const ExperimentConfig& config);

struct EnumerateResult {
  StrictNeEnumeration enumeration;
  Json json;
  std::string table;
};

EnumerateResult CmdEnumerate(const ExperimentConfig& config);

}  // namespace gradplay

#endif  // GRADPLAY_EXPERIMENTS_H_
