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

// Command-line front end for the gradplay experiments.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gradplay/errors.h"
#include "gradplay/experiments.h"
#include "gradplay/ne_analysis.h"
#include "gradplay/serialization.h"
#include "gradplay/theory_checks.h"
#include "gradplay/tolerances.h"

namespace {

using namespace gradplay;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> eta;
  std::optional<int> trials;
  std::optional<int> max_iters;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Experiment config (JSON)");
  cmd->add_option("--seed", flags.seed, "Master seed");
  cmd->add_option("--out", flags.out, "Output directory");
  cmd->add_option("--eta", flags.eta, "Step size");
  cmd->add_option("--trials", flags.trials, "Number of trials");
  cmd->add_option("--max-iters", flags.max_iters, "Iteration budget");
}

ExperimentConfig ResolveConfig(const CommonFlags& flags,
                               ExperimentConfig preset) {
  ExperimentConfig config =
      flags.config.empty() ? std::move(preset)
                           : ConfigFromJson(ReadJsonFile(flags.config));
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (flags.eta) config.eta = *flags.eta;
  if (flags.trials) {
    config.trials = *flags.trials;
    config.trials_per_batch = *flags.trials;
  }
  if (flags.max_iters) config.max_iters = *flags.max_iters;
  return config;
}

void Print(const Json& j) { std::cout << j.dump(2) << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient play on tabular stochastic games"};
  app.require_subcommand(1);

  CommonFlags run_flags, saddle_flags, sweep_flags, enum_flags, check_flags,
      verify_flags;
  auto* run = app.add_subcommand("run", "Gradient play from random starts");
  AddCommonFlags(run, run_flags);
  auto* saddle =
      app.add_subcommand("saddle-demo", "Start next to the mixed NE of the coordination game");
  AddCommonFlags(saddle, saddle_flags);
  double saddle_delta = -1.0;
  saddle->add_option("--delta", saddle_delta, "Initial D-metric radius");
  auto* sweep = app.add_subcommand("ratio-sweep",
                                   "Convergence ratio to the cooperative NE");
  AddCommonFlags(sweep, sweep_flags);
  int batches = 0;
  sweep->add_option("--batches", batches, "Number of batches");
  auto* enumerate =
      app.add_subcommand("enumerate", "List strict NEs of a game");
  AddCommonFlags(enumerate, enum_flags);
  std::string builder = "coordination";
  enumerate->add_option("--builder", builder,
                        "coordination or prisoners_dilemma (without --config)");
  auto* check = app.add_subcommand("check", "Randomized identity checks");
  AddCommonFlags(check, check_flags);
  bool with_iteration_bound = false;
  check->add_flag("--iteration-bound", with_iteration_bound,
                  "Also run the global convergence bound check");
  auto* verify = app.add_subcommand("verify-policy",
                                    "Stationarity and NE-gap of a policy file");
  AddCommonFlags(verify, verify_flags);
  std::string policy_path;
  verify->add_option("--policy", policy_path, "Policy JSON [agent][state][action]")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*run) {
      const RunSummary summary =
          CmdRun(ResolveConfig(run_flags, CoordinationRunPreset()));
      Print(summary.json);
      return kExitOk;
    }
    if (*saddle) {
      ExperimentConfig config = ResolveConfig(saddle_flags, SaddleDemoPreset());
      if (saddle_delta >= 0.0) config.init.delta = saddle_delta;
      const SaddleDemoResult result = CmdSaddleDemo(config);
      Print(result.json);
      return result.pass || config.init.delta == 0.0 ? kExitOk
                                                     : kExitCheckFailed;
    }
    if (*sweep) {
      ExperimentConfig config = ResolveConfig(sweep_flags, RatioSweepPreset());
      if (batches > 0) config.batches = batches;
      Print(CmdRatioSweep(config).json);
      return kExitOk;
    }
    if (*enumerate) {
      ExperimentConfig preset = CoordinationRunPreset();
      if (builder == "prisoners_dilemma") preset = RatioSweepPreset();
      else if (builder != "coordination") {
        throw Error(ErrorCode::kDomainError, "unknown builder " + builder);
      }
      const EnumerateResult result = CmdEnumerate(ResolveConfig(enum_flags, preset));
      std::cout << result.enumeration.strict.size() << " strict NEs ("
                << result.enumeration.examined << " deterministic policies, "
                << result.enumeration.borderline.size()
                << " non-strict candidates)\n"
                << result.table;
      return kExitOk;
    }
    if (*check) {
      const std::uint64_t seed = check_flags.seed.value_or(0);
      const int trials = check_flags.trials.value_or(500);
      std::vector<CheckReport> reports = RunAllChecks(trials, seed);
      if (with_iteration_bound) {
        reports.push_back(CheckIterationBound(IterationBoundOptions{}, seed));
      }
      Json out = Json::array();
      bool all = true;
      for (const auto& r : reports) {
        all = all && r.pass;
        std::printf("%-24s %s  max_violation=%.3g tol=%.1g%s%s\n",
                    r.name.c_str(), r.pass ? "PASS" : "FAIL", r.max_violation,
                    r.tolerance, r.caveat.empty() ? "" : "  caveat: ",
                    r.caveat.c_str());
        out.push_back(CheckReportToJson(r));
        if (!r.pass && !check_flags.out.empty()) {
          WriteJsonFile(r.witness, check_flags.out + "/" + r.name + "_witness.json");
        }
      }
      if (!check_flags.out.empty()) {
        WriteJsonFile(out, check_flags.out + "/checks.json");
      }
      return all ? kExitOk : kExitCheckFailed;
    }
    if (*verify) {
      const ExperimentConfig config =
          ResolveConfig(verify_flags, CoordinationRunPreset());
      const Game game = BuildGame(config.game);
      const Policy policy = PolicyFromJson(game, ReadJsonFile(policy_path));
      const StationarityVerdict st = StationarityTest(game, policy, 1e-9);
      const NeGap gap = ComputeNeGap(game, policy);
      Json j;
      j["stationary"] = st.stationary;
      j["stationarity_slack"] = st.slack;
      j["ne_gaps"] = gap.gaps;
      j["max_ne_gap"] = gap.max_gap;
      const MarginCheck margins = ClassifyMargins(game, policy);
      j["strict_ne"] = margins.verdict == MarginVerdict::kStrict;
      if (margins.verdict == MarginVerdict::kStrict) {
        j["certificate"] = CertificateToJson(game, *margins.certificate);
      }
      Print(j);
      return st.stationary ? kExitOk : kExitCheckFailed;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitBadInput;
  }
  return kExitOk;
}
