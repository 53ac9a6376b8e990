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

#include "gradplay/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gradplay/errors.h"
#include "gradplay/exact_eval.h"
#include "gradplay/random.h"

namespace gradplay {
namespace {

constexpr double kMonotoneSlack = 1e-9;
constexpr std::uint64_t kClassifyBudget = std::uint64_t{1} << 20;

std::string SchemeName(InitScheme scheme) {
  switch (scheme) {
    case InitScheme::kUniform:
      return "uniform";
    case InitScheme::kNearPolicy:
      return "near_policy";
    case InitScheme::kPrisoners:
      return "prisoners";
  }
  return "uniform";
}

InitScheme SchemeFromName(const std::string& name) {
  if (name == "uniform") return InitScheme::kUniform;
  if (name == "near_policy") return InitScheme::kNearPolicy;
  if (name == "prisoners") return InitScheme::kPrisoners;
  throw Error(ErrorCode::kDomainError, "unknown init scheme '" + name + "'");
}

std::string OutPath(const ExperimentConfig& config, const std::string& name) {
  return (std::filesystem::path(config.out_dir) / name).string();
}

void EnsureOutDir(const ExperimentConfig& config) {
  if (config.out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create " + config.out_dir + ": " + ec.message());
  }
}

void ValidateConfig(const ExperimentConfig& config) {
  if (!(config.eta > 0.0) || !std::isfinite(config.eta)) {
    throw Error(ErrorCode::kDomainError, "eta must be positive");
  }
  if (config.max_iters < 0) {
    throw Error(ErrorCode::kDomainError, "max_iters must be non-negative");
  }
  if (config.trials < 1 || config.batches < 1 || config.trials_per_batch < 1) {
    throw Error(ErrorCode::kDomainError, "trial counts must be >= 1");
  }
  if (config.init.delta < 0.0) {
    throw Error(ErrorCode::kDomainError, "init delta must be non-negative");
  }
}

std::vector<StrictNeCertificate> DestinationSet(const Game& game) {
  if (NumDeterministicPolicies(game) > kClassifyBudget) return {};
  return EnumerateStrictNes(game, kClassifyBudget).strict;
}

Json ActionsJson(const StrictNeCertificate& cert) { return cert.actions; }

double SampleStd(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

Json ConfigToJson(const ExperimentConfig& config) {
  Json j;
  j["game"] = GameSpecToJson(config.game);
  j["eta"] = config.eta;
  j["max_iters"] = config.max_iters;
  j["trials"] = config.trials;
  Json init;
  init["scheme"] = SchemeName(config.init.scheme);
  if (config.init.reference_table) {
    Json table = Json::array();
    for (const auto& block : *config.init.reference_table) {
      table.push_back(MatrixToJson(block));
    }
    init["reference"] = std::move(table);
  } else if (!config.init.reference_name.empty()) {
    init["reference"] = config.init.reference_name;
  }
  init["delta"] = config.init.delta;
  j["init"] = std::move(init);
  j["seed"] = config.seed;
  j["out_dir"] = config.out_dir;
  j["epsilons"] = config.epsilons;
  j["batches"] = config.batches;
  j["trials_per_batch"] = config.trials_per_batch;
  j["ne_gap_stride"] = config.ne_gap_stride;
  j["stop_grad_norm"] = config.stop_grad_norm;
  return j;
}

ExperimentConfig ConfigFromJson(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kShapeMismatch, "config must be a JSON object");
  }
  ExperimentConfig config;
  try {
    if (!j.contains("game")) {
      throw Error(ErrorCode::kShapeMismatch, "config needs a 'game' object");
    }
    config.game = GameSpecFromJson(j.at("game"));
    config.eta = j.value("eta", config.eta);
    config.max_iters = j.value("max_iters", config.max_iters);
    config.trials = j.value("trials", config.trials);
    if (j.contains("init")) {
      const Json& init = j.at("init");
      config.init.scheme = SchemeFromName(init.value("scheme", "uniform"));
      config.init.delta = init.value("delta", 0.0);
      if (init.contains("reference")) {
        if (init.at("reference").is_string()) {
          config.init.reference_name = init.at("reference").get<std::string>();
        } else {
          config.init.reference_table =
              PolicyTableFromJson(init.at("reference"));
        }
      }
    }
    config.seed = j.value("seed", config.seed);
    config.out_dir = j.value("out_dir", config.out_dir);
    config.epsilons = j.value("epsilons", config.epsilons);
    config.batches = j.value("batches", config.batches);
    config.trials_per_batch =
        j.value("trials_per_batch", config.trials_per_batch);
    config.ne_gap_stride = j.value("ne_gap_stride", config.ne_gap_stride);
    config.stop_grad_norm = j.value("stop_grad_norm", config.stop_grad_norm);
    config.threads = j.value("threads", config.threads);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string("bad config field: ") + e.what());
  }
  ValidateConfig(config);
  return config;
}

ExperimentConfig CoordinationRunPreset() {
  ExperimentConfig config;
  config.game.num_agents = 2;
  config.game.num_states = 4;
  config.game.num_actions = {2, 2};
  config.game.gamma = 0.95;
  config.game.builder = BuilderSpec{"coordination", 0.1};
  config.trials = 20;
  config.max_iters = 3000;
  return config;
}

ExperimentConfig SaddleDemoPreset() {
  ExperimentConfig config = CoordinationRunPreset();
  config.trials = 1;
  config.max_iters = 20000;
  config.init.scheme = InitScheme::kNearPolicy;
  config.init.reference_name = "coordination_mixed_ne";
  config.init.delta = 1e-3;
  config.ne_gap_stride = 50;
  return config;
}

ExperimentConfig RatioSweepPreset() {
  ExperimentConfig config;
  config.game.num_agents = 2;
  config.game.num_states = 2;
  config.game.num_actions = {2, 2};
  config.game.gamma = 0.95;
  config.game.builder = BuilderSpec{"prisoners_dilemma", 0.1};
  config.init.scheme = InitScheme::kPrisoners;
  config.max_iters = 3000;
  config.ne_gap_stride = 0;
  return config;
}

Policy InitialPolicy(const Game& game, const InitSpec& init,
                     std::uint64_t seed) {
  Rng rng(MixSeed(seed));
  switch (init.scheme) {
    case InitScheme::kUniform:
      return RandomPolicy(game, rng, 0.0);
    case InitScheme::kPrisoners: {
      if (game.num_states() != 2) {
        throw Error(ErrorCode::kShapeMismatch,
                    "prisoners init needs a 2-state game");
      }
      PolicyTable table = ZeroTable(game);
      for (int i = 0; i < game.num_agents(); ++i) {
        if (game.num_actions(i) != 2) {
          throw Error(ErrorCode::kShapeMismatch,
                      "prisoners init needs 2 actions per agent");
        }
        const double cooperate = 1.0 - 0.4 * Uniform01(rng);
        table[i](0, 0) = cooperate;
        table[i](0, 1) = 1.0 - cooperate;
        table[i](1, 1) = 1.0;
      }
      return Policy(game, std::move(table));
    }
    case InitScheme::kNearPolicy: {
      std::optional<Policy> reference;
      if (init.reference_table) {
        reference.emplace(game, *init.reference_table);
      } else if (init.reference_name == "coordination_mixed_ne") {
        // The builder epsilon is recovered from the transition law.
        const double epsilon = game.transition(0, 0, 2) + game.transition(0, 0, 3);
        reference.emplace(CoordinationMixedNe(game, epsilon));
      } else {
        throw Error(ErrorCode::kDomainError,
                    "near_policy init needs a reference");
      }
      // Every row moves delta / 2 of its mass toward a random row, so the
      // D-metric distance is at most delta.
      PolicyTable table = reference->table();
      for (int i = 0; i < game.num_agents(); ++i) {
        for (int s = 0; s < game.num_states(); ++s) {
          const Eigen::VectorXd q = SampleSimplex(rng, game.num_actions(i));
          table[i].row(s) = (1.0 - init.delta / 2.0) * table[i].row(s) +
                            (init.delta / 2.0) * q.transpose();
        }
      }
      return Policy(game, std::move(table));
    }
  }
  throw Error(ErrorCode::kDomainError, "unknown init scheme");
}

int ClassifyDestination(const Policy& policy,
                        const std::vector<StrictNeCertificate>& nes) {
  for (std::size_t k = 0; k < nes.size(); ++k) {
    if (DMetric(policy, nes[k].policy) <= kDestinationRadius) {
      return static_cast<int>(k);
    }
  }
  return -1;
}

std::string DestinationLabel(int index) {
  return index < 0 ? "unconverged" : "strict_ne_" + std::to_string(index);
}

void ParallelFor(int count, int threads, const std::function<void(int)>& fn) {
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RunSummary CmdRun(const ExperimentConfig& config) {
  ValidateConfig(config);
  const Game game = BuildGame(config.game);
  std::optional<PotentialSpec> potential;
  if (game.HasIdenticalRewards()) {
    potential = PotentialSpec::FromIdenticalRewards(game);
  }
  const std::vector<StrictNeCertificate> nes = DestinationSet(game);
  EnsureOutDir(config);

  RunConfig run;
  run.eta = config.eta;
  run.max_iters = config.max_iters;
  run.stop_grad_norm = config.stop_grad_norm;
  run.ne_gap_stride = config.ne_gap_stride;

  RunSummary summary;
  summary.num_strict_nes = static_cast<int>(nes.size());
  summary.trials.resize(config.trials);
  ParallelFor(config.trials, config.threads, [&](int k) {
    TrialResult& result = summary.trials[k];
    result.trial = k;
    result.seed = DeriveSeed(config.seed, static_cast<std::uint64_t>(k));
    const Policy theta0 = InitialPolicy(game, config.init, result.seed);
    const Trajectory traj =
        Run(game, theta0, run, potential ? &*potential : nullptr);
    result.iterations = traj.rows.back().iter;
    result.termination = traj.termination;
    result.final_rewards = traj.rows.back().total_rewards;
    result.final_ne_gap = traj.rows.back().ne_gap
                              ? *traj.rows.back().ne_gap
                              : ComputeNeGap(game, traj.final_policy()).max_gap;
    result.destination = ClassifyDestination(traj.final_policy(), nes);
    for (std::size_t t = 1; t < traj.rows.size(); ++t) {
      for (int i = 0; i < game.num_agents(); ++i) {
        result.worst_decrease =
            std::max(result.worst_decrease, traj.rows[t - 1].total_rewards[i] -
                                                traj.rows[t].total_rewards[i]);
      }
    }
    result.monotone = result.worst_decrease <= kMonotoneSlack;
    if (!config.out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "trial_%04d.csv", k);
      result.csv_path = OutPath(config, name);
      WriteTrajectoryCsv(traj, game.num_agents(), result.csv_path);
    }
  });

  summary.all_monotone = true;
  Json trials = Json::array();
  for (const auto& r : summary.trials) {
    summary.all_monotone = summary.all_monotone && r.monotone;
    summary.max_final_ne_gap = std::max(summary.max_final_ne_gap, r.final_ne_gap);
    Json t;
    t["trial"] = r.trial;
    t["seed"] = r.seed;
    t["iterations"] = r.iterations;
    t["termination"] = std::string(TerminationName(r.termination));
    t["final_ne_gap"] = r.final_ne_gap;
    t["final_rewards"] = r.final_rewards;
    t["destination"] = DestinationLabel(r.destination);
    t["monotone"] = r.monotone;
    t["worst_decrease"] = r.worst_decrease;
    if (!r.csv_path.empty()) t["trajectory"] = r.csv_path;
    trials.push_back(std::move(t));
  }
  Json& j = summary.json;
  j["command"] = "run";
  j["config"] = ConfigToJson(config);
  j["num_strict_nes"] = summary.num_strict_nes;
  j["all_monotone"] = summary.all_monotone;
  j["max_final_ne_gap"] = summary.max_final_ne_gap;
  j["trials"] = std::move(trials);
  if (!config.out_dir.empty()) {
    WriteJsonFile(j, OutPath(config, "summary.json"));
  }
  return summary;
}

SaddleDemoResult CmdSaddleDemo(const ExperimentConfig& config) {
  ValidateConfig(config);
  if (config.init.scheme != InitScheme::kNearPolicy) {
    throw Error(ErrorCode::kDomainError, "saddle-demo needs near_policy init");
  }
  if (config.init.delta > 1e-2) {
    throw Error(ErrorCode::kDomainError, "saddle-demo needs delta <= 1e-2");
  }
  const Game game = BuildGame(config.game);
  InitSpec exact = config.init;
  exact.delta = 0.0;
  const Policy reference = InitialPolicy(game, exact, 0);
  const Policy theta0 = InitialPolicy(game, config.init, DeriveSeed(config.seed, 0));
  const std::vector<StrictNeCertificate> nes = DestinationSet(game);
  EnsureOutDir(config);

  RunConfig run;
  run.eta = config.eta;
  run.max_iters = config.max_iters;
  run.stop_grad_norm = config.stop_grad_norm;
  run.ne_gap_stride = config.ne_gap_stride;
  run.reference = reference;
  std::optional<PotentialSpec> potential;
  if (game.HasIdenticalRewards()) {
    potential = PotentialSpec::FromIdenticalRewards(game);
  }

  SaddleDemoResult out;
  out.trajectory = Run(game, theta0, run, potential ? &*potential : nullptr);
  const double ball = 10.0 * config.init.delta;
  for (const auto& row : out.trajectory.rows) {
    out.max_distance = std::max(out.max_distance, *row.d_metric);
    if (out.first_exit_iter < 0 && *row.d_metric > ball) {
      out.first_exit_iter = row.iter;
    }
  }
  const Policy& last = out.trajectory.final_policy();
  out.left_ball = out.first_exit_iter >= 0;
  out.final_ne_gap = ComputeNeGap(game, last).max_gap;
  out.destination = ClassifyDestination(last, nes);
  out.final_deterministic = true;
  for (const auto& block : last.table()) {
    for (int s = 0; s < block.rows(); ++s) {
      if (block.row(s).maxCoeff() < 1.0 - 1e-6) out.final_deterministic = false;
    }
  }
  out.pass = out.left_ball && out.destination >= 0 &&
             out.final_ne_gap <= kDestinationRadius;

  Json& j = out.json;
  j["command"] = "saddle-demo";
  j["config"] = ConfigToJson(config);
  j["delta"] = config.init.delta;
  j["ball_radius"] = ball;
  j["max_distance"] = out.max_distance;
  j["first_exit_iter"] = out.first_exit_iter;
  j["left_ball"] = out.left_ball;
  j["iterations"] = out.trajectory.rows.back().iter;
  j["termination"] = std::string(TerminationName(out.trajectory.termination));
  j["final_ne_gap"] = out.final_ne_gap;
  j["destination"] = DestinationLabel(out.destination);
  if (out.destination >= 0) j["destination_actions"] = ActionsJson(nes[out.destination]);
  j["final_deterministic"] = out.final_deterministic;
  j["final_policy"] = PolicyToJson(last);
  j["pass"] = out.pass;
  if (!config.out_dir.empty()) {
    WriteTrajectoryCsv(out.trajectory, game.num_agents(),
                       OutPath(config, "saddle_trajectory.csv"));
    WriteJsonFile(j, OutPath(config, "saddle_summary.json"));
  }
  return out;
}

RatioSweepResult CmdRatioSweep(const ExperimentConfig& config) {
  ValidateConfig(config);
  if (!config.game.builder || config.game.builder->name != "prisoners_dilemma") {
    throw Error(ErrorCode::kDomainError,
                "ratio-sweep needs the prisoners_dilemma builder");
  }
  EnsureOutDir(config);
  RatioSweepResult out;
  const int total = config.batches * config.trials_per_batch;

  RunConfig run;
  run.eta = config.eta;
  run.max_iters = config.max_iters;
  run.stop_grad_norm = config.stop_grad_norm;
  run.ne_gap_stride = 0;

  for (double epsilon : config.epsilons) {
    GameSpec spec = config.game;
    spec.builder->epsilon = epsilon;
    const Game game = BuildGame(spec);
    const Policy target = PrisonersCooperativeNe(game);
    const StrictNeCertificate cert = CertifyStrictNe(game, target);
    const double g = 1.0 - game.gamma();

    RatioRow row;
    row.epsilon = epsilon;
    row.delta_star = cert.delta_star;
    const auto components = DeltaComponents(game, cert);
    row.first_state_component = std::numeric_limits<double>::infinity();
    for (const auto& c : components) {
      row.first_state_component = std::min(row.first_state_component, c[0]);
    }
    row.first_state_unnormalized = row.first_state_component / g;
    for (int k = 0; k <= 10; ++k) {
      const double first = k / 10.0;
      Eigen::VectorXd rho(2);
      rho << first, 1.0 - first;
      const Game swept = game.WithRho(rho);
      row.rho_sweep.push_back(
          {first, CertifyStrictNe(swept, PrisonersCooperativeNe(swept)).delta_star});
    }

    std::vector<char> hit(total, 0);
    ParallelFor(total, config.threads, [&](int k) {
      // Seeds do not depend on epsilon, so every epsilon sees the same starts.
      const Policy theta0 = InitialPolicy(
          game, config.init, DeriveSeed(config.seed, static_cast<std::uint64_t>(k)));
      const Trajectory traj = Run(game, theta0, run);
      hit[k] = DMetric(traj.final_policy(), target) <= kDestinationRadius;
    });
    for (int b = 0; b < config.batches; ++b) {
      int count = 0;
      for (int t = 0; t < config.trials_per_batch; ++t) {
        count += hit[b * config.trials_per_batch + t];
      }
      row.batch_ratios.push_back(100.0 * count / config.trials_per_batch);
    }
    row.mean = std::accumulate(row.batch_ratios.begin(), row.batch_ratios.end(),
                               0.0) /
               config.batches;
    row.std = SampleStd(row.batch_ratios, row.mean);
    out.rows.push_back(std::move(row));
  }

  Json rows = Json::array();
  for (const auto& r : out.rows) {
    Json j;
    j["epsilon"] = r.epsilon;
    j["delta_star"] = r.delta_star;
    j["first_state_component"] = r.first_state_component;
    j["first_state_unnormalized"] = r.first_state_unnormalized;
    Json sweep = Json::array();
    for (const auto& p : r.rho_sweep) {
      sweep.push_back({{"rho_first", p.rho_first}, {"delta_star", p.delta_star}});
    }
    j["rho_sweep"] = std::move(sweep);
    j["batch_ratios"] = r.batch_ratios;
    j["ratio_mean"] = r.mean;
    j["ratio_std"] = r.std;
    rows.push_back(std::move(j));
  }
  out.json["command"] = "ratio-sweep";
  out.json["config"] = ConfigToJson(config);
  out.json["rows"] = std::move(rows);
  if (!config.out_dir.empty()) {
    std::ostringstream csv;
    csv << "epsilon,delta_star,first_state_unnormalized,ratio_mean,ratio_std\n";
    char buf[256];
    for (const auto& r : out.rows) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    r.epsilon, r.delta_star, r.first_state_unnormalized,
                    r.mean, r.std);
      csv << buf;
    }
    WriteTextFile(csv.str(), OutPath(config, "ratio_sweep.csv"));
    WriteJsonFile(out.json, OutPath(config, "ratio_sweep.json"));
  }
  return out;
}

EnumerateResult CmdEnumerate(const ExperimentConfig& config) {
  const Game game = BuildGame(config.game);
  EnumerateResult out;
  out.enumeration = EnumerateStrictNes(game);
  std::ostringstream table;
  table << "index  delta_star        radius            actions\n";
  Json list = Json::array();
  for (std::size_t k = 0; k < out.enumeration.strict.size(); ++k) {
    const auto& cert = out.enumeration.strict[k];
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-6zu %-17.10g %-17.10g ", k,
                  cert.delta_star, cert.radius);
    table << buf << ActionsJson(cert).dump() << '\n';
    list.push_back(CertificateToJson(game, cert));
  }
  out.table = table.str();
  out.json["command"] = "enumerate";
  out.json["game"] = GameSpecToJson(config.game);
  out.json["examined"] = out.enumeration.examined;
  out.json["num_strict"] = out.enumeration.strict.size();
  out.json["certificates"] = std::move(list);
  Json borderline = Json::array();
  for (const auto& p : out.enumeration.borderline) {
    borderline.push_back(PolicyToJson(p));
  }
  out.json["non_strict_candidates"] = std::move(borderline);
  if (!config.out_dir.empty()) {
    EnsureOutDir(config);
    WriteJsonFile(out.json, OutPath(config, "enumerate.json"));
  }
  return out;
}

}  // namespace gradplay
