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

#include "gradplay/serialization.h"

#include <fstream>
#include <sstream>

#include "gradplay/errors.h"

namespace gradplay {
namespace {

template <typename T>
T Field(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json GameSpecToJson(const GameSpec& spec) {
  Json j;
  j["num_agents"] = spec.num_agents;
  j["num_states"] = spec.num_states;
  j["num_actions"] = spec.num_actions;
  j["gamma"] = spec.gamma;
  j["rho"] = spec.rho;
  if (spec.builder) {
    j["builder"] = spec.builder->name;
    j["epsilon"] = spec.builder->epsilon;
  } else {
    j["transition"] = spec.transition;
    j["rewards"] = spec.rewards;
  }
  return j;
}

GameSpec GameSpecFromJson(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kShapeMismatch, "game spec must be an object");
  }
  GameSpec spec;
  spec.num_agents = Field<int>(j, "num_agents");
  spec.num_states = Field<int>(j, "num_states");
  spec.num_actions = Field<std::vector<int>>(j, "num_actions");
  spec.gamma = Field<double>(j, "gamma");
  if (j.contains("rho")) spec.rho = Field<std::vector<double>>(j, "rho");
  if (j.contains("builder")) {
    spec.builder = BuilderSpec{Field<std::string>(j, "builder"),
                               Field<double>(j, "epsilon")};
  } else {
    spec.transition =
        Field<std::vector<std::vector<std::vector<double>>>>(j, "transition");
    spec.rewards =
        Field<std::vector<std::vector<std::vector<double>>>>(j, "rewards");
  }
  return spec;
}

Json MatrixToJson(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json VectorToJson(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Json PolicyToJson(const Policy& policy) {
  Json j = Json::array();
  for (const auto& block : policy.table()) j.push_back(MatrixToJson(block));
  return j;
}

PolicyTable PolicyTableFromJson(const Json& j) {
  std::vector<std::vector<std::vector<double>>> raw;
  try {
    raw = j.get<std::vector<std::vector<std::vector<double>>>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string("policy must be [agent][state][action]: ") +
                    e.what());
  }
  PolicyTable table;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& rows = raw[i];
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    Eigen::MatrixXd block(rows.size(), cols);
    for (std::size_t s = 0; s < rows.size(); ++s) {
      if (rows[s].size() != cols) {
        throw Error(ErrorCode::kShapeMismatch,
                    "ragged policy rows for agent " + std::to_string(i));
      }
      for (std::size_t a = 0; a < cols; ++a) block(s, a) = rows[s][a];
    }
    table.push_back(std::move(block));
  }
  return table;
}

Policy PolicyFromJson(const Game& game, const Json& j) {
  return Policy(game, PolicyTableFromJson(j));
}

Json CertificateToJson(const Game& game, const StrictNeCertificate& cert) {
  Json j;
  j["policy"] = PolicyToJson(cert.policy);
  j["actions"] = cert.actions;
  Json margins = Json::array();
  for (const auto& m : cert.margins) margins.push_back(MatrixToJson(m));
  j["margins"] = std::move(margins);
  Json deltas = Json::array();
  for (const auto& d : cert.agent_state_delta) deltas.push_back(VectorToJson(d));
  j["agent_state_delta"] = std::move(deltas);
  j["visitation"] = VectorToJson(cert.visitation);
  j["delta_star"] = cert.delta_star;
  j["radius"] = cert.radius;
  j["optimal_margin_error"] = cert.optimal_margin_error;
  j["perturbed_visitation_positive"] = cert.perturbed_visitation_positive;
  j["num_states"] = game.num_states();
  return j;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path);
  try {
    return Json::parse(file);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kIoError, path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& text, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path);
  file << text;
  if (!file) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

void WriteJsonFile(const Json& j, const std::string& path) {
  WriteTextFile(j.dump(2) + "\n", path);
}

}  // namespace gradplay
