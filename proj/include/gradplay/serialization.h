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

#ifndef GRADPLAY_SERIALIZATION_H_
#define GRADPLAY_SERIALIZATION_H_

#include <string>

#include <Eigen/Dense>
#include "json.hpp"

#include "gradplay/game.h"
#include "gradplay/ne_analysis.h"

namespace gradplay {

using Json = nlohmann::json;

Json GameSpecToJson(const GameSpec& spec);
GameSpec GameSpecFromJson(const Json& j);

Json PolicyToJson(const Policy& policy);
PolicyTable PolicyTableFromJson(const Json& j);
Policy PolicyFromJson(const Game& game, const Json& j);

Json MatrixToJson(const Eigen::MatrixXd& m);
Json VectorToJson(const Eigen::VectorXd& v);

Json CertificateToJson(const Game& game, const StrictNeCertificate& cert);

Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const Json& j, const std::string& path);
void WriteTextFile(const std::string& text, const std::string& path);

}  // namespace gradplay

#endif  // GRADPLAY_SERIALIZATION_H_
