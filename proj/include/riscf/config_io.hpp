// SPDX-License-Identifier: Apache-2.0
//
// riscf: joint active/passive precoding for RIS-aided cell-free networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "riscf/model.hpp"

#include <json.hpp>

#include <string>

namespace riscf
{

// JSON mapping of ScenarioConfig. Field names follow the struct members; infinite
// Rician factors are written as the string "inf". Missing optional members keep
// their defaults, so a config file only needs dims, positions, p_max and weights.
void to_json(nlohmann::json &j, const ScenarioConfig &config);
void from_json(const nlohmann::json &j, ScenarioConfig &config);

ScenarioConfig load_config(const std::string &path);
void save_config(const ScenarioConfig &config, const std::string &path);

} // namespace riscf
