//
// Copyright 2026 The privaudit Authors
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
//

#include "privaudit/config.h"

#include <algorithm>
#include <fstream>

#include "privaudit/attacks.h"
#include "privaudit/errors.h"

namespace privaudit {

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return std::string();
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError(key + " must be on or off, got '" + value + "'");
}

std::uint64_t ParseU64(const std::string& key, const std::string& value) {
  const bool digits_only =
      !value.empty() && value.size() <= 20 &&
      std::all_of(value.begin(), value.end(),
                  [](unsigned char c) { return std::isdigit(c); });
  if (digits_only) {
    try {
      return static_cast<std::uint64_t>(std::stoull(value));
    } catch (const std::exception&) {
      // falls through to the error below on out-of-range values
    }
  }
  throw ConfigError(key + " must be a non-negative integer, got '" + value +
                    "'");
}

}  // namespace

void ApplyConfigValue(RunConfig& config, const std::string& key,
                      const std::string& value) {
  if (key == "focal") {
    config.focal = value;
  } else if (key == "auxiliary") {
    config.auxiliaries.push_back(value);
  } else if (key == "id_column") {
    config.id_column = value;
  } else if (key == "delimiter") {
    config.delimiter = value;
  } else if (key == "qid") {
    config.qids.push_back(value);
  } else if (key == "sensitive") {
    config.sensitive.push_back(value);
  } else if (key == "attack") {
    config.attacks.push_back(value);
  } else if (key == "sweep") {
    config.sweep = ParseBool(key, value);
  } else if (key == "growth") {
    config.growth = ParseBool(key, value);
  } else if (key == "max_qids") {
    config.max_qids = static_cast<int>(ParseU64(key, value));
  } else if (key == "seed") {
    config.seed = ParseU64(key, value);
  } else if (key == "threads") {
    config.threads = static_cast<int>(ParseU64(key, value));
  } else if (key == "output") {
    config.output = value;
  } else if (key == "format") {
    config.format = value;
  } else if (key == "emit_plot_data") {
    config.emit_plot_data = ParseBool(key, value);
  } else if (key == "emit_timings") {
    config.emit_timings = ParseBool(key, value);
  } else if (key == "target_id") {
    config.target_id = value;
  } else if (key == "population") {
    config.population = value;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

RunConfig ParseConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = Trim(trimmed.substr(0, eq));
    const std::string value = Trim(trimmed.substr(eq + 1));
    try {
      ApplyConfigValue(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return config;
}

void ValidateConfig(const RunConfig& config) {
  if (config.focal.empty()) throw ConfigError("focal dataset path is required");
  if (config.id_column.empty()) throw ConfigError("id_column is required");
  if (config.output.empty()) throw ConfigError("output path is required");
  if (config.delimiter.size() != 1)
    throw ConfigError("delimiter must be a single character");
  if (config.format != "csv" && config.format != "json")
    throw ConfigError("format must be csv or json, got '" + config.format +
                      "'");
  if (config.attacks.empty())
    throw ConfigError("at least one attack code is required");
  if (config.max_qids < 0) throw ConfigError("max_qids must be >= 0");
  if (config.threads < 0) throw ConfigError("threads must be >= 0");
  if (config.sweep && config.growth)
    throw ConfigError("sweep and growth are mutually exclusive");
  if (config.sweep && config.qids.empty())
    throw ConfigError("a sweep needs at least one qid");

  for (const std::string& code : config.attacks) {
    const auto axes = ParseAttackCode(code);
    if (!axes)
      throw ConfigError("unknown attack code '" + code +
                        "' (expected one of the 12 taxonomy cells, e.g. CAL, "
                        "CRS, IMS)");
    if (axes->access == AccessAxis::kLongitudinal &&
        config.auxiliaries.empty())
      throw ConfigError("attack " + code +
                        " is longitudinal and needs at least one auxiliary "
                        "dataset");
    if (axes->info == InfoAxis::kAttribute && config.sensitive.empty())
      throw ConfigError("attack " + code +
                        " infers an attribute; name it with 'sensitive'");
    if (axes->target == TargetAxis::kIndividual && config.target_id.empty())
      throw ConfigError("attack " + code +
                        " targets an individual; set target_id");
    if (axes->info == InfoAxis::kMembership) {
      if (config.growth)
        throw ConfigError("growth runs do not support membership attacks");
      if (axes->access == AccessAxis::kSingle && config.population.empty())
        throw ConfigError(
            "attack " + code +
            " needs a universe beyond the focal dataset: give a population "
            "file (or use the longitudinal variant with auxiliaries)");
    }
    if (config.growth && axes->access != AccessAxis::kLongitudinal)
      throw ConfigError("growth runs take longitudinal attack codes only");
  }
  if (config.growth && config.auxiliaries.empty())
    throw ConfigError("growth needs at least one auxiliary dataset");
}

nlohmann::json ConfigEcho(const RunConfig& config) {
  nlohmann::json j;
  j["focal"] = config.focal;
  j["auxiliary"] = config.auxiliaries;
  j["id_column"] = config.id_column;
  j["delimiter"] = config.delimiter;
  j["qid"] = config.qids;
  j["sensitive"] = config.sensitive;
  j["attack"] = config.attacks;
  j["sweep"] = config.sweep;
  j["growth"] = config.growth;
  j["max_qids"] = config.max_qids;
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  j["output"] = config.output;
  j["format"] = config.format;
  j["emit_plot_data"] = config.emit_plot_data;
  j["emit_timings"] = config.emit_timings;
  j["target_id"] = config.target_id;
  j["population"] = config.population;
  return j;
}

}  // namespace privaudit
