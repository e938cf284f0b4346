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

// Run configuration: a flat key = value file with repeatable keys for the
// list-valued settings (auxiliary, qid, sensitive, attack). Every key can
// be overridden by the same-named command-line flag, so a checked-in config
// file fully reproduces a run.

#ifndef PRIVAUDIT_CONFIG_H_
#define PRIVAUDIT_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace privaudit {

struct RunConfig {
  std::string focal;                     // focal dataset path (required)
  std::vector<std::string> auxiliaries;  // auxiliary dataset paths, in order
  std::string id_column;                 // persistent id attribute (required)
  std::string delimiter = ",";           // single input/output delimiter char
  std::vector<std::string> qids;         // "name" or "name@origin"
  std::vector<std::string> sensitive;    // sensitive attributes (A codes)
  std::vector<std::string> attacks;      // taxonomy codes: CAL, CRS, IMS, ...
  bool sweep = false;                    // all non-empty QID subsets
  bool growth = false;                   // re-attack per collection prefix
  int max_qids = 0;                      // subset size cap; 0 = unlimited
  std::uint64_t seed = 0;                // treatment RNG seed
  int threads = 0;                       // sweep workers; 0 = hardware
  std::string output;                    // result file path (required)
  std::string format = "csv";            // csv | json
  bool emit_plot_data = false;           // also write <output>.plot.csv
  bool emit_timings = false;             // include timings in JSON output
  std::string target_id;                 // individual-target id (I codes)
  std::string population;                // universe file for membership codes
};

// Applies one key/value pair. List-valued keys append. Unknown keys and
// malformed values raise ConfigError.
void ApplyConfigValue(RunConfig& config, const std::string& key,
                      const std::string& value);

// Parses the flat key = value format ('#' starts a comment).
RunConfig ParseConfigFile(const std::string& path);

// Structural validation of a complete configuration; raises ConfigError.
void ValidateConfig(const RunConfig& config);

// The configuration as echoed into JSON output.
nlohmann::json ConfigEcho(const RunConfig& config);

}  // namespace privaudit

#endif  // PRIVAUDIT_CONFIG_H_
