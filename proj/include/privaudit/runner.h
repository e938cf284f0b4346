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

// End-to-end orchestration of one audit run:
// load -> deduplicate -> aggregate -> evaluate (single set, sweep, or
// growth) -> write result files. Identical configuration and seed produce
// byte-identical output files.

#ifndef PRIVAUDIT_RUNNER_H_
#define PRIVAUDIT_RUNNER_H_

#include <iosfwd>
#include <vector>

#include "privaudit/attacks.h"
#include "privaudit/config.h"

namespace privaudit {

struct RunOutput {
  std::vector<AttackResult> results;
  nlohmann::json document;  // populated in JSON mode
};

// Executes the run and writes the output file (plus <output>.plot.csv when
// plot data is requested). Progress and treatment notes go to `progress`
// when non-null. Throws ConfigError / DataError as appropriate.
RunOutput RunAudit(const RunConfig& config, std::ostream* progress = nullptr);

}  // namespace privaudit

#endif  // PRIVAUDIT_RUNNER_H_
