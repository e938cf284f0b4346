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

// Result serialization. CSV rows carry the columns
//   attack_code, qid_set, sensitive, prior_det, post_det, det_additive,
//   prior_prob, post_prob, prob_multiplicative, n_records, n_classes,
//   n_singletons, n_certain
// with probabilities printed to 12 significant digits and an undefined
// multiplicative degradation left as an empty cell. JSON additionally
// carries every exact value as a "p/q" string, so results round-trip
// losslessly. All formatting is locale-independent and byte-deterministic.

#ifndef PRIVAUDIT_REPORT_H_
#define PRIVAUDIT_REPORT_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "privaudit/attacks.h"

namespace privaudit {

// 12-significant-digit decimal rendering of a metric's double value.
std::string FormatMetric(const MetricValue& v);

void WriteResultsCsv(std::ostream& out,
                     const std::vector<AttackResult>& results);

nlohmann::json ResultToJson(const AttackResult& result);
AttackResult ResultFromJson(const nlohmann::json& j);

// Full output document: {"config_echo": ..., "results": [...],
// "timings": ... (null unless timing emission is enabled)}.
nlohmann::json ResultsToJson(const nlohmann::json& config_echo,
                             const std::vector<AttackResult>& results,
                             const nlohmann::json& timings);
std::vector<AttackResult> ResultsFromJson(const nlohmann::json& document);

// Plot-ready data for posterior-vs-QID-count scatter plots: one posterior
// point per (result, metric kind) plus one prior reference row per attack
// instance. Columns: attack_code, sensitive, metric_kind, point_kind,
// qid_count, qid_set, value.
void WritePlotDataCsv(std::ostream& out,
                      const std::vector<AttackResult>& results);

}  // namespace privaudit

#endif  // PRIVAUDIT_REPORT_H_
