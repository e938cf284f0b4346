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

// The scale path: sort-based partitioning of the aggregated dataset by a
// QID subset, with all registered attacks evaluated on a single pass over
// the sorted rows — no joint matrix or hyper is ever materialized. A
// parallel sweep runs one such pass per non-empty subset of a QID superset.
//
// Grouping is sort-based by design; the hash-based variant exists only as a
// test oracle. Rows are ordered by QID tuple (null sentinel first, then
// bytewise lexicographic on the raw values), then scanned once; per-class
// secret histograms live only while their class is open, so memory beyond
// the sort buffer is O(#classes + #distinct secret values per open class).
//
// All results come out as exact ratios of integer counts (the uniform
// record prior); explicit priors are served by the reference pipeline in
// attacks.h instead.

#ifndef PRIVAUDIT_ENGINE_H_
#define PRIVAUDIT_ENGINE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "privaudit/attacks.h"
#include "privaudit/dataset.h"

namespace privaudit {

// What one partition pass should compute.
struct PartitionRequest {
  std::vector<std::size_t> qid_columns;
  std::vector<std::size_t> secret_columns;   // unique column indices
  std::vector<std::uint32_t> target_rows;    // unique row indices
  // When set, receives every class size in scan (lexicographic) order.
  std::vector<std::uint64_t>* class_sizes = nullptr;
};

// Stats of the class containing one requested target row.
struct TargetClassStats {
  std::uint64_t class_size = 0;
  std::vector<std::uint64_t> max_count;  // per requested secret
  std::vector<std::uint64_t> distinct;   // per requested secret
};

// Aggregate facts of one partition, from which every collective metric
// follows: post_prob(secret) = sum_max / records, post_det(secret) =
// certain_records / records, re-id post_prob = classes / records and
// re-id post_det = singletons / records.
struct PartitionSummary {
  std::uint64_t records = 0;
  std::uint64_t classes = 0;
  std::uint64_t singletons = 0;
  struct SecretAggregate {
    std::uint64_t sum_max = 0;          // sum over classes of max value count
    std::uint64_t certain_records = 0;  // records in single-valued classes
  };
  std::vector<SecretAggregate> secrets;  // parallel to request.secret_columns
  std::vector<TargetClassStats> targets;  // parallel to request.target_rows
};

// Reusable per-worker buffers (sort keys, open-class histograms).
struct PassScratch;
PassScratch* NewPassScratch();
void FreePassScratch(PassScratch*);

struct PassScratchDeleter {
  void operator()(PassScratch* s) const { FreePassScratch(s); }
};

// Sorts rows by the QID tuple and scans once, accumulating the summary.
// `scratch` may be null (buffers are then allocated internally).
PartitionSummary PartitionPass(const AggregatedDataset& agg,
                               const PartitionRequest& request,
                               PassScratch* scratch = nullptr);

// Evaluates the templates on one fixed QID set (each entry "name" or
// "name@k", unqualified names binding to every origin where present).
// One partition pass serves all templates.
std::vector<AttackResult> EvaluateAttacks(
    const AggregatedDataset& agg, const std::vector<std::string>& qid_refs,
    const std::vector<AttackSpec>& attack_templates);

// A sweep over every non-empty subset of the QID superset.
struct SweepPlan {
  std::vector<std::string> qid_superset;     // entries: "name" or "name@k"
  std::size_t max_subset_size = 0;           // 0 = unlimited
  std::vector<AttackSpec> attack_templates;  // qids filled per subset
  unsigned worker_count = 0;                 // 0 = hardware concurrency
};

// Runs one partition pass per subset, in parallel. Results are ordered by
// (subset size, lexicographic attribute names) regardless of scheduling;
// identical plans give identical output for any worker count. When
// `progress` is non-null, one line per completed subset is written to it
// (subset, elapsed, classes, singletons). A worker failure aborts the
// sweep and rethrows with the failing subset named.
std::vector<AttackResult> RunSweep(const SweepPlan& plan,
                                   const AggregatedDataset& agg,
                                   std::ostream* progress = nullptr);

// Replays dataset growth: for each prefix of the collection (the focal
// dataset alone, then one auxiliary added at a time) the prefix is
// aggregated and every template evaluated on it. QID entries must resolve
// in each prefix; a reference to an attribute that only exists in a later
// dataset raises "attribute unavailable in prefix". Results carry
// prefix_datasets and are ordered by (prefix, template). Membership
// templates are not supported here.
std::vector<AttackResult> RunLongitudinalGrowth(
    const LongitudinalCollection& collection,
    const std::vector<std::string>& qid_refs,
    const std::vector<AttackSpec>& attack_templates,
    std::ostream* progress = nullptr);

}  // namespace privaudit

#endif  // PRIVAUDIT_ENGINE_H_
