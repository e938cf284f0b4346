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

// Attack taxonomy and the reference evaluation pipeline.
//
// An attack is classified along three orthogonal axes: the information
// sought (membership / re-identification / attribute inference), the target
// (a fixed individual / the collective), and the dataset access (a single
// release / a longitudinal collection). Three-letter codes name the cells:
// target + info + access, e.g. "CAL" is a collective attribute-inference
// attack on a longitudinal collection, "IRS" targets one individual for
// re-identification in a single release.
//
// The classical models map onto cells as prosecutor = IRS, marketer = CRS,
// journalist = IMS. The journalist mapping is the loosest of the three:
// that model is often described as re-identification of a target whose
// presence is uncertain, whereas IMS here is purely the membership
// question over the full universe (presence/absence is itself the secret,
// and absence is a legitimate answer). Run IMS and IRS together when both
// facets matter.
//
// Re-identification and membership reduce to attribute inference with the
// secret being, respectively, the record id and a derived presence flag;
// this module constructs those secret columns and runs the generic
// prior -> channel -> hyper pipeline from core.h. The evaluation here
// favors clarity over throughput; engine.h holds the equivalent
// single-pass counting path used at scale.

#ifndef PRIVAUDIT_ATTACKS_H_
#define PRIVAUDIT_ATTACKS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privaudit/core.h"
#include "privaudit/dataset.h"

namespace privaudit {

enum class InfoAxis { kMembership, kReidentification, kAttribute };
enum class TargetAxis { kIndividual, kCollective };
enum class AccessAxis { kSingle, kLongitudinal };
enum class PriorMode { kUniformRecords, kExplicit };

struct AttackAxes {
  InfoAxis info;
  TargetAxis target;
  AccessAxis access;
};

// "CAL", "IRS", ... Parse returns nullopt for anything but the 12 codes.
std::string AttackCode(const AttackAxes& axes);
std::optional<AttackAxes> ParseAttackCode(const std::string& code);

struct AttackSpec {
  InfoAxis info = InfoAxis::kAttribute;
  TargetAxis target = TargetAxis::kCollective;
  AccessAxis access = AccessAxis::kSingle;
  std::vector<AttributeId> qids;
  std::optional<AttributeId> sensitive;    // attribute axis only
  std::optional<std::string> target_id;    // individual axis only (raw value)
  PriorMode prior_mode = PriorMode::kUniformRecords;
  // Explicit adversary prior over the secret domain (channel labels).
  // Selects the floating-point evaluation path.
  std::optional<Distribution<double>> explicit_prior;

  AttackAxes axes() const { return AttackAxes{info, target, access}; }
  std::string code() const { return AttackCode(axes()); }
};

// A vulnerability or degradation figure. Under the default uniform record
// prior every figure is an exact ratio of integer counts and `exact` is
// set; `value` is always usable as its double rendering.
struct MetricValue {
  double value = 0.0;
  std::optional<Rational> exact;

  static MetricValue FromRational(const Rational& r) {
    return MetricValue{r.to_double(), r};
  }
  static MetricValue FromDouble(double v) { return MetricValue{v, std::nullopt}; }

  friend bool operator==(const MetricValue& a, const MetricValue& b) {
    if (a.exact.has_value() != b.exact.has_value()) return false;
    if (a.exact.has_value()) return *a.exact == *b.exact;
    return a.value == b.value;
  }
};

struct AttackResult {
  AttackSpec spec;          // echo, with qids resolved
  int prefix_datasets = 0;  // growth runs only: datasets joined; 0 = n/a

  MetricValue prior_det;
  MetricValue post_det;
  MetricValue det_additive;
  MetricValue prior_prob;
  MetricValue post_prob;
  // Undefined (reported as null) when the prior is zero.
  std::optional<MetricValue> prob_multiplicative;

  std::uint64_t n_records = 0;
  std::uint64_t n_classes = 0;
  std::uint64_t n_singletons = 0;
  // Records sitting in classes whose posterior is a point mass; under the
  // uniform record prior, n_certain / n_records == post_det exactly.
  std::uint64_t n_certain = 0;

  std::string qid_set() const;  // semicolon-free, comma-joined names
};

bool ResultsEqual(const AttackResult& a, const AttackResult& b);

// The secret column the spec asks about: the sensitive attribute, the id
// column, or the derived presence-in-focal flag. Throws when the secret is
// among the QIDs ("secret leaks through observation") or the aggregation
// mode does not match the axis.
struct BuiltSecret {
  std::size_t column;
  std::string description;
};
BuiltSecret BuildSecret(const AttackSpec& spec, const AggregatedDataset& agg);

// Checks the structural invariants of a spec against an aggregate: the
// sensitive/target fields match the axes, the join mode matches the info
// axis, and the access axis matches the number of joined datasets.
void ValidateSpec(const AttackSpec& spec, const AggregatedDataset& agg);

// Full-pipeline evaluation for a collective attack:
// project counts -> joint -> prior and channel -> hyper -> vulnerabilities.
AttackResult RunCollective(const AttackSpec& spec,
                           const AggregatedDataset& agg);

// Individual-target evaluation: metrics conditioned on the target's
// observed QID tuple. The prior metrics are the collective prior — the
// adversary's best guess before seeing the target's observation.
AttackResult RunIndividual(const AttackSpec& spec,
                           const AggregatedDataset& agg);

}  // namespace privaudit

#endif  // PRIVAUDIT_ATTACKS_H_
