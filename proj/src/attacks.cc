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

#include "privaudit/attacks.h"

#include <algorithm>
#include <unordered_map>

#include "privaudit/errors.h"

namespace privaudit {

std::string AttackCode(const AttackAxes& axes) {
  std::string code(3, '?');
  code[0] = axes.target == TargetAxis::kIndividual ? 'I' : 'C';
  switch (axes.info) {
    case InfoAxis::kMembership:
      code[1] = 'M';
      break;
    case InfoAxis::kReidentification:
      code[1] = 'R';
      break;
    case InfoAxis::kAttribute:
      code[1] = 'A';
      break;
  }
  code[2] = axes.access == AccessAxis::kSingle ? 'S' : 'L';
  return code;
}

std::optional<AttackAxes> ParseAttackCode(const std::string& code) {
  if (code.size() != 3) return std::nullopt;
  AttackAxes axes;
  switch (code[0]) {
    case 'I':
      axes.target = TargetAxis::kIndividual;
      break;
    case 'C':
      axes.target = TargetAxis::kCollective;
      break;
    default:
      return std::nullopt;
  }
  switch (code[1]) {
    case 'M':
      axes.info = InfoAxis::kMembership;
      break;
    case 'R':
      axes.info = InfoAxis::kReidentification;
      break;
    case 'A':
      axes.info = InfoAxis::kAttribute;
      break;
    default:
      return std::nullopt;
  }
  switch (code[2]) {
    case 'S':
      axes.access = AccessAxis::kSingle;
      break;
    case 'L':
      axes.access = AccessAxis::kLongitudinal;
      break;
    default:
      return std::nullopt;
  }
  return axes;
}

// Joined with ';' so the string stays a single field in comma-separated
// output.
std::string AttackResult::qid_set() const {
  std::vector<std::string> names;
  names.reserve(spec.qids.size());
  for (const auto& q : spec.qids) names.push_back(QualifiedName(q));
  std::sort(names.begin(), names.end());
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out.push_back(';');
    out.append(names[i]);
  }
  return out;
}

bool ResultsEqual(const AttackResult& a, const AttackResult& b) {
  const auto opt_eq = [](const std::optional<MetricValue>& x,
                         const std::optional<MetricValue>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x.has_value() || *x == *y;
  };
  return a.spec.code() == b.spec.code() && a.qid_set() == b.qid_set() &&
         a.spec.sensitive == b.spec.sensitive &&
         a.spec.target_id == b.spec.target_id &&
         a.prefix_datasets == b.prefix_datasets &&
         a.prior_det == b.prior_det && a.post_det == b.post_det &&
         a.det_additive == b.det_additive && a.prior_prob == b.prior_prob &&
         a.post_prob == b.post_prob &&
         opt_eq(a.prob_multiplicative, b.prob_multiplicative) &&
         a.n_records == b.n_records && a.n_classes == b.n_classes &&
         a.n_singletons == b.n_singletons && a.n_certain == b.n_certain;
}

void ValidateSpec(const AttackSpec& spec, const AggregatedDataset& agg) {
  if ((spec.info == InfoAxis::kAttribute) != spec.sensitive.has_value())
    throw std::invalid_argument(
        "sensitive attribute must be given exactly for attribute-inference "
        "attacks");
  if ((spec.target == TargetAxis::kIndividual) != spec.target_id.has_value())
    throw std::invalid_argument(
        "target id must be given exactly for individual-target attacks");
  if (spec.access == AccessAxis::kLongitudinal && agg.dataset_count < 2)
    throw std::invalid_argument(
        "longitudinal attacks need at least 2 datasets in the collection");
  if (spec.access == AccessAxis::kSingle && agg.dataset_count != 1)
    throw std::invalid_argument(
        "single-dataset attacks must not join auxiliary datasets");
  const JoinMode wanted = spec.info == InfoAxis::kMembership
                              ? JoinMode::kFullOuter
                              : JoinMode::kFocalLeftOuter;
  if (agg.mode != wanted)
    throw std::invalid_argument(
        spec.info == InfoAxis::kMembership
            ? "membership attacks run on a full-outer aggregate"
            : "re-identification and attribute attacks run on a "
              "focal-left-outer aggregate");
  if (spec.prior_mode == PriorMode::kExplicit && !spec.explicit_prior)
    throw std::invalid_argument("explicit prior mode without a prior");
}

BuiltSecret BuildSecret(const AttackSpec& spec, const AggregatedDataset& agg) {
  ValidateSpec(spec, agg);
  std::size_t column = 0;
  std::string description;
  switch (spec.info) {
    case InfoAxis::kAttribute: {
      const auto found = agg.Find(*spec.sensitive);
      if (!found)
        throw std::invalid_argument("unknown sensitive attribute '" +
                                    QualifiedName(*spec.sensitive) + "'");
      column = *found;
      description = QualifiedName(*spec.sensitive);
      break;
    }
    case InfoAxis::kReidentification: {
      column = agg.id_column;
      description = QualifiedName(agg.columns[column].id);
      break;
    }
    case InfoAxis::kMembership: {
      const auto found = agg.Find(AttributeId{kMembershipAttribute, 1});
      if (!found)
        throw std::invalid_argument(
            "aggregate lacks the derived membership attribute");
      column = *found;
      description = kMembershipAttribute + "@1";
      break;
    }
  }
  for (const auto& q : spec.qids) {
    const auto qcol = agg.Find(q);
    if (!qcol)
      throw std::invalid_argument("unknown attribute '" + QualifiedName(q) +
                                  "'");
    if (*qcol == column)
      throw std::invalid_argument("secret leaks through observation: '" +
                                  QualifiedName(q) + "'");
  }
  return BuiltSecret{column, std::move(description)};
}

namespace {

std::vector<std::size_t> ResolveQids(const AttackSpec& spec,
                                     const AggregatedDataset& agg) {
  std::vector<std::size_t> cols;
  cols.reserve(spec.qids.size());
  for (const auto& q : spec.qids) {
    const auto found = agg.Find(q);
    if (!found)
      throw std::invalid_argument("unknown attribute '" + QualifiedName(q) +
                                  "'");
    cols.push_back(*found);
  }
  return cols;
}

struct ClassFacts {
  std::uint64_t total = 0;
  std::uint64_t classes = 0;
  std::uint64_t singletons = 0;
  std::vector<std::uint64_t> class_totals;  // per observation column
};

ClassFacts FactsFromCounts(const JointCounts& counts) {
  ClassFacts f;
  f.classes = counts.obs_labels.size();
  f.class_totals.assign(counts.obs_labels.size(), 0);
  for (const auto& row : counts.counts)
    for (std::size_t y = 0; y < row.size(); ++y) f.class_totals[y] += row[y];
  for (std::uint64_t t : f.class_totals) {
    f.total += t;
    if (t == 1) ++f.singletons;
  }
  return f;
}

// Records in hyper columns whose posterior is a point mass. Works for both
// scalar paths; the class size comes from the counts.
template <typename S>
std::uint64_t CertainRecords(const Hyper<S>& hyper, const JointCounts& counts,
                             const ClassFacts& facts) {
  std::unordered_map<std::string, std::size_t> obs_index;
  obs_index.reserve(counts.obs_labels.size());
  for (std::size_t y = 0; y < counts.obs_labels.size(); ++y)
    obs_index.emplace(counts.obs_labels[y], y);
  std::uint64_t certain = 0;
  for (std::size_t y = 0; y < hyper.outer.size(); ++y) {
    S best = hyper.posteriors[y][0];
    for (const S& p : hyper.posteriors[y])
      if (best < p) best = p;
    if (ScalarPolicy<S>::IsPointMassMax(best))
      certain += facts.class_totals[obs_index.at(hyper.obs_labels[y])];
  }
  return certain;
}

struct Metrics {
  MetricValue prior_det, post_det, det_additive, prior_prob, post_prob;
  std::optional<MetricValue> prob_multiplicative;
};

template <typename S>
MetricValue ToMetric(const S& v);
template <>
MetricValue ToMetric<Rational>(const Rational& v) {
  return MetricValue::FromRational(v);
}
template <>
MetricValue ToMetric<double>(const double& v) {
  return MetricValue::FromDouble(v);
}

template <typename S>
Metrics CollectiveMetrics(const Distribution<S>& prior, const Hyper<S>& hyper) {
  Metrics m;
  const S prior_prob = BayesVulnerability(prior);
  const S post_prob = PosteriorBayesVulnerability(hyper);
  const S prior_det = DeterministicPriorSuccess(prior);
  const S post_det = DeterministicSuccess(hyper);
  m.prior_prob = ToMetric(prior_prob);
  m.post_prob = ToMetric(post_prob);
  m.prior_det = ToMetric(prior_det);
  m.post_det = ToMetric(post_det);
  m.det_additive = ToMetric(
      *Degradation(prior_det, post_det, DegradationMode::kAdditive));
  const auto ratio =
      Degradation(prior_prob, post_prob, DegradationMode::kMultiplicative);
  if (ratio) m.prob_multiplicative = ToMetric(*ratio);
  return m;
}

// Metrics conditioned on one posterior (the target's observation).
template <typename S>
Metrics IndividualMetrics(const Distribution<S>& prior, const Hyper<S>& hyper,
                          std::size_t obs) {
  Metrics m;
  const S prior_prob = BayesVulnerability(prior);
  const S prior_det = DeterministicPriorSuccess(prior);
  S best = hyper.posteriors[obs][0];
  for (const S& p : hyper.posteriors[obs])
    if (best < p) best = p;
  const S post_prob = best;
  const S post_det = ScalarPolicy<S>::IsPointMassMax(best)
                         ? ScalarPolicy<S>::One()
                         : ScalarPolicy<S>::Zero();
  m.prior_prob = ToMetric(prior_prob);
  m.post_prob = ToMetric(post_prob);
  m.prior_det = ToMetric(prior_det);
  m.post_det = ToMetric(post_det);
  m.det_additive = ToMetric(
      *Degradation(prior_det, post_det, DegradationMode::kAdditive));
  const auto ratio =
      Degradation(prior_prob, post_prob, DegradationMode::kMultiplicative);
  if (ratio) m.prob_multiplicative = ToMetric(*ratio);
  return m;
}

// Pipeline state shared by the collective and individual entry points.
template <typename S>
struct Pipeline {
  JointCounts counts;
  ClassFacts facts;
  Distribution<S> prior;
  Hyper<S> hyper;
};

template <typename S>
Pipeline<S> BuildPipeline(const AttackSpec& spec, const AggregatedDataset& agg,
                          const Distribution<S>* override_prior) {
  const BuiltSecret secret = BuildSecret(spec, agg);
  JointCounts counts = ProjectCounts(agg, secret.column, ResolveQids(spec, agg));
  ClassFacts facts = FactsFromCounts(counts);
  const JointDistribution<S> joint = JointFromCounts<S>(counts);
  PriorChannel<S> pc = DecomposeJoint(joint);
  Distribution<S> prior = std::move(pc.prior);
  if (override_prior != nullptr) {
    // The adversary's own prior replaces the dataset marginal; it must
    // cover exactly the occurring secret values.
    if (override_prior->labels() != pc.channel.secret_labels()) {
      std::vector<S> reordered;
      reordered.reserve(pc.channel.secret_labels().size());
      for (const auto& label : pc.channel.secret_labels()) {
        const auto idx = override_prior->IndexOf(label);
        if (!idx)
          throw std::invalid_argument(
              "explicit prior does not cover secret value '" + label + "'");
        reordered.push_back(override_prior->mass()[*idx]);
      }
      if (override_prior->size() != pc.channel.secret_labels().size())
        throw std::invalid_argument(
            "explicit prior has mass outside the secret domain");
      prior = Distribution<S>(pc.channel.secret_labels(), std::move(reordered));
    } else {
      prior = *override_prior;
    }
  }
  Hyper<S> hyper = HyperFrom(prior, pc.channel);
  return Pipeline<S>{std::move(counts), std::move(facts), std::move(prior),
                     std::move(hyper)};
}

template <typename S>
AttackResult FinishResult(const AttackSpec& spec, Pipeline<S>& p,
                          const Metrics& m) {
  AttackResult r;
  r.spec = spec;
  r.prior_det = m.prior_det;
  r.post_det = m.post_det;
  r.det_additive = m.det_additive;
  r.prior_prob = m.prior_prob;
  r.post_prob = m.post_prob;
  r.prob_multiplicative = m.prob_multiplicative;
  r.n_records = p.facts.total;
  r.n_classes = p.facts.classes;
  r.n_singletons = p.facts.singletons;
  r.n_certain = CertainRecords(p.hyper, p.counts, p.facts);
  return r;
}

std::size_t TargetObservation(const AttackSpec& spec,
                              const AggregatedDataset& agg,
                              const std::vector<std::string>& obs_labels) {
  const auto row = agg.RowOfId(*spec.target_id);
  if (!row)
    throw DataError("unknown target id '" + *spec.target_id + "'");
  std::vector<std::string> cells;
  cells.reserve(spec.qids.size());
  for (const auto& q : spec.qids) {
    const auto col = agg.Find(q);
    cells.push_back(agg.columns[*col].dict[agg.columns[*col].codes[*row]]);
  }
  const std::string label = TupleLabel(cells);
  for (std::size_t y = 0; y < obs_labels.size(); ++y)
    if (obs_labels[y] == label) return y;
  throw std::invalid_argument(
      "target observation has zero probability under the prior");
}

}  // namespace

AttackResult RunCollective(const AttackSpec& spec,
                           const AggregatedDataset& agg) {
  if (spec.target != TargetAxis::kCollective)
    throw std::invalid_argument("RunCollective needs a collective-target spec");
  if (spec.prior_mode == PriorMode::kExplicit) {
    if (!spec.explicit_prior)
      throw std::invalid_argument("explicit prior mode without a prior");
    Pipeline<double> p =
        BuildPipeline<double>(spec, agg, &*spec.explicit_prior);
    const Metrics m = CollectiveMetrics(p.prior, p.hyper);
    return FinishResult(spec, p, m);
  }
  Pipeline<Rational> p = BuildPipeline<Rational>(spec, agg, nullptr);
  const Metrics m = CollectiveMetrics(p.prior, p.hyper);
  return FinishResult(spec, p, m);
}

AttackResult RunIndividual(const AttackSpec& spec,
                           const AggregatedDataset& agg) {
  if (spec.target != TargetAxis::kIndividual)
    throw std::invalid_argument("RunIndividual needs an individual-target spec");
  if (spec.prior_mode == PriorMode::kExplicit) {
    if (!spec.explicit_prior)
      throw std::invalid_argument("explicit prior mode without a prior");
    Pipeline<double> p =
        BuildPipeline<double>(spec, agg, &*spec.explicit_prior);
    const std::size_t y = TargetObservation(spec, agg, p.hyper.obs_labels);
    const Metrics m = IndividualMetrics(p.prior, p.hyper, y);
    return FinishResult(spec, p, m);
  }
  Pipeline<Rational> p = BuildPipeline<Rational>(spec, agg, nullptr);
  const std::size_t y = TargetObservation(spec, agg, p.hyper.obs_labels);
  const Metrics m = IndividualMetrics(p.prior, p.hyper, y);
  return FinishResult(spec, p, m);
}

}  // namespace privaudit
