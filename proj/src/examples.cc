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

#include "privaudit/examples.h"

#include <cstdio>
#include <ostream>

#include "privaudit/attacks.h"
#include "privaudit/engine.h"

namespace privaudit {

LongitudinalCollection StudentExampleCollection() {
  LongitudinalCollection collection;
  collection.datasets.push_back(MakeTable(
      "students-year1", {"id", "age", "gender", "grade", "disability"}, "id",
      {{"1", "25", "F", "A", "no"},
       {"2", "25", "F", "A", "yes"},
       {"3", "25", "F", "C", "yes"},
       {"4", "25", "M", "B", "yes"},
       {"5", "25", "M", "B", "no"},
       {"6", "49", "F", "C", "yes"},
       {"7", "49", "F", "C", "yes"},
       {"8", "49", "F", "E", "no"},
       {"9", "49", "M", "D", "no"},
       {"10", "60", "M", "D", "no"}}));
  collection.datasets.push_back(
      MakeTable("students-year2", {"id", "age", "grade"}, "id",
                {{"1", "26", "B"},
                 {"2", "26", "A"},
                 {"3", "26", "C"},
                 {"4", "26", "B"},
                 {"5", "26", "B"},
                 {"6", "50", "D"},
                 {"7", "50", "C"},
                 {"8", "50", "E"},
                 {"9", "50", "D"},
                 {"11", "19", "A"}}));
  return collection;
}

MicrodataTable LanguageExampleTable() {
  return MakeTable("languages", {"id", "language", "gender", "age"}, "id",
                   {{"1", "English", "M", ">30"},
                    {"2", "Portuguese", "M", "<=30"},
                    {"3", "German", "F", "<=30"},
                    {"4", "German", "M", "<=30"}});
}

namespace {

class Checker {
 public:
  explicit Checker(std::ostream& out) : out_(out) {}

  void ExpectRational(const std::string& name, const MetricValue& got,
                      const Rational& want) {
    if (got.exact.has_value() && *got.exact == want) {
      out_ << "ok: " << name << " = " << want.to_string() << "\n";
    } else {
      ok_ = false;
      out_ << "FAIL: " << name << " expected " << want.to_string() << ", got "
           << (got.exact ? got.exact->to_string() : std::to_string(got.value))
           << "\n";
    }
  }

  void ExpectExact(const std::string& name, const Rational& got,
                   const Rational& want) {
    if (got == want) {
      out_ << "ok: " << name << " = " << want.to_string() << "\n";
    } else {
      ok_ = false;
      out_ << "FAIL: " << name << " expected " << want.to_string() << ", got "
           << got.to_string() << "\n";
    }
  }

  void ExpectTrue(const std::string& name, bool cond) {
    if (cond) {
      out_ << "ok: " << name << "\n";
    } else {
      ok_ = false;
      out_ << "FAIL: " << name << "\n";
    }
  }

  bool ok() const { return ok_; }

 private:
  std::ostream& out_;
  bool ok_ = true;
};

void CheckResultPair(Checker& check, const std::string& tag,
                     const AttackResult& reference, const AttackResult& fast) {
  check.ExpectTrue(tag + ": engine matches reference pipeline",
                   ResultsEqual(reference, fast));
}

}  // namespace

bool RunBuiltinExamples(std::ostream& out) {
  Checker check(out);

  const LongitudinalCollection collection = StudentExampleCollection();
  const AggregatedDataset agg =
      Aggregate(collection, JoinMode::kFocalLeftOuter);

  const std::vector<std::string> qids = {"gender@1", "grade@1", "grade@2"};

  {
    AttackSpec spec;
    spec.info = InfoAxis::kAttribute;
    spec.target = TargetAxis::kCollective;
    spec.access = AccessAxis::kLongitudinal;
    spec.sensitive = AttributeId{"disability", 1};
    for (const auto& q : qids)
      spec.qids.push_back(AttributeId{ParseAttributeRef(q).name,
                                      ParseAttributeRef(q).origin.value_or(1)});
    const AttackResult r = RunCollective(spec, agg);
    check.ExpectRational("attribute inference: prior success", r.prior_prob,
                         Rational(1, 2));
    check.ExpectRational("attribute inference: prior certainty", r.prior_det,
                         Rational(0));
    check.ExpectRational("attribute inference: posterior certainty",
                         r.post_det, Rational(4, 5));
    check.ExpectRational("attribute inference: certainty increase",
                         r.det_additive, Rational(4, 5));
    check.ExpectRational("attribute inference: posterior success", r.post_prob,
                         Rational(9, 10));
    check.ExpectTrue("attribute inference: success ratio defined",
                     r.prob_multiplicative.has_value());
    if (r.prob_multiplicative)
      check.ExpectRational("attribute inference: success ratio",
                           *r.prob_multiplicative, Rational(9, 5));
    const auto fast = EvaluateAttacks(agg, qids, {spec});
    CheckResultPair(check, "attribute inference", r, fast.at(0));
  }

  {
    AttackSpec spec;
    spec.info = InfoAxis::kReidentification;
    spec.target = TargetAxis::kCollective;
    spec.access = AccessAxis::kLongitudinal;
    for (const auto& q : qids)
      spec.qids.push_back(AttributeId{ParseAttributeRef(q).name,
                                      ParseAttributeRef(q).origin.value_or(1)});
    const AttackResult r = RunCollective(spec, agg);
    check.ExpectRational("re-identification: prior success", r.prior_prob,
                         Rational(1, 10));
    check.ExpectRational("re-identification: posterior certainty", r.post_det,
                         Rational(3, 5));
    check.ExpectRational("re-identification: posterior success", r.post_prob,
                         Rational(4, 5));
    if (r.prob_multiplicative)
      check.ExpectRational("re-identification: success ratio",
                           *r.prob_multiplicative, Rational(8));
    const auto fast = EvaluateAttacks(agg, qids, {spec});
    CheckResultPair(check, "re-identification", r, fast.at(0));
  }

  {
    // Language table, evaluated with a gain of $4 for a correct guess. The
    // zero-probability observation column (F, >30) is part of the channel
    // but drops out of the hyper.
    JointCounts counts;
    counts.secret_labels = {"English", "Portuguese", "German"};
    counts.obs_labels = {"M,<=30", "M,>30", "F,<=30", "F,>30"};
    counts.counts = {{0, 1, 0, 0}, {1, 0, 0, 0}, {1, 0, 1, 0}};
    const auto joint = JointFromCounts<Rational>(counts);
    const auto pc = DecomposeJoint(joint);
    check.ExpectTrue("language: no dropped secrets",
                     pc.dropped_secrets.empty());
    check.ExpectExact("language: prior of most common language",
                      BayesVulnerability(pc.prior), Rational(1, 2));
    const auto hyper = HyperFrom(pc.prior, pc.channel);
    check.ExpectTrue("language: zero-probability observation omitted",
                     hyper.obs_labels.size() == 3);
    check.ExpectTrue(
        "language: outer probabilities are 1/2, 1/4, 1/4",
        hyper.outer == std::vector<Rational>({Rational(1, 2), Rational(1, 4),
                                              Rational(1, 4)}));
    check.ExpectExact("language: posterior success",
                      PosteriorBayesVulnerability(hyper), Rational(3, 4));
    const auto gain =
        GainFunction<Rational>::Identity(counts.secret_labels).Scaled(
            Rational(4));
    check.ExpectExact("language: expected gain before observation ($)",
                      GVulnerability(pc.prior, gain), Rational(2));
    check.ExpectExact("language: expected gain after observation ($)",
                      PosteriorGVulnerability(hyper, gain), Rational(3));

    // Same figures via the dataset route.
    LongitudinalCollection lang;
    lang.datasets.push_back(LanguageExampleTable());
    const AggregatedDataset lang_agg =
        Aggregate(lang, JoinMode::kFocalLeftOuter);
    AttackSpec spec;
    spec.info = InfoAxis::kAttribute;
    spec.target = TargetAxis::kCollective;
    spec.access = AccessAxis::kSingle;
    spec.sensitive = AttributeId{"language", 1};
    spec.qids = {AttributeId{"gender", 1}, AttributeId{"age", 1}};
    const AttackResult r = RunCollective(spec, lang_agg);
    check.ExpectRational("language: posterior success via projection",
                         r.post_prob, Rational(3, 4));
  }

  {
    const Rational v = UniformPriorVulnerability(49491319);
    check.ExpectExact("uniform prior over 49,491,319 records", v,
                      Rational(1, 49491319));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v.to_double() * 100.0);
    check.ExpectTrue("uniform prior prints as 0.000002%",
                     std::string(buf) == "0.000002");
  }

  return check.ok();
}

}  // namespace privaudit
