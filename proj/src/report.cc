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

#include "privaudit/report.h"

#include <charconv>
#include <ostream>
#include <unordered_set>

#include "privaudit/errors.h"

namespace privaudit {

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

// CSV fields here are codes, attribute names and numbers; there is no
// quoting, so a stray delimiter inside a name is rejected rather than
// silently corrupting the table.
void EmitField(std::ostream& out, const std::string& field) {
  if (field.find(',') != std::string::npos ||
      field.find('\n') != std::string::npos)
    throw DataError("value not representable in CSV output: '" + field +
                    "' (use JSON output)");
  out << field;
}

std::string SensitiveName(const AttackResult& r) {
  return r.spec.sensitive ? QualifiedName(*r.spec.sensitive) : std::string();
}

}  // namespace

std::string FormatMetric(const MetricValue& v) { return FormatDouble(v.value); }

void WriteResultsCsv(std::ostream& out,
                     const std::vector<AttackResult>& results) {
  out << "attack_code,qid_set,sensitive,prior_det,post_det,det_additive,"
         "prior_prob,post_prob,prob_multiplicative,n_records,n_classes,"
         "n_singletons,n_certain\n";
  for (const AttackResult& r : results) {
    EmitField(out, r.spec.code());
    out << ',';
    EmitField(out, r.qid_set());
    out << ',';
    EmitField(out, SensitiveName(r));
    out << ',' << FormatMetric(r.prior_det) << ',' << FormatMetric(r.post_det)
        << ',' << FormatMetric(r.det_additive) << ','
        << FormatMetric(r.prior_prob) << ',' << FormatMetric(r.post_prob)
        << ',';
    if (r.prob_multiplicative) out << FormatMetric(*r.prob_multiplicative);
    out << ',' << r.n_records << ',' << r.n_classes << ',' << r.n_singletons
        << ',' << r.n_certain << '\n';
  }
}

namespace {

void MetricToJson(nlohmann::json& j, const std::string& key,
                  const MetricValue& v) {
  j[key] = v.value;
  if (v.exact) j[key + "_exact"] = v.exact->to_string();
}

MetricValue MetricFromJson(const nlohmann::json& j, const std::string& key) {
  MetricValue v;
  v.value = j.at(key).get<double>();
  const auto exact = j.find(key + "_exact");
  if (exact != j.end()) v.exact = Rational::Parse(exact->get<std::string>());
  return v;
}

}  // namespace

nlohmann::json ResultToJson(const AttackResult& r) {
  nlohmann::json j;
  j["attack_code"] = r.spec.code();
  nlohmann::json qids = nlohmann::json::array();
  {
    std::vector<std::string> names;
    for (const auto& q : r.spec.qids) names.push_back(QualifiedName(q));
    std::sort(names.begin(), names.end());
    for (auto& n : names) qids.push_back(n);
  }
  j["qids"] = std::move(qids);
  j["sensitive"] =
      r.spec.sensitive ? nlohmann::json(QualifiedName(*r.spec.sensitive))
                       : nlohmann::json(nullptr);
  j["target_id"] = r.spec.target_id ? nlohmann::json(*r.spec.target_id)
                                    : nlohmann::json(nullptr);
  if (r.prefix_datasets > 0) j["prefix_datasets"] = r.prefix_datasets;
  MetricToJson(j, "prior_det", r.prior_det);
  MetricToJson(j, "post_det", r.post_det);
  MetricToJson(j, "det_additive", r.det_additive);
  MetricToJson(j, "prior_prob", r.prior_prob);
  MetricToJson(j, "post_prob", r.post_prob);
  if (r.prob_multiplicative) {
    MetricToJson(j, "prob_multiplicative", *r.prob_multiplicative);
  } else {
    j["prob_multiplicative"] = nullptr;
  }
  j["n_records"] = r.n_records;
  j["n_classes"] = r.n_classes;
  j["n_singletons"] = r.n_singletons;
  j["n_certain"] = r.n_certain;
  return j;
}

AttackResult ResultFromJson(const nlohmann::json& j) {
  AttackResult r;
  const auto axes = ParseAttackCode(j.at("attack_code").get<std::string>());
  if (!axes)
    throw std::invalid_argument("bad attack code in JSON: " +
                                j.at("attack_code").get<std::string>());
  r.spec.info = axes->info;
  r.spec.target = axes->target;
  r.spec.access = axes->access;
  for (const auto& q : j.at("qids")) {
    const AttributeRef ref = ParseAttributeRef(q.get<std::string>());
    r.spec.qids.push_back(AttributeId{ref.name, ref.origin.value_or(1)});
  }
  if (!j.at("sensitive").is_null()) {
    const AttributeRef ref =
        ParseAttributeRef(j.at("sensitive").get<std::string>());
    r.spec.sensitive = AttributeId{ref.name, ref.origin.value_or(1)};
  }
  if (!j.at("target_id").is_null())
    r.spec.target_id = j.at("target_id").get<std::string>();
  if (j.contains("prefix_datasets"))
    r.prefix_datasets = j.at("prefix_datasets").get<int>();
  r.prior_det = MetricFromJson(j, "prior_det");
  r.post_det = MetricFromJson(j, "post_det");
  r.det_additive = MetricFromJson(j, "det_additive");
  r.prior_prob = MetricFromJson(j, "prior_prob");
  r.post_prob = MetricFromJson(j, "post_prob");
  if (!j.at("prob_multiplicative").is_null())
    r.prob_multiplicative = MetricFromJson(j, "prob_multiplicative");
  r.n_records = j.at("n_records").get<std::uint64_t>();
  r.n_classes = j.at("n_classes").get<std::uint64_t>();
  r.n_singletons = j.at("n_singletons").get<std::uint64_t>();
  r.n_certain = j.at("n_certain").get<std::uint64_t>();
  return r;
}

nlohmann::json ResultsToJson(const nlohmann::json& config_echo,
                             const std::vector<AttackResult>& results,
                             const nlohmann::json& timings) {
  nlohmann::json doc;
  doc["config_echo"] = config_echo;
  nlohmann::json arr = nlohmann::json::array();
  for (const AttackResult& r : results) arr.push_back(ResultToJson(r));
  doc["results"] = std::move(arr);
  doc["timings"] = timings;
  return doc;
}

std::vector<AttackResult> ResultsFromJson(const nlohmann::json& document) {
  std::vector<AttackResult> out;
  for (const auto& j : document.at("results")) out.push_back(ResultFromJson(j));
  return out;
}

void WritePlotDataCsv(std::ostream& out,
                      const std::vector<AttackResult>& results) {
  out << "attack_code,sensitive,metric_kind,point_kind,qid_count,qid_set,"
         "value\n";
  // One prior reference line per attack instance, then the posterior cloud.
  std::unordered_set<std::string> seen;
  for (const AttackResult& r : results) {
    const std::string instance = r.spec.code() + "|" + SensitiveName(r);
    if (!seen.insert(instance).second) continue;
    EmitField(out, r.spec.code());
    out << ',';
    EmitField(out, SensitiveName(r));
    out << ",deterministic,prior,0,," << FormatMetric(r.prior_det) << '\n';
    EmitField(out, r.spec.code());
    out << ',';
    EmitField(out, SensitiveName(r));
    out << ",probabilistic,prior,0,," << FormatMetric(r.prior_prob) << '\n';
  }
  for (const AttackResult& r : results) {
    for (int kind = 0; kind < 2; ++kind) {
      EmitField(out, r.spec.code());
      out << ',';
      EmitField(out, SensitiveName(r));
      out << ',' << (kind == 0 ? "deterministic" : "probabilistic")
          << ",posterior," << r.spec.qids.size() << ',';
      EmitField(out, r.qid_set());
      out << ',' << FormatMetric(kind == 0 ? r.post_det : r.post_prob) << '\n';
    }
  }
}

}  // namespace privaudit
