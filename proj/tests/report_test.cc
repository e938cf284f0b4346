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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "gtest/gtest.h"
#include "privaudit/config.h"
#include "privaudit/engine.h"
#include "privaudit/errors.h"
#include "privaudit/examples.h"

namespace privaudit {
namespace {

std::vector<AttackResult> WorkedResults() {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFocalLeftOuter);
  AttackSpec attr;
  attr.info = InfoAxis::kAttribute;
  attr.target = TargetAxis::kCollective;
  attr.access = AccessAxis::kLongitudinal;
  attr.sensitive = AttributeId{"disability", 1};
  AttackSpec reid = attr;
  reid.info = InfoAxis::kReidentification;
  reid.sensitive.reset();
  return EvaluateAttacks(agg, {"gender@1", "grade@1", "grade@2"},
                         {attr, reid});
}

TEST(CsvTest, WorkedExampleRow) {
  std::ostringstream out;
  WriteResultsCsv(out, WorkedResults());
  std::istringstream in(out.str());
  std::string header, cal_row, crl_row;
  std::getline(in, header);
  std::getline(in, cal_row);
  std::getline(in, crl_row);
  EXPECT_EQ(header,
            "attack_code,qid_set,sensitive,prior_det,post_det,det_additive,"
            "prior_prob,post_prob,prob_multiplicative,n_records,n_classes,"
            "n_singletons,n_certain");
  EXPECT_EQ(cal_row,
            "CAL,gender@1;grade@1;grade@2,disability@1,0,0.8,0.8,0.5,0.9,1.8,"
            "10,8,6,8");
  EXPECT_EQ(crl_row,
            "CRL,gender@1;grade@1;grade@2,,0,0.6,0.6,0.1,0.8,8,10,8,6,6");
}

TEST(CsvTest, UndefinedRatioIsEmptyCell) {
  AttackResult r = WorkedResults()[0];
  r.prob_multiplicative.reset();
  std::ostringstream out;
  WriteResultsCsv(out, {r});
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_NE(row.find(",0.9,,10,"), std::string::npos);
}

TEST(CsvTest, TwelveSignificantDigits) {
  AttackResult r = WorkedResults()[0];
  r.post_prob = MetricValue::FromRational(Rational(1, 3));
  std::ostringstream out;
  WriteResultsCsv(out, {r});
  EXPECT_NE(out.str().find("0.333333333333"), std::string::npos);
  EXPECT_EQ(FormatMetric(MetricValue::FromDouble(2.0205559682e-8)),
            "2.0205559682e-08");
}

TEST(JsonTest, RoundTripsExactly) {
  const std::vector<AttackResult> results = WorkedResults();
  nlohmann::json config_echo = {{"note", "test"}};
  const nlohmann::json doc =
      ResultsToJson(config_echo, results, nlohmann::json(nullptr));
  // Through text and back.
  const nlohmann::json reparsed = nlohmann::json::parse(doc.dump(2));
  const std::vector<AttackResult> back = ResultsFromJson(reparsed);
  ASSERT_EQ(back.size(), results.size());
  for (std::size_t i = 0; i < results.size(); ++i)
    EXPECT_TRUE(ResultsEqual(results[i], back[i])) << i;
  EXPECT_TRUE(reparsed.at("timings").is_null());
  EXPECT_EQ(reparsed.at("config_echo").at("note"), "test");

  const nlohmann::json& first = reparsed.at("results").at(0);
  EXPECT_EQ(first.at("post_prob_exact"), "9/10");
  EXPECT_EQ(first.at("post_prob").get<double>(), 0.9);
}

TEST(JsonTest, NullRatioAndIndividualFields) {
  AttackResult r = WorkedResults()[0];
  r.prob_multiplicative.reset();
  r.spec.target = TargetAxis::kIndividual;
  r.spec.target_id = "7";
  r.prefix_datasets = 3;
  const nlohmann::json j = ResultToJson(r);
  EXPECT_TRUE(j.at("prob_multiplicative").is_null());
  EXPECT_EQ(j.at("target_id"), "7");
  EXPECT_EQ(j.at("prefix_datasets"), 3);
  const AttackResult back = ResultFromJson(j);
  EXPECT_TRUE(ResultsEqual(r, back));
}

TEST(PlotDataTest, PointsAndPriorReference) {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFocalLeftOuter);
  AttackSpec attr;
  attr.info = InfoAxis::kAttribute;
  attr.target = TargetAxis::kCollective;
  attr.access = AccessAxis::kLongitudinal;
  attr.sensitive = AttributeId{"disability", 1};
  SweepPlan plan;
  plan.qid_superset = {"gender@1", "grade@1", "grade@2"};
  plan.attack_templates = {attr};
  plan.worker_count = 2;
  const auto results = RunSweep(plan, agg);

  std::ostringstream out;
  WritePlotDataCsv(out, results);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "attack_code,sensitive,metric_kind,point_kind,qid_count,qid_set,"
            "value");
  int prior_rows = 0, det_rows = 0, prob_rows = 0;
  while (std::getline(in, line)) {
    if (line.find(",prior,") != std::string::npos) ++prior_rows;
    if (line.find(",deterministic,posterior,") != std::string::npos)
      ++det_rows;
    if (line.find(",probabilistic,posterior,") != std::string::npos)
      ++prob_rows;
  }
  EXPECT_EQ(prior_rows, 2);  // one per metric kind for the one attack
  EXPECT_EQ(det_rows, 7);    // one per subset
  EXPECT_EQ(prob_rows, 7);
}

TEST(PlotDataTest, EmptyResultsGiveHeaderOnly) {
  std::ostringstream out;
  WritePlotDataCsv(out, {});
  EXPECT_EQ(out.str(),
            "attack_code,sensitive,metric_kind,point_kind,qid_count,qid_set,"
            "value\n");
}

TEST(ConfigTest, FileParsingAndOverrides) {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("privaudit_cfg_" + std::to_string(getpid()));
  fs::create_directories(dir);
  const fs::path path = dir / "run.conf";
  {
    std::ofstream out(path);
    out << "# longitudinal replay\n"
        << "focal = d1.csv\n"
        << "auxiliary = d2.csv\n"
        << "auxiliary = d3.csv\n"
        << "id_column = id\n"
        << "qid = gender\n"
        << "qid = grade\n"
        << "attack = CRL\n"
        << "attack = CAL\n"
        << "sensitive = disability\n"
        << "sweep = on\n"
        << "seed = 42\n"
        << "output = out.csv\n"
        << "format = json\n";
  }
  const RunConfig config = ParseConfigFile(path.string());
  EXPECT_EQ(config.focal, "d1.csv");
  EXPECT_EQ(config.auxiliaries,
            (std::vector<std::string>{"d2.csv", "d3.csv"}));
  EXPECT_EQ(config.qids, (std::vector<std::string>{"gender", "grade"}));
  EXPECT_EQ(config.attacks, (std::vector<std::string>{"CRL", "CAL"}));
  EXPECT_TRUE(config.sweep);
  EXPECT_EQ(config.seed, 42u);
  EXPECT_EQ(config.format, "json");
  EXPECT_NO_THROW(ValidateConfig(config));
  fs::remove_all(dir);
}

TEST(ConfigTest, RejectsBadInput) {
  RunConfig config;
  config.focal = "a.csv";
  config.id_column = "id";
  config.output = "out.csv";
  config.attacks = {"CRS"};
  EXPECT_NO_THROW(ValidateConfig(config));

  {
    RunConfig c = config;
    c.attacks = {"XYZ"};
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.attacks = {"CRL"};  // longitudinal without auxiliaries
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.attacks = {"CAS"};  // attribute attack without sensitive
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.attacks = {"IRS"};  // individual without target
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.attacks = {"CMS"};  // membership without a universe
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.sweep = true;  // sweep without qids
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.growth = true;  // growth with a single-dataset code
    c.auxiliaries = {"d2.csv"};
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.format = "xml";
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  {
    RunConfig c = config;
    c.delimiter = "ab";
    EXPECT_THROW(ValidateConfig(c), ConfigError);
  }
  EXPECT_THROW(ApplyConfigValue(config, "bogus_key", "1"), ConfigError);
  EXPECT_THROW(ApplyConfigValue(config, "sweep", "maybe"), ConfigError);
  EXPECT_THROW(ApplyConfigValue(config, "seed", "-3"), ConfigError);
}

}  // namespace
}  // namespace privaudit
