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

#include "privaudit/dataset.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "gtest/gtest.h"
#include "privaudit/errors.h"
#include "privaudit/examples.h"
#include "testutil.h"

namespace privaudit {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    dir_ = fs::temp_directory_path() /
           ("privaudit_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~TempDir() { fs::remove_all(dir_); }
  std::string Put(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }
  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::uint64_t Fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TEST(CellEncodingTest, RoundTripAndIsolation) {
  EXPECT_EQ(EncodeCell(""), kNullSentinel);
  EXPECT_EQ(DecodeCell(kNullSentinel), "");
  EXPECT_EQ(DecodeCell(EncodeCell("abc")), "abc");
  EXPECT_EQ(DecodeCell(EncodeCell("\x1f")), "\x1f");
  EXPECT_EQ(DecodeCell(EncodeCell("\x1f\x1fzz")), "\x1f\x1fzz");
  // No raw value may collide with the sentinel.
  EXPECT_NE(EncodeCell("\x1f"), kNullSentinel);
  EXPECT_NE(EncodeCell(std::string(2, '\x1f')), kNullSentinel);
}

TEST(CellLabelTest, InjectiveAndReadable) {
  EXPECT_EQ(CellLabel(kNullSentinel), "-");
  EXPECT_EQ(CellLabel(EncodeCell("-")), "\\-");
  EXPECT_EQ(CellLabel(EncodeCell("a,b")), "a\\,b");
  EXPECT_EQ(CellLabel(EncodeCell("x\\y")), "x\\\\y");
  EXPECT_NE(TupleLabel({EncodeCell("a,b"), EncodeCell("c")}),
            TupleLabel({EncodeCell("a"), EncodeCell("b,c")}));
}

TEST(LoadTableTest, ParsesStudentCsv) {
  TempDir tmp;
  const std::string path = tmp.Put("d1.csv",
                                   "id,age,gender,grade,disability\n"
                                   "1,25,F,A,no\n2,25,F,A,yes\n3,25,F,C,yes\n"
                                   "4,25,M,B,yes\n5,25,M,B,no\n6,49,F,C,yes\n"
                                   "7,49,F,C,yes\n8,49,F,E,no\n9,49,M,D,no\n"
                                   "10,60,M,D,no\n");
  const MicrodataTable table = LoadTable(path, "id");
  EXPECT_EQ(table.columns,
            (std::vector<std::string>{"id", "age", "gender", "grade",
                                      "disability"}));
  EXPECT_EQ(table.rows.size(), 10u);
  EXPECT_EQ(table.id_index, 0u);
  EXPECT_EQ(DecodeCell(table.rows[9][3]), "D");
}

TEST(LoadTableTest, HeaderOnlyGivesEmptyTable) {
  TempDir tmp;
  const MicrodataTable table = LoadTable(tmp.Put("e.csv", "id,a\n"), "id");
  EXPECT_TRUE(table.rows.empty());
}

TEST(LoadTableTest, RaggedRowNamesLine) {
  TempDir tmp;
  const std::string path = tmp.Put("r.csv", "id,a,b\n1,x,y\n2,z\n");
  try {
    LoadTable(path, "id");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

TEST(LoadTableTest, Errors) {
  TempDir tmp;
  EXPECT_THROW(LoadTable(tmp.Path("missing.csv"), "id"), DataError);
  EXPECT_THROW(LoadTable(tmp.Put("noid.csv", "a,b\n1,2\n"), "id"), DataError);
  EXPECT_THROW(LoadTable(tmp.Put("dup.csv", "id,a,a\n"), "id"), DataError);
  EXPECT_THROW(LoadTable(tmp.Put("emptyid.csv", "id,a\n,x\n"), "id"),
               DataError);
  EXPECT_THROW(
      LoadTable(tmp.Put("reserved.csv", "id,__member__\n1,x\n"), "id"),
      DataError);
}

TEST(LoadTableTest, MissingTrailingNewlineAndBlankLines) {
  TempDir tmp;
  const MicrodataTable table =
      LoadTable(tmp.Put("no_nl.csv", "id,a\n1,x\n2,y"), "id");
  EXPECT_EQ(table.rows.size(), 2u);
  // An interior blank line is a ragged row, named by line number.
  try {
    LoadTable(tmp.Put("blank.csv", "id,a\n1,x\n\n2,y\n"), "id");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

TEST(LoadTableTest, HandlesCrlfAndCustomDelimiter) {
  TempDir tmp;
  const std::string path = tmp.Put("c.csv", "id;a\r\n1;x\r\n2;\r\n");
  const MicrodataTable table = LoadTable(path, "id", ';');
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(DecodeCell(table.rows[0][1]), "x");
  EXPECT_EQ(table.rows[1][1], kNullSentinel);
}

TEST(DeduplicateTest, KeepsOnePerIdDeterministically) {
  const MicrodataTable table = MakeTable(
      "t", {"id", "v"}, "id", {{"1", "a"}, {"1", "b"}, {"2", "c"}});
  DedupStats stats;
  const MicrodataTable once = Deduplicate(table, 42, &stats);
  EXPECT_EQ(once.rows.size(), 2u);
  EXPECT_EQ(stats.rows_removed, 1u);
  ASSERT_EQ(stats.removed_per_id.size(), 1u);
  EXPECT_EQ(stats.removed_per_id[0], (std::pair<std::string, std::uint64_t>{
                                         "1", 1u}));
  const MicrodataTable again = Deduplicate(table, 42, nullptr);
  EXPECT_EQ(once.rows, again.rows);
}

TEST(DeduplicateTest, UniqueIdsUnchanged) {
  const MicrodataTable table =
      MakeTable("t", {"id", "v"}, "id", {{"1", "a"}, {"2", "b"}});
  const MicrodataTable out = Deduplicate(table, 7);
  EXPECT_EQ(out.rows, table.rows);
}

TEST(DeduplicateTest, SurvivorMatchesReplayOracle) {
  std::mt19937_64 rng(101);
  std::vector<std::vector<std::string>> rows;
  for (int r = 0; r < 1000; ++r) {
    const int id = std::uniform_int_distribution<int>(0, 99)(rng);
    rows.push_back({std::to_string(id), "v" + std::to_string(r)});
  }
  const MicrodataTable table = MakeTable("t", {"id", "v"}, "id", rows);
  const std::uint64_t seed = 0xfeedULL;
  const MicrodataTable out = Deduplicate(table, seed);
  EXPECT_EQ(out.rows.size(), 100u);

  // Independent replay: group occurrences per id in input order, pick
  // splitmix64(seed ^ fnv1a64(id)) mod group size.
  std::map<std::string, std::vector<std::vector<std::string>>> groups;
  std::vector<std::string> order;
  for (const auto& row : rows) {
    if (groups.find(row[0]) == groups.end()) order.push_back(row[0]);
    groups[row[0]].push_back(row);
  }
  std::map<std::string, std::vector<std::string>> expect_row;
  for (const auto& id : order) {
    const auto& g = groups[id];
    const std::uint64_t k = SplitMix64(seed ^ Fnv1a64(id)) % g.size();
    expect_row[id] = g[k];
  }
  for (const auto& row : out.rows) {
    const std::string id = DecodeCell(row[0]);
    EXPECT_EQ(DecodeCell(row[1]), expect_row[id][1]) << "id " << id;
  }
  // Kept rows preserve their relative input order.
  std::vector<std::string> kept_ids;
  for (const auto& row : out.rows) kept_ids.push_back(DecodeCell(row[0]));
  std::vector<std::string> want_order;
  {
    std::set<std::string> seen;
    for (const auto& row : rows) {
      const auto& survivor = expect_row[row[0]];
      if (survivor[1] == row[1] && seen.insert(row[0]).second)
        want_order.push_back(row[0]);
    }
  }
  EXPECT_EQ(kept_ids, want_order);
}

TEST(DeduplicateTest, ByteIdenticalOutput) {
  TempDir tmp;
  const MicrodataTable table = MakeTable(
      "t", {"id", "v"}, "id",
      {{"1", "a"}, {"1", "b"}, {"2", "c"}, {"2", "d"}, {"3", "e"}});
  WriteTable(Deduplicate(table, 5), tmp.Path("a.csv"));
  WriteTable(Deduplicate(table, 5), tmp.Path("b.csv"));
  EXPECT_EQ(ReadFile(tmp.Path("a.csv")), ReadFile(tmp.Path("b.csv")));
}

TEST(WriteTableTest, RoundTripsThroughLoad) {
  TempDir tmp;
  const MicrodataTable table =
      MakeTable("t", {"id", "v"}, "id",
                {{"1", ""}, {"2", "-"}, {"3", "\x1f"}, {"4", "plain"}});
  WriteTable(table, tmp.Path("w.csv"));
  const MicrodataTable back = LoadTable(tmp.Path("w.csv"), "id");
  EXPECT_EQ(back.rows, table.rows);
}

TEST(AggregateTest, LeftOuterJoinMatchesWorkedExample) {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFocalLeftOuter);
  EXPECT_EQ(agg.row_count, 10u);
  EXPECT_EQ(agg.dataset_count, 2);
  // Columns: id@1, then year-1 attributes, then year-2 attributes.
  ASSERT_EQ(agg.columns.size(), 7u);
  EXPECT_EQ(QualifiedName(agg.columns[0].id), "id@1");
  EXPECT_EQ(QualifiedName(agg.columns[5].id), "age@2");
  EXPECT_EQ(QualifiedName(agg.columns[6].id), "grade@2");

  // Record 10 exists only in the first release: year-2 cells are null.
  const auto row10 = agg.RowOfId("10");
  ASSERT_TRUE(row10.has_value());
  EXPECT_EQ(agg.columns[5].dict[agg.columns[5].codes[*row10]], kNullSentinel);
  EXPECT_EQ(agg.columns[6].dict[agg.columns[6].codes[*row10]], kNullSentinel);
  // Record 11 exists only in the second release: absent entirely.
  EXPECT_FALSE(agg.RowOfId("11").has_value());
}

TEST(AggregateTest, SingleDatasetIsIdentity) {
  LongitudinalCollection one;
  one.datasets.push_back(MakeTable("t", {"id", "a"}, "id",
                                   {{"1", "x"}, {"2", "y"}}));
  const AggregatedDataset agg = Aggregate(one, JoinMode::kFocalLeftOuter);
  EXPECT_EQ(agg.row_count, 2u);
  ASSERT_EQ(agg.columns.size(), 2u);
  EXPECT_EQ(agg.columns[1].dict[agg.columns[1].codes[0]], EncodeCell("x"));
  EXPECT_EQ(agg.columns[1].dict[agg.columns[1].codes[1]], EncodeCell("y"));
}

TEST(AggregateTest, FullOuterBuildsUniverseAndMembership) {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFullOuter);
  EXPECT_EQ(agg.row_count, 11u);
  const auto member1 = agg.Find(AttributeId{kMembershipAttribute, 1});
  ASSERT_TRUE(member1.has_value());
  const Column& m = agg.columns[*member1];
  for (std::uint32_t r = 0; r < 11; ++r) {
    const std::string id =
        DecodeCell(agg.columns[agg.id_column].dict
                       [agg.columns[agg.id_column].codes[r]]);
    const std::string flag = DecodeCell(m.dict[m.codes[r]]);
    EXPECT_EQ(flag, id == "11" ? "no" : "yes") << "id " << id;
  }
}

TEST(AggregateTest, DuplicateIdsRequireTreatment) {
  LongitudinalCollection c;
  c.datasets.push_back(
      MakeTable("t", {"id", "a"}, "id", {{"1", "x"}, {"1", "y"}}));
  try {
    Aggregate(c, JoinMode::kFocalLeftOuter);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("treatment required"),
              std::string::npos);
  }
}

TEST(AggregateTest, MatchesNaiveJoinOracle) {
  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testutil::MakeRandomInstance(rng, 3, 20, 3, 3);
    for (const bool full : {false, true}) {
      const AggregatedDataset agg = Aggregate(
          inst.collection,
          full ? JoinMode::kFullOuter : JoinMode::kFocalLeftOuter);
      const testutil::RawAgg want = testutil::NaiveJoin(inst.raw, full);
      ASSERT_EQ(agg.row_count, want.rows.size());
      // Same id order and, for every shared column, identical values.
      for (std::size_t r = 0; r < want.rows.size(); ++r) {
        for (std::size_t c = 0; c < agg.columns.size(); ++c) {
          const Column& col = agg.columns[c];
          if (col.id.name == kMembershipAttribute) continue;
          const std::string qualified = QualifiedName(col.id);
          const std::size_t wc = testutil::RawColumn(want, qualified);
          EXPECT_EQ(DecodeCell(col.dict[col.codes[r]]), want.rows[r][wc])
              << "row " << r << " column " << qualified;
        }
      }
    }
  }
}

TEST(ProjectCountsTest, WorkedExample) {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFocalLeftOuter);
  const auto disability = agg.Resolve("disability");
  ASSERT_EQ(disability.size(), 1u);
  std::vector<std::size_t> qids;
  for (const auto& ref : {"gender@1", "grade@1", "grade@2"}) {
    const auto cols = agg.Resolve(ref);
    ASSERT_EQ(cols.size(), 1u) << ref;
    qids.push_back(cols[0]);
  }
  const JointCounts counts = ProjectCounts(agg, disability[0], qids);
  EXPECT_EQ(counts.obs_labels.size(), 8u);
  EXPECT_EQ(counts.total(), 10u);

  const auto obs =
      std::find(counts.obs_labels.begin(), counts.obs_labels.end(), "F,C,C");
  ASSERT_NE(obs, counts.obs_labels.end());
  const auto yes = std::find(counts.secret_labels.begin(),
                             counts.secret_labels.end(), "yes");
  ASSERT_NE(yes, counts.secret_labels.end());
  EXPECT_EQ(counts.counts[yes - counts.secret_labels.begin()]
                         [obs - counts.obs_labels.begin()],
            2u);

  // The last record's missing year-2 grade shows up as a null observable.
  EXPECT_NE(std::find(counts.obs_labels.begin(), counts.obs_labels.end(),
                      "M,D,-"),
            counts.obs_labels.end());

  // Re-identification secret: a 0/1 matrix with two records in "F,C,C".
  const JointCounts id_counts = ProjectCounts(agg, agg.id_column, qids);
  EXPECT_EQ(id_counts.secret_labels.size(), 10u);
  std::uint64_t col_total = 0;
  for (const auto& row : id_counts.counts) {
    for (std::uint64_t v : row) EXPECT_LE(v, 1u);
    col_total += row[obs - counts.obs_labels.begin()];
  }
  EXPECT_EQ(col_total, 2u);
}

TEST(ProjectCountsTest, EmptyQidsGiveMarginal) {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFocalLeftOuter);
  const auto disability = agg.Resolve("disability");
  const JointCounts counts = ProjectCounts(agg, disability[0], {});
  ASSERT_EQ(counts.obs_labels.size(), 1u);
  EXPECT_EQ(counts.counts[0][0] + counts.counts[1][0], 10u);
  EXPECT_EQ(counts.counts[0][0], 5u);
}

TEST(ProjectCountsTest, CountConservation) {
  std::mt19937_64 rng(307);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testutil::MakeRandomInstance(rng, 2, 30, 3, 3);
    const AggregatedDataset agg =
        Aggregate(inst.collection, JoinMode::kFocalLeftOuter);
    const auto sens = agg.Resolve(inst.sensitive_name);
    std::vector<std::size_t> qids;
    for (const auto& q : inst.qid_names)
      for (std::size_t c : agg.Resolve(q)) qids.push_back(c);
    const JointCounts counts = ProjectCounts(agg, sens[0], qids);
    EXPECT_EQ(counts.total(), agg.row_count);
  }
}

TEST(ProjectCountsTest, Errors) {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFocalLeftOuter);
  EXPECT_THROW(ProjectCounts(agg, 99, {}), std::invalid_argument);
  const auto disability = agg.Resolve("disability");
  EXPECT_THROW(ProjectCounts(agg, disability[0], {disability[0]}),
               std::invalid_argument);
}

TEST(ResolveTest, QualifiedAndUnqualifiedNames) {
  const AggregatedDataset agg =
      Aggregate(StudentExampleCollection(), JoinMode::kFocalLeftOuter);
  EXPECT_EQ(agg.Resolve("grade").size(), 2u);
  EXPECT_EQ(agg.Resolve("grade@2").size(), 1u);
  EXPECT_EQ(agg.Resolve("grade@3").size(), 0u);
  EXPECT_EQ(agg.Resolve("disability").size(), 1u);
  EXPECT_EQ(agg.Resolve("nope").size(), 0u);
  const AttributeRef ref = ParseAttributeRef("grade@2");
  EXPECT_EQ(ref.name, "grade");
  EXPECT_EQ(ref.origin, 2);
  EXPECT_FALSE(ParseAttributeRef("grade").origin.has_value());
  EXPECT_FALSE(ParseAttributeRef("a@b").origin.has_value());
}

TEST(TreatmentReportTest, WritesSidecar) {
  TempDir tmp;
  const MicrodataTable table = MakeTable(
      "t", {"id", "v"}, "id", {{"1", "a"}, {"1", "b"}, {"1", "c"}, {"2", "d"}});
  DedupStats stats;
  Deduplicate(table, 1, &stats);
  WriteTreatmentReport(stats, tmp.Path("report.csv"));
  EXPECT_EQ(ReadFile(tmp.Path("report.csv")), "id,rows_removed\n1,2\n");
}

}  // namespace
}  // namespace privaudit
