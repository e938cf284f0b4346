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

// Shared test helpers: random microdata generators and an independent
// brute-force oracle. The oracle works on raw decoded strings with nested
// maps and performs its own join; it shares no code with the library paths
// it checks.

#ifndef PRIVAUDIT_TESTS_TESTUTIL_H_
#define PRIVAUDIT_TESTS_TESTUTIL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "privaudit/dataset.h"
#include "privaudit/rational.h"

namespace privaudit::testutil {

using Rng = std::mt19937_64;

// Raw view of a table: decoded values, "" meaning null.
struct RawTable {
  std::vector<std::string> columns;
  std::size_t id_index = 0;
  std::vector<std::vector<std::string>> rows;
};

inline RawTable ToRaw(const MicrodataTable& table) {
  RawTable raw;
  raw.columns = table.columns;
  raw.id_index = table.id_index;
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(DecodeCell(c));
    raw.rows.push_back(std::move(cells));
  }
  return raw;
}

// Naive reference join, keyed on raw id equality.
struct RawAgg {
  std::vector<std::string> columns;  // "name@origin"
  std::size_t id_col = 0;
  std::vector<std::vector<std::string>> rows;  // "" = null
  std::vector<std::size_t> member_cols;        // full outer: one per dataset
};

inline RawAgg NaiveJoin(const std::vector<RawTable>& tables, bool full_outer,
                        const std::vector<std::string>* population = nullptr) {
  const RawTable& focal = tables.front();
  RawAgg agg;
  agg.columns.push_back(focal.columns[focal.id_index] + "@1");
  std::vector<std::vector<std::size_t>> data_cols(tables.size());
  for (std::size_t d = 0; d < tables.size(); ++d) {
    for (std::size_t c = 0; c < tables[d].columns.size(); ++c) {
      if (c == tables[d].id_index) continue;
      data_cols[d].push_back(c);
      agg.columns.push_back(tables[d].columns[c] + "@" +
                            std::to_string(d + 1));
    }
  }
  if (full_outer) {
    for (std::size_t d = 0; d < tables.size(); ++d) {
      agg.member_cols.push_back(agg.columns.size());
      agg.columns.push_back("member@" + std::to_string(d + 1));
    }
  }

  std::vector<std::string> universe;
  std::set<std::string> seen;
  for (const auto& row : focal.rows) {
    universe.push_back(row[focal.id_index]);
    seen.insert(row[focal.id_index]);
  }
  if (full_outer) {
    for (std::size_t d = 1; d < tables.size(); ++d)
      for (const auto& row : tables[d].rows)
        if (seen.insert(row[tables[d].id_index]).second)
          universe.push_back(row[tables[d].id_index]);
    if (population != nullptr)
      for (const auto& id : *population)
        if (seen.insert(id).second) universe.push_back(id);
  }

  std::vector<std::map<std::string, std::size_t>> index(tables.size());
  for (std::size_t d = 0; d < tables.size(); ++d)
    for (std::size_t r = 0; r < tables[d].rows.size(); ++r)
      index[d][tables[d].rows[r][tables[d].id_index]] = r;

  for (const auto& id : universe) {
    std::vector<std::string> out;
    out.push_back(id);
    std::vector<std::string> member_flags;
    for (std::size_t d = 0; d < tables.size(); ++d) {
      const auto it = index[d].find(id);
      if (it == index[d].end()) {
        for (std::size_t c = 0; c < data_cols[d].size(); ++c)
          out.push_back("");
        member_flags.push_back("no");
      } else {
        for (std::size_t c : data_cols[d])
          out.push_back(tables[d].rows[it->second][c]);
        member_flags.push_back("yes");
      }
    }
    if (full_outer)
      for (const auto& f : member_flags) out.push_back(f);
    agg.rows.push_back(std::move(out));
  }
  return agg;
}

struct OracleMetrics {
  Rational prior_prob;
  Rational prior_det;
  Rational post_prob;
  Rational post_det;
  std::uint64_t records = 0;
  std::uint64_t classes = 0;
  std::uint64_t singletons = 0;
  std::uint64_t certain = 0;
};

inline OracleMetrics OracleCollective(const RawAgg& agg,
                                      const std::vector<std::size_t>& qid_cols,
                                      std::size_t secret_col) {
  std::map<std::vector<std::string>, std::map<std::string, std::uint64_t>>
      classes;
  std::map<std::string, std::uint64_t> marginal;
  for (const auto& row : agg.rows) {
    std::vector<std::string> key;
    for (std::size_t q : qid_cols) key.push_back(row[q]);
    ++classes[key][row[secret_col]];
    ++marginal[row[secret_col]];
  }
  const std::uint64_t n = agg.rows.size();
  OracleMetrics m;
  m.records = n;
  m.classes = classes.size();
  std::uint64_t sum_max = 0;
  for (const auto& [key, hist] : classes) {
    std::uint64_t size = 0;
    std::uint64_t max_count = 0;
    for (const auto& [value, count] : hist) {
      size += count;
      if (count > max_count) max_count = count;
    }
    sum_max += max_count;
    if (size == 1) ++m.singletons;
    if (hist.size() == 1) m.certain += size;
  }
  std::uint64_t prior_max = 0;
  for (const auto& [value, count] : marginal)
    if (count > prior_max) prior_max = count;
  m.prior_prob = Rational::FromCounts(prior_max, n);
  m.prior_det = prior_max == n ? Rational(1) : Rational(0);
  m.post_prob = Rational::FromCounts(sum_max, n);
  m.post_det = Rational::FromCounts(m.certain, n);
  return m;
}

inline OracleMetrics OracleIndividual(const RawAgg& agg,
                                      const std::vector<std::size_t>& qid_cols,
                                      std::size_t secret_col,
                                      const std::string& target_id) {
  OracleMetrics m = OracleCollective(agg, qid_cols, secret_col);
  std::optional<std::vector<std::string>> target_key;
  for (const auto& row : agg.rows) {
    if (row[agg.id_col] == target_id) {
      std::vector<std::string> key;
      for (std::size_t q : qid_cols) key.push_back(row[q]);
      target_key = std::move(key);
      break;
    }
  }
  if (!target_key) throw std::runtime_error("oracle: unknown target id");
  std::map<std::string, std::uint64_t> hist;
  std::uint64_t size = 0;
  for (const auto& row : agg.rows) {
    bool match = true;
    for (std::size_t q = 0; q < qid_cols.size(); ++q)
      if (row[qid_cols[q]] != (*target_key)[q]) {
        match = false;
        break;
      }
    if (!match) continue;
    ++size;
    ++hist[row[secret_col]];
  }
  std::uint64_t max_count = 0;
  for (const auto& [value, count] : hist)
    if (count > max_count) max_count = count;
  m.post_prob = Rational::FromCounts(max_count, size);
  m.post_det = hist.size() == 1 ? Rational(1) : Rational(0);
  return m;
}

// --- random instances ------------------------------------------------------

// A value alphabet that stresses nulls, escaping and label separators.
inline std::string RandomValue(Rng& rng, int alphabet, double null_rate) {
  static const std::vector<std::string> tricky = {"-", "a,b", "x\\y",
                                                  std::string(1, '\x1f')};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < null_rate) return "";
  if (u(rng) < 0.05)
    return tricky[std::uniform_int_distribution<std::size_t>(
        0, tricky.size() - 1)(rng)];
  const int v = std::uniform_int_distribution<int>(0, alphabet - 1)(rng);
  return std::string(1, static_cast<char>('a' + v));
}

struct RandomInstance {
  LongitudinalCollection collection;
  std::vector<RawTable> raw;
  std::vector<std::string> qid_names;    // unqualified
  std::string sensitive_name;            // present in the focal dataset
  std::vector<std::string> focal_ids;    // raw ids, focal order
};

// Builds a collection of 1..max_datasets tables with unique ids per table,
// shared QID column names, and one sensitive column in the focal dataset.
inline RandomInstance MakeRandomInstance(Rng& rng, int max_datasets,
                                         int max_rows, int max_qids,
                                         int secret_values,
                                         double null_rate = 0.15) {
  std::uniform_int_distribution<int> d_datasets(1, max_datasets);
  std::uniform_int_distribution<int> d_rows(1, max_rows);
  std::uniform_int_distribution<int> d_qids(1, max_qids);

  RandomInstance inst;
  const int datasets = d_datasets(rng);
  const int focal_rows = d_rows(rng);
  const int qids = d_qids(rng);
  for (int q = 0; q < qids; ++q)
    inst.qid_names.push_back("q" + std::to_string(q));
  inst.sensitive_name = "s";

  for (int r = 0; r < focal_rows; ++r)
    inst.focal_ids.push_back(std::to_string(r + 1));

  for (int d = 0; d < datasets; ++d) {
    std::vector<std::string> columns = {"id"};
    for (const auto& q : inst.qid_names) columns.push_back(q);
    if (d == 0) columns.push_back(inst.sensitive_name);

    // Auxiliary datasets hold a random subset of the focal ids plus the
    // occasional extra individual.
    std::vector<std::string> ids;
    if (d == 0) {
      ids = inst.focal_ids;
    } else {
      for (const auto& id : inst.focal_ids)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.8)
          ids.push_back(id);
      if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.5)
        ids.push_back("x" + std::to_string(d));
    }

    std::vector<std::vector<std::string>> rows;
    for (const auto& id : ids) {
      std::vector<std::string> row = {id};
      for (int q = 0; q < qids; ++q)
        row.push_back(RandomValue(rng, 3, null_rate));
      if (d == 0) {
        const int v =
            std::uniform_int_distribution<int>(0, secret_values - 1)(rng);
        row.push_back("v" + std::to_string(v));
      }
      rows.push_back(std::move(row));
    }
    inst.collection.datasets.push_back(
        MakeTable("random-" + std::to_string(d + 1), columns, "id", rows));
    inst.raw.push_back(ToRaw(inst.collection.datasets.back()));
  }
  return inst;
}

// Column index of "name@origin" in a RawAgg.
inline std::size_t RawColumn(const RawAgg& agg, const std::string& qualified) {
  for (std::size_t i = 0; i < agg.columns.size(); ++i)
    if (agg.columns[i] == qualified) return i;
  throw std::runtime_error("raw column not found: " + qualified);
}

}  // namespace privaudit::testutil

#endif  // PRIVAUDIT_TESTS_TESTUTIL_H_
