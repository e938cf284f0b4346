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

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "privaudit/errors.h"

namespace privaudit {

namespace {

std::uint64_t Fnv1a64(std::string_view s) {
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

std::vector<std::string> SplitLine(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void ValidateHeader(const MicrodataTable& table) {
  std::unordered_set<std::string> seen;
  for (const auto& name : table.columns) {
    if (name.empty())
      throw DataError(table.source + ": empty column name in header");
    if (name == kMembershipAttribute)
      throw DataError(table.source + ": column name '" + name +
                      "' is reserved");
    if (!seen.insert(name).second)
      throw DataError(table.source + ": duplicate column '" + name + "'");
  }
}

// Hash for a row key made of column codes.
struct CodeVecHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int32_t c : v) {
      h ^= static_cast<std::uint32_t>(c);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::string EncodeCell(std::string_view raw) {
  if (raw.empty()) return kNullSentinel;
  if (raw.front() == kCellEscape) {
    std::string out;
    out.reserve(raw.size() + 1);
    out.push_back(kCellEscape);
    out.append(raw);
    return out;
  }
  return std::string(raw);
}

std::string DecodeCell(const std::string& cell) {
  if (cell == kNullSentinel) return std::string();
  if (!cell.empty() && cell.front() == kCellEscape) return cell.substr(1);
  return cell;
}

MicrodataTable LoadTable(const std::string& path, const std::string& id_column,
                         char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open file");

  MicrodataTable table;
  table.source = path;

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.columns = SplitLine(line, delimiter);
  ValidateHeader(table);

  const auto id_it =
      std::find(table.columns.begin(), table.columns.end(), id_column);
  if (id_it == table.columns.end())
    throw DataError(path + ": missing id column '" + id_column + "'");
  table.id_index = static_cast<std::size_t>(id_it - table.columns.begin());

  const std::size_t width = table.columns.size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof() &&
        width > 1) {
      break;  // trailing newline
    }
    std::vector<std::string> cells = SplitLine(line, delimiter);
    if (cells.size() != width)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " fields, got " +
                      std::to_string(cells.size()));
    std::vector<std::string> row;
    row.reserve(width);
    for (auto& c : cells) row.push_back(EncodeCell(c));
    if (row[table.id_index] == kNullSentinel)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": empty id value");
    table.rows.push_back(std::move(row));
  }
  return table;
}

MicrodataTable MakeTable(std::string source, std::vector<std::string> columns,
                         const std::string& id_column,
                         const std::vector<std::vector<std::string>>& raw_rows) {
  MicrodataTable table;
  table.source = std::move(source);
  table.columns = std::move(columns);
  ValidateHeader(table);
  const auto id_it =
      std::find(table.columns.begin(), table.columns.end(), id_column);
  if (id_it == table.columns.end())
    throw DataError(table.source + ": missing id column '" + id_column + "'");
  table.id_index = static_cast<std::size_t>(id_it - table.columns.begin());
  for (std::size_t r = 0; r < raw_rows.size(); ++r) {
    if (raw_rows[r].size() != table.columns.size())
      throw DataError(table.source + ":" + std::to_string(r + 2) +
                      ": expected " + std::to_string(table.columns.size()) +
                      " fields, got " + std::to_string(raw_rows[r].size()));
    std::vector<std::string> row;
    row.reserve(raw_rows[r].size());
    for (const auto& c : raw_rows[r]) row.push_back(EncodeCell(c));
    if (row[table.id_index] == kNullSentinel)
      throw DataError(table.source + ":" + std::to_string(r + 2) +
                      ": empty id value");
    table.rows.push_back(std::move(row));
  }
  return table;
}

MicrodataTable Deduplicate(const MicrodataTable& table, std::uint64_t seed,
                           DedupStats* stats) {
  std::unordered_map<std::string, std::uint64_t> group_size;
  std::vector<std::string> first_appearance;
  group_size.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto [it, inserted] = group_size.try_emplace(row[table.id_index], 0);
    if (inserted) first_appearance.push_back(it->first);
    ++it->second;
  }

  MicrodataTable out;
  out.source = table.source;
  out.columns = table.columns;
  out.id_index = table.id_index;
  out.rows.reserve(group_size.size());

  std::unordered_map<std::string, std::uint64_t> occurrence;
  occurrence.reserve(group_size.size());
  for (const auto& row : table.rows) {
    const std::string& id = row[table.id_index];
    const std::uint64_t total = group_size.at(id);
    const std::uint64_t k = occurrence[id]++;
    std::uint64_t survivor = 0;
    if (total > 1) {
      const std::string raw_id = DecodeCell(id);
      survivor = SplitMix64(seed ^ Fnv1a64(raw_id)) % total;
    }
    if (k == survivor) out.rows.push_back(row);
  }

  if (stats != nullptr) {
    stats->rows_removed = table.rows.size() - out.rows.size();
    stats->removed_per_id.clear();
    for (const auto& id : first_appearance) {
      const std::uint64_t total = group_size.at(id);
      if (total > 1) stats->removed_per_id.emplace_back(DecodeCell(id), total - 1);
    }
  }
  return out;
}

void WriteTable(const MicrodataTable& table, const std::string& path,
                char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open file for writing");
  auto emit = [&](const std::string& raw) {
    if (raw.find(delimiter) != std::string::npos ||
        raw.find('\n') != std::string::npos)
      throw DataError(path + ": value contains the delimiter or a newline: '" +
                      raw + "'");
    out << raw;
  };
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out << delimiter;
    emit(table.columns[c]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << delimiter;
      emit(DecodeCell(row[c]));
    }
    out << '\n';
  }
  if (!out) throw DataError(path + ": write failed");
}

void WriteTreatmentReport(const DedupStats& stats, const std::string& path,
                          char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open file for writing");
  out << "id" << delimiter << "rows_removed\n";
  for (const auto& [id, removed] : stats.removed_per_id)
    out << id << delimiter << removed << '\n';
  if (!out) throw DataError(path + ": write failed");
}

std::string QualifiedName(const AttributeId& id) {
  return id.name + "@" + std::to_string(id.origin);
}

AttributeRef ParseAttributeRef(const std::string& text) {
  const std::size_t at = text.rfind('@');
  if (at != std::string::npos && at + 1 < text.size()) {
    const std::string suffix = text.substr(at + 1);
    if (suffix.size() <= 9 &&
        std::all_of(suffix.begin(), suffix.end(),
                    [](unsigned char c) { return std::isdigit(c); })) {
      const long origin = std::stol(suffix);
      if (origin >= 1)
        return AttributeRef{text.substr(0, at), static_cast<int>(origin)};
    }
  }
  return AttributeRef{text, std::nullopt};
}

std::optional<std::size_t> AggregatedDataset::Find(const AttributeId& id) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::size_t> AggregatedDataset::Resolve(const std::string& ref) const {
  const AttributeRef parsed = ParseAttributeRef(ref);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].id.name != parsed.name) continue;
    if (parsed.origin.has_value() && columns[i].id.origin != *parsed.origin)
      continue;
    out.push_back(i);
  }
  std::sort(out.begin(), out.end(), [this](std::size_t a, std::size_t b) {
    return columns[a].id.origin < columns[b].id.origin;
  });
  return out;
}

std::optional<std::uint32_t> AggregatedDataset::RowOfId(
    const std::string& raw_id) const {
  const Column& ids = columns[id_column];
  const std::string encoded = EncodeCell(raw_id);
  std::int32_t code = -1;
  for (std::size_t c = 0; c < ids.dict.size(); ++c) {
    if (ids.dict[c] == encoded) {
      code = static_cast<std::int32_t>(c);
      break;
    }
  }
  if (code < 0) return std::nullopt;
  for (std::size_t r = 0; r < ids.codes.size(); ++r)
    if (ids.codes[r] == code) return static_cast<std::uint32_t>(r);
  return std::nullopt;
}

namespace {

// Incremental dictionary encoder for one output column.
class ColumnBuilder {
 public:
  explicit ColumnBuilder(AttributeId id) {
    column_.id = std::move(id);
    column_.dict.push_back(kNullSentinel);
    index_.emplace(kNullSentinel, 0);
  }

  void Append(const std::string& encoded) {
    auto [it, inserted] = index_.try_emplace(encoded, column_.dict.size());
    if (inserted) column_.dict.push_back(encoded);
    column_.codes.push_back(static_cast<std::int32_t>(it->second));
  }

  void AppendNull() { column_.codes.push_back(0); }

  Column Finish() {
    // Sort order of codes: sentinel first, then raw values bytewise.
    std::vector<std::int32_t> order(column_.dict.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin() + 1, order.end(),
              [this](std::int32_t a, std::int32_t b) {
                return DecodeCell(column_.dict[a]) <
                       DecodeCell(column_.dict[b]);
              });
    column_.lex_rank.assign(column_.dict.size(), 0);
    for (std::size_t rank = 0; rank < order.size(); ++rank)
      column_.lex_rank[order[rank]] = static_cast<std::int32_t>(rank);
    return std::move(column_);
  }

 private:
  Column column_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::unordered_map<std::string, std::size_t> IdIndex(
    const MicrodataTable& table) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (!index.emplace(table.id_of(r), r).second)
      throw DataError(table.source + ": duplicate id '" +
                      DecodeCell(table.id_of(r)) + "': treatment required");
  }
  return index;
}

}  // namespace

AggregatedDataset AggregateSpan(std::span<const MicrodataTable> datasets,
                                JoinMode mode,
                                const std::vector<std::string>* extra_universe_ids) {
  if (datasets.empty())
    throw DataError("empty longitudinal collection");
  const MicrodataTable& focal = datasets.front();
  const std::string& id_name = focal.columns[focal.id_index];
  for (const auto& table : datasets) {
    if (table.columns[table.id_index] != id_name)
      throw DataError(table.source + ": id column '" +
                      table.columns[table.id_index] +
                      "' differs from focal id column '" + id_name + "'");
  }

  std::vector<std::unordered_map<std::string, std::size_t>> id_maps;
  id_maps.reserve(datasets.size());
  for (const auto& table : datasets) id_maps.push_back(IdIndex(table));

  // The row universe: focal records in order, then (full-outer only) ids
  // first seen in later datasets, then any extra universe ids.
  std::vector<std::string> universe;
  std::unordered_set<std::string> seen;
  universe.reserve(focal.rows.size());
  for (std::size_t r = 0; r < focal.rows.size(); ++r) {
    universe.push_back(focal.id_of(r));
    seen.insert(focal.id_of(r));
  }
  if (mode == JoinMode::kFullOuter) {
    for (std::size_t d = 1; d < datasets.size(); ++d) {
      const MicrodataTable& table = datasets[d];
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (seen.insert(table.id_of(r)).second)
          universe.push_back(table.id_of(r));
      }
    }
    if (extra_universe_ids != nullptr) {
      for (const auto& raw : *extra_universe_ids) {
        const std::string encoded = EncodeCell(raw);
        if (encoded == kNullSentinel)
          throw DataError("population file: empty id value");
        if (seen.insert(encoded).second) universe.push_back(encoded);
      }
    }
  }

  AggregatedDataset agg;
  agg.mode = mode;
  agg.dataset_count = static_cast<int>(datasets.size());
  agg.row_count = universe.size();
  agg.id_column = 0;

  std::vector<ColumnBuilder> builders;
  builders.emplace_back(AttributeId{id_name, 1});
  // Per dataset: (builder index, source column index) for non-id columns.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> layout(
      datasets.size());
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const MicrodataTable& table = datasets[d];
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c == table.id_index) continue;
      layout[d].emplace_back(builders.size(), c);
      builders.emplace_back(
          AttributeId{table.columns[c], static_cast<int>(d + 1)});
    }
  }
  std::vector<std::size_t> member_builders;
  if (mode == JoinMode::kFullOuter) {
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      member_builders.push_back(builders.size());
      builders.emplace_back(
          AttributeId{kMembershipAttribute, static_cast<int>(d + 1)});
    }
  }

  const std::string yes = EncodeCell("yes");
  const std::string no = EncodeCell("no");
  for (const std::string& id : universe) {
    builders[0].Append(id);
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      const auto it = id_maps[d].find(id);
      if (it == id_maps[d].end()) {
        for (const auto& [b, c] : layout[d]) {
          (void)c;
          builders[b].AppendNull();
        }
        if (mode == JoinMode::kFullOuter)
          builders[member_builders[d]].Append(no);
      } else {
        const auto& row = datasets[d].rows[it->second];
        for (const auto& [b, c] : layout[d]) builders[b].Append(row[c]);
        if (mode == JoinMode::kFullOuter)
          builders[member_builders[d]].Append(yes);
      }
    }
  }

  agg.columns.reserve(builders.size());
  for (auto& b : builders) agg.columns.push_back(b.Finish());
  return agg;
}

AggregatedDataset Aggregate(const LongitudinalCollection& collection,
                            JoinMode mode,
                            const std::vector<std::string>* extra_universe_ids) {
  return AggregateSpan(
      std::span<const MicrodataTable>(collection.datasets.data(),
                                      collection.datasets.size()),
      mode, extra_universe_ids);
}

namespace {

JointCounts ProjectCountsImpl(const AggregatedDataset& agg,
                              const std::vector<std::int32_t>& secret_codes,
                              const std::vector<std::string>& secret_dict,
                              const std::vector<std::size_t>& qid_columns) {
  const std::uint64_t n = agg.row_count;
  std::unordered_map<std::vector<std::int32_t>, std::size_t, CodeVecHash>
      obs_index;
  std::vector<std::size_t> secret_index(secret_dict.size(), SIZE_MAX);

  JointCounts counts;
  std::vector<std::vector<std::int32_t>> obs_keys;
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // (secret, obs)
  cells.reserve(n);

  std::vector<std::int32_t> key(qid_columns.size());
  for (std::uint64_t r = 0; r < n; ++r) {
    for (std::size_t q = 0; q < qid_columns.size(); ++q)
      key[q] = agg.columns[qid_columns[q]].codes[r];
    auto [it, inserted] = obs_index.try_emplace(key, obs_keys.size());
    if (inserted) obs_keys.push_back(key);

    const std::int32_t code = secret_codes[r];
    if (secret_index[code] == SIZE_MAX) {
      secret_index[code] = counts.secret_labels.size();
      counts.secret_labels.push_back(CellLabel(secret_dict[code]));
    }
    cells.emplace_back(secret_index[code], it->second);
  }

  counts.obs_labels.reserve(obs_keys.size());
  for (const auto& k : obs_keys) {
    std::vector<std::string> parts;
    parts.reserve(k.size());
    for (std::size_t q = 0; q < k.size(); ++q)
      parts.push_back(agg.columns[qid_columns[q]].dict[k[q]]);
    counts.obs_labels.push_back(TupleLabel(parts));
  }

  counts.counts.assign(counts.secret_labels.size(),
                       std::vector<std::uint64_t>(obs_keys.size(), 0));
  for (const auto& [s, o] : cells) ++counts.counts[s][o];
  return counts;
}

}  // namespace

JointCounts ProjectCounts(const AggregatedDataset& agg,
                          std::size_t secret_column,
                          const std::vector<std::size_t>& qid_columns) {
  if (secret_column >= agg.columns.size())
    throw std::invalid_argument("unknown secret column");
  for (std::size_t q : qid_columns) {
    if (q >= agg.columns.size())
      throw std::invalid_argument("unknown observation column");
    if (q == secret_column)
      throw std::invalid_argument("secret attribute among observations");
  }
  return ProjectCountsImpl(agg, agg.columns[secret_column].codes,
                           agg.columns[secret_column].dict, qid_columns);
}

JointCounts ProjectCounts(const AggregatedDataset& agg,
                          const SecretColumn& secret,
                          const std::vector<std::size_t>& qid_columns) {
  if (secret.codes.size() != agg.row_count)
    throw std::invalid_argument("secret column length mismatch");
  for (std::size_t q : qid_columns)
    if (q >= agg.columns.size())
      throw std::invalid_argument("unknown observation column");
  return ProjectCountsImpl(agg, secret.codes, secret.dict, qid_columns);
}

std::string CellLabel(const std::string& encoded_cell) {
  if (encoded_cell == kNullSentinel) return "-";
  const std::string raw = DecodeCell(encoded_cell);
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c == '\\' || c == ',') out.push_back('\\');
    out.push_back(c);
  }
  if (out == "-") return "\\-";
  return out;
}

std::string TupleLabel(const std::vector<std::string>& encoded_cells) {
  std::string out;
  for (std::size_t i = 0; i < encoded_cells.size(); ++i) {
    if (i > 0) out.push_back(',');
    out.append(CellLabel(encoded_cells[i]));
  }
  return out;
}

}  // namespace privaudit
