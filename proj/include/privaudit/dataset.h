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

// Microdata ingestion, duplicate treatment, and aggregation of longitudinal
// collections into a single origin-tagged dataset.
//
// Values are opaque UTF-8 strings; only equality matters. A missing value
// (empty cell) is represented by an out-of-band null sentinel that can never
// collide with real data: ingestion escapes any literal occurrence of the
// sentinel prefix and output reverses the escape.

#ifndef PRIVAUDIT_DATASET_H_
#define PRIVAUDIT_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privaudit/core.h"

namespace privaudit {

// The cell encoding reserves '\x1f' (ASCII unit separator) as its escape
// character. The null sentinel is the single-character string "\x1f".
inline constexpr char kCellEscape = '\x1f';
inline const std::string kNullSentinel(1, kCellEscape);

// Raw cell -> stored cell. Empty input becomes the sentinel; a raw value
// beginning with the escape character gains one more escape character, so
// no raw value ever maps onto the sentinel itself.
std::string EncodeCell(std::string_view raw);

// Stored cell -> raw cell. Inverse of EncodeCell.
std::string DecodeCell(const std::string& cell);

// A loaded table. Cells are stored in encoded form. Column names are
// unqualified here; dataset origins are attached at aggregation time.
struct MicrodataTable {
  std::string source;                    // path or synthetic name, for errors
  std::vector<std::string> columns;      // unique names, in file order
  std::size_t id_index = 0;              // position of the id column
  std::vector<std::vector<std::string>> rows;

  const std::string& id_of(std::size_t row) const {
    return rows[row][id_index];
  }
};

// Reads a delimiter-separated file with a header row. Values are taken
// verbatim (no quoting rules); empty cells become the null sentinel. Throws
// DataError naming the file and line on ragged rows, a missing id column,
// duplicate header names, or an empty id value.
MicrodataTable LoadTable(const std::string& path, const std::string& id_column,
                         char delimiter = ',');

// Builds a table from in-memory raw values (used by tests and the built-in
// examples). Cells are encoded; the same validations as LoadTable apply.
MicrodataTable MakeTable(std::string source, std::vector<std::string> columns,
                         const std::string& id_column,
                         const std::vector<std::vector<std::string>>& raw_rows);

struct DedupStats {
  std::uint64_t rows_removed = 0;
  // (id raw value, rows removed for that id), in first-appearance order;
  // one entry per id that had duplicates.
  std::vector<std::pair<std::string, std::uint64_t>> removed_per_id;
};

// Keeps exactly one row per distinct id value, chosen uniformly at random by
// a deterministic generator: the surviving occurrence index within a
// duplicate group is
//     splitmix64(seed ^ fnv1a64(raw id)) mod group_size.
// Relative order of kept rows is preserved. The same (table, seed) always
// yields byte-identical output.
MicrodataTable Deduplicate(const MicrodataTable& table, std::uint64_t seed,
                           DedupStats* stats = nullptr);

// Writes the table back out in the input format (cells decoded, empty cell
// for nulls). Cells containing the delimiter or a newline are rejected,
// since the format has no quoting.
void WriteTable(const MicrodataTable& table, const std::string& path,
                char delimiter = ',');

// Sidecar report for Deduplicate: a two-column file (id, rows_removed).
void WriteTreatmentReport(const DedupStats& stats, const std::string& path,
                          char delimiter = ',');

// An attribute tagged with the dataset it came from (1 = focal).
struct AttributeId {
  std::string name;
  int origin = 1;

  friend bool operator==(const AttributeId& a, const AttributeId& b) {
    return a.origin == b.origin && a.name == b.name;
  }
  friend bool operator<(const AttributeId& a, const AttributeId& b) {
    return a.name != b.name ? a.name < b.name : a.origin < b.origin;
  }
};

// "name@origin", e.g. "grade@2".
std::string QualifiedName(const AttributeId& id);

// Parses "name" or "name@k" (k a positive integer). A trailing "@k" with a
// non-numeric k is treated as part of the name.
struct AttributeRef {
  std::string name;
  std::optional<int> origin;
};
AttributeRef ParseAttributeRef(const std::string& text);

// Ordered list of datasets; index 0 is the focal dataset (origin 1). All
// datasets must share the id attribute name.
struct LongitudinalCollection {
  std::vector<MicrodataTable> datasets;
};

enum class JoinMode { kFocalLeftOuter, kFullOuter };

// Name of the derived per-dataset membership attribute added by full-outer
// aggregation. Reserved: input tables may not use it.
inline const std::string kMembershipAttribute = "__member__";

// One dictionary-encoded column of an aggregated dataset. dict[0] is always
// the null sentinel (whether or not any row is null). lex_rank maps a code
// to its position in the column's sort order: sentinel first, then raw
// values in bytewise lexicographic order.
struct Column {
  AttributeId id;
  std::vector<std::int32_t> codes;       // one per row
  std::vector<std::string> dict;         // code -> encoded value
  std::vector<std::int32_t> lex_rank;    // code -> rank
};

// Result of joining a collection along its persistent id. Immutable after
// construction; shared read-only across worker threads.
struct AggregatedDataset {
  JoinMode mode = JoinMode::kFocalLeftOuter;
  int dataset_count = 0;
  std::uint64_t row_count = 0;
  std::size_t id_column = 0;  // index into columns
  std::vector<Column> columns;

  std::optional<std::size_t> Find(const AttributeId& id) const;
  // Resolves "name" (all origins where present, ascending) or "name@k"
  // (that origin only). Returns column indices; empty if nothing matches.
  std::vector<std::size_t> Resolve(const std::string& ref) const;
  // Row index holding the given raw id value, if any.
  std::optional<std::uint32_t> RowOfId(const std::string& raw_id) const;
};

// Joins the collection on the id attribute.
//
// kFocalLeftOuter: one output row per focal record; auxiliary attributes
// joined by id, missing records leaving null cells; ids absent from the
// focal dataset are dropped.
//
// kFullOuter: one row per id in the union of all datasets (plus
// `extra_universe_ids`, if given), and one derived membership attribute per
// dataset. Attributes of datasets lacking the record are null.
//
// Every input table must already be deduplicated; a duplicate id raises
// DataError("treatment required"). Join keys compare by raw string
// equality, with no normalization.
AggregatedDataset Aggregate(const LongitudinalCollection& collection,
                            JoinMode mode,
                            const std::vector<std::string>* extra_universe_ids =
                                nullptr);

// Same join over a prefix (or any contiguous view) of a collection, without
// copying the tables. datasets[0] is the focal dataset.
AggregatedDataset AggregateSpan(std::span<const MicrodataTable> datasets,
                                JoinMode mode,
                                const std::vector<std::string>*
                                    extra_universe_ids = nullptr);

// A secret column that is not (or not directly) an attribute of the
// aggregated dataset, e.g. a derived flag.
struct SecretColumn {
  std::string description;
  std::vector<std::int32_t> codes;   // one per row
  std::vector<std::string> dict;     // code -> encoded value
};

// Counts co-occurrences of secret values and QID tuples over the rows of
// the aggregated dataset. Null sentinels participate as ordinary observable
// values; both domains are ordered by first appearance. The secret column
// must not be among the QIDs.
JointCounts ProjectCounts(const AggregatedDataset& agg,
                          std::size_t secret_column,
                          const std::vector<std::size_t>& qid_columns);
JointCounts ProjectCounts(const AggregatedDataset& agg,
                          const SecretColumn& secret,
                          const std::vector<std::size_t>& qid_columns);

// Human-readable, injective label for one encoded cell: nulls render as
// "-", a literal "-" as "\-", and ',' / '\' are backslash-escaped so that
// tuple labels joined with ',' stay unambiguous.
std::string CellLabel(const std::string& encoded_cell);

// Label for a QID tuple: the per-cell labels joined with ','.
std::string TupleLabel(const std::vector<std::string>& encoded_cells);

}  // namespace privaudit

#endif  // PRIVAUDIT_DATASET_H_
