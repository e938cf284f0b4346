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

#include "privaudit/engine.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <span>
#include <thread>

#include "privaudit/errors.h"

namespace privaudit {

struct PassScratch {
  struct KeyRow {
    std::uint64_t key;
    std::uint32_t row;
  };
  std::vector<KeyRow> keys;          // packed-key path
  std::vector<std::uint32_t> order;  // comparator fallback
  struct SecretScratch {
    std::vector<std::uint32_t> counts;  // dense, indexed by value code
    std::vector<std::int32_t> touched;  // codes with nonzero count
  };
  std::vector<SecretScratch> secrets;
};

PassScratch* NewPassScratch() { return new PassScratch(); }
void FreePassScratch(PassScratch* s) { delete s; }

namespace {

using KeyRow = PassScratch::KeyRow;

int ColumnBits(const Column& col) {
  const std::size_t cardinality = col.dict.size();
  if (cardinality <= 1) return 0;
  return std::bit_width(cardinality - 1);
}

}  // namespace

PartitionSummary PartitionPass(const AggregatedDataset& agg,
                               const PartitionRequest& request,
                               PassScratch* scratch) {
  std::unique_ptr<PassScratch> local;
  if (scratch == nullptr) {
    local = std::make_unique<PassScratch>();
    scratch = local.get();
  }

  for (std::size_t c : request.qid_columns)
    if (c >= agg.columns.size())
      throw std::invalid_argument("unknown observation column");
  for (std::size_t c : request.secret_columns)
    if (c >= agg.columns.size())
      throw std::invalid_argument("unknown secret column");
  if (agg.row_count > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("dataset exceeds 2^32-1 rows");

  const std::uint32_t n = static_cast<std::uint32_t>(agg.row_count);
  PartitionSummary summary;
  summary.records = n;
  summary.secrets.resize(request.secret_columns.size());
  summary.targets.resize(request.target_rows.size());
  for (auto& t : summary.targets) {
    t.max_count.assign(request.secret_columns.size(), 0);
    t.distinct.assign(request.secret_columns.size(), 0);
  }
  if (request.class_sizes != nullptr) request.class_sizes->clear();
  if (n == 0) return summary;

  // Sort rows by the QID tuple. When the concatenated rank bits fit in 64
  // bits the tuple is packed into one integer key; otherwise a row-index
  // sort with a per-column comparator takes over.
  int total_bits = 0;
  for (std::size_t c : request.qid_columns)
    total_bits += ColumnBits(agg.columns[c]);
  const bool packed = total_bits <= 64;

  if (packed) {
    scratch->keys.resize(n);
    for (std::uint32_t r = 0; r < n; ++r) scratch->keys[r] = KeyRow{0, r};
    for (std::size_t c : request.qid_columns) {
      const Column& col = agg.columns[c];
      const int bits = ColumnBits(col);
      if (bits == 0) continue;
      const std::int32_t* codes = col.codes.data();
      const std::int32_t* rank = col.lex_rank.data();
      for (std::uint32_t r = 0; r < n; ++r) {
        KeyRow& k = scratch->keys[r];
        k.key = (k.key << bits) |
                static_cast<std::uint64_t>(rank[codes[k.row]]);
      }
    }
    std::sort(scratch->keys.begin(), scratch->keys.end(),
              [](const KeyRow& a, const KeyRow& b) { return a.key < b.key; });
  } else {
    scratch->order.resize(n);
    std::iota(scratch->order.begin(), scratch->order.end(), 0u);
    std::sort(scratch->order.begin(), scratch->order.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                for (std::size_t c : request.qid_columns) {
                  const Column& col = agg.columns[c];
                  const std::int32_t ra = col.lex_rank[col.codes[a]];
                  const std::int32_t rb = col.lex_rank[col.codes[b]];
                  if (ra != rb) return ra < rb;
                }
                return false;
              });
  }

  const auto row_at = [&](std::uint32_t pos) -> std::uint32_t {
    return packed ? scratch->keys[pos].row : scratch->order[pos];
  };
  const auto same_class = [&](std::uint32_t a, std::uint32_t b) -> bool {
    if (packed) return scratch->keys[a].key == scratch->keys[b].key;
    const std::uint32_t ra = scratch->order[a];
    const std::uint32_t rb = scratch->order[b];
    for (std::size_t c : request.qid_columns) {
      const Column& col = agg.columns[c];
      if (col.codes[ra] != col.codes[rb]) return false;
    }
    return true;
  };

  const std::size_t ns = request.secret_columns.size();
  scratch->secrets.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    scratch->secrets[s].counts.assign(
        agg.columns[request.secret_columns[s]].dict.size(), 0);
    scratch->secrets[s].touched.clear();
  }

  std::vector<std::size_t> hits;  // target slots present in the open class
  std::uint32_t start = 0;
  while (start < n) {
    std::uint32_t end = start + 1;
    while (end < n && same_class(start, end)) ++end;
    const std::uint64_t size = end - start;

    ++summary.classes;
    if (size == 1) ++summary.singletons;
    if (request.class_sizes != nullptr) request.class_sizes->push_back(size);

    if (!request.target_rows.empty()) {
      hits.clear();
      for (std::uint32_t pos = start; pos < end; ++pos) {
        const std::uint32_t r = row_at(pos);
        for (std::size_t t = 0; t < request.target_rows.size(); ++t)
          if (request.target_rows[t] == r) hits.push_back(t);
      }
      for (std::size_t t : hits) summary.targets[t].class_size = size;
    }

    for (std::size_t s = 0; s < ns; ++s) {
      const Column& col = agg.columns[request.secret_columns[s]];
      auto& sc = scratch->secrets[s];
      for (std::uint32_t pos = start; pos < end; ++pos) {
        const std::int32_t code = col.codes[row_at(pos)];
        if (sc.counts[code]++ == 0) sc.touched.push_back(code);
      }
      std::uint64_t max_count = 0;
      for (std::int32_t code : sc.touched) {
        if (sc.counts[code] > max_count) max_count = sc.counts[code];
        sc.counts[code] = 0;
      }
      const std::uint64_t distinct = sc.touched.size();
      sc.touched.clear();

      summary.secrets[s].sum_max += max_count;
      if (distinct == 1) summary.secrets[s].certain_records += size;
      if (!request.target_rows.empty()) {
        for (std::size_t t : hits) {
          summary.targets[t].max_count[s] = max_count;
          summary.targets[t].distinct[s] = distinct;
        }
      }
    }
    start = end;
  }
  return summary;
}

namespace {

// Per-template facts that do not depend on the QID subset.
struct TemplatePrep {
  AttackSpec spec;
  int secret_slot = -1;  // into PartitionRequest::secret_columns
  int target_slot = -1;  // into PartitionRequest::target_rows
  Rational prior_prob;
  bool prior_point = false;
};

struct EnginePrep {
  std::vector<std::size_t> secret_cols;
  std::vector<std::uint32_t> target_rows;
  std::vector<TemplatePrep> templates;
};

Rational CountRatio(std::uint64_t num, std::uint64_t den) {
  return Rational::FromCounts(num, den);
}

EnginePrep PrepareTemplates(const AggregatedDataset& agg,
                            const std::vector<AttackSpec>& templates) {
  if (templates.empty())
    throw std::invalid_argument("no attack templates registered");
  if (agg.row_count == 0) throw DataError("empty aggregated dataset");
  const std::uint64_t n = agg.row_count;

  EnginePrep prep;
  for (const AttackSpec& t : templates) {
    if (t.prior_mode != PriorMode::kUniformRecords)
      throw std::invalid_argument(
          "the engine evaluates the uniform record prior; explicit priors "
          "run through the reference pipeline");
    TemplatePrep tp;
    tp.spec = t;
    const BuiltSecret secret = BuildSecret(t, agg);

    if (t.info == InfoAxis::kReidentification) {
      // Ids are unique after treatment, so the class structure alone
      // determines every re-identification metric.
      tp.prior_prob = UniformPriorVulnerability(n);
      tp.prior_point = (n == 1);
    } else {
      const auto it = std::find(prep.secret_cols.begin(),
                                prep.secret_cols.end(), secret.column);
      if (it == prep.secret_cols.end()) {
        tp.secret_slot = static_cast<int>(prep.secret_cols.size());
        prep.secret_cols.push_back(secret.column);
      } else {
        tp.secret_slot = static_cast<int>(it - prep.secret_cols.begin());
      }
      const Column& col = agg.columns[secret.column];
      std::vector<std::uint64_t> marginal(col.dict.size(), 0);
      for (std::int32_t code : col.codes) ++marginal[code];
      const std::uint64_t max_count =
          *std::max_element(marginal.begin(), marginal.end());
      tp.prior_prob = CountRatio(max_count, n);
      tp.prior_point = (max_count == n);
    }

    if (t.target == TargetAxis::kIndividual) {
      const auto row = agg.RowOfId(*t.target_id);
      if (!row) throw DataError("unknown target id '" + *t.target_id + "'");
      const auto it = std::find(prep.target_rows.begin(),
                                prep.target_rows.end(), *row);
      if (it == prep.target_rows.end()) {
        tp.target_slot = static_cast<int>(prep.target_rows.size());
        prep.target_rows.push_back(*row);
      } else {
        tp.target_slot = static_cast<int>(it - prep.target_rows.begin());
      }
    }
    prep.templates.push_back(std::move(tp));
  }
  return prep;
}

// Rejects QID sets that contain a registered secret column.
void CheckNoSecretLeak(const AggregatedDataset& agg, const EnginePrep& prep,
                       const std::vector<std::size_t>& qid_cols) {
  for (std::size_t q : qid_cols) {
    for (std::size_t s : prep.secret_cols) {
      if (q == s)
        throw ConfigError("secret leaks through observation: '" +
                          QualifiedName(agg.columns[q].id) + "'");
    }
  }
}

struct SubsetEval {
  std::vector<AttackResult> results;
  std::uint64_t classes = 0;
  std::uint64_t singletons = 0;
};

AttackResult ResultFromSummary(const TemplatePrep& tp,
                               const std::vector<AttributeId>& qid_ids,
                               const PartitionSummary& summary) {
  const std::uint64_t n = summary.records;
  AttackResult r;
  r.spec = tp.spec;
  r.spec.qids = qid_ids;
  r.n_records = n;
  r.n_classes = summary.classes;
  r.n_singletons = summary.singletons;

  const Rational prior_prob = tp.prior_prob;
  const Rational prior_det = tp.prior_point ? Rational(1) : Rational(0);

  Rational post_prob;
  Rational post_det;
  if (tp.spec.info == InfoAxis::kReidentification) {
    post_prob = CountRatio(summary.classes, n);
    post_det = CountRatio(summary.singletons, n);
    r.n_certain = summary.singletons;
  } else {
    const auto& sec = summary.secrets[tp.secret_slot];
    post_prob = CountRatio(sec.sum_max, n);
    post_det = CountRatio(sec.certain_records, n);
    r.n_certain = sec.certain_records;
  }

  if (tp.spec.target == TargetAxis::kIndividual) {
    const TargetClassStats& ts = summary.targets[tp.target_slot];
    if (tp.spec.info == InfoAxis::kReidentification) {
      post_prob = CountRatio(1, ts.class_size);
      post_det = ts.class_size == 1 ? Rational(1) : Rational(0);
    } else {
      post_prob = CountRatio(ts.max_count[tp.secret_slot], ts.class_size);
      post_det = ts.distinct[tp.secret_slot] == 1 ? Rational(1) : Rational(0);
    }
  }

  r.prior_prob = MetricValue::FromRational(prior_prob);
  r.prior_det = MetricValue::FromRational(prior_det);
  r.post_prob = MetricValue::FromRational(post_prob);
  r.post_det = MetricValue::FromRational(post_det);
  r.det_additive = MetricValue::FromRational(post_det - prior_det);
  if (!prior_prob.is_zero())
    r.prob_multiplicative = MetricValue::FromRational(post_prob / prior_prob);
  return r;
}

SubsetEval EvaluateOnColumns(const AggregatedDataset& agg,
                             const std::vector<std::size_t>& qid_cols,
                             const EnginePrep& prep, PassScratch* scratch) {
  PartitionRequest request;
  request.qid_columns = qid_cols;
  request.secret_columns = prep.secret_cols;
  request.target_rows = prep.target_rows;
  const PartitionSummary summary = PartitionPass(agg, request, scratch);

  std::vector<AttributeId> qid_ids;
  qid_ids.reserve(qid_cols.size());
  for (std::size_t c : qid_cols) qid_ids.push_back(agg.columns[c].id);

  SubsetEval eval;
  eval.classes = summary.classes;
  eval.singletons = summary.singletons;
  eval.results.reserve(prep.templates.size());
  for (const TemplatePrep& tp : prep.templates)
    eval.results.push_back(ResultFromSummary(tp, qid_ids, summary));
  return eval;
}

std::vector<std::size_t> ResolveRefOrThrow(const AggregatedDataset& agg,
                                           const std::string& ref) {
  std::vector<std::size_t> cols = agg.Resolve(ref);
  if (cols.empty()) throw ConfigError("unknown attribute '" + ref + "'");
  return cols;
}

std::vector<std::size_t> MergeColumns(
    const std::vector<std::vector<std::size_t>>& groups) {
  std::vector<std::size_t> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> SortedNames(const AggregatedDataset& agg,
                                     const std::vector<std::size_t>& cols) {
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (std::size_t c : cols) names.push_back(QualifiedName(agg.columns[c].id));
  std::sort(names.begin(), names.end());
  return names;
}

std::string JoinNames(const std::vector<std::string>& names) {
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out.push_back(',');
    out.append(names[i]);
  }
  out.push_back('}');
  return out;
}

}  // namespace

std::vector<AttackResult> EvaluateAttacks(
    const AggregatedDataset& agg, const std::vector<std::string>& qid_refs,
    const std::vector<AttackSpec>& attack_templates) {
  std::vector<std::vector<std::size_t>> groups;
  groups.reserve(qid_refs.size());
  for (const auto& ref : qid_refs) groups.push_back(ResolveRefOrThrow(agg, ref));
  const std::vector<std::size_t> cols = MergeColumns(groups);
  const EnginePrep prep = PrepareTemplates(agg, attack_templates);
  CheckNoSecretLeak(agg, prep, cols);
  return EvaluateOnColumns(agg, cols, prep, nullptr).results;
}

std::vector<AttackResult> RunSweep(const SweepPlan& plan,
                                   const AggregatedDataset& agg,
                                   std::ostream* progress) {
  const std::size_t k = plan.qid_superset.size();
  if (k == 0) return {};
  if (k > 24) throw ConfigError("qid superset too large (max 24 attributes)");

  std::vector<std::vector<std::size_t>> entry_cols;
  entry_cols.reserve(k);
  for (const auto& ref : plan.qid_superset)
    entry_cols.push_back(ResolveRefOrThrow(agg, ref));

  const EnginePrep prep = PrepareTemplates(agg, plan.attack_templates);
  CheckNoSecretLeak(agg, prep, MergeColumns(entry_cols));

  struct Task {
    std::uint32_t mask;
    std::vector<std::size_t> columns;
    std::vector<std::string> names;
  };
  const std::size_t max_size =
      plan.max_subset_size == 0 ? k : plan.max_subset_size;
  std::vector<Task> tasks;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > max_size) continue;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t e = 0; e < k; ++e)
      if (mask & (1u << e)) groups.push_back(entry_cols[e]);
    Task task;
    task.mask = mask;
    task.columns = MergeColumns(groups);
    task.names = SortedNames(agg, task.columns);
    tasks.push_back(std::move(task));
  }
  // Canonical output order: subset size ascending, then attribute names.
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
    if (a.columns.size() != b.columns.size())
      return a.columns.size() < b.columns.size();
    if (a.names != b.names) return a.names < b.names;
    return a.mask < b.mask;
  });

  // Workers pull subsets largest-first; larger subsets produce more classes
  // and tend to take longer, so this balances the tail.
  std::vector<std::size_t> exec_order(tasks.size());
  std::iota(exec_order.begin(), exec_order.end(), std::size_t{0});
  std::stable_sort(exec_order.begin(), exec_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return tasks[a].columns.size() > tasks[b].columns.size();
                   });

  unsigned workers = plan.worker_count;
  if (workers == 0) {
    workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 2;
  }
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(tasks.size(), 1)));

  std::vector<std::vector<AttackResult>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> completed{0};
  std::atomic<bool> failed{false};
  std::mutex report_mutex;
  std::exception_ptr first_error;
  std::string failed_subset;
  const auto t0 = std::chrono::steady_clock::now();

  auto worker = [&]() {
    std::unique_ptr<PassScratch, PassScratchDeleter> scratch(NewPassScratch());
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= exec_order.size()) break;
      const Task& task = tasks[exec_order[i]];
      try {
        SubsetEval eval =
            EvaluateOnColumns(agg, task.columns, prep, scratch.get());
        const std::size_t done = completed.fetch_add(1) + 1;
        if (progress != nullptr) {
          const auto elapsed =
              std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
          std::lock_guard<std::mutex> lock(report_mutex);
          (*progress) << "[" << done << "/" << tasks.size() << "] "
                      << JoinNames(task.names) << " elapsed_ms=" << elapsed
                      << " classes=" << eval.classes
                      << " singletons=" << eval.singletons << "\n";
        }
        slots[exec_order[i]] = std::move(eval.results);
      } catch (...) {
        std::lock_guard<std::mutex> lock(report_mutex);
        if (!first_error) {
          first_error = std::current_exception();
          failed_subset = JoinNames(task.names);
        }
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep failed at subset " + failed_subset + ": " +
                        e.what());
    } catch (const DataError& e) {
      throw DataError("sweep failed at subset " + failed_subset + ": " +
                      e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep failed at subset " + failed_subset +
                               ": " + e.what());
    }
  }

  std::vector<AttackResult> results;
  results.reserve(tasks.size() * plan.attack_templates.size());
  for (auto& slot : slots)
    for (auto& r : slot) results.push_back(std::move(r));
  return results;
}

std::vector<AttackResult> RunLongitudinalGrowth(
    const LongitudinalCollection& collection,
    const std::vector<std::string>& qid_refs,
    const std::vector<AttackSpec>& attack_templates, std::ostream* progress) {
  if (collection.datasets.empty())
    throw DataError("empty longitudinal collection");
  for (const AttackSpec& t : attack_templates)
    if (t.info == InfoAxis::kMembership)
      throw ConfigError("growth runs do not support membership attacks");

  std::vector<AttackResult> results;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t p = 1; p <= collection.datasets.size(); ++p) {
    const AggregatedDataset agg = AggregateSpan(
        std::span<const MicrodataTable>(collection.datasets.data(), p),
        JoinMode::kFocalLeftOuter, nullptr);

    std::vector<std::vector<std::size_t>> groups;
    for (const auto& ref : qid_refs) {
      std::vector<std::size_t> cols = agg.Resolve(ref);
      if (cols.empty())
        throw ConfigError("attribute '" + ref + "' unavailable in prefix of " +
                          std::to_string(p) + " dataset(s)");
      groups.push_back(std::move(cols));
    }
    const std::vector<std::size_t> cols = MergeColumns(groups);

    std::vector<AttackSpec> prefix_templates = attack_templates;
    for (AttackSpec& t : prefix_templates)
      t.access = p == 1 ? AccessAxis::kSingle : AccessAxis::kLongitudinal;

    const EnginePrep prep = PrepareTemplates(agg, prefix_templates);
    CheckNoSecretLeak(agg, prep, cols);
    SubsetEval eval = EvaluateOnColumns(agg, cols, prep, nullptr);
    for (AttackResult& r : eval.results) {
      r.prefix_datasets = static_cast<int>(p);
      results.push_back(std::move(r));
    }
    if (progress != nullptr) {
      const auto elapsed =
          std::chrono::duration_cast<std::chrono::milliseconds>(
              std::chrono::steady_clock::now() - t0)
              .count();
      (*progress) << "[prefix " << p << "/" << collection.datasets.size()
                  << "] " << JoinNames(SortedNames(agg, cols))
                  << " elapsed_ms=" << elapsed << " classes=" << eval.classes
                  << " singletons=" << eval.singletons << "\n";
    }
  }
  return results;
}

}  // namespace privaudit
