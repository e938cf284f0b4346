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

#include "privaudit/runner.h"

#include <chrono>
#include <fstream>
#include <ostream>
#include <span>
#include <unordered_set>

#include "privaudit/engine.h"
#include "privaudit/errors.h"
#include "privaudit/report.h"

namespace privaudit {

namespace {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Clock = std::chrono::steady_clock;

std::int64_t MsSince(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

// One evaluation group: specs sharing access axis and join mode, so they
// can run on the same aggregate.
struct Group {
  AccessAxis access;
  JoinMode mode;
  std::vector<AttackSpec> specs;
};

std::vector<AttackSpec> BuildSpecs(const RunConfig& config) {
  std::vector<AttackSpec> specs;
  for (const std::string& code : config.attacks) {
    const AttackAxes axes = *ParseAttackCode(code);
    AttackSpec base;
    base.info = axes.info;
    base.target = axes.target;
    base.access = axes.access;
    if (axes.target == TargetAxis::kIndividual)
      base.target_id = config.target_id;
    if (axes.info == InfoAxis::kAttribute) {
      // One independent attack per sensitive attribute; they share the
      // partition pass downstream.
      for (const std::string& name : config.sensitive) {
        const AttributeRef ref = ParseAttributeRef(name);
        AttackSpec spec = base;
        spec.sensitive = AttributeId{ref.name, ref.origin.value_or(1)};
        specs.push_back(std::move(spec));
      }
    } else {
      specs.push_back(std::move(base));
    }
  }
  return specs;
}

std::vector<std::string> PopulationIds(const RunConfig& config) {
  const MicrodataTable table =
      LoadTable(config.population, config.id_column, config.delimiter[0]);
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  ids.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string raw = DecodeCell(table.id_of(r));
    if (seen.insert(raw).second) ids.push_back(std::move(raw));
  }
  return ids;
}

}  // namespace

RunOutput RunAudit(const RunConfig& config, std::ostream* progress) {
  ValidateConfig(config);
  const char delimiter = config.delimiter[0];
  nlohmann::json timings;
  const Clock::time_point start = Clock::now();

  LongitudinalCollection collection;
  collection.datasets.push_back(
      LoadTable(config.focal, config.id_column, delimiter));
  for (const std::string& path : config.auxiliaries)
    collection.datasets.push_back(LoadTable(path, config.id_column, delimiter));
  const std::int64_t load_ms = MsSince(start);

  const Clock::time_point treat_start = Clock::now();
  for (std::size_t d = 0; d < collection.datasets.size(); ++d) {
    DedupStats stats;
    collection.datasets[d] =
        Deduplicate(collection.datasets[d], MixSeed(config.seed, d), &stats);
    if (progress != nullptr) {
      (*progress) << "treated " << collection.datasets[d].source
                  << ": removed " << stats.rows_removed << " duplicate row(s), "
                  << collection.datasets[d].rows.size() << " kept\n";
    }
  }
  if (collection.datasets.front().rows.empty())
    throw DataError(config.focal + ": no records after treatment");
  const std::int64_t treat_ms = MsSince(treat_start);

  bool need_population = false;
  for (const std::string& code : config.attacks)
    if (ParseAttackCode(code)->info == InfoAxis::kMembership)
      need_population = true;
  std::vector<std::string> population_ids;
  if (!config.population.empty()) {
    if (need_population) {
      population_ids = PopulationIds(config);
    } else if (progress != nullptr) {
      (*progress) << "note: population file ignored (no membership attack)\n";
    }
  }

  const Clock::time_point eval_start = Clock::now();
  std::vector<AttackResult> results;

  const std::vector<AttackSpec> specs = BuildSpecs(config);
  if (config.growth) {
    results = RunLongitudinalGrowth(collection, config.qids, specs, progress);
  } else {
    // Fixed evaluation order: single-dataset groups before longitudinal,
    // left-outer before full-outer. Within a group the engine's canonical
    // ordering applies.
    const Group group_keys[] = {
        {AccessAxis::kSingle, JoinMode::kFocalLeftOuter, {}},
        {AccessAxis::kSingle, JoinMode::kFullOuter, {}},
        {AccessAxis::kLongitudinal, JoinMode::kFocalLeftOuter, {}},
        {AccessAxis::kLongitudinal, JoinMode::kFullOuter, {}},
    };
    for (const Group& key : group_keys) {
      std::vector<AttackSpec> group_specs;
      for (const AttackSpec& spec : specs) {
        const JoinMode mode = spec.info == InfoAxis::kMembership
                                  ? JoinMode::kFullOuter
                                  : JoinMode::kFocalLeftOuter;
        if (spec.access == key.access && mode == key.mode)
          group_specs.push_back(spec);
      }
      if (group_specs.empty()) continue;

      const std::size_t joined = key.access == AccessAxis::kSingle
                                     ? 1
                                     : collection.datasets.size();
      const AggregatedDataset agg = AggregateSpan(
          std::span<const MicrodataTable>(collection.datasets.data(), joined),
          key.mode,
          key.mode == JoinMode::kFullOuter && !population_ids.empty()
              ? &population_ids
              : nullptr);

      std::vector<AttackResult> group_results;
      if (config.sweep) {
        SweepPlan plan;
        plan.qid_superset = config.qids;
        plan.max_subset_size = static_cast<std::size_t>(config.max_qids);
        plan.attack_templates = group_specs;
        plan.worker_count = static_cast<unsigned>(config.threads);
        group_results = RunSweep(plan, agg, progress);
      } else {
        group_results = EvaluateAttacks(agg, config.qids, group_specs);
      }
      for (AttackResult& r : group_results) results.push_back(std::move(r));
    }
  }
  const std::int64_t eval_ms = MsSince(eval_start);

  const Clock::time_point write_start = Clock::now();
  RunOutput out;
  out.results = std::move(results);

  if (config.format == "csv") {
    std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError(config.output + ": cannot open for writing");
    WriteResultsCsv(file, out.results);
    if (!file) throw DataError(config.output + ": write failed");
  } else {
    if (config.emit_timings) {
      timings["load_ms"] = load_ms;
      timings["treat_ms"] = treat_ms;
      timings["evaluate_ms"] = eval_ms;
    } else {
      timings = nullptr;
    }
    out.document = ResultsToJson(ConfigEcho(config), out.results, timings);
    std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError(config.output + ": cannot open for writing");
    file << out.document.dump(2) << '\n';
    if (!file) throw DataError(config.output + ": write failed");
  }

  if (config.emit_plot_data) {
    const std::string plot_path = config.output + ".plot.csv";
    std::ofstream file(plot_path, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError(plot_path + ": cannot open for writing");
    WritePlotDataCsv(file, out.results);
    if (!file) throw DataError(plot_path + ": write failed");
    if (out.results.empty() && progress != nullptr)
      (*progress) << "warning: no results; plot data file has header only\n";
  }

  if (progress != nullptr) {
    (*progress) << "wrote " << out.results.size() << " result row(s) to "
                << config.output << " (" << MsSince(write_start)
                << " ms write, " << MsSince(start) << " ms total)\n";
  }
  return out;
}

}  // namespace privaudit
