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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "privaudit/config.h"
#include "privaudit/dataset.h"
#include "privaudit/errors.h"
#include "privaudit/examples.h"
#include "privaudit/runner.h"

namespace {

int RunTreat(const std::string& input, const std::string& id_column,
             const std::string& delimiter, std::uint64_t seed,
             const std::string& output) {
  if (delimiter.size() != 1)
    throw privaudit::ConfigError("delimiter must be a single character");
  const privaudit::MicrodataTable table =
      privaudit::LoadTable(input, id_column, delimiter[0]);
  privaudit::DedupStats stats;
  const privaudit::MicrodataTable treated =
      privaudit::Deduplicate(table, seed, &stats);
  privaudit::WriteTable(treated, output, delimiter[0]);
  privaudit::WriteTreatmentReport(stats, output + ".treatment.csv",
                                  delimiter[0]);
  std::cerr << "treated " << input << ": removed " << stats.rows_removed
            << " duplicate row(s), " << treated.rows.size() << " kept\n"
            << "wrote " << output << " and " << output << ".treatment.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "privaudit: quantifies re-identification, attribute-inference and "
      "membership risk of tabular microdata releases"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand(
      "run", "Execute the audit described by a config file and/or flags");
  std::string config_path;
  run->add_option("--config", config_path,
                  "Config file (flat key = value; repeatable keys for "
                  "auxiliary/qid/sensitive/attack)");
  privaudit::RunConfig flags;
  std::string sweep_str, growth_str, plot_str, timings_str;
  auto* focal_opt = run->add_option("--focal", flags.focal, "Focal dataset");
  auto* aux_opt = run->add_option("--auxiliary", flags.auxiliaries,
                                  "Auxiliary dataset (repeatable, in order)");
  auto* id_opt =
      run->add_option("--id_column", flags.id_column, "Persistent id column");
  auto* delim_opt =
      run->add_option("--delimiter", flags.delimiter, "Field delimiter");
  auto* qid_opt = run->add_option(
      "--qid", flags.qids, "QID attribute, 'name' or 'name@origin' (repeatable)");
  auto* sens_opt = run->add_option("--sensitive", flags.sensitive,
                                   "Sensitive attribute (repeatable)");
  auto* attack_opt = run->add_option(
      "--attack", flags.attacks, "Attack code such as CAL, CRS, IMS (repeatable)");
  auto* sweep_opt =
      run->add_option("--sweep", sweep_str, "on|off: all non-empty QID subsets");
  auto* growth_opt = run->add_option(
      "--growth", growth_str, "on|off: re-attack per collection prefix");
  auto* maxq_opt =
      run->add_option("--max_qids", flags.max_qids, "Subset size cap (0 = all)");
  auto* seed_opt = run->add_option("--seed", flags.seed, "Treatment RNG seed");
  auto* threads_opt =
      run->add_option("--threads", flags.threads, "Sweep workers (0 = auto)");
  auto* output_opt = run->add_option("--output", flags.output, "Result file");
  auto* format_opt = run->add_option("--format", flags.format, "csv|json");
  auto* plot_opt = run->add_option("--emit_plot_data", plot_str,
                                   "on|off: also write <output>.plot.csv");
  auto* timings_opt = run->add_option("--emit_timings", timings_str,
                                      "on|off: include timings in JSON output");
  auto* target_opt = run->add_option("--target_id", flags.target_id,
                                     "Target id for individual attacks");
  auto* pop_opt = run->add_option("--population", flags.population,
                                  "Universe file for membership attacks");

  // --- treat ---
  auto* treat = app.add_subcommand(
      "treat", "Keep one row per id and write the treated table plus a "
               "sidecar removal report");
  std::string t_input, t_id, t_delim = ",", t_output;
  std::uint64_t t_seed = 0;
  treat->add_option("--input", t_input, "Input table")->required();
  treat->add_option("--id_column", t_id, "Persistent id column")->required();
  treat->add_option("--delimiter", t_delim, "Field delimiter");
  treat->add_option("--seed", t_seed, "Treatment RNG seed");
  treat->add_option("--output", t_output, "Treated table path")->required();

  // --- paper-examples ---
  auto* examples = app.add_subcommand(
      "paper-examples",
      "Replay the bundled worked examples and assert their published figures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (examples->parsed()) {
      return privaudit::RunBuiltinExamples(std::cout) ? 0 : 3;
    }
    if (treat->parsed()) {
      return RunTreat(t_input, t_id, t_delim, t_seed, t_output);
    }

    privaudit::RunConfig config;
    if (!config_path.empty()) config = privaudit::ParseConfigFile(config_path);
    if (focal_opt->count()) config.focal = flags.focal;
    if (aux_opt->count()) config.auxiliaries = flags.auxiliaries;
    if (id_opt->count()) config.id_column = flags.id_column;
    if (delim_opt->count()) config.delimiter = flags.delimiter;
    if (qid_opt->count()) config.qids = flags.qids;
    if (sens_opt->count()) config.sensitive = flags.sensitive;
    if (attack_opt->count()) config.attacks = flags.attacks;
    if (sweep_opt->count())
      privaudit::ApplyConfigValue(config, "sweep", sweep_str);
    if (growth_opt->count())
      privaudit::ApplyConfigValue(config, "growth", growth_str);
    if (maxq_opt->count()) config.max_qids = flags.max_qids;
    if (seed_opt->count()) config.seed = flags.seed;
    if (threads_opt->count()) config.threads = flags.threads;
    if (output_opt->count()) config.output = flags.output;
    if (format_opt->count()) config.format = flags.format;
    if (plot_opt->count())
      privaudit::ApplyConfigValue(config, "emit_plot_data", plot_str);
    if (timings_opt->count())
      privaudit::ApplyConfigValue(config, "emit_timings", timings_str);
    if (target_opt->count()) config.target_id = flags.target_id;
    if (pop_opt->count()) config.population = flags.population;

    privaudit::RunAudit(config, &std::cerr);
    return 0;
  } catch (const privaudit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const privaudit::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
