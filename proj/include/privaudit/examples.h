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

// Bundled worked examples with known-good figures: a ten-student
// two-release collection and a four-row language table. The
// `paper-examples` CLI subcommand replays them end to end and asserts every
// published number, doubling as living documentation of the pipeline.

#ifndef PRIVAUDIT_EXAMPLES_H_
#define PRIVAUDIT_EXAMPLES_H_

#include <iosfwd>

#include "privaudit/dataset.h"

namespace privaudit {

// Two yearly releases over ten students: the focal release carries
// (id, age, gender, grade, disability), the auxiliary one (id, age, grade)
// for nine of the ten students plus one student absent from the focal
// release.
LongitudinalCollection StudentExampleCollection();

// Four individuals with (id, language, gender, age).
MicrodataTable LanguageExampleTable();

// Replays every bundled example through both the reference pipeline and
// the engine, printing one ok/FAIL line per assertion. Returns true iff
// all assertions hold.
bool RunBuiltinExamples(std::ostream& out);

}  // namespace privaudit

#endif  // PRIVAUDIT_EXAMPLES_H_
