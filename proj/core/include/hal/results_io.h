/*
 * Copyright 2026 The HAL Simulator Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HAL_RESULTS_IO_H_
#define HAL_RESULTS_IO_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hal/experiment.h"

namespace hal {

// experiment,algorithm,p,scheme,skew,repetition,round,labeled_count,
// auc_pr,recall_at_p90,recall_at_p80
inline constexpr const char* kResultsCsvHeader =
    "experiment,algorithm,p,scheme,skew,repetition,round,labeled_count,"
    "auc_pr,recall_at_p90,recall_at_p80";

// Same keys minus repetition, plus the repetition count and _mean/_stderr
// pairs for each metric.
inline constexpr const char* kAggregateCsvHeader =
    "experiment,algorithm,p,scheme,skew,round,labeled_count,repetitions,"
    "auc_pr_mean,auc_pr_stderr,recall_at_p90_mean,recall_at_p90_stderr,"
    "recall_at_p80_mean,recall_at_p80_stderr";

void WriteResultsCsv(std::ostream& out, std::span<const RunRecord> records,
                     bool header = true);
void WriteAggregateCsv(std::ostream& out, std::span<const AggregateRow> rows,
                       bool header = true);

// Parses a results CSV written by WriteResultsCsv. Throws FormatError.
std::vector<RunRecord> ReadResultsCsv(std::istream& in);

}  // namespace hal

#endif  // HAL_RESULTS_IO_H_
