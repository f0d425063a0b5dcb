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

#include "hal/results_io.h"

#include <istream>
#include <ostream>
#include <sstream>

#include "hal/datasets.h"

namespace hal {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void WriteResultsCsv(std::ostream& out, std::span<const RunRecord> records,
                     bool header) {
  if (header) out << kResultsCsvHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.experiment << ',' << r.algorithm << ',' << FormatNumber(r.p) << ','
        << SchemeName(r.scheme) << ',' << FormatNumber(r.skew) << ','
        << r.repetition << ',' << r.metrics.round << ','
        << r.metrics.labeled_count << ',' << FormatNumber(r.metrics.auc_pr)
        << ',' << FormatNumber(r.metrics.recall_at_p90) << ','
        << FormatNumber(r.metrics.recall_at_p80) << '\n';
  }
}

void WriteAggregateCsv(std::ostream& out, std::span<const AggregateRow> rows,
                       bool header) {
  if (header) out << kAggregateCsvHeader << '\n';
  for (const AggregateRow& r : rows) {
    out << r.experiment << ',' << r.algorithm << ',' << FormatNumber(r.p) << ','
        << SchemeName(r.scheme) << ',' << FormatNumber(r.skew) << ','
        << r.round << ',' << r.labeled_count << ',' << r.repetitions << ','
        << FormatNumber(r.auc_pr.mean) << ','
        << FormatNumber(r.auc_pr.std_error) << ','
        << FormatNumber(r.recall_at_p90.mean) << ','
        << FormatNumber(r.recall_at_p90.std_error) << ','
        << FormatNumber(r.recall_at_p80.mean) << ','
        << FormatNumber(r.recall_at_p80.std_error) << '\n';
  }
}

std::vector<RunRecord> ReadResultsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader) {
    throw FormatError("results CSV: unexpected header");
  }
  std::vector<RunRecord> records;
  for (std::size_t number = 2; std::getline(in, line); ++number) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != 11) {
      throw FormatError("results CSV: line " + std::to_string(number) +
                        " has " + std::to_string(cells.size()) + " fields");
    }
    try {
      RunRecord r;
      r.experiment = cells[0];
      r.algorithm = cells[1];
      r.p = std::stod(cells[2]);
      r.scheme = ParseScheme(cells[3]);
      r.skew = std::stod(cells[4]);
      r.repetition = std::stoul(cells[5]);
      r.metrics.round = std::stoul(cells[6]);
      r.metrics.labeled_count = std::stoul(cells[7]);
      r.metrics.auc_pr = std::stod(cells[8]);
      r.metrics.recall_at_p90 = std::stod(cells[9]);
      r.metrics.recall_at_p80 = std::stod(cells[10]);
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw FormatError("results CSV: line " + std::to_string(number) + ": " +
                        e.what());
    }
  }
  return records;
}

}  // namespace hal
