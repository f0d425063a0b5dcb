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

#ifndef HAL_METRICS_H_
#define HAL_METRICS_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hal {

// The metric is not defined for the given labels (e.g. no positives).
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct OperatingPoint {
  // Predict positive when score >= threshold.
  double threshold;
  double precision;
  double recall;
  std::size_t tp;
  std::size_t fp;
  std::size_t fn;
};

// Precision-recall operating points, one per distinct score, in descending
// threshold order (so recall is non-decreasing along the vector).
struct PrCurve {
  std::vector<OperatingPoint> points;
  std::size_t positives = 0;
};

// Throws UndefinedMetric if no label is positive, InvalidArgument on a size
// mismatch or a NaN score.
PrCurve ComputePrCurve(std::span<const double> scores,
                       std::span<const bool> is_positive);

// Average precision: sum of (recall_i - recall_{i-1}) * precision_i along
// the curve, with recall_0 = 0.
double AucPr(const PrCurve& curve);

// Largest recall among points with precision >= floor; 0 if none.
double RecallAtPrecision(const PrCurve& curve, double precision_floor);

}  // namespace hal

#endif  // HAL_METRICS_H_
