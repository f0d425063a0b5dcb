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

#include "hal/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hal/domain.h"

namespace hal {

PrCurve ComputePrCurve(std::span<const double> scores,
                       std::span<const bool> is_positive) {
  if (scores.size() != is_positive.size()) {
    throw InvalidArgument("ComputePrCurve: scores and labels differ in length");
  }
  PrCurve curve;
  curve.positives = static_cast<std::size_t>(
      std::count(is_positive.begin(), is_positive.end(), true));
  if (curve.positives == 0) {
    throw UndefinedMetric("ComputePrCurve: no positive labels");
  }
  for (const double s : scores) {
    if (std::isnan(s)) throw InvalidArgument("ComputePrCurve: NaN score");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  const double positives = static_cast<double>(curve.positives);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    // Equal scores form one operating point.
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      ++(is_positive[order[i]] ? tp : fp);
    }
    curve.points.push_back(
        {threshold, static_cast<double>(tp) / static_cast<double>(tp + fp),
         static_cast<double>(tp) / positives, tp, fp, curve.positives - tp});
  }
  return curve;
}

double AucPr(const PrCurve& curve) {
  double area = 0.0;
  double previous_recall = 0.0;
  for (const OperatingPoint& point : curve.points) {
    area += (point.recall - previous_recall) * point.precision;
    previous_recall = point.recall;
  }
  return area;
}

double RecallAtPrecision(const PrCurve& curve, double precision_floor) {
  if (!(precision_floor > 0.0 && precision_floor <= 1.0)) {
    throw InvalidArgument("RecallAtPrecision: floor must be in (0, 1]");
  }
  double best = 0.0;
  for (const OperatingPoint& point : curve.points) {
    if (point.precision >= precision_floor) best = std::max(best, point.recall);
  }
  return best;
}

}  // namespace hal
