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

#ifndef HAL_CLASSIFIER_H_
#define HAL_CLASSIFIER_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "hal/domain.h"
#include "hal/rng.h"

namespace hal {

struct MlpConfig {
  std::size_t input_dim = 10;
  std::size_t hidden_width = 50;
  std::size_t num_hidden_layers = 2;
  int num_classes = 2;
  double learning_rate = 0.05;
  std::size_t epochs = 10;
  std::size_t minibatch_size = 32;
  // Half-width of the uniform weight init. Zero selects the scaled default
  // sqrt(6 / (fan_in + fan_out)) per layer.
  double init_scale = 0.0;
  double adagrad_epsilon = 1e-8;

  // Throws InvalidArgument on an unusable configuration.
  void Validate() const;
};

// Softmax output for one example; probs[k] is the probability of class k+1.
struct PredictionVector {
  std::vector<double> probs;
};

// One fully connected layer. Weights are row-major [fan_in][fan_out] so a
// forward pass streams through contiguous output rows.
struct DenseLayer {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<double> weights;
  std::vector<double> biases;
  // Adagrad sums of squared gradients, same shapes as the parameters.
  std::vector<double> weight_accum;
  std::vector<double> bias_accum;
};

// Parameter gradients with the same layout as Mlp::layers().
struct MlpGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Feed-forward ReLU network with a softmax head, trained with minibatch
// Adagrad on mean cross-entropy.
//
// Arithmetic is plain double precision in a fixed summation order, so the
// output for a row does not depend on which batch it is evaluated in.
class Mlp {
 public:
  // Fresh network: uniform weights in [-s, s], zero biases, zero Adagrad
  // accumulators.
  static Mlp Initialize(const MlpConfig& config, RngStream& rng);

  const MlpConfig& config() const { return config_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Throws InvalidArgument on a dimension mismatch or non-finite input.
  PredictionVector PredictProba(std::span<const double> x) const;

  // `rows` holds `rows.size() / input_dim` examples back to back; writes
  // num_classes probabilities per example into `probs`. Identical, bit for
  // bit, to calling PredictProba row by row.
  void PredictProbaBatch(std::span<const double> rows,
                         std::span<double> probs) const;
  std::vector<PredictionVector> PredictProbaBatch(
      std::span<const FeatureVector> xs) const;

  // Mean cross-entropy over the rows and, if `gradients` is non-null, its
  // gradient with respect to every parameter.
  double LossAndGradients(std::span<const double> rows,
                          std::span<const Label> labels,
                          MlpGradients* gradients) const;

  // accum += g^2; param -= lr * g / sqrt(accum + eps).
  void ApplyAdagrad(const MlpGradients& gradients);

  // Plain-text dump: a "hal-mlp 1" line, the layer sizes, then per layer the
  // row-major weights, biases, weight accumulators and bias accumulators.
  void Save(std::ostream& out) const;
  static Mlp Load(std::istream& in, const MlpConfig& config);

 private:
  MlpConfig config_;
  std::vector<DenseLayer> layers_;
};

struct TrainingReport {
  // Example-weighted mean minibatch loss of each epoch.
  std::vector<double> epoch_losses;
};

// Trains a fresh network on `ids` of `data` for config.epochs epochs.
//
// The ids are sorted before use, so the result depends only on the labeled
// set, the config and `rng` (init and per-epoch shuffles are drawn from
// separate children of it). Throws InvalidArgument if `ids` is empty or the
// data dimension disagrees with config.input_dim.
Mlp Train(const Dataset& data, std::span<const ExampleId> ids,
          const MlpConfig& config, const RngStream& rng,
          TrainingReport* report = nullptr);

}  // namespace hal

#endif  // HAL_CLASSIFIER_H_
