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

#include "hal/classifier.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace hal {
namespace {

constexpr std::size_t kPredictChunk = 256;

// Scratch buffers for one forward/backward pass over a minibatch.
struct Workspace {
  // activations[0] is the input; activations[l + 1] is layer l's output
  // (post-ReLU for hidden layers, softmax probabilities for the head).
  std::vector<std::vector<double>> activations;
  std::vector<double> delta;
  std::vector<double> delta_prev;

  void Reserve(const std::vector<DenseLayer>& layers, std::size_t rows) {
    activations.resize(layers.size() + 1);
    activations[0].resize(rows * layers.front().fan_in);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      activations[l + 1].resize(rows * layers[l].fan_out);
    }
  }
};

void CheckFinite(std::span<const double> values) {
  for (const double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("classifier input contains a non-finite value");
    }
  }
}

// out[r][j] = b[j] + sum_i in[r][i] * w[i][j], accumulated in increasing i.
// Rows are processed four at a time to reuse each weight row; the per-row
// summation order is the same as for a single row, so results do not depend
// on batch composition.
void DenseForward(const DenseLayer& layer, const double* in, std::size_t rows,
                  double* out) {
  const std::size_t n_in = layer.fan_in;
  const std::size_t n_out = layer.fan_out;
  const double* w = layer.weights.data();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(layer.biases.begin(), layer.biases.end(), out + r * n_out);
  }
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    double* o0 = out + r * n_out;
    double* o1 = o0 + n_out;
    double* o2 = o1 + n_out;
    double* o3 = o2 + n_out;
    const double* x = in + r * n_in;
    for (std::size_t i = 0; i < n_in; ++i) {
      const double x0 = x[i];
      const double x1 = x[n_in + i];
      const double x2 = x[2 * n_in + i];
      const double x3 = x[3 * n_in + i];
      const double* wi = w + i * n_out;
      for (std::size_t j = 0; j < n_out; ++j) {
        const double wj = wi[j];
        o0[j] += x0 * wj;
        o1[j] += x1 * wj;
        o2[j] += x2 * wj;
        o3[j] += x3 * wj;
      }
    }
  }
  for (; r < rows; ++r) {
    double* o = out + r * n_out;
    const double* x = in + r * n_in;
    for (std::size_t i = 0; i < n_in; ++i) {
      const double xi = x[i];
      const double* wi = w + i * n_out;
      for (std::size_t j = 0; j < n_out; ++j) o[j] += xi * wi[j];
    }
  }
}

void Relu(double* values, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    if (!(values[i] > 0.0)) values[i] = 0.0;
  }
}

// In-place softmax of each row. Returns the summed log-sum-exp minus the
// label logit when `labels` is non-empty (cross-entropy numerator).
double SoftmaxRows(double* logits, std::size_t rows, std::size_t classes,
                   std::span<const Label> labels) {
  double loss = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double* z = logits + r * classes;
    const double max_logit = *std::max_element(z, z + classes);
    double sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      z[k] = z[k] - max_logit;
      sum += std::exp(z[k]);
    }
    const double log_sum = std::log(sum);
    if (!labels.empty()) {
      loss += log_sum - z[static_cast<std::size_t>(labels[r] - 1)];
    }
    for (std::size_t k = 0; k < classes; ++k) z[k] = std::exp(z[k] - log_sum);
  }
  return loss;
}

void Forward(const std::vector<DenseLayer>& layers, Workspace& ws,
             std::size_t rows, std::span<const Label> labels, double* loss) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    double* out = ws.activations[l + 1].data();
    DenseForward(layers[l], ws.activations[l].data(), rows, out);
    if (l + 1 < layers.size()) {
      Relu(out, rows * layers[l].fan_out);
    } else {
      const double total =
          SoftmaxRows(out, rows, layers[l].fan_out, labels);
      if (loss != nullptr) *loss = total / static_cast<double>(rows);
    }
  }
}

void Backward(const std::vector<DenseLayer>& layers, Workspace& ws,
              std::size_t rows, std::span<const Label> labels,
              MlpGradients& grads) {
  const std::size_t depth = layers.size();
  const std::size_t classes = layers.back().fan_out;
  const double inv_rows = 1.0 / static_cast<double>(rows);

  // d(mean CE)/d(logits) = (p - onehot) / rows.
  ws.delta.assign(ws.activations[depth].begin(),
                  ws.activations[depth].begin() + rows * classes);
  for (std::size_t r = 0; r < rows; ++r) {
    ws.delta[r * classes + static_cast<std::size_t>(labels[r] - 1)] -= 1.0;
  }
  for (double& d : ws.delta) d *= inv_rows;

  for (std::size_t l = depth; l-- > 0;) {
    const DenseLayer& layer = layers[l];
    const std::size_t n_in = layer.fan_in;
    const std::size_t n_out = layer.fan_out;
    const double* a = ws.activations[l].data();
    std::vector<double>& gw = grads.weights[l];
    std::vector<double>& gb = grads.biases[l];
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* d = ws.delta.data() + r * n_out;
      for (std::size_t j = 0; j < n_out; ++j) gb[j] += d[j];
      const double* x = a + r * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        double* g = gw.data() + i * n_out;
        for (std::size_t j = 0; j < n_out; ++j) g[j] += xi * d[j];
      }
    }
    if (l == 0) break;
    // Propagate through W^T and the ReLU of the layer below.
    ws.delta_prev.assign(rows * n_in, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* d = ws.delta.data() + r * n_out;
      const double* x = a + r * n_in;
      double* dp = ws.delta_prev.data() + r * n_in;
      for (std::size_t i = 0; i < n_in; ++i) {
        if (!(x[i] > 0.0)) continue;
        const double* wi = layer.weights.data() + i * n_out;
        double s = 0.0;
        for (std::size_t j = 0; j < n_out; ++j) s += wi[j] * d[j];
        dp[i] = s;
      }
    }
    ws.delta.swap(ws.delta_prev);
  }
}

MlpGradients ZeroGradients(const std::vector<DenseLayer>& layers) {
  MlpGradients g;
  for (const DenseLayer& layer : layers) {
    g.weights.emplace_back(layer.weights.size(), 0.0);
    g.biases.emplace_back(layer.biases.size(), 0.0);
  }
  return g;
}

}  // namespace

void MlpConfig::Validate() const {
  if (input_dim < 1) throw InvalidArgument("MlpConfig: input_dim must be >= 1");
  if (hidden_width < 1) {
    throw InvalidArgument("MlpConfig: hidden_width must be >= 1");
  }
  if (num_classes < 2) {
    throw InvalidArgument("MlpConfig: num_classes must be >= 2");
  }
  if (epochs < 1) throw InvalidArgument("MlpConfig: epochs must be >= 1");
  if (minibatch_size < 1) {
    throw InvalidArgument("MlpConfig: minibatch_size must be >= 1");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("MlpConfig: learning_rate must be > 0");
  }
  if (!(init_scale >= 0.0)) {
    throw InvalidArgument("MlpConfig: init_scale must be >= 0");
  }
  if (!(adagrad_epsilon >= 0.0)) {
    throw InvalidArgument("MlpConfig: adagrad_epsilon must be >= 0");
  }
}

Mlp Mlp::Initialize(const MlpConfig& config, RngStream& rng) {
  config.Validate();
  Mlp net;
  net.config_ = config;
  std::vector<std::size_t> widths{config.input_dim};
  for (std::size_t h = 0; h < config.num_hidden_layers; ++h) {
    widths.push_back(config.hidden_width);
  }
  widths.push_back(static_cast<std::size_t>(config.num_classes));
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    layer.fan_in = widths[l];
    layer.fan_out = widths[l + 1];
    const double scale =
        config.init_scale > 0.0
            ? config.init_scale
            : std::sqrt(6.0 / static_cast<double>(layer.fan_in + layer.fan_out));
    layer.weights.resize(layer.fan_in * layer.fan_out);
    for (double& w : layer.weights) w = scale * (2.0 * rng.Uniform01() - 1.0);
    layer.biases.assign(layer.fan_out, 0.0);
    layer.weight_accum.assign(layer.weights.size(), 0.0);
    layer.bias_accum.assign(layer.fan_out, 0.0);
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

PredictionVector Mlp::PredictProba(std::span<const double> x) const {
  if (x.size() != config_.input_dim) {
    throw InvalidArgument("PredictProba: input has dimension " +
                          std::to_string(x.size()) + ", expected " +
                          std::to_string(config_.input_dim));
  }
  PredictionVector out;
  out.probs.resize(static_cast<std::size_t>(config_.num_classes));
  PredictProbaBatch(x, out.probs);
  return out;
}

void Mlp::PredictProbaBatch(std::span<const double> rows,
                            std::span<double> probs) const {
  const std::size_t d = config_.input_dim;
  const std::size_t k = static_cast<std::size_t>(config_.num_classes);
  if (rows.size() % d != 0) {
    throw InvalidArgument("PredictProbaBatch: row buffer not a multiple of d");
  }
  const std::size_t n = rows.size() / d;
  if (probs.size() != n * k) {
    throw InvalidArgument("PredictProbaBatch: output size mismatch");
  }
  CheckFinite(rows);
  Workspace ws;
  ws.Reserve(layers_, std::min(n, kPredictChunk));
  for (std::size_t start = 0; start < n; start += kPredictChunk) {
    const std::size_t count = std::min(kPredictChunk, n - start);
    std::copy_n(rows.begin() + start * d, count * d, ws.activations[0].begin());
    Forward(layers_, ws, count, {}, nullptr);
    std::copy_n(ws.activations.back().begin(), count * k,
                probs.begin() + start * k);
  }
}

std::vector<PredictionVector> Mlp::PredictProbaBatch(
    std::span<const FeatureVector> xs) const {
  const std::size_t d = config_.input_dim;
  const std::size_t k = static_cast<std::size_t>(config_.num_classes);
  std::vector<double> rows;
  rows.reserve(xs.size() * d);
  for (const FeatureVector& x : xs) {
    if (x.size() != d) {
      throw InvalidArgument("PredictProbaBatch: input dimension mismatch");
    }
    rows.insert(rows.end(), x.begin(), x.end());
  }
  std::vector<double> flat(xs.size() * k);
  PredictProbaBatch(rows, flat);
  std::vector<PredictionVector> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i].probs.assign(flat.begin() + i * k, flat.begin() + (i + 1) * k);
  }
  return out;
}

double Mlp::LossAndGradients(std::span<const double> rows,
                             std::span<const Label> labels,
                             MlpGradients* gradients) const {
  const std::size_t d = config_.input_dim;
  if (rows.size() != labels.size() * d || labels.empty()) {
    throw InvalidArgument("LossAndGradients: rows/labels size mismatch");
  }
  for (const Label y : labels) {
    if (y < 1 || y > config_.num_classes) {
      throw InvalidArgument("LossAndGradients: label out of range");
    }
  }
  Workspace ws;
  ws.Reserve(layers_, labels.size());
  std::copy(rows.begin(), rows.end(), ws.activations[0].begin());
  double loss = 0.0;
  Forward(layers_, ws, labels.size(), labels, &loss);
  if (gradients != nullptr) {
    if (gradients->weights.size() != layers_.size()) {
      *gradients = ZeroGradients(layers_);
    }
    Backward(layers_, ws, labels.size(), labels, *gradients);
  }
  return loss;
}

void Mlp::ApplyAdagrad(const MlpGradients& gradients) {
  const double lr = config_.learning_rate;
  const double eps = config_.adagrad_epsilon;
  auto step = [lr, eps](std::vector<double>& params, std::vector<double>& accum,
                        const std::vector<double>& grad) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grad[i];
      accum[i] += g * g;
      params[i] -= lr * g / std::sqrt(accum[i] + eps);
    }
  };
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    step(layers_[l].weights, layers_[l].weight_accum, gradients.weights[l]);
    step(layers_[l].biases, layers_[l].bias_accum, gradients.biases[l]);
  }
}

void Mlp::Save(std::ostream& out) const {
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "hal-mlp 1\n" << layers_.size() + 1;
  out << ' ' << layers_.front().fan_in;
  for (const DenseLayer& layer : layers_) out << ' ' << layer.fan_out;
  out << '\n';
  auto dump = [&out](const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << (i == 0 ? "" : " ") << values[i];
    }
    out << '\n';
  };
  for (const DenseLayer& layer : layers_) {
    dump(layer.weights);
    dump(layer.biases);
    dump(layer.weight_accum);
    dump(layer.bias_accum);
  }
}

Mlp Mlp::Load(std::istream& in, const MlpConfig& config) {
  std::string magic;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> magic >> version >> count) || magic != "hal-mlp" ||
      version != 1 || count < 2) {
    throw InvalidArgument("Mlp::Load: bad header");
  }
  std::vector<std::size_t> widths(count);
  for (std::size_t& w : widths) {
    if (!(in >> w) || w == 0) throw InvalidArgument("Mlp::Load: bad sizes");
  }
  if (widths.front() != config.input_dim ||
      widths.back() != static_cast<std::size_t>(config.num_classes) ||
      count != config.num_hidden_layers + 2) {
    throw InvalidArgument("Mlp::Load: sizes disagree with config");
  }
  Mlp net;
  net.config_ = config;
  auto read = [&in](std::vector<double>& values, std::size_t n) {
    values.resize(n);
    for (double& v : values) {
      if (!(in >> v)) throw InvalidArgument("Mlp::Load: truncated body");
    }
  };
  for (std::size_t l = 0; l + 1 < count; ++l) {
    DenseLayer layer;
    layer.fan_in = widths[l];
    layer.fan_out = widths[l + 1];
    read(layer.weights, layer.fan_in * layer.fan_out);
    read(layer.biases, layer.fan_out);
    read(layer.weight_accum, layer.fan_in * layer.fan_out);
    read(layer.bias_accum, layer.fan_out);
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

Mlp Train(const Dataset& data, std::span<const ExampleId> ids,
          const MlpConfig& config, const RngStream& rng,
          TrainingReport* report) {
  config.Validate();
  if (ids.empty()) throw InvalidArgument("Train: labeled set is empty");
  if (data.dim() != config.input_dim) {
    throw InvalidArgument("Train: data dimension " +
                          std::to_string(data.dim()) + " != input_dim " +
                          std::to_string(config.input_dim));
  }
  std::vector<ExampleId> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  for (const ExampleId id : sorted) {
    if (id >= data.size()) throw InvalidArgument("Train: id out of range");
    if (data.label(id) > config.num_classes) {
      throw InvalidArgument("Train: label exceeds num_classes");
    }
  }

  RngStream init_rng = rng.Derive(StreamPurpose::kClassifierInit);
  RngStream shuffle_rng = rng.Derive(StreamPurpose::kShuffle);
  Mlp net = Mlp::Initialize(config, init_rng);

  const std::size_t d = config.input_dim;
  const std::size_t n = sorted.size();
  const std::size_t batch = std::min(config.minibatch_size, n);
  Workspace ws;
  ws.Reserve(net.layers(), batch);
  MlpGradients grads = ZeroGradients(net.layers());
  std::vector<Label> batch_labels(batch);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  if (report != nullptr) report->epoch_losses.clear();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(std::span<std::size_t>(order), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t count = std::min(batch, n - start);
      double* in = ws.activations[0].data();
      for (std::size_t r = 0; r < count; ++r) {
        const ExampleId id = sorted[order[start + r]];
        const auto row = data.row(id);
        std::copy(row.begin(), row.end(), in + r * d);
        batch_labels[r] = data.label(id);
      }
      const std::span<const Label> labels(batch_labels.data(), count);
      double loss = 0.0;
      Forward(net.layers(), ws, count, labels, &loss);
      Backward(net.layers(), ws, count, labels, grads);
      net.ApplyAdagrad(grads);
      epoch_loss += loss * static_cast<double>(count);
    }
    if (report != nullptr) {
      report->epoch_losses.push_back(epoch_loss / static_cast<double>(n));
    }
  }
  return net;
}

}  // namespace hal
