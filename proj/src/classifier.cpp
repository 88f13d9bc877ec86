// Copyright 2026 The MACH Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <string>

#include "mach/errors.hpp"
#include "mach/model.hpp"

namespace mach {

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::kMultilabel ? "multilabel" : "multiclass";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
  if (text == "multiclass") return Mode::kMulticlass;
  if (text == "multilabel") return Mode::kMultilabel;
  return std::nullopt;
}

void MachConfig::validate() const {
  if (num_classes < 2) throw InvalidConfig("num_classes must be >= 2");
  if (buckets < 2) throw InvalidConfig("buckets must be >= 2");
  if (repetitions < 1) throw InvalidConfig("repetitions must be >= 1");
  if (input_dim < 1) throw InvalidConfig("input_dim must be >= 1");
  if (mode != Mode::kMulticlass && mode != Mode::kMultilabel) {
    throw InvalidConfig("unknown mode");
  }
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("learning_rate must be positive and finite");
  }
}

namespace {

void softmax_in_place(std::span<const double> logits, std::span<double> out) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

MetaClassifier::Gradient::Gradient(const MetaClassifier& model)
    : row_width_(model.first_width()),
      values_(model.num_parameters(), 0.0),
      marked_(model.input_dim(), 0) {}

void MetaClassifier::Gradient::touch_row(std::uint64_t row) {
  if (!marked_[row]) {
    marked_[row] = 1;
    touched_.push_back(row);
  }
}

void MetaClassifier::Gradient::clear() {
  std::fill(values_.begin(), values_.end(), 0.0);
  std::fill(marked_.begin(), marked_.end(), 0);
  touched_.clear();
}

MetaClassifier::MetaClassifier(std::size_t input_dim, std::size_t hidden_units,
                               std::size_t outputs, Mode mode)
    : input_dim_(input_dim),
      hidden_(hidden_units),
      outputs_(outputs),
      mode_(mode),
      params_(parameter_count(input_dim, hidden_units, outputs), 0.0f) {}

std::size_t MetaClassifier::parameter_count(std::size_t input_dim,
                                            std::size_t hidden_units,
                                            std::size_t outputs) noexcept {
  if (hidden_units == 0) return input_dim * outputs + outputs;
  return input_dim * hidden_units + hidden_units + hidden_units * outputs +
         outputs;
}

void MetaClassifier::initialize(Rng& rng) {
  std::fill(params_.begin(), params_.end(), 0.0f);
  if (hidden_ == 0) return;
  const double r1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  const std::size_t w1 = input_dim_ * hidden_;
  for (std::size_t i = 0; i < w1; ++i) {
    params_[i] = static_cast<float>(uniform_real(rng, -r1, r1));
  }
  const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
  const std::size_t w2_begin = w1 + hidden_;
  for (std::size_t i = 0; i < hidden_ * outputs_; ++i) {
    params_[w2_begin + i] = static_cast<float>(uniform_real(rng, -r2, r2));
  }
}

void MetaClassifier::forward(const SparseVector& x, Workspace& ws) const {
  ws.logits.resize(outputs_);
  ws.output.resize(outputs_);
  const float* p = params_.data();

  if (hidden_ == 0) {
    const float* bias = p + input_dim_ * outputs_;
    for (std::size_t c = 0; c < outputs_; ++c) ws.logits[c] = bias[c];
    for (const auto& e : x.entries()) {
      const float* row = p + e.index * outputs_;
      for (std::size_t c = 0; c < outputs_; ++c) {
        ws.logits[c] += e.value * row[c];
      }
    }
  } else {
    ws.hidden_pre.resize(hidden_);
    ws.hidden.resize(hidden_);
    const float* b1 = p + input_dim_ * hidden_;
    for (std::size_t h = 0; h < hidden_; ++h) ws.hidden_pre[h] = b1[h];
    for (const auto& e : x.entries()) {
      const float* row = p + e.index * hidden_;
      for (std::size_t h = 0; h < hidden_; ++h) {
        ws.hidden_pre[h] += e.value * row[h];
      }
    }
    for (std::size_t h = 0; h < hidden_; ++h) {
      ws.hidden[h] = std::max(ws.hidden_pre[h], 0.0);
    }
    const float* w2 = b1 + hidden_;
    const float* b2 = w2 + hidden_ * outputs_;
    for (std::size_t c = 0; c < outputs_; ++c) ws.logits[c] = b2[c];
    for (std::size_t h = 0; h < hidden_; ++h) {
      const double a = ws.hidden[h];
      if (a == 0.0) continue;
      const float* row = w2 + h * outputs_;
      for (std::size_t c = 0; c < outputs_; ++c) ws.logits[c] += a * row[c];
    }
  }

  if (mode_ == Mode::kMulticlass) {
    softmax_in_place(ws.logits, ws.output);
  } else {
    for (std::size_t c = 0; c < outputs_; ++c) {
      ws.output[c] = sigmoid(ws.logits[c]);
    }
  }
}

std::vector<double> MetaClassifier::predict(const SparseVector& x) const {
  Workspace ws;
  forward(x, ws);
  return std::move(ws.output);
}

std::vector<double> MetaClassifier::hidden_preactivations(
    const SparseVector& x) const {
  if (hidden_ == 0) return {};
  Workspace ws;
  forward(x, ws);
  return std::move(ws.hidden_pre);
}

double MetaClassifier::loss_from_logits(
    std::span<const double> logits, std::span<const BucketId> targets) const {
  if (mode_ == Mode::kMulticlass) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (const double z : logits) sum += std::exp(z - m);
    return m + std::log(sum) - logits[targets.front()];
  }
  double loss = 0.0;
  for (const double z : logits) loss += softplus(z);
  for (const auto t : targets) loss -= logits[t];
  return loss;
}

double MetaClassifier::loss(const SparseVector& x,
                            std::span<const BucketId> targets) const {
  Workspace ws;
  forward(x, ws);
  return loss_from_logits(ws.logits, targets);
}

double MetaClassifier::accumulate_gradient(const SparseVector& x,
                                           std::span<const BucketId> targets,
                                           Workspace& ws,
                                           Gradient& grad) const {
  forward(x, ws);
  const double loss = loss_from_logits(ws.logits, targets);

  // d loss / d logits = prediction - target for both loss modes.
  ws.delta_out.assign(ws.output.begin(), ws.output.end());
  for (const auto t : targets) ws.delta_out[t] -= 1.0;

  double* g = grad.values_.data();
  if (hidden_ == 0) {
    for (const auto& e : x.entries()) {
      grad.touch_row(e.index);
      double* row = g + e.index * outputs_;
      for (std::size_t c = 0; c < outputs_; ++c) {
        row[c] += e.value * ws.delta_out[c];
      }
    }
    double* bias = g + input_dim_ * outputs_;
    for (std::size_t c = 0; c < outputs_; ++c) bias[c] += ws.delta_out[c];
    return loss;
  }

  const float* w2 = params_.data() + input_dim_ * hidden_ + hidden_;
  double* gb1 = g + input_dim_ * hidden_;
  double* gw2 = gb1 + hidden_;
  double* gb2 = gw2 + hidden_ * outputs_;
  ws.delta_hidden.assign(hidden_, 0.0);
  for (std::size_t h = 0; h < hidden_; ++h) {
    const double a = ws.hidden[h];
    const float* wrow = w2 + h * outputs_;
    double* grow = gw2 + h * outputs_;
    double back = 0.0;
    for (std::size_t c = 0; c < outputs_; ++c) {
      grow[c] += a * ws.delta_out[c];
      back += wrow[c] * ws.delta_out[c];
    }
    if (ws.hidden_pre[h] > 0.0) ws.delta_hidden[h] = back;
  }
  for (std::size_t c = 0; c < outputs_; ++c) gb2[c] += ws.delta_out[c];
  for (std::size_t h = 0; h < hidden_; ++h) gb1[h] += ws.delta_hidden[h];
  for (const auto& e : x.entries()) {
    grad.touch_row(e.index);
    double* row = g + e.index * hidden_;
    for (std::size_t h = 0; h < hidden_; ++h) {
      row[h] += e.value * ws.delta_hidden[h];
    }
  }
  return loss;
}

void MetaClassifier::apply(Gradient& grad, double step) {
  const std::size_t width = first_width();
  for (const auto row : grad.touched_) {
    const std::size_t begin = row * width;
    for (std::size_t i = begin; i < begin + width; ++i) {
      params_[i] = static_cast<float>(params_[i] - step * grad.values_[i]);
      grad.values_[i] = 0.0;
    }
    grad.marked_[row] = 0;
  }
  grad.touched_.clear();
  for (std::size_t i = input_dim_ * width; i < params_.size(); ++i) {
    params_[i] = static_cast<float>(params_[i] - step * grad.values_[i]);
    grad.values_[i] = 0.0;
  }
}

MachModel::MachModel(MachConfig config, std::vector<UniversalHash> hashes,
                     std::vector<MetaClassifier> classifiers)
    : config_(config),
      hashes_(std::move(hashes)),
      classifiers_(std::move(classifiers)) {
  config_.validate();
  if (hashes_.size() != config_.repetitions ||
      classifiers_.size() != config_.repetitions) {
    throw InvalidConfig("model needs exactly R hashes and R classifiers");
  }
  for (std::size_t j = 0; j < hashes_.size(); ++j) {
    const auto& h = hashes_[j];
    if (h.range != config_.buckets) {
      throw InvalidConfig("hash " + std::to_string(j) + " range != buckets");
    }
    const auto& c = classifiers_[j];
    if (c.input_dim() != config_.input_dim ||
        c.hidden_units() != config_.hidden_units ||
        c.outputs() != config_.buckets || c.mode() != config_.mode) {
      throw InvalidConfig("classifier " + std::to_string(j) +
                          " shape disagrees with config");
    }
  }
}

std::size_t MachModel::num_parameters() const noexcept {
  std::size_t n = 0;
  for (const auto& c : classifiers_) n += c.num_parameters();
  return n;
}

void MachModel::check_input(const SparseVector& x) const {
  if (x.dim() != config_.input_dim) {
    throw ValidationError("input dimension " + std::to_string(x.dim()) +
                          " != model dimension " +
                          std::to_string(config_.input_dim));
  }
}

std::vector<double> MachModel::meta_predict(std::size_t j,
                                            const SparseVector& x) const {
  if (j >= classifiers_.size()) {
    throw InvalidArgument("repetition " + std::to_string(j) + " out of range");
  }
  check_input(x);
  return classifiers_[j].predict(x);
}

}  // namespace mach
