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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mach/hashing.hpp"
#include "mach/random.hpp"
#include "mach/sparse.hpp"

namespace mach {

enum class Mode : std::uint32_t { kMulticlass = 0, kMultilabel = 1 };

std::string_view to_string(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;

struct MachConfig {
  std::uint64_t num_classes = 0;   // K
  std::uint64_t buckets = 32;      // B
  std::uint64_t repetitions = 1;   // R
  std::uint64_t input_dim = 0;     // d
  Mode mode = Mode::kMulticlass;
  std::uint64_t hidden_units = 0;  // 0: linear model
  std::uint64_t seed = 0;

  // Raw feature dimension hashed down to input_dim before the model sees
  // it; 0 when inputs are used as-is.
  std::uint64_t source_dim = 0;

  // Mini-batch SGD.
  std::size_t epochs = 10;
  double learning_rate = 0.1;
  std::size_t batch_size = 64;

  // Throws InvalidConfig.
  void validate() const;

  friend bool operator==(const MachConfig&, const MachConfig&) = default;
};

struct LabeledSample {
  SparseVector features;
  std::vector<ClassId> labels;  // sorted, unique
};

// Trainable B-output model over d inputs: either a linear layer or one
// ReLU hidden layer followed by the output layer. Multiclass outputs go
// through softmax, multilabel outputs through per-bucket sigmoids.
//
// Parameters live in one float buffer laid out layer by layer from input
// to output, each weight matrix (row-major, fan_in x fan_out) followed by
// its bias vector. That is also the on-disk order.
class MetaClassifier {
 public:
  // Scratch buffers for one forward/backward pass.
  struct Workspace {
    std::vector<double> hidden_pre;
    std::vector<double> hidden;
    std::vector<double> logits;
    std::vector<double> output;
    std::vector<double> delta_out;
    std::vector<double> delta_hidden;
  };

  // Accumulated loss gradient in parameter layout. Rows of the first
  // weight matrix are tracked so sparse inputs only touch what they use.
  class Gradient {
   public:
    explicit Gradient(const MetaClassifier& model);

    std::span<const double> values() const noexcept { return values_; }
    void clear();

   private:
    friend class MetaClassifier;
    void touch_row(std::uint64_t row);

    std::size_t row_width_;
    std::vector<double> values_;
    std::vector<std::uint64_t> touched_;
    std::vector<unsigned char> marked_;
  };

  MetaClassifier() = default;
  MetaClassifier(std::size_t input_dim, std::size_t hidden_units,
                 std::size_t outputs, Mode mode);

  // Linear models start at zero; hidden models draw weights uniformly in
  // +-1/sqrt(fan_in). Biases start at zero.
  void initialize(Rng& rng);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_units() const noexcept { return hidden_; }
  std::size_t outputs() const noexcept { return outputs_; }
  Mode mode() const noexcept { return mode_; }

  std::size_t num_parameters() const noexcept { return params_.size(); }
  std::span<const float> parameters() const noexcept { return params_; }
  std::span<float> parameters() noexcept { return params_; }

  static std::size_t parameter_count(std::size_t input_dim,
                                     std::size_t hidden_units,
                                     std::size_t outputs) noexcept;

  // Probabilities (softmax or sigmoid) into ws.output. x.dim() must equal
  // input_dim(); callers validate.
  void forward(const SparseVector& x, Workspace& ws) const;
  std::vector<double> predict(const SparseVector& x) const;

  // Per-sample loss: softmax cross-entropy against the single target bucket
  // or summed binary cross-entropy against the multi-hot target.
  double loss(const SparseVector& x, std::span<const BucketId> targets) const;

  // Adds d loss / d params to grad and returns the loss.
  double accumulate_gradient(const SparseVector& x,
                             std::span<const BucketId> targets,
                             Workspace& ws, Gradient& grad) const;

  // params -= step * grad, then clears grad.
  void apply(Gradient& grad, double step);

  // Hidden-layer pre-activations (empty for linear models).
  std::vector<double> hidden_preactivations(const SparseVector& x) const;

  friend bool operator==(const MetaClassifier&, const MetaClassifier&) = default;

 private:
  std::size_t first_width() const noexcept {
    return hidden_ > 0 ? hidden_ : outputs_;
  }
  double loss_from_logits(std::span<const double> logits,
                          std::span<const BucketId> targets) const;

  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  std::size_t outputs_ = 0;
  Mode mode_ = Mode::kMulticlass;
  std::vector<float> params_;
};

// R hashed B-class classifiers plus the hashes they were trained against.
// Immutable once built.
class MachModel {
 public:
  // Throws InvalidConfig when sizes disagree with config.
  MachModel(MachConfig config, std::vector<UniversalHash> hashes,
            std::vector<MetaClassifier> classifiers);

  const MachConfig& config() const noexcept { return config_; }
  std::size_t repetitions() const noexcept { return classifiers_.size(); }
  std::span<const UniversalHash> hashes() const noexcept { return hashes_; }
  std::span<const MetaClassifier> classifiers() const noexcept {
    return classifiers_;
  }
  std::size_t num_parameters() const noexcept;

  // B meta-probabilities of repetition j. Throws ValidationError on a
  // dimension mismatch and InvalidArgument for j >= R.
  std::vector<double> meta_predict(std::size_t j, const SparseVector& x) const;

  void check_input(const SparseVector& x) const;

  friend bool operator==(const MachModel&, const MachModel&) = default;

 private:
  MachConfig config_;
  std::vector<UniversalHash> hashes_;
  std::vector<MetaClassifier> classifiers_;
};

}  // namespace mach
