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

#include "mach/train.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include <omp.h>

#include "mach/errors.hpp"
#include "mach/random.hpp"

namespace mach {
namespace {

constexpr std::uint64_t kHashStream = 0;
constexpr std::uint64_t kTrainerStream = 1;

std::vector<UniversalHash> resolve_hashes(const MachConfig& config,
                                          std::span<const UniversalHash> given) {
  if (given.empty()) {
    std::vector<UniversalHash> hashes;
    hashes.reserve(config.repetitions);
    for (std::size_t j = 0; j < config.repetitions; ++j) {
      hashes.push_back(repetition_hash(config, j));
    }
    return hashes;
  }
  if (given.size() != config.repetitions) {
    throw InvalidConfig("expected " + std::to_string(config.repetitions) +
                        " hashes, got " + std::to_string(given.size()));
  }
  for (const auto& h : given) {
    if (h.range != config.buckets) {
      throw InvalidConfig("supplied hash range differs from buckets");
    }
  }
  return {given.begin(), given.end()};
}

MetaClassifier train_repetition(std::span<const LabeledSample> data,
                                const MachConfig& config,
                                const UniversalHash& h, std::size_t j,
                                std::vector<double>* epoch_loss) {
  const std::uint64_t seed =
      derive_seed(repetition_seed(config.seed, j), kTrainerStream);
  return train_classifier(data, h, config, seed, epoch_loss);
}

}  // namespace

std::uint64_t repetition_seed(std::uint64_t master_seed,
                              std::size_t j) noexcept {
  return derive_seed(master_seed, j);
}

UniversalHash repetition_hash(const MachConfig& config, std::size_t j) {
  return sample_hash(derive_seed(repetition_seed(config.seed, j), kHashStream),
                     config.buckets, config.num_classes);
}

std::vector<BucketId> transform_label(std::span<const ClassId> labels,
                                      const UniversalHash& h) {
  if (labels.empty()) throw ValidationError("sample has no labels");
  std::vector<BucketId> out;
  out.reserve(labels.size());
  for (const auto y : labels) out.push_back(h(y));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void validate_dataset(std::span<const LabeledSample> data,
                      const MachConfig& config) {
  config.validate();
  if (data.empty()) throw ValidationError("training data is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    const std::string where = "sample " + std::to_string(i) + ": ";
    if (s.features.dim() != config.input_dim) {
      throw ValidationError(where + "dimension " +
                            std::to_string(s.features.dim()) + " != " +
                            std::to_string(config.input_dim));
    }
    for (const auto& e : s.features.entries()) {
      if (!std::isfinite(e.value)) {
        throw ValidationError(where + "non-finite feature value");
      }
    }
    if (s.labels.empty()) throw ValidationError(where + "no labels");
    if (config.mode == Mode::kMulticlass && s.labels.size() != 1) {
      throw ValidationError(where + "multiclass mode needs exactly one label, "
                                    "got " + std::to_string(s.labels.size()));
    }
    for (const auto y : s.labels) {
      if (y >= config.num_classes) {
        throw ValidationError(where + "label " + std::to_string(y) +
                              " >= num_classes " +
                              std::to_string(config.num_classes));
      }
    }
  }
}

MetaClassifier train_classifier(std::span<const LabeledSample> data,
                                const UniversalHash& label_map,
                                const MachConfig& config, std::uint64_t seed,
                                std::vector<double>* epoch_loss) {
  Rng rng(seed);
  MetaClassifier model(config.input_dim, config.hidden_units, label_map.range,
                       config.mode);
  model.initialize(rng);

  MetaClassifier::Workspace ws;
  MetaClassifier::Gradient grad(model);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<BucketId> targets;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span(order), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = data[order[i]];
        targets.clear();
        for (const auto y : s.labels) targets.push_back(label_map(y));
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()),
                      targets.end());
        total += model.accumulate_gradient(s.features, targets, ws, grad);
      }
      model.apply(grad, config.learning_rate / static_cast<double>(end - start));
    }
    if (epoch_loss) {
      epoch_loss->push_back(total / static_cast<double>(data.size()));
    }
  }
  return model;
}

MachModel train(std::span<const LabeledSample> data, const MachConfig& config,
                const TrainOptions& options, TrainLog* log) {
  validate_dataset(data, config);
  auto hashes = resolve_hashes(config, options.hashes);
  const std::size_t reps = config.repetitions;

  std::vector<MetaClassifier> classifiers(reps);
  std::vector<std::vector<double>> losses(reps);
  std::vector<std::exception_ptr> errors(reps);
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t j = 0; j < reps; ++j) {
    try {
      classifiers[j] = train_repetition(data, config, hashes[j], j,
                                        log ? &losses[j] : nullptr);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (log) log->epoch_loss = std::move(losses);
  return MachModel(config, std::move(hashes), std::move(classifiers));
}

namespace reference {

MachModel train_serial(std::span<const LabeledSample> data,
                       const MachConfig& config,
                       std::span<const UniversalHash> hashes, TrainLog* log) {
  validate_dataset(data, config);
  auto resolved = resolve_hashes(config, hashes);
  std::vector<MetaClassifier> classifiers;
  std::vector<std::vector<double>> losses(config.repetitions);
  for (std::size_t j = 0; j < config.repetitions; ++j) {
    classifiers.push_back(train_repetition(data, config, resolved[j], j,
                                           log ? &losses[j] : nullptr));
  }
  if (log) log->epoch_loss = std::move(losses);
  return MachModel(config, std::move(resolved), std::move(classifiers));
}

}  // namespace reference
}  // namespace mach
