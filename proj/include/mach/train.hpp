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
#include <span>
#include <vector>

#include "mach/model.hpp"

namespace mach {

// Seed of repetition j. Hash and trainer seeds are derived from it, so a
// repetition's result depends only on (master seed, j, data).
std::uint64_t repetition_seed(std::uint64_t master_seed, std::size_t j) noexcept;

// h_j: range B over the class domain [0, K).
UniversalHash repetition_hash(const MachConfig& config, std::size_t j);

// Image of a label set under h, sorted and unique. Throws ValidationError
// on an empty label set.
std::vector<BucketId> transform_label(std::span<const ClassId> labels,
                                      const UniversalHash& h);

// Checks every sample against config before any training starts. Throws
// ValidationError naming the first offending sample.
void validate_dataset(std::span<const LabeledSample> data,
                      const MachConfig& config);

// Per-epoch mean training loss, one vector per repetition.
struct TrainLog {
  std::vector<std::vector<double>> epoch_loss;
};

struct TrainOptions {
  // OpenMP team size; 0 uses the runtime default.
  int threads = 0;
  // Replaces the seed-derived hashes when non-empty (size must be R).
  std::vector<UniversalHash> hashes;
};

// Trains one classifier with label map h (outputs = h.range) using
// mini-batch SGD. Labels are hashed on the fly. The per-epoch sample order
// is a seeded shuffle. Does not validate; see validate_dataset.
MetaClassifier train_classifier(std::span<const LabeledSample> data,
                                const UniversalHash& label_map,
                                const MachConfig& config, std::uint64_t seed,
                                std::vector<double>* epoch_loss = nullptr);

// Trains the R repetitions in parallel, one OpenMP task per repetition and
// no shared mutable state. Output is byte-identical for any thread count.
MachModel train(std::span<const LabeledSample> data, const MachConfig& config,
                const TrainOptions& options = {}, TrainLog* log = nullptr);

namespace reference {

// Serial loop over repetitions; kept as the oracle for train().
MachModel train_serial(std::span<const LabeledSample> data,
                       const MachConfig& config,
                       std::span<const UniversalHash> hashes = {},
                       TrainLog* log = nullptr);

}  // namespace reference
}  // namespace mach
