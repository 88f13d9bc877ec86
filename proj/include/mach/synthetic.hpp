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
#include <vector>

#include "mach/model.hpp"

namespace mach::synthetic {

// Isotropic Gaussian clusters, one per class. Centers are N(0, center_scale^2)
// per coordinate; samples add N(0, noise^2) per coordinate.
struct ClusterTask {
  std::size_t num_classes = 100;
  std::size_t dim = 50;
  double center_scale = 1.0;
  double noise = 1.0;
  std::uint64_t seed = 1;
};

struct Split {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
};

// Same centers for both splits; train and test draws are independent.
Split gaussian_clusters(const ClusterTask& task, std::size_t train_per_class,
                        std::size_t test_per_class);

// Multilabel variant: each sample carries `labels_per_sample` distinct
// classes and its features are the mean of their centers plus noise.
Split multilabel_clusters(const ClusterTask& task, std::size_t train_samples,
                          std::size_t test_samples,
                          std::size_t labels_per_sample);

}  // namespace mach::synthetic
