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

#include "mach/synthetic.hpp"

#include <algorithm>

#include "mach/errors.hpp"
#include "mach/random.hpp"

namespace mach::synthetic {
namespace {

std::vector<std::vector<double>> draw_centers(const ClusterTask& task) {
  Rng rng(derive_seed(task.seed, 0));
  std::vector<std::vector<double>> centers(task.num_classes,
                                           std::vector<double>(task.dim));
  for (auto& c : centers) {
    for (auto& v : c) v = task.center_scale * standard_normal(rng);
  }
  return centers;
}

LabeledSample draw(const std::vector<std::vector<double>>& centers,
                   std::vector<ClassId> labels, double noise, Rng& rng) {
  const std::size_t dim = centers.front().size();
  std::vector<double> x(dim, 0.0);
  for (const auto y : labels) {
    for (std::size_t i = 0; i < dim; ++i) x[i] += centers[y][i];
  }
  const double scale = 1.0 / static_cast<double>(labels.size());
  for (auto& v : x) v = v * scale + noise * standard_normal(rng);
  std::sort(labels.begin(), labels.end());
  return LabeledSample{SparseVector::from_dense(x), std::move(labels)};
}

void check(const ClusterTask& task) {
  if (task.num_classes < 2 || task.dim < 1) {
    throw InvalidConfig("cluster task needs >= 2 classes and dim >= 1");
  }
}

}  // namespace

Split gaussian_clusters(const ClusterTask& task, std::size_t train_per_class,
                        std::size_t test_per_class) {
  check(task);
  const auto centers = draw_centers(task);
  Split split;
  Rng train_rng(derive_seed(task.seed, 1));
  Rng test_rng(derive_seed(task.seed, 2));
  for (ClassId y = 0; y < task.num_classes; ++y) {
    for (std::size_t i = 0; i < train_per_class; ++i) {
      split.train.push_back(draw(centers, {y}, task.noise, train_rng));
    }
    for (std::size_t i = 0; i < test_per_class; ++i) {
      split.test.push_back(draw(centers, {y}, task.noise, test_rng));
    }
  }
  return split;
}

Split multilabel_clusters(const ClusterTask& task, std::size_t train_samples,
                          std::size_t test_samples,
                          std::size_t labels_per_sample) {
  check(task);
  if (labels_per_sample < 1 || labels_per_sample > task.num_classes) {
    throw InvalidConfig("labels_per_sample must lie in [1, num_classes]");
  }
  const auto centers = draw_centers(task);
  Split split;
  const auto fill = [&](std::vector<LabeledSample>& out, std::size_t n,
                        std::uint64_t stream) {
    Rng rng(derive_seed(task.seed, stream));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<ClassId> labels;
      while (labels.size() < labels_per_sample) {
        const ClassId y = uniform_below(rng, task.num_classes);
        if (std::find(labels.begin(), labels.end(), y) == labels.end()) {
          labels.push_back(y);
        }
      }
      out.push_back(draw(centers, std::move(labels), task.noise, rng));
    }
  };
  fill(split.train, train_samples, 3);
  fill(split.test, test_samples, 4);
  return split;
}

}  // namespace mach::synthetic
