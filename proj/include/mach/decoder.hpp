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
#include <utility>
#include <vector>

#include "mach/model.hpp"

namespace mach {

// How R gathered meta-probabilities collapse into one class score.
//   unbiased: B/(B-1) * (mean - 1/B); may be negative.
//   min:      count-min style minimum.
//   median:   mean of the middle two for even R.
enum class Estimator { kUnbiased, kMin, kMedian };

std::string_view to_string(Estimator est) noexcept;
std::optional<Estimator> parse_estimator(std::string_view text) noexcept;

// Meta-probabilities of the first `repetitions` classifiers (0 = all) for
// one input, plus the hashes needed to look classes up in them. Costs RBd
// multiplications up front; each class lookup then costs R.
class Gathered {
 public:
  Gathered(const MachModel& model, const SparseVector& x,
           std::size_t repetitions = 0);
  Gathered(std::vector<std::vector<double>> meta,
           std::vector<UniversalHash> hashes);

  std::size_t repetitions() const noexcept { return meta_.size(); }
  std::uint64_t buckets() const noexcept;
  std::span<const double> meta(std::size_t j) const { return meta_[j]; }

  // out[j] = P^j[h_j(i)]; out.size() must equal repetitions().
  void values_for(ClassId i, std::span<double> out) const;
  std::vector<double> values_for(ClassId i) const;

 private:
  std::vector<std::vector<double>> meta_;
  std::vector<UniversalHash> hashes_;
};

// Throws InvalidConfig for the unbiased kind with B < 2 and
// InvalidArgument for an empty input. Median reorders its scratch copy.
double decode(std::span<const double> gathered, std::uint64_t buckets,
              Estimator est);

// Decoded scores for classes [0, num_classes).
std::vector<double> score_gathered(const Gathered& g, std::uint64_t num_classes,
                                   Estimator est);

std::vector<double> score_all(const MachModel& model, const SparseVector& x,
                              Estimator est, std::size_t repetitions = 0);

using ScoredClass = std::pair<ClassId, double>;

// k best classes, descending score, ties to the lower class id. Throws
// InvalidArgument unless 1 <= k <= scores.size().
std::vector<ScoredClass> top_k(std::span<const double> scores, std::size_t k);

// Ranking restricted to `candidates`, same ordering rule, truncated to
// `limit` (0 = all candidates). Candidate ids must index into scores.
std::vector<ScoredClass> rank_candidates(std::span<const double> scores,
                                         std::span<const ClassId> candidates,
                                         std::size_t limit = 0);

ClassId predict_class(const MachModel& model, const SparseVector& x,
                      Estimator est);

// Scores for a batch of inputs, queries spread across an OpenMP team.
std::vector<std::vector<double>> score_batch(const MachModel& model,
                                             std::span<const SparseVector> xs,
                                             Estimator est, int threads = 0,
                                             std::size_t repetitions = 0);

std::vector<std::vector<ScoredClass>> top_k_batch(
    const MachModel& model, std::span<const SparseVector> xs, Estimator est,
    std::size_t k, int threads = 0);

namespace reference {

std::vector<std::vector<double>> score_batch_serial(
    const MachModel& model, std::span<const SparseVector> xs, Estimator est,
    std::size_t repetitions = 0);

}  // namespace reference
}  // namespace mach
