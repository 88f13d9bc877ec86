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

#include "mach/decoder.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <string>

#include <omp.h>

#include "mach/errors.hpp"

namespace mach {

std::string_view to_string(Estimator est) noexcept {
  switch (est) {
    case Estimator::kMin:
      return "min";
    case Estimator::kMedian:
      return "median";
    case Estimator::kUnbiased:
      break;
  }
  return "unbiased";
}

std::optional<Estimator> parse_estimator(std::string_view text) noexcept {
  if (text == "unbiased") return Estimator::kUnbiased;
  if (text == "min") return Estimator::kMin;
  if (text == "median") return Estimator::kMedian;
  return std::nullopt;
}

Gathered::Gathered(const MachModel& model, const SparseVector& x,
                   std::size_t repetitions) {
  model.check_input(x);
  const std::size_t reps = repetitions == 0
                               ? model.repetitions()
                               : std::min(repetitions, model.repetitions());
  meta_.reserve(reps);
  MetaClassifier::Workspace ws;
  for (std::size_t j = 0; j < reps; ++j) {
    model.classifiers()[j].forward(x, ws);
    meta_.push_back(ws.output);
  }
  hashes_.assign(model.hashes().begin(), model.hashes().begin() + reps);
}

Gathered::Gathered(std::vector<std::vector<double>> meta,
                   std::vector<UniversalHash> hashes)
    : meta_(std::move(meta)), hashes_(std::move(hashes)) {
  if (meta_.size() != hashes_.size() || meta_.empty()) {
    throw InvalidArgument("need one hash per meta-probability row");
  }
  for (std::size_t j = 0; j < meta_.size(); ++j) {
    if (meta_[j].size() != hashes_[j].range) {
      throw InvalidArgument("meta row " + std::to_string(j) +
                            " length differs from hash range");
    }
  }
}

std::uint64_t Gathered::buckets() const noexcept {
  return hashes_.empty() ? 0 : hashes_.front().range;
}

void Gathered::values_for(ClassId i, std::span<double> out) const {
  for (std::size_t j = 0; j < meta_.size(); ++j) out[j] = meta_[j][hashes_[j](i)];
}

std::vector<double> Gathered::values_for(ClassId i) const {
  std::vector<double> out(meta_.size());
  values_for(i, out);
  return out;
}

namespace {

double decode_in_place(std::span<double> values, std::uint64_t buckets,
                       Estimator est) {
  switch (est) {
    case Estimator::kMin:
      return *std::min_element(values.begin(), values.end());
    case Estimator::kMedian: {
      const std::size_t n = values.size();
      const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
      std::nth_element(values.begin(), mid, values.end());
      if (n % 2 == 1) return *mid;
      const double upper = *mid;
      const double lower = *std::max_element(values.begin(), mid);
      return 0.5 * (lower + upper);
    }
    case Estimator::kUnbiased:
      break;
  }
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double b = static_cast<double>(buckets);
  const double mean = sum / static_cast<double>(values.size());
  return b / (b - 1.0) * (mean - 1.0 / b);
}

void check_decode(std::size_t n, std::uint64_t buckets, Estimator est) {
  if (n == 0) throw InvalidArgument("decode needs at least one repetition");
  if (est == Estimator::kUnbiased && buckets < 2) {
    throw InvalidConfig("unbiased decode needs B >= 2");
  }
}

bool ranks_before(const ScoredClass& l, const ScoredClass& r) {
  if (l.second != r.second) return l.second > r.second;
  return l.first < r.first;
}

}  // namespace

double decode(std::span<const double> gathered, std::uint64_t buckets,
              Estimator est) {
  check_decode(gathered.size(), buckets, est);
  std::vector<double> scratch(gathered.begin(), gathered.end());
  return decode_in_place(scratch, buckets, est);
}

std::vector<double> score_gathered(const Gathered& g, std::uint64_t num_classes,
                                   Estimator est) {
  check_decode(g.repetitions(), g.buckets(), est);
  std::vector<double> scores(num_classes);
  std::vector<double> scratch(g.repetitions());
  for (ClassId i = 0; i < num_classes; ++i) {
    g.values_for(i, scratch);
    scores[i] = decode_in_place(scratch, g.buckets(), est);
  }
  return scores;
}

std::vector<double> score_all(const MachModel& model, const SparseVector& x,
                              Estimator est, std::size_t repetitions) {
  return score_gathered(Gathered(model, x, repetitions),
                        model.config().num_classes, est);
}

std::vector<ScoredClass> top_k(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) {
    throw InvalidArgument("top_k needs 1 <= k <= " +
                          std::to_string(scores.size()) + ", got " +
                          std::to_string(k));
  }
  std::vector<ScoredClass> all(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) all[i] = {i, scores[i]};
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                    all.end(), ranks_before);
  all.resize(k);
  return all;
}

std::vector<ScoredClass> rank_candidates(std::span<const double> scores,
                                         std::span<const ClassId> candidates,
                                         std::size_t limit) {
  std::vector<ScoredClass> ranked;
  ranked.reserve(candidates.size());
  for (const auto c : candidates) {
    if (c >= scores.size()) {
      throw InvalidArgument("candidate " + std::to_string(c) +
                            " outside score vector");
    }
    ranked.emplace_back(c, scores[c]);
  }
  const std::size_t n =
      limit == 0 ? ranked.size() : std::min(limit, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n),
                    ranked.end(), ranks_before);
  ranked.resize(n);
  return ranked;
}

ClassId predict_class(const MachModel& model, const SparseVector& x,
                      Estimator est) {
  return top_k(score_all(model, x, est), 1).front().first;
}

std::vector<std::vector<double>> score_batch(const MachModel& model,
                                             std::span<const SparseVector> xs,
                                             Estimator est, int threads,
                                             std::size_t repetitions) {
  for (const auto& x : xs) model.check_input(x);
  check_decode(model.repetitions(), model.config().buckets, est);
  std::vector<std::vector<double>> out(xs.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(xs.size());

#pragma omp parallel for schedule(dynamic, 16) num_threads(team)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = score_all(model, xs[i], est, repetitions);
  }
  return out;
}

std::vector<std::vector<ScoredClass>> top_k_batch(
    const MachModel& model, std::span<const SparseVector> xs, Estimator est,
    std::size_t k, int threads) {
  if (k < 1 || k > model.config().num_classes) {
    throw InvalidArgument("top_k needs 1 <= k <= K");
  }
  for (const auto& x : xs) model.check_input(x);
  check_decode(model.repetitions(), model.config().buckets, est);
  std::vector<std::vector<ScoredClass>> out(xs.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(xs.size());

#pragma omp parallel for schedule(dynamic, 16) num_threads(team)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = top_k(score_all(model, xs[i], est), k);
  }
  return out;
}

namespace reference {

std::vector<std::vector<double>> score_batch_serial(
    const MachModel& model, std::span<const SparseVector> xs, Estimator est,
    std::size_t repetitions) {
  std::vector<std::vector<double>> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    Gathered g(model, x, repetitions);
    std::vector<double> scores(model.config().num_classes);
    for (ClassId i = 0; i < scores.size(); ++i) {
      scores[i] = decode(g.values_for(i), model.config().buckets, est);
    }
    out.push_back(std::move(scores));
  }
  return out;
}

}  // namespace reference
}  // namespace mach
