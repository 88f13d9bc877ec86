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

#include "mach/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mach/errors.hpp"

namespace mach {

SparseVector::SparseVector(std::size_t dim, std::vector<SparseEntry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.index >= dim_) {
      throw ValidationError("feature index " + std::to_string(e.index) +
                            " >= dimension " + std::to_string(dim_));
    }
    if (!std::isfinite(e.value)) {
      throw ValidationError("non-finite value at feature index " +
                            std::to_string(e.index));
    }
    if (e.value == 0.0) {
      throw ValidationError("explicit zero at feature index " +
                            std::to_string(e.index));
    }
    if (i > 0 && entries_[i - 1].index >= e.index) {
      throw ValidationError("feature indices not strictly increasing at " +
                            std::to_string(e.index));
    }
  }
}

SparseVector SparseVector::canonicalize(std::size_t dim,
                                        std::vector<SparseEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SparseEntry& l, const SparseEntry& r) {
                     return l.index < r.index;
                   });
  std::vector<SparseEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().index == e.index) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const SparseEntry& e) { return e.value == 0.0; });
  return SparseVector(dim, std::move(merged));
}

SparseVector SparseVector::from_dense(std::span<const double> values) {
  std::vector<SparseEntry> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) entries.push_back({i, values[i]});
  }
  return SparseVector(values.size(), std::move(entries));
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index] = e.value;
  return out;
}

}  // namespace mach
