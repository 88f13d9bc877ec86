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

namespace mach {

struct SparseEntry {
  std::uint64_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Index/value pairs over a fixed dimension. Indices are strictly
// increasing, every value is finite and non-zero.
class SparseVector {
 public:
  SparseVector() = default;

  // Validates the canonical form; throws ValidationError otherwise.
  SparseVector(std::size_t dim, std::vector<SparseEntry> entries);

  // Sorts, sums duplicate indices and drops exact zeros. Indices must still
  // be < dim and values finite.
  static SparseVector canonicalize(std::size_t dim,
                                   std::vector<SparseEntry> entries);

  static SparseVector from_dense(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const SparseEntry> entries() const noexcept { return entries_; }

  std::vector<double> to_dense() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<SparseEntry> entries_;
};

}  // namespace mach
