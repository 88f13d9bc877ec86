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

#include "mach/sketch.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mach/errors.hpp"
#include "mach/random.hpp"

namespace mach {

CountMinSketch::CountMinSketch(std::uint64_t buckets, std::size_t rows,
                               std::uint64_t seed, std::uint64_t domain_size)
    : buckets_(buckets), domain_size_(domain_size) {
  if (buckets < 2) {
    throw InvalidConfig("sketch needs >= 2 buckets, got " +
                        std::to_string(buckets));
  }
  if (rows < 1) throw InvalidConfig("sketch needs >= 1 row");
  hashes_.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    hashes_.push_back(sample_hash(derive_seed(seed, r), buckets, domain_size));
  }
  counts_.assign(rows * buckets, 0);
}

void CountMinSketch::check_domain(ClassId item) const {
  if (item >= domain_size_) {
    throw DomainError("item " + std::to_string(item) + " outside domain [0, " +
                      std::to_string(domain_size_) + ")");
  }
}

void CountMinSketch::update(ClassId item) {
  check_domain(item);
  for (std::size_t r = 0; r < hashes_.size(); ++r) {
    ++counts_[r * buckets_ + hashes_[r](item)];
  }
  ++total_;
}

std::uint64_t CountMinSketch::estimate(ClassId item) const {
  check_domain(item);
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t r = 0; r < hashes_.size(); ++r) {
    best = std::min(best, counts_[r * buckets_ + hashes_[r](item)]);
  }
  return best;
}

}  // namespace mach
