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

#include "mach/hashing.hpp"

namespace mach {

// R x B count matrix indexed by R 2-universal hashes. Estimates never
// undercount. Single writer; readers may run concurrently between updates.
class CountMinSketch {
 public:
  // Throws InvalidConfig when buckets < 2 or rows < 1.
  CountMinSketch(std::uint64_t buckets, std::size_t rows, std::uint64_t seed,
                 std::uint64_t domain_size);

  // Throws DomainError for item >= domain_size.
  void update(ClassId item);
  std::uint64_t estimate(ClassId item) const;

  std::uint64_t buckets() const noexcept { return buckets_; }
  std::size_t rows() const noexcept { return hashes_.size(); }
  std::uint64_t domain_size() const noexcept { return domain_size_; }
  std::uint64_t total() const noexcept { return total_; }
  std::span<const UniversalHash> hashes() const noexcept { return hashes_; }

  std::uint64_t cell(std::size_t row, BucketId bucket) const {
    return counts_[row * buckets_ + bucket];
  }
  std::span<const std::uint64_t> row(std::size_t r) const {
    return std::span(counts_).subspan(r * buckets_, buckets_);
  }

 private:
  void check_domain(ClassId item) const;

  std::uint64_t buckets_;
  std::uint64_t domain_size_;
  std::uint64_t total_ = 0;
  std::vector<UniversalHash> hashes_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace mach
