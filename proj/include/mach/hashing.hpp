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

#include "mach/sparse.hpp"

namespace mach {

__extension__ typedef unsigned __int128 uint128_t;

using ClassId = std::uint64_t;
using BucketId = std::uint64_t;

// One member h(x) = ((a*x + b) mod p) mod range of the Carter-Wegman
// 2-universal family.
struct UniversalHash {
  std::uint64_t a = 1;
  std::uint64_t b = 0;
  std::uint64_t p = 2;
  std::uint64_t range = 1;

  BucketId operator()(ClassId x) const noexcept {
    const uint128_t ax = static_cast<uint128_t>(a) * x + b;
    return static_cast<BucketId>((ax % p) % range);
  }

  friend bool operator==(const UniversalHash&, const UniversalHash&) = default;
};

bool is_prime(std::uint64_t n) noexcept;

// Smallest prime >= n.
std::uint64_t next_prime(std::uint64_t n);

// Draws a from [1, p) and b from [0, p) where p is the smallest prime
// >= max(range, domain_size). Throws InvalidConfig when range < 2 or
// domain_size < 1.
UniversalHash sample_hash(std::uint64_t seed, std::uint64_t range,
                          std::uint64_t domain_size);

inline BucketId eval_hash(const UniversalHash& h, ClassId x) noexcept {
  return h(x);
}

// h(x) = x on [0, k). Used as the label map of a plain k-class model.
UniversalHash identity_hash(std::uint64_t k);

// Maps every feature index into [0, target_dim) with seeded MurmurHash3 and
// sums colliding values; exact-zero sums are dropped. Linear in x for a
// fixed seed. No sign hashing.
SparseVector feature_hash(const SparseVector& x, std::size_t target_dim,
                          std::uint64_t seed);

// The index map used by feature_hash.
std::uint64_t feature_index(std::uint64_t index, std::size_t target_dim,
                            std::uint64_t seed) noexcept;

std::uint32_t murmur3_32(const void* key, std::size_t len,
                         std::uint32_t seed) noexcept;

}  // namespace mach
