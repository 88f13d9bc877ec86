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

#include "mach/hashing.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "mach/errors.hpp"
#include "mach/random.hpp"

namespace mach {
namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<uint128_t>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

constexpr std::uint32_t rotl32(std::uint32_t x, int r) {
  return (x << r) | (x >> (32 - r));
}

}  // namespace

// Deterministic Miller-Rabin; the first twelve prime bases cover all of
// 64-bit.
bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  constexpr std::array<std::uint64_t, 12> kBases = {2,  3,  5,  7,  11, 13,
                                                    17, 19, 23, 29, 31, 37};
  for (const auto q : kBases) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (const auto a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  for (std::uint64_t c = n | 1; c >= n; c += 2) {
    if (is_prime(c)) return c;
  }
  throw InvalidConfig("no 64-bit prime >= " + std::to_string(n));
}

UniversalHash sample_hash(std::uint64_t seed, std::uint64_t range,
                          std::uint64_t domain_size) {
  if (range < 2) {
    throw InvalidConfig("hash range must be >= 2, got " +
                        std::to_string(range));
  }
  if (domain_size < 1) throw InvalidConfig("hash domain must be non-empty");
  UniversalHash h;
  h.range = range;
  h.p = next_prime(std::max(range, domain_size));
  Rng rng(seed);
  h.a = 1 + uniform_below(rng, h.p - 1);
  h.b = uniform_below(rng, h.p);
  return h;
}

UniversalHash identity_hash(std::uint64_t k) {
  if (k < 2) throw InvalidConfig("identity hash needs k >= 2");
  return UniversalHash{.a = 1, .b = 0, .p = next_prime(k), .range = k};
}

// MurmurHash3_x86_32 (public domain, Austin Appleby).
std::uint32_t murmur3_32(const void* key, std::size_t len,
                         std::uint32_t seed) noexcept {
  const auto* data = static_cast<const unsigned char*>(key);
  const std::size_t nblocks = len / 4;
  std::uint32_t h1 = seed;
  constexpr std::uint32_t c1 = 0xcc9e2d51;
  constexpr std::uint32_t c2 = 0x1b873593;

  for (std::size_t i = 0; i < nblocks; ++i) {
    // Little-endian block read.
    std::uint32_t k1 = static_cast<std::uint32_t>(data[4 * i]) |
                       static_cast<std::uint32_t>(data[4 * i + 1]) << 8 |
                       static_cast<std::uint32_t>(data[4 * i + 2]) << 16 |
                       static_cast<std::uint32_t>(data[4 * i + 3]) << 24;
    k1 *= c1;
    k1 = rotl32(k1, 15);
    k1 *= c2;
    h1 ^= k1;
    h1 = rotl32(h1, 13);
    h1 = h1 * 5 + 0xe6546b64;
  }

  const unsigned char* tail = data + nblocks * 4;
  std::uint32_t k1 = 0;
  switch (len & 3) {
    case 3:
      k1 ^= static_cast<std::uint32_t>(tail[2]) << 16;
      [[fallthrough]];
    case 2:
      k1 ^= static_cast<std::uint32_t>(tail[1]) << 8;
      [[fallthrough]];
    case 1:
      k1 ^= tail[0];
      k1 *= c1;
      k1 = rotl32(k1, 15);
      k1 *= c2;
      h1 ^= k1;
  }

  h1 ^= static_cast<std::uint32_t>(len);
  h1 ^= h1 >> 16;
  h1 *= 0x85ebca6b;
  h1 ^= h1 >> 13;
  h1 *= 0xc2b2ae35;
  h1 ^= h1 >> 16;
  return h1;
}

std::uint64_t feature_index(std::uint64_t index, std::size_t target_dim,
                            std::uint64_t seed) noexcept {
  std::array<unsigned char, 8> bytes{};
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<unsigned char>(index >> (8 * i));
  }
  const auto s = static_cast<std::uint32_t>(seed ^ (seed >> 32));
  std::uint64_t h = murmur3_32(bytes.data(), bytes.size(), s);
  if (target_dim > std::numeric_limits<std::uint32_t>::max()) {
    h = (h << 32) | murmur3_32(bytes.data(), bytes.size(), ~s);
  }
  return h % target_dim;
}

SparseVector feature_hash(const SparseVector& x, std::size_t target_dim,
                          std::uint64_t seed) {
  if (target_dim < 1) throw InvalidConfig("feature hash dimension must be >= 1");
  std::vector<SparseEntry> out;
  out.reserve(x.nnz());
  for (const auto& e : x.entries()) {
    out.push_back({feature_index(e.index, target_dim, seed), e.value});
  }
  return SparseVector::canonicalize(target_dim, std::move(out));
}

}  // namespace mach
