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

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <string_view>
#include <vector>

#include "mach/errors.hpp"
#include "mach/random.hpp"
#include "mach/sketch.hpp"
#include "../support/oracles.hpp"

using namespace mach;

namespace {

std::uint64_t row_sum(const CountMinSketch& s, std::size_t r) {
  const auto row = s.row(r);
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

}  // namespace

TEST_SUITE("sketch") {

TEST_CASE("fresh sketch is zero") {
  const CountMinSketch s(4, 3, 1, 26);
  CHECK(s.rows() == 3);
  CHECK(s.buckets() == 4);
  CHECK(s.total() == 0);
  for (std::size_t r = 0; r < 3; ++r) CHECK(row_sum(s, r) == 0);
}

TEST_CASE("same seed gives the same hash rows") {
  const CountMinSketch a(4, 3, 77, 26), b(4, 3, 77, 26);
  CHECK(std::equal(a.hashes().begin(), a.hashes().end(), b.hashes().begin()));
  const CountMinSketch c(4, 3, 78, 26);
  CHECK_FALSE(std::equal(a.hashes().begin(), a.hashes().end(), c.hashes().begin()));
}

TEST_CASE("invalid shapes") {
  CHECK_THROWS_AS(CountMinSketch(1, 3, 0, 26), InvalidConfig);
  CHECK_THROWS_AS(CountMinSketch(4, 0, 0, 26), InvalidConfig);
}

TEST_CASE("single update touches one cell per row") {
  CountMinSketch s(8, 4, 2, 26);
  s.update(0);
  for (std::size_t r = 0; r < 4; ++r) {
    const auto row = s.row(r);
    CHECK(std::count(row.begin(), row.end(), 1u) == 1);
    CHECK(row_sum(s, r) == 1);
  }
}

TEST_CASE("out-of-domain items are rejected") {
  CountMinSketch s(8, 4, 2, 26);
  CHECK_THROWS_AS(s.update(26), DomainError);
  CHECK_THROWS_AS((void)s.estimate(100), DomainError);
}

TEST_CASE("letter stream ABCAACD") {
  constexpr std::string_view kStream = "ABCAACD";
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CountMinSketch s(4, 4, seed, 26);
    for (const char c : kStream) s.update(static_cast<ClassId>(c - 'A'));
    CHECK(s.total() == 7);
    for (std::size_t r = 0; r < 4; ++r) CHECK(row_sum(s, r) == 7);

    // A is counted exactly whenever some row separates it from B, C, D.
    bool isolated = false;
    for (const auto& h : s.hashes()) {
      isolated = isolated || (h(0) != h(1) && h(0) != h(2) && h(0) != h(3));
    }
    const auto est = s.estimate(0);
    CHECK(est >= 3);
    if (isolated) CHECK(est == 3);

    const auto unseen = s.estimate(25);
    std::uint64_t max_cell = 0;
    for (std::size_t r = 0; r < 4; ++r) {
      const auto row = s.row(r);
      max_cell = std::max(max_cell, *std::max_element(row.begin(), row.end()));
    }
    CHECK(unseen <= max_cell);
  }
}

TEST_CASE("colliding items share a cell") {
  CountMinSketch s(2, 1, 9, 26);
  const auto& h = s.hashes()[0];
  ClassId other = 1;
  while (h(other) != h(0)) ++other;
  s.update(0);
  s.update(other);
  s.update(other);
  CHECK(s.cell(0, h(0)) == 3);
}

TEST_CASE("Zipf stream against an exact counter") {
  const testing::ZipfTable zipf(10'000, 1.1);
  Rng rng(2024);
  CountMinSketch s(256, 8, 31, 10'000);
  testing::ExactCounter exact;
  for (int i = 0; i < 100'000; ++i) {
    const auto item = zipf.sample(uniform_unit(rng));
    s.update(item);
    exact.add(item);
  }
  bool never_under = true;
  for (ClassId i = 0; i < 10'000; ++i) {
    never_under = never_under && s.estimate(i) >= exact.count(i);
  }
  CHECK(never_under);

  std::vector<ClassId> ids(10'000);
  std::iota(ids.begin(), ids.end(), ClassId{0});
  auto by = [&](auto key) {
    auto v = ids;
    std::partial_sort(v.begin(), v.begin() + 10, v.end(), [&](ClassId l, ClassId r) {
      return key(l) != key(r) ? key(l) > key(r) : l < r;
    });
    v.resize(10);
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(by([&](ClassId i) { return s.estimate(i); }) ==
        by([&](ClassId i) { return exact.count(i); }));
}

}  // TEST_SUITE
