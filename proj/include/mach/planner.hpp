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

#include <cstdint>

namespace mach::planner {

// Upper bound on the chance that two given classes share a bucket in all r
// repetitions: (1/b)^r. Throws InvalidConfig for b < 2 or r < 1.
double pair_indistinguishable_prob(std::uint64_t b, std::uint64_t r);

// Union bound over all pairs, min(1, k^2 (1/b)^r).
double any_pair_bound(std::uint64_t k, std::uint64_t b, std::uint64_t r);

// Smallest integer r with k^2 (1/b)^r <= delta, i.e.
// ceil(2 ln(k / sqrt(delta)) / ln b). Throws InvalidArgument unless
// 0 < delta < 1.
std::uint64_t required_r(std::uint64_t k, std::uint64_t b, double delta);

struct CostReport {
  std::uint64_t parameters = 0;
  std::uint64_t inference_multiplications = 0;
  std::uint64_t model_bytes = 0;  // 4 bytes per parameter
};

// MACH cost for R classifiers of shape d -> [hidden ->] b:
//   linear: params R(db + b),          mults R b d + K R
//   hidden: params R(dh + h + hb + b), mults R(dh + hb) + K R
CostReport cost_model(std::uint64_t k, std::uint64_t b, std::uint64_t r,
                      std::uint64_t d, std::uint64_t hidden_units);

// The same network with a K-way output layer and no hashing.
CostReport vanilla_cost(std::uint64_t k, std::uint64_t d,
                        std::uint64_t hidden_units);

// K / (B R): output-layer width reduction, the usual way it is quoted.
double last_layer_reduction(std::uint64_t k, std::uint64_t b, std::uint64_t r);

// vanilla parameters / MACH parameters, biases included.
double parameter_reduction(std::uint64_t k, std::uint64_t b, std::uint64_t r,
                           std::uint64_t d, std::uint64_t hidden_units);

}  // namespace mach::planner
