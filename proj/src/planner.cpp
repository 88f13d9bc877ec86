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

#include "mach/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mach/errors.hpp"

namespace mach::planner {
namespace {

void check(std::uint64_t b, std::uint64_t r) {
  if (b < 2) throw InvalidConfig("b must be >= 2, got " + std::to_string(b));
  if (r < 1) throw InvalidConfig("r must be >= 1");
}

}  // namespace

double pair_indistinguishable_prob(std::uint64_t b, std::uint64_t r) {
  check(b, r);
  return std::pow(1.0 / static_cast<double>(b), static_cast<double>(r));
}

double any_pair_bound(std::uint64_t k, std::uint64_t b, std::uint64_t r) {
  check(b, r);
  if (k < 2) throw InvalidConfig("k must be >= 2");
  // k^2 b^-r in log space; k^2 alone overflows nothing but b^r can.
  const double log_bound = 2.0 * std::log(static_cast<double>(k)) -
                           static_cast<double>(r) * std::log(static_cast<double>(b));
  return std::min(1.0, std::exp(log_bound));
}

std::uint64_t required_r(std::uint64_t k, std::uint64_t b, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1), got " +
                          std::to_string(delta));
  }
  if (k < 2) throw InvalidConfig("k must be >= 2");
  check(b, 1);
  const double exact = 2.0 * (std::log(static_cast<double>(k)) -
                              0.5 * std::log(delta)) /
                       std::log(static_cast<double>(b));
  auto r = static_cast<std::uint64_t>(std::ceil(exact));
  // Integral ratios such as ln(1000)/ln(10) can round just above the
  // integer; snap back when within rounding noise.
  if (r > 1 && static_cast<double>(r - 1) >= exact - 1e-9 * std::max(1.0, exact)) {
    --r;
  }
  return std::max<std::uint64_t>(r, 1);
}

CostReport cost_model(std::uint64_t k, std::uint64_t b, std::uint64_t r,
                      std::uint64_t d, std::uint64_t hidden_units) {
  CostReport c;
  if (hidden_units == 0) {
    c.parameters = r * (d * b + b);
    c.inference_multiplications = r * b * d + k * r;
  } else {
    const std::uint64_t h = hidden_units;
    c.parameters = r * (d * h + h + h * b + b);
    c.inference_multiplications = r * (d * h + h * b) + k * r;
  }
  c.model_bytes = 4 * c.parameters;
  return c;
}

CostReport vanilla_cost(std::uint64_t k, std::uint64_t d,
                        std::uint64_t hidden_units) {
  CostReport c;
  if (hidden_units == 0) {
    c.parameters = d * k + k;
    c.inference_multiplications = d * k;
  } else {
    const std::uint64_t h = hidden_units;
    c.parameters = d * h + h + h * k + k;
    c.inference_multiplications = d * h + h * k;
  }
  c.model_bytes = 4 * c.parameters;
  return c;
}

double last_layer_reduction(std::uint64_t k, std::uint64_t b, std::uint64_t r) {
  return static_cast<double>(k) / static_cast<double>(b * r);
}

double parameter_reduction(std::uint64_t k, std::uint64_t b, std::uint64_t r,
                           std::uint64_t d, std::uint64_t hidden_units) {
  return static_cast<double>(vanilla_cost(k, d, hidden_units).parameters) /
         static_cast<double>(cost_model(k, b, r, d, hidden_units).parameters);
}

}  // namespace mach::planner
