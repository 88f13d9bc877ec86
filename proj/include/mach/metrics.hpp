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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mach::metrics {

using ItemId = std::uint64_t;

struct EvalQuery {
  std::size_t query_id = 0;
  std::vector<ItemId> relevant;             // sorted, unique, non-empty
  std::optional<ItemId> most_relevant;      // designated top item, if known
  std::optional<std::vector<ItemId>> candidates;  // sorted, unique
  double weight = 1.0;                      // session count

  bool is_relevant(ItemId item) const;
  // Throws ValidationError when an invariant is broken.
  void validate() const;
};

// Normalizer of AP@k: min(k, |relevant|), or the literal k.
enum class ApNormalizer { kMinKRelevant, kK };
enum class LogBase { kTwo, kNatural };

// `ranked` is best-first with no duplicates; a list shorter than k is
// treated as padded with non-relevant items. All throw InvalidArgument for
// k == 0.
double precision_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                      std::size_t k);
double recall_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                   std::size_t k);
double average_precision_at_k(std::span<const ItemId> ranked,
                              const EvalQuery& q, std::size_t k,
                              ApNormalizer norm = ApNormalizer::kMinKRelevant);
// 1 / rank of the first relevant item in the top k, else 0. With
// most_relevant_only the relevant set shrinks to q.most_relevant, which
// must be present.
double mrr_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                std::size_t k, bool most_relevant_only = false);
// Binary-relevance nDCG with (2^rel - 1) gains; 0 when IDCG is 0.
double ndcg_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                 std::size_t k, LogBase base = LogBase::kTwo);

// Weighted: sum(v w) / sum(w). Unweighted: plain mean. Throws
// InvalidArgument for an empty list or a zero weight total.
double aggregate(std::span<const double> values,
                 std::span<const double> weights, bool weighted);

struct MetricOptions {
  ApNormalizer ap_normalizer = ApNormalizer::kMinKRelevant;
  LogBase ndcg_log = LogBase::kTwo;
};

struct MetricRecord {
  std::string name;
  double weighted = 0.0;
  double unweighted = 0.0;
};

// Every metric at every k over per-query rankings (aligned with queries).
// Adds p@1_most_rel and mrr_most_rel@k when all queries designate a most
// relevant item. Weighted values are NaN when every weight is zero.
std::vector<MetricRecord> evaluate(std::span<const std::vector<ItemId>> rankings,
                                   std::span<const EvalQuery> queries,
                                   std::span<const std::size_t> ks,
                                   const MetricOptions& options = {});

}  // namespace mach::metrics
