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

#include "mach/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mach/errors.hpp"

namespace mach::metrics {
namespace {

void check_k(std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
}

std::span<const ItemId> head(std::span<const ItemId> ranked, std::size_t k) {
  return ranked.first(std::min(k, ranked.size()));
}

std::size_t hits(std::span<const ItemId> ranked, const EvalQuery& q,
                 std::size_t k) {
  std::size_t n = 0;
  for (const auto item : head(ranked, k)) n += q.is_relevant(item) ? 1 : 0;
  return n;
}

double discount(std::size_t rank, LogBase base) {
  const double x = static_cast<double>(rank) + 1.0;
  return base == LogBase::kTwo ? std::log2(x) : std::log(x);
}

}  // namespace

bool EvalQuery::is_relevant(ItemId item) const {
  return std::binary_search(relevant.begin(), relevant.end(), item);
}

void EvalQuery::validate() const {
  if (relevant.empty()) throw ValidationError("query has no relevant items");
  if (!std::is_sorted(relevant.begin(), relevant.end()) ||
      std::adjacent_find(relevant.begin(), relevant.end()) != relevant.end()) {
    throw ValidationError("relevant items must be sorted and unique");
  }
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw ValidationError("query weight must be finite and non-negative");
  }
  if (most_relevant && !is_relevant(*most_relevant)) {
    throw ValidationError("most relevant item is not in the relevant set");
  }
  if (candidates) {
    if (!std::is_sorted(candidates->begin(), candidates->end())) {
      throw ValidationError("candidates must be sorted");
    }
    if (!std::includes(candidates->begin(), candidates->end(),
                       relevant.begin(), relevant.end())) {
      throw ValidationError("relevant items must be among the candidates");
    }
  }
}

double precision_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                      std::size_t k) {
  check_k(k);
  return static_cast<double>(hits(ranked, q, k)) / static_cast<double>(k);
}

double recall_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                   std::size_t k) {
  check_k(k);
  return static_cast<double>(hits(ranked, q, k)) /
         static_cast<double>(q.relevant.size());
}

double average_precision_at_k(std::span<const ItemId> ranked,
                              const EvalQuery& q, std::size_t k,
                              ApNormalizer norm) {
  check_k(k);
  double sum = 0.0;
  std::size_t found = 0;
  const auto top = head(ranked, k);
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (q.is_relevant(top[i])) {
      ++found;
      sum += static_cast<double>(found) / static_cast<double>(i + 1);
    }
  }
  const std::size_t denom =
      norm == ApNormalizer::kK ? k : std::min(k, q.relevant.size());
  return sum / static_cast<double>(denom);
}

double mrr_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                std::size_t k, bool most_relevant_only) {
  check_k(k);
  if (most_relevant_only && !q.most_relevant) {
    throw InvalidArgument("query " + std::to_string(q.query_id) +
                          " has no designated most relevant item");
  }
  const auto top = head(ranked, k);
  for (std::size_t i = 0; i < top.size(); ++i) {
    const bool rel = most_relevant_only ? top[i] == *q.most_relevant
                                        : q.is_relevant(top[i]);
    if (rel) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double ndcg_at_k(std::span<const ItemId> ranked, const EvalQuery& q,
                 std::size_t k, LogBase base) {
  check_k(k);
  double dcg = 0.0;
  const auto top = head(ranked, k);
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (q.is_relevant(top[i])) dcg += 1.0 / discount(i + 1, base);
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, q.relevant.size());
  for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / discount(i + 1, base);
  return idcg == 0.0 ? 0.0 : dcg / idcg;
}

double aggregate(std::span<const double> values,
                 std::span<const double> weights, bool weighted) {
  if (values.empty()) throw InvalidArgument("nothing to aggregate");
  if (!weighted) {
    double sum = 0.0;
    for (const double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  if (weights.size() != values.size()) {
    throw InvalidArgument("one weight per value required");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += values[i] * weights[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw InvalidArgument("weights sum to zero");
  return num / den;
}

std::vector<MetricRecord> evaluate(std::span<const std::vector<ItemId>> rankings,
                                   std::span<const EvalQuery> queries,
                                   std::span<const std::size_t> ks,
                                   const MetricOptions& options) {
  if (rankings.size() != queries.size()) {
    throw InvalidArgument("one ranking per query required");
  }
  if (queries.empty()) throw InvalidArgument("no queries to evaluate");
  std::vector<double> weights;
  weights.reserve(queries.size());
  for (const auto& q : queries) weights.push_back(q.weight);
  const bool weighted = std::any_of(weights.begin(), weights.end(),
                                    [](double w) { return w > 0.0; });

  using PerQuery = std::function<double(std::span<const ItemId>,
                                        const EvalQuery&, std::size_t)>;
  std::vector<MetricRecord> out;
  std::vector<double> values(queries.size());
  const auto record = [&](std::string name, std::size_t k, const PerQuery& f) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      values[i] = f(rankings[i], queries[i], k);
    }
    MetricRecord r;
    r.name = std::move(name);
    r.unweighted = aggregate(values, weights, false);
    r.weighted = weighted ? aggregate(values, weights, true)
                          : std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(r));
  };

  for (const auto k : ks) {
    check_k(k);
    const std::string at = "@" + std::to_string(k);
    record("precision" + at, k, precision_at_k);
    record("recall" + at, k, recall_at_k);
    record("map" + at, k, [&](auto r, const auto& q, std::size_t kk) {
      return average_precision_at_k(r, q, kk, options.ap_normalizer);
    });
    record("mrr" + at, k, [](auto r, const auto& q, std::size_t kk) {
      return mrr_at_k(r, q, kk);
    });
    record("ndcg" + at, k, [&](auto r, const auto& q, std::size_t kk) {
      return ndcg_at_k(r, q, kk, options.ndcg_log);
    });
  }

  const bool designated =
      std::all_of(queries.begin(), queries.end(),
                  [](const EvalQuery& q) { return q.most_relevant.has_value(); });
  if (designated) {
    record("precision_most_rel@1", 1, [](auto r, const auto& q, std::size_t) {
      return (!r.empty() && r.front() == *q.most_relevant) ? 1.0 : 0.0;
    });
    for (const auto k : ks) {
      record("mrr_most_rel@" + std::to_string(k), k,
             [](auto r, const auto& q, std::size_t kk) {
               return mrr_at_k(r, q, kk, true);
             });
    }
  }
  return out;
}

}  // namespace mach::metrics
