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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mach/metrics.hpp"
#include "mach/model.hpp"

namespace mach::io {

// Sparse multi-label text format:
//
//   num_samples num_features num_labels
//   l1,l2,... idx:val idx:val ...
//
// Ids are zero-based unless one_based is set, in which case every label
// and index is shifted down by one and a zero id is an error.
struct Dataset {
  std::size_t num_features = 0;
  std::size_t num_labels = 0;
  std::vector<LabeledSample> samples;
};

struct DatasetOptions {
  std::optional<std::size_t> expect_dim;
  bool one_based = false;
};

// Throws ParseError (malformed line), RangeError (label or index beyond the
// header), ValidationError (expect_dim mismatch), IoError (unreadable).
Dataset parse_dataset(std::istream& in, const DatasetOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path,
                     const DatasetOptions& options = {});
void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

// Evaluation queries, one per line:
//
//   weight | relevant_ids | candidate_ids
//
// The candidate field is optional; without it ranking covers the whole
// catalog. The first relevant id is the query's designated most relevant
// item.
std::vector<metrics::EvalQuery> parse_eval(std::istream& in,
                                           bool one_based = false);
std::vector<metrics::EvalQuery> load_eval_file(const std::filesystem::path& path,
                                               bool one_based = false);

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::size_t kModelHeaderBytes = 72;

// Exact byte length of a model file for config.
std::size_t model_file_size(const MachConfig& config);

std::vector<unsigned char> serialize_model(const MachModel& model);
// Throws FormatError on bad magic, unknown version, size mismatch or
// invalid contents.
MachModel deserialize_model(std::span<const unsigned char> bytes);

// Writes through a temporary file in the same directory and renames it into
// place, so readers never see a partial model.
void save_model(const MachModel& model, const std::filesystem::path& path);
MachModel load_model(const std::filesystem::path& path);

}  // namespace mach::io
