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
#include <cstring>
#include <limits>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "mach/dataio.hpp"
#include "mach/decoder.hpp"
#include "mach/errors.hpp"
#include "mach/planner.hpp"
#include "mach/random.hpp"
#include "mach/synthetic.hpp"
#include "mach/train.hpp"

using namespace mach;
namespace fs = std::filesystem;

namespace {

io::Dataset parse(const std::string& text, io::DatasetOptions opts = {}) {
  std::istringstream in(text);
  return io::parse_dataset(in, opts);
}

std::vector<metrics::EvalQuery> parse_eval(const std::string& text) {
  std::istringstream in(text);
  return io::parse_eval(in);
}

template <class E>
std::size_t line_of(const std::string& text) {
  try {
    parse(text);
  } catch (const E& e) {
    return e.line();
  }
  return 0;
}

MachModel small_model(Mode mode, std::size_t hidden, std::uint64_t seed) {
  synthetic::ClusterTask task;
  task.num_classes = 12;
  task.dim = 9;
  task.seed = seed;
  const auto split = mode == Mode::kMulticlass
                         ? synthetic::gaussian_clusters(task, 10, 0)
                         : synthetic::multilabel_clusters(task, 100, 0, 2);
  MachConfig cfg;
  cfg.num_classes = 12;
  cfg.buckets = 5;
  cfg.repetitions = 3;
  cfg.input_dim = 9;
  cfg.mode = mode;
  cfg.hidden_units = hidden;
  cfg.seed = seed;
  cfg.epochs = 2;
  return train(split.train, cfg);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mach_dataio_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("dataio") {

TEST_CASE("dataset worked examples") {
  const auto a = parse("1 3 2\n0 1:0.5 2:1.0");
  REQUIRE(a.samples.size() == 1);
  CHECK(a.num_features == 3);
  CHECK(a.num_labels == 2);
  CHECK(a.samples[0].labels == std::vector<ClassId>{0});
  CHECK(a.samples[0].features.nnz() == 2);
  CHECK(a.samples[0].features.entries()[0].index == 1);
  CHECK(a.samples[0].features.entries()[0].value == 0.5);

  const auto b = parse("1 3 2\n0,1 0:1.0");
  CHECK(b.samples[0].labels == std::vector<ClassId>{0, 1});

  CHECK(line_of<RangeError>("1 3 2\n0 5:1.0") == 2);
  CHECK(line_of<RangeError>("2 3 2\n0 1:1\n2 1:1") == 3);
}

TEST_CASE("dataset malformed input") {
  CHECK(line_of<ParseError>("1 3 2\n0") == 2);            // no features
  CHECK(line_of<ParseError>("1 3 2\n0 1:x") == 2);
  CHECK(line_of<ParseError>("1 3 2\n0 1-1.0") == 2);
  CHECK(line_of<ParseError>("1 3 2\n0 1:1 1:2") == 2);    // duplicate index
  CHECK(line_of<ParseError>("1 3\n0 1:1") == 1);
  CHECK(line_of<ParseError>("2 3 2\n0 1:1") > 0);         // sample count
  CHECK(line_of<ParseError>("1 3 2\n 1:1") == 2);         // no labels
}

TEST_CASE("dataset options") {
  const auto one = parse("1 3 2\n2 1:0.5 3:1.0", {.expect_dim = {}, .one_based = true});
  CHECK(one.samples[0].labels == std::vector<ClassId>{1});
  CHECK(one.samples[0].features.entries()[0].index == 0);
  CHECK(one.samples[0].features.entries()[1].index == 2);
  CHECK_THROWS_AS(parse("1 3 2\n0 1:1", {.expect_dim = {}, .one_based = true}), ParseError);
  CHECK_THROWS_AS(parse("1 3 2\n0 1:1", {.expect_dim = 4, .one_based = false}), ValidationError);
  // Explicit zeros carry no information and are dropped.
  CHECK(parse("1 3 2\n0 0:0 1:2").samples[0].features.nnz() == 1);
}

TEST_CASE("dataset write then parse is the identity") {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    synthetic::ClusterTask task;
    task.num_classes = 15;
    task.dim = 20;
    task.seed = seed;
    io::Dataset data;
    data.num_features = 20;
    data.num_labels = 15;
    data.samples = synthetic::multilabel_clusters(task, 60, 0, 3).train;
    std::ostringstream out;
    io::write_dataset(out, data);
    const auto back = parse(out.str());
    CHECK(back.num_features == data.num_features);
    CHECK(back.num_labels == data.num_labels);
    REQUIRE(back.samples.size() == data.samples.size());
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
      CHECK(back.samples[i].labels == data.samples[i].labels);
      CHECK(back.samples[i].features == data.samples[i].features);
    }
  }
}

TEST_CASE("eval file") {
  const auto qs = parse_eval("3.0 | 1,2 | 1,2,5,9\n1 | 4\n");
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].weight == 3.0);
  CHECK(qs[0].relevant == std::vector<metrics::ItemId>{1, 2});
  REQUIRE(qs[0].candidates.has_value());
  CHECK(qs[0].candidates->size() == 4);
  CHECK(qs[0].most_relevant == 1u);
  CHECK(!qs[1].candidates.has_value());
  CHECK(qs[1].relevant == std::vector<metrics::ItemId>{4});

  // The first listed id is the designated one even when not the smallest.
  CHECK(parse_eval("1 | 7,3").front().most_relevant == 7u);

  CHECK_THROWS_AS(parse_eval("0 | 1 |\n"), ValidationError);
  CHECK_THROWS_AS(parse_eval("1 |  | 1,2\n"), ValidationError);
  CHECK_THROWS_AS(parse_eval("-1 | 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_eval("x | 1\n"), ParseError);
  CHECK_THROWS_AS(parse_eval("1 | 1,z\n"), ParseError);
}

TEST_CASE("model file size follows the parameter count") {
  for (const Mode mode : {Mode::kMulticlass, Mode::kMultilabel}) {
    for (const std::size_t hidden : {0u, 4u}) {
      const auto model = small_model(mode, hidden, 5);
      const auto& c = model.config();
      const auto bytes = io::serialize_model(model);
      const auto params =
          planner::cost_model(c.num_classes, c.buckets, c.repetitions, c.input_dim, c.hidden_units)
              .parameters;
      CHECK(bytes.size() == io::model_file_size(c));
      CHECK(bytes.size() == io::kModelHeaderBytes + 24 * c.repetitions + 4 * params);
      CHECK(std::memcmp(bytes.data(), "MACH", 4) == 0);
    }
  }
}

TEST_CASE("model round trip is bitwise") {
  TempDir dir;
  for (const Mode mode : {Mode::kMulticlass, Mode::kMultilabel}) {
    for (const std::size_t hidden : {0u, 6u}) {
      const auto model = small_model(mode, hidden, 11);
      const auto path = dir.path / "m.bin";
      io::save_model(model, path);
      CHECK(fs::file_size(path) == io::model_file_size(model.config()));
      const auto back = io::load_model(path);
      const auto& c = model.config();
      const auto& d = back.config();
      CHECK(d.num_classes == c.num_classes);
      CHECK(d.buckets == c.buckets);
      CHECK(d.repetitions == c.repetitions);
      CHECK(d.input_dim == c.input_dim);
      CHECK(d.mode == c.mode);
      CHECK(d.hidden_units == c.hidden_units);
      CHECK(d.seed == c.seed);
      CHECK(std::ranges::equal(back.hashes(), model.hashes()));
      CHECK(std::ranges::equal(back.classifiers(), model.classifiers()));
      Rng rng(17);
      for (int t = 0; t < 20; ++t) {
        std::vector<double> dense(9);
        for (auto& v : dense) v = standard_normal(rng);
        const auto x = SparseVector::from_dense(dense);
        for (const Estimator est : {Estimator::kUnbiased, Estimator::kMin, Estimator::kMedian}) {
          const auto a = score_all(model, x, est);
          const auto b = score_all(back, x, est);
          CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
        }
      }
      // No temporary left next to the model.
      std::size_t files = 0;
      for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++files;
      CHECK(files == 1);
    }
  }
}

TEST_CASE("corrupt model files are rejected") {
  const auto model = small_model(Mode::kMulticlass, 0, 3);
  const auto bytes = io::serialize_model(model);
  const auto reject = [](std::vector<unsigned char> b) {
    CHECK_THROWS_AS(io::deserialize_model(b), FormatError);
  };
  for (const std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{40},
                                io::kModelHeaderBytes + 10, bytes.size() - 1}) {
    reject({bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut)});
  }
  auto magic = bytes;
  magic[0] = 'X';
  reject(magic);
  auto version = bytes;
  version[4] = 2;
  reject(version);
  auto extra = bytes;
  extra.push_back(0);
  reject(extra);
  auto badp = bytes;  // p of repetition 0 set to 4, not a prime
  const auto p_at = badp.begin() + static_cast<std::ptrdiff_t>(io::kModelHeaderBytes + 16);
  std::fill(p_at, p_at + 8, 0);
  *p_at = 4;
  reject(badp);
  auto nan = bytes;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + bytes.size() - 4, &q, 4);
  reject(nan);

  TempDir dir;
  const auto path = dir.path / "cut.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), 50);
  }
  CHECK_THROWS_AS(io::load_model(path), FormatError);
  CHECK_THROWS_AS(io::load_model(dir.path / "missing.bin"), IoError);
}

}  // TEST_SUITE
