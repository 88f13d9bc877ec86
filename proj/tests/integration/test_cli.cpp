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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "mach/dataio.hpp"
#include "mach/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

struct Workdir {
  fs::path path;
  Workdir() {
    path = fs::temp_directory_path() / ("mach_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Run cli(const Workdir& w, const std::string& args) {
  const std::string out = w / "stdout.txt";
  const std::string err = w / "stderr.txt";
  const std::string cmd = std::string(MACH_CLI) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::map<std::string, std::string> fields(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void write_clusters(const std::string& path, std::size_t classes, std::size_t dim,
                    double noise, std::size_t per_class, std::uint64_t seed) {
  mach::synthetic::ClusterTask task;
  task.num_classes = classes;
  task.dim = dim;
  task.noise = noise;
  task.seed = seed;
  mach::io::Dataset data;
  data.num_features = dim;
  data.num_labels = classes;
  data.samples = mach::synthetic::gaussian_clusters(task, per_class, 0).train;
  mach::io::save_dataset(path, data);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("plan") {
  Workdir w;
  auto r = cli(w, "plan --classes 2 --buckets 2 --delta 0.5");
  REQUIRE(r.code == 0);
  auto report = lines(r.out);
  REQUIRE(report.size() == 2);
  CHECK(fields(report[1])["reps"] == "3");

  r = cli(w, "plan --classes 105033 --buckets 32 --dim 422713 --delta 0.01");
  REQUIRE(r.code == 0);
  const auto kv = fields(lines(r.out)[1]);
  const double reps = std::stod(kv.at("reps"));
  CHECK(std::stod(kv.at("last_layer_reduction")) ==
        doctest::Approx(105033.0 / (32 * reps)).epsilon(1e-5));

  CHECK(cli(w, "plan --classes 2 --delta 1.5").code == 1);
  CHECK(cli(w, "plan --classes 1").code == 1);
  CHECK(cli(w, "plan").code == 1);
  CHECK(cli(w, "frobnicate").code == 1);
  CHECK(cli(w, "--help").code == 0);
}

TEST_CASE("train is thread-count independent and the loss falls") {
  Workdir w;
  write_clusters(w / "train.txt", 30, 12, 0.3, 20, 4);
  const std::string before = slurp(w / "train.txt");
  std::string first;
  for (const int threads : {1, 4, 8}) {
    const std::string model = w / ("m" + std::to_string(threads) + ".bin");
    const auto r = cli(w, "train --data " + (w / "train.txt") + " --model " + model +
                               " --buckets 8 --reps 6 --epochs 6 --seed 9 --threads " +
                               std::to_string(threads) + " --log " + (w / "log.txt"));
    REQUIRE(r.code == 0);
    const std::string bytes = slurp(model);
    CHECK(!bytes.empty());
    if (first.empty()) first = bytes;
    CHECK(bytes == first);
  }
  CHECK(slurp(w / "train.txt") == before);

  std::map<std::string, std::vector<double>> loss;
  for (const auto& l : lines(slurp(w / "log.txt"))) {
    auto kv = fields(l);
    loss[kv.at("rep")].push_back(std::stod(kv.at("loss")));
  }
  CHECK(loss.size() == 6);
  for (const auto& [rep, values] : loss) {
    REQUIRE(values.size() == 6);
    CHECK(values.back() < values.front());
  }
}

TEST_CASE("train rejects bad input without leaving a model") {
  Workdir w;
  write_text(w / "multi.txt", "2 3 3\n0,1 0:1\n2 1:1\n");
  auto r = cli(w, "train --data " + (w / "multi.txt") + " --model " + (w / "m.bin") +
                       " --mode multiclass --reps 2 --buckets 2");
  CHECK(r.code == 2);
  CHECK(!fs::exists(w / "m.bin"));
  CHECK(cli(w, "train --data " + (w / "multi.txt") + " --model " + (w / "m.bin") +
                    " --mode multilabel --reps 2 --buckets 2")
            .code == 0);

  write_text(w / "bad.txt", "1 3 2\n0 7:1\n");
  r = cli(w, "train --data " + (w / "bad.txt") + " --model " + (w / "b.bin"));
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(cli(w, "train --data " + (w / "missing.txt") + " --model " + (w / "b.bin")).code == 3);
  CHECK(cli(w, "train --data " + (w / "multi.txt") + " --model " + (w / "b.bin") +
                    " --mode sideways")
            .code == 1);
  CHECK(cli(w, "train --data " + (w / "multi.txt") + " --model " + (w / "b.bin") +
                    " --buckets 1 --reps 2")
            .code == 1);
  CHECK(!fs::exists(w / "b.bin"));
}

TEST_CASE("predict and evaluate") {
  Workdir w;
  write_clusters(w / "train.txt", 12, 10, 0.05, 20, 5);
  REQUIRE(cli(w, "train --data " + (w / "train.txt") + " --model " + (w / "m.bin") +
                      " --buckets 4 --reps 8 --epochs 20 --seed 1")
              .code == 0);

  auto r = cli(w, "predict --model " + (w / "m.bin") + " --data " + (w / "train.txt") +
                       " --topk 3");
  REQUIRE(r.code == 0);
  const auto out = lines(r.out);
  CHECK(out.size() == 240);
  const std::regex shape(R"(\d+: \d+:[-0-9.e]+,\d+:[-0-9.e]+,\d+:[-0-9.e]+)");
  for (const auto& l : out) CHECK(std::regex_match(l, shape));

  CHECK(cli(w, "predict --model " + (w / "m.bin") + " --data " + (w / "train.txt") +
                    " --topk 13")
            .code == 1);
  CHECK(cli(w, "predict --model " + (w / "m.bin") + " --data " + (w / "train.txt") +
                    " --estimator mode")
            .code == 1);
  write_text(w / "wide.txt", "1 11 12\n0 10:1\n");
  CHECK(cli(w, "predict --model " + (w / "m.bin") + " --data " + (w / "wide.txt")).code == 2);

  // Tight clusters: every query's label ranks first.
  r = cli(w, "evaluate --model " + (w / "m.bin") + " --data " + (w / "train.txt") +
                  " --k 1,5");
  REQUIRE(r.code == 0);
  for (const auto& l : lines(r.out)) {
    auto kv = fields(l);
    if (!kv.count("metric") || kv["metric"].rfind("precision@5", 0) == 0) continue;
    CHECK_MESSAGE(kv["unweighted"] == "1", l);
  }

  // Two queries with different weights, relevance chosen from the model's own
  // rankings so the expected metrics are known by hand.
  const std::string two = w / "two.txt";
  {
    const auto all = lines(slurp(w / "train.txt"));
    write_text(two, "2 10 12\n" + all[1] + "\n" + all[2] + "\n");
  }
  const auto pred = lines(cli(w, "predict --model " + (w / "m.bin") + " --data " + two +
                                      " --topk 12")
                              .out);
  REQUIRE(pred.size() == 2);
  // Query 0 is relevant to its top class, query 1 to its third.
  const auto third = [&](const std::string& l) {
    std::string rest = l.substr(l.find(' ') + 1);
    for (int i = 0; i < 2; ++i) rest = rest.substr(rest.find(',') + 1);
    return rest.substr(0, rest.find(':'));
  };
  const auto top1 = [&](const std::string& l) {
    const std::string rest = l.substr(l.find(' ') + 1);
    return rest.substr(0, rest.find(':'));
  };
  write_text(w / "q.txt", "3 | " + top1(pred[0]) + "\n1 | " + third(pred[1]) + "\n");
  r = cli(w, "evaluate --model " + (w / "m.bin") + " --data " + two + " --eval " +
                  (w / "q.txt") + " --k 3");
  REQUIRE(r.code == 0);
  std::map<std::string, std::pair<double, double>> m;
  for (const auto& l : lines(r.out)) {
    auto kv = fields(l);
    if (kv.count("metric")) {
      m[kv["metric"]] = {std::stod(kv["weighted"]), std::stod(kv["unweighted"])};
    }
  }
  CHECK(m.at("mrr@3").second == doctest::Approx((1.0 + 1.0 / 3) / 2).epsilon(1e-5));
  CHECK(m.at("mrr@3").first == doctest::Approx((3.0 + 1.0 / 3) / 4).epsilon(1e-5));
  CHECK(m.at("precision@3").second == doctest::Approx(1.0 / 3).epsilon(1e-5));
  CHECK(m.at("ndcg@3").second == doctest::Approx((1.0 + 0.5) / 2).epsilon(1e-5));
  CHECK(m.at("precision_most_rel@1").first == doctest::Approx(0.75).epsilon(1e-5));

  write_text(w / "far.txt", "1 | 40\n1 | 2\n");
  CHECK(cli(w, "evaluate --model " + (w / "m.bin") + " --data " + two + " --eval " +
                    (w / "far.txt"))
            .code == 2);
  write_text(w / "short.txt", "1 | 2\n");
  CHECK(cli(w, "evaluate --model " + (w / "m.bin") + " --data " + two + " --eval " +
                    (w / "short.txt"))
            .code == 2);

  const std::string model = slurp(w / "m.bin");
  write_text(w / "cut.bin", model.substr(0, model.size() / 2));
  CHECK(cli(w, "predict --model " + (w / "cut.bin") + " --data " + two).code == 3);
}

TEST_CASE("feature hashing round trip through the cli") {
  Workdir w;
  write_clusters(w / "train.txt", 8, 40, 0.1, 10, 6);
  REQUIRE(cli(w, "train --data " + (w / "train.txt") + " --model " + (w / "m.bin") +
                      " --buckets 4 --reps 5 --epochs 10 --feature-hash-dim 16")
              .code == 0);
  const auto r = cli(w, "evaluate --model " + (w / "m.bin") + " --data " +
                             (w / "train.txt") + " --k 1");
  REQUIRE(r.code == 0);
  for (const auto& l : lines(r.out)) {
    auto kv = fields(l);
    if (kv["metric"] == "precision@1") CHECK(std::stod(kv["unweighted"]) > 0.8);
  }
}

TEST_CASE("sketch") {
  Workdir w;
  write_text(w / "tokens.txt", "a b a c a b d\n");
  const auto r = cli(w, "sketch --input " + (w / "tokens.txt") + " --query a --query z --top 2");
  REQUIRE(r.code == 0);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 5);
  CHECK(fields(out[0])["total"] == "7");
  CHECK(fields(out[1])["estimate"] == "3");
  CHECK(fields(out[2])["estimate"] == "0");
  CHECK(fields(out[3])["token"] == "a");
  CHECK(fields(out[4])["token"] == "b");
  CHECK(cli(w, "sketch --input " + (w / "nothing.txt")).code == 3);
  CHECK(cli(w, "sketch --buckets 1 --input " + (w / "tokens.txt")).code == 1);
}

}  // TEST_SUITE
