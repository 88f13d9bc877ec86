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

#include "mach/dataio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <unistd.h>

#include "mach/errors.hpp"
#include "mach/hashing.hpp"

namespace mach::io {
namespace {

constexpr std::array<unsigned char, 4> kMagic = {'M', 'A', 'C', 'H'};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (s.front() == '+') s.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::uint64_t parse_id(std::string_view token, bool one_based, std::size_t line,
                       const char* what) {
  std::uint64_t id = 0;
  if (!parse_number(token, id)) {
    throw ParseError(line, std::string("bad ") + what + " '" +
                               std::string(token) + "'");
  }
  if (one_based) {
    if (id == 0) {
      throw ParseError(line, std::string(what) + " 0 in one-based input");
    }
    --id;
  }
  return id;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::uint64_t> parse_id_list(std::string_view field,
                                         bool one_based, std::size_t line,
                                         const char* what) {
  std::vector<std::uint64_t> ids;
  field = trim(field);
  if (field.empty()) return ids;
  for (const auto part : split(field, ',')) {
    ids.push_back(parse_id(part, one_based, line, what));
  }
  return ids;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

// Little-endian byte writer / bounds-checked reader.
class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(std::span<const unsigned char> b) {
    bytes_.insert(bytes_.end(), b.begin(), b.end());
  }
  std::vector<unsigned char> take() { return std::move(bytes_); }
  void reserve(std::size_t n) { bytes_.reserve(n); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) {
      bytes_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
  }
  std::vector<unsigned char> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> b) : bytes_(b) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::span<const unsigned char> raw(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("model file truncated at byte " + std::to_string(pos_));
    }
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Dataset parse_dataset(std::istream& in, const DatasetOptions& options) {
  std::string line;
  std::size_t lineno = 0;
  Dataset data;
  std::size_t declared = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  {
    const auto head = tokens(line);
    if (head.size() != 3 || !parse_number(head[0], declared) ||
        !parse_number(head[1], data.num_features) ||
        !parse_number(head[2], data.num_labels)) {
      throw ParseError(lineno,
                       "expected header 'num_samples num_features num_labels'");
    }
    if (data.num_features == 0) throw ParseError(lineno, "zero features");
  }
  if (options.expect_dim && *options.expect_dim != data.num_features) {
    throw ValidationError("dataset has " + std::to_string(data.num_features) +
                          " features, expected " +
                          std::to_string(*options.expect_dim));
  }
  data.samples.reserve(declared);

  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokens(line);
    if (toks.empty()) continue;
    std::size_t first_feature = 0;
    LabeledSample sample;
    if (toks[0].find(':') == std::string_view::npos) {
      sample.labels = parse_id_list(toks[0], options.one_based, lineno, "label");
      first_feature = 1;
    }
    if (sample.labels.empty()) throw ParseError(lineno, "sample has no labels");
    for (const auto y : sample.labels) {
      if (y >= data.num_labels) {
        throw RangeError(lineno, "label " + std::to_string(y) +
                                     " >= num_labels " +
                                     std::to_string(data.num_labels));
      }
    }
    std::sort(sample.labels.begin(), sample.labels.end());
    sample.labels.erase(std::unique(sample.labels.begin(), sample.labels.end()),
                        sample.labels.end());

    if (first_feature == toks.size()) {
      throw ParseError(lineno, "sample has no features");
    }
    std::vector<SparseEntry> entries;
    entries.reserve(toks.size() - first_feature);
    for (std::size_t t = first_feature; t < toks.size(); ++t) {
      const auto colon = toks[t].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(lineno, "expected idx:val, got '" +
                                     std::string(toks[t]) + "'");
      }
      const auto idx = parse_id(toks[t].substr(0, colon), options.one_based,
                                lineno, "feature index");
      double val = 0.0;
      if (!parse_number(toks[t].substr(colon + 1), val) || !std::isfinite(val)) {
        throw ParseError(lineno, "bad feature value '" + std::string(toks[t]) +
                                     "'");
      }
      if (idx >= data.num_features) {
        throw RangeError(lineno, "feature index " + std::to_string(idx) +
                                     " >= num_features " +
                                     std::to_string(data.num_features));
      }
      entries.push_back({idx, val});
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& l, const auto& r) { return l.index < r.index; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].index == entries[i - 1].index) {
        throw ParseError(lineno, "duplicate feature index " +
                                     std::to_string(entries[i].index));
      }
    }
    std::erase_if(entries, [](const auto& e) { return e.value == 0.0; });
    sample.features = SparseVector(data.num_features, std::move(entries));
    data.samples.push_back(std::move(sample));
  }
  if (data.samples.size() != declared) {
    throw ParseError(lineno, "header declares " + std::to_string(declared) +
                                 " samples, found " +
                                 std::to_string(data.samples.size()));
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const DatasetOptions& options) {
  auto in = open_input(path);
  return parse_dataset(in, options);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << data.samples.size() << ' ' << data.num_features << ' '
      << data.num_labels << '\n';
  for (const auto& s : data.samples) {
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
      out << (i ? "," : "") << s.labels[i];
    }
    for (const auto& e : s.features.entries()) {
      out << ' ' << e.index << ':' << format_double(e.value);
    }
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset(out, data);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<metrics::EvalQuery> parse_eval(std::istream& in, bool one_based) {
  std::vector<metrics::EvalQuery> queries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, '|');
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(lineno, "expected 'weight | relevant | candidates'");
    }
    metrics::EvalQuery q;
    q.query_id = queries.size();
    if (!parse_number(fields[0], q.weight)) {
      throw ParseError(lineno, "bad weight '" + std::string(trim(fields[0])) +
                                   "'");
    }
    const auto relevant = parse_id_list(fields[1], one_based, lineno, "item id");
    if (relevant.empty()) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": empty relevant set");
    }
    q.most_relevant = relevant.front();
    q.relevant = relevant;
    std::sort(q.relevant.begin(), q.relevant.end());
    q.relevant.erase(std::unique(q.relevant.begin(), q.relevant.end()),
                     q.relevant.end());
    if (fields.size() == 3) {
      auto cand = parse_id_list(fields[2], one_based, lineno, "item id");
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      q.candidates = std::move(cand);
    }
    try {
      q.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

std::vector<metrics::EvalQuery> load_eval_file(const std::filesystem::path& path,
                                               bool one_based) {
  auto in = open_input(path);
  return parse_eval(in, one_based);
}

std::size_t model_file_size(const MachConfig& config) {
  const std::size_t per_rep = MetaClassifier::parameter_count(
      config.input_dim, config.hidden_units, config.buckets);
  return kModelHeaderBytes + config.repetitions * (24 + 4 * per_rep);
}

std::vector<unsigned char> serialize_model(const MachModel& model) {
  const auto& c = model.config();
  Writer w;
  w.reserve(model_file_size(c));
  w.raw(kMagic);
  w.u32(kModelFormatVersion);
  w.u64(c.num_classes);
  w.u64(c.buckets);
  w.u64(c.repetitions);
  w.u64(c.input_dim);
  w.u64(static_cast<std::uint64_t>(c.mode));
  w.u64(c.hidden_units);
  w.u64(c.seed);
  w.u64(c.source_dim);
  for (const auto& h : model.hashes()) {
    w.u64(h.a);
    w.u64(h.b);
    w.u64(h.p);
  }
  for (const auto& clf : model.classifiers()) {
    for (const float v : clf.parameters()) w.f32(v);
  }
  return w.take();
}

MachModel deserialize_model(std::span<const unsigned char> bytes) {
  Reader r(bytes);
  const auto magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw FormatError("not a MACH model file (bad magic)");
  }
  const auto version = r.u32();
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  MachConfig c;
  c.num_classes = r.u64();
  c.buckets = r.u64();
  c.repetitions = r.u64();
  c.input_dim = r.u64();
  const auto mode = r.u64();
  c.hidden_units = r.u64();
  c.seed = r.u64();
  c.source_dim = r.u64();
  if (mode > 1) throw FormatError("unknown mode " + std::to_string(mode));
  c.mode = static_cast<Mode>(mode);
  try {
    c.validate();
  } catch (const InvalidConfig& e) {
    throw FormatError(std::string("invalid config block: ") + e.what());
  }

  // Guard the size arithmetic before trusting it.
  if (c.input_dim > bytes.size() || c.hidden_units > bytes.size() ||
      c.buckets > bytes.size()) {
    throw FormatError("model header declares more weights than the file holds");
  }
  const std::size_t per_rep = MetaClassifier::parameter_count(
      c.input_dim, c.hidden_units, c.buckets);
  if (c.repetitions > bytes.size() || per_rep > bytes.size() ||
      model_file_size(c) != bytes.size()) {
    throw FormatError("model file size " + std::to_string(bytes.size()) +
                      " does not match its header");
  }

  std::vector<UniversalHash> hashes;
  for (std::size_t j = 0; j < c.repetitions; ++j) {
    UniversalHash h;
    h.a = r.u64();
    h.b = r.u64();
    h.p = r.u64();
    h.range = c.buckets;
    if (!is_prime(h.p) || h.p < c.buckets || h.p < c.num_classes ||
        h.a < 1 || h.a >= h.p || h.b >= h.p) {
      throw FormatError("invalid hash parameters for repetition " +
                        std::to_string(j));
    }
    hashes.push_back(h);
  }
  std::vector<MetaClassifier> classifiers;
  for (std::size_t j = 0; j < c.repetitions; ++j) {
    MetaClassifier clf(c.input_dim, c.hidden_units, c.buckets, c.mode);
    for (auto& v : clf.parameters()) {
      v = r.f32();
      if (!std::isfinite(v)) {
        throw FormatError("non-finite weight in repetition " +
                          std::to_string(j));
      }
    }
    classifiers.push_back(std::move(clf));
  }
  return MachModel(c, std::move(hashes), std::move(classifiers));
}

void save_model(const MachModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move model into place at " + path.string());
  }
}

MachModel load_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace mach::io
