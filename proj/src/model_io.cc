// Copyright 2026 The snap-nulling Authors. All Rights Reserved.
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

#include "snap/model_io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <zlib.h>

#include "snap/error.h"

namespace snap {

namespace {

constexpr std::string_view kModelMagic = "SNAPMODEL";

void AppendReal(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), " %a", v);
  out += buf;
}

template <typename Vec>
void AppendLine(std::string& out, std::string_view key, const Vec& values) {
  out += key;
  for (Eigen::Index i = 0; i < values.size(); ++i) AppendReal(out, values(i));
  out += '\n';
}

class LineParser {
 public:
  explicit LineParser(std::string_view body) {
    std::size_t start = 0;
    while (start < body.size()) {
      const auto end = body.find('\n', start);
      const auto stop = end == std::string_view::npos ? body.size() : end;
      lines_.emplace_back(body.substr(start, stop - start));
      start = stop + 1;
    }
  }

  bool Done() const { return next_ >= lines_.size(); }
  std::string_view PeekKey() const {
    if (Done()) return {};
    const auto& line = lines_[next_];
    return std::string_view(line).substr(0, line.find(' '));
  }

  // Returns the tokens after `key` on the next line.
  std::vector<std::string> Expect(std::string_view key) {
    if (Done()) throw CorruptionError("model file ends before '" + std::string(key) + "'");
    std::istringstream in(lines_[next_]);
    std::string first;
    in >> first;
    if (first != key) {
      throw CorruptionError("model line " + std::to_string(next_ + 1) +
                            ": expected '" + std::string(key) + "', found '" +
                            first + "'");
    }
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    ++next_;
    return tokens;
  }

  const std::string& Raw() const { return lines_[next_]; }
  void Skip() { ++next_; }

 private:
  std::vector<std::string> lines_;
  std::size_t next_ = 0;
};

double ParseReal(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw CorruptionError("bad real '" + token + "' in model file");
  }
  return v;
}

long ParseInt(const std::vector<std::string>& tokens, std::string_view key) {
  if (tokens.size() != 1) throw CorruptionError("'" + std::string(key) + "' needs one value");
  char* end = nullptr;
  const long v = std::strtol(tokens[0].c_str(), &end, 10);
  if (*end != '\0' || end == tokens[0].c_str()) {
    throw CorruptionError("bad integer for '" + std::string(key) + "'");
  }
  return v;
}

Eigen::VectorXd ParseReals(const std::vector<std::string>& tokens,
                           Eigen::Index expected, std::string_view key) {
  if (static_cast<Eigen::Index>(tokens.size()) != expected) {
    throw CorruptionError("'" + std::string(key) + "' has " +
                          std::to_string(tokens.size()) + " values, expected " +
                          std::to_string(expected));
  }
  Eigen::VectorXd out(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    out(i) = ParseReal(tokens[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

std::uint32_t Crc32(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos),
                static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string SerializeModel(const SnapModel& model) {
  const auto& s = model.subspace;
  const auto& clf = model.classifier;
  ValidateSubspace(s);
  if (clf.weights.size() != s.basis.rows()) {
    throw ShapeError("classifier dim " + std::to_string(clf.weights.size()) +
                     " does not match subspace dim " +
                     std::to_string(s.basis.rows()));
  }
  if (!clf.weights.allFinite() || !std::isfinite(clf.bias)) {
    throw ValidationError("classifier parameters must be finite");
  }

  std::string out;
  out += kModelMagic;
  out += '\n';
  out += "format_version " + std::to_string(kModelFormatVersion) + '\n';
  out += "dim " + std::to_string(s.dim()) + '\n';
  out += "k " + std::to_string(s.k()) + '\n';
  AppendLine(out, "centroid_mean", s.centroid_mean);
  AppendLine(out, "eigenvalues", s.eigenvalues);
  for (Eigen::Index r = 0; r < s.basis.rows(); ++r) {
    AppendLine(out, "basis_row", s.basis.row(r));
  }
  AppendLine(out, "weights", clf.weights);
  out += "bias";
  AppendReal(out, clf.bias);
  out += '\n';
  for (const auto& [key, value] : model.metadata) {
    if (key.empty() || key.find_first_of(" \t\r\n") != std::string::npos) {
      throw ValidationError("metadata key '" + key + "' is empty or has whitespace");
    }
    if (value.find_first_of("\r\n") != std::string::npos) {
      throw ValidationError("metadata value for '" + key + "' has a line break");
    }
    out += "metadata " + key + ' ' + value + '\n';
  }
  char crc[32];
  std::snprintf(crc, sizeof(crc), "checksum %08x\n", Crc32(out));
  out += crc;
  return out;
}

SnapModel ParseModel(std::string_view text) {
  if (text.empty() || text.back() != '\n') {
    throw CorruptionError("model file is truncated");
  }
  const auto last = text.rfind('\n', text.size() - 2);
  const std::size_t checksum_start = last == std::string_view::npos ? 0 : last + 1;
  const std::string_view payload = text.substr(0, checksum_start);
  const std::string_view checksum_line =
      text.substr(checksum_start, text.size() - checksum_start - 1);
  constexpr std::string_view kChecksumKey = "checksum ";
  if (checksum_line.substr(0, kChecksumKey.size()) != kChecksumKey) {
    throw CorruptionError("model file has no checksum line");
  }
  const std::string stored(checksum_line.substr(kChecksumKey.size()));
  char* end = nullptr;
  const unsigned long expected = std::strtoul(stored.c_str(), &end, 16);
  if (stored.size() != 8 || *end != '\0') {
    throw CorruptionError("malformed checksum '" + stored + "'");
  }
  if (expected != Crc32(payload)) {
    throw CorruptionError("model checksum mismatch, file is corrupted");
  }

  LineParser p(payload);
  if (p.Done() || p.Raw() != kModelMagic) throw CorruptionError("not a SNAP model file");
  p.Skip();
  const long version = ParseInt(p.Expect("format_version"), "format_version");
  if (version != kModelFormatVersion) {
    throw CorruptionError("unsupported model format version " + std::to_string(version));
  }
  const long dim = ParseInt(p.Expect("dim"), "dim");
  const long k = ParseInt(p.Expect("k"), "k");
  if (dim < 1 || k < 0 || k > dim) {
    throw CorruptionError("invalid model shape dim=" + std::to_string(dim) +
                          " k=" + std::to_string(k));
  }

  SnapModel model;
  auto& s = model.subspace;
  s.centroid_mean = ParseReals(p.Expect("centroid_mean"), dim, "centroid_mean");
  s.eigenvalues = ParseReals(p.Expect("eigenvalues"), k, "eigenvalues");
  s.basis.resize(dim, k);
  for (long r = 0; r < dim; ++r) {
    s.basis.row(r) = ParseReals(p.Expect("basis_row"), k, "basis_row").transpose();
  }
  model.classifier.weights = ParseReals(p.Expect("weights"), dim, "weights");
  const auto bias = p.Expect("bias");
  if (bias.size() != 1) throw CorruptionError("'bias' needs one value");
  model.classifier.bias = ParseReal(bias[0]);
  while (!p.Done()) {
    if (p.PeekKey() != "metadata") {
      throw CorruptionError("unexpected line '" + p.Raw() + "' in model file");
    }
    const std::string& line = p.Raw();
    const auto key_start = std::string_view("metadata ").size();
    const auto key_end = line.find(' ', key_start);
    if (key_start >= line.size() || key_end == std::string::npos) {
      throw CorruptionError("malformed metadata line '" + line + "'");
    }
    model.metadata[line.substr(key_start, key_end - key_start)] =
        line.substr(key_end + 1);
    p.Skip();
  }
  ValidateSubspace(s);
  return model;
}

void SaveModel(const SnapModel& model, const std::string& path) {
  const std::string text = SerializeModel(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

SnapModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseModel(buf.str());
}

}  // namespace snap
