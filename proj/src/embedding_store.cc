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

#include "snap/embedding_store.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "snap/error.h"
#include "snap/rng.h"

namespace snap {

Eigen::MatrixXd LabeledEmbeddingSet::EmbeddingMatrix() const {
  if (!pooled) throw ValidationError("embedding matrix requires a pooled set");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(records.size()), dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = records[i].frames.row(0);
  }
  return out;
}

std::vector<int> LabeledEmbeddingSet::Labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

void ValidateSet(const LabeledEmbeddingSet& set) {
  if (set.dim < 1) throw ValidationError("embedding dim must be >= 1");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& r = set.records[i];
    const std::string where =
        "record " + std::to_string(i) + " ('" + r.utt_id + "')";
    if (r.frames.cols() != set.dim) {
      throw ValidationError(where + ": width " +
                            std::to_string(r.frames.cols()) +
                            " does not match set dim " +
                            std::to_string(set.dim));
    }
    if (r.frames.rows() < 1) throw ValidationError(where + ": no frames");
    if (set.pooled && r.frames.rows() != 1) {
      throw ValidationError(where + ": pooled set requires exactly one frame");
    }
    if (r.label != kBonafide && r.label != kSpoof) {
      throw ValidationError(where + ": label must be 0 or 1");
    }
    if (!r.frames.allFinite()) {
      throw ValidationError(where + ": non-finite value");
    }
    if (!seen.insert(r.utt_id).second) {
      throw ValidationError(where + ": duplicate utt_id");
    }
  }
}

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& out) : out_(out) {}

  void Bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out_) throw IoError("write to container sink failed");
    count_ += n;
  }
  void U8(std::uint8_t v) { Bytes(&v, 1); }
  void U16(std::uint16_t v) {
    const std::uint8_t b[2] = {static_cast<std::uint8_t>(v),
                               static_cast<std::uint8_t>(v >> 8)};
    Bytes(b, 2);
  }
  void U32(std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    Bytes(b, 4);
  }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void Str(const std::string& s, const std::string& what) {
    if (s.size() > 0xFFFF) throw ValidationError(what + " longer than 65535 bytes");
    U16(static_cast<std::uint16_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  std::uint64_t count() const { return count_; }

 private:
  std::ostream& out_;
  std::uint64_t count_ = 0;
};

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  // Returns false on short read; offset() then points at the failure.
  bool Bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    offset_ += got;
    return got == n;
  }
  bool U8(std::uint8_t& v) { return Bytes(&v, 1); }
  bool U16(std::uint16_t& v) {
    std::uint8_t b[2];
    if (!Bytes(b, 2)) return false;
    v = static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    return true;
  }
  bool U32(std::uint32_t& v) {
    std::uint8_t b[4];
    if (!Bytes(b, 4)) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return true;
  }
  bool Str(std::string& s) {
    std::uint16_t n = 0;
    if (!U16(n)) return false;
    s.assign(n, '\0');
    return n == 0 || Bytes(s.data(), n);
  }
  bool AtEnd() { return in_.peek() == std::char_traits<char>::eof(); }
  std::int64_t offset() const { return static_cast<std::int64_t>(offset_); }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

}  // namespace

std::uint64_t WriteContainer(const LabeledEmbeddingSet& set, std::ostream& out) {
  ValidateSet(set);
  if (set.records.size() > 0xFFFFFFFFull) {
    throw ValidationError("too many records for SNAPEMB1");
  }
  ByteWriter w(out);
  w.Bytes(kContainerMagic, sizeof(kContainerMagic));
  w.U32(kContainerVersion);
  w.U32(static_cast<std::uint32_t>(set.records.size()));
  w.U32(static_cast<std::uint32_t>(set.dim));
  w.U32(set.pooled ? 1u : 0u);
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& r = set.records[i];
    const std::string where = "record " + std::to_string(i) + " ('" + r.utt_id + "')";
    w.Str(r.utt_id, where + " utt_id");
    w.Str(r.speaker_id, where + " speaker_id");
    w.U8(static_cast<std::uint8_t>(r.label));
    w.Str(r.attack_id, where + " attack_id");
    w.U32(static_cast<std::uint32_t>(r.frames.rows()));
    for (Eigen::Index t = 0; t < r.frames.rows(); ++t) {
      for (Eigen::Index d = 0; d < r.frames.cols(); ++d) {
        const float v = static_cast<float>(r.frames(t, d));
        if (!std::isfinite(v)) {
          throw ValidationError(where + ": value overflows float32");
        }
        w.F32(v);
      }
    }
  }
  out.flush();
  if (!out) throw IoError("flush of container sink failed");
  return w.count();
}

LabeledEmbeddingSet ReadContainer(std::istream& in) {
  ByteReader r(in);
  char magic[8];
  if (!r.Bytes(magic, 8)) throw ParseError("truncated header", r.offset());
  if (std::memcmp(magic, kContainerMagic, 8) != 0) {
    throw ParseError("bad magic, not a SNAPEMB1 container", 0);
  }
  std::uint32_t version = 0, count = 0, dim = 0, flags = 0;
  if (!r.U32(version)) throw ParseError("truncated header", r.offset());
  if (version != kContainerVersion) {
    throw ParseError("unsupported container version " + std::to_string(version),
                     8);
  }
  if (!r.U32(count) || !r.U32(dim) || !r.U32(flags)) {
    throw ParseError("truncated header", r.offset());
  }
  if (dim == 0) throw ParseError("dim must be >= 1", 16);
  if ((flags & ~1u) != 0) throw ParseError("unknown flag bits", 20);

  LabeledEmbeddingSet set;
  set.dim = static_cast<int>(dim);
  set.pooled = (flags & 1u) != 0;
  set.records.reserve(std::min<std::uint32_t>(count, 1u << 16));
  std::unordered_set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto truncated = [&]() {
      return ParseError("truncated record " + std::to_string(i), r.offset());
    };
    UtteranceRecord rec;
    std::uint8_t label = 0;
    std::uint32_t frames = 0;
    if (!r.Str(rec.utt_id) || !r.Str(rec.speaker_id)) throw truncated();
    const std::int64_t label_offset = r.offset();
    if (!r.U8(label)) throw truncated();
    if (label > 1) {
      throw ParseError("record " + std::to_string(i) + ": label must be 0 or 1",
                       label_offset);
    }
    rec.label = label;
    if (!r.Str(rec.attack_id)) throw truncated();
    const std::int64_t frames_offset = r.offset();
    if (!r.U32(frames)) throw truncated();
    if (frames == 0) {
      throw ParseError("record " + std::to_string(i) + ": zero frames",
                       frames_offset);
    }
    if (set.pooled && frames != 1) {
      throw ParseError(
          "record " + std::to_string(i) + ": pooled set requires one frame",
          frames_offset);
    }
    rec.frames.resize(frames, dim);
    for (std::uint32_t t = 0; t < frames; ++t) {
      for (std::uint32_t d = 0; d < dim; ++d) {
        const std::int64_t value_offset = r.offset();
        std::uint32_t bits = 0;
        if (!r.U32(bits)) throw truncated();
        const float v = std::bit_cast<float>(bits);
        if (!std::isfinite(v)) {
          throw ParseError("record " + std::to_string(i) + ": non-finite value",
                           value_offset);
        }
        rec.frames(t, d) = v;
      }
    }
    if (!seen.insert(rec.utt_id).second) {
      throw ParseError("record " + std::to_string(i) + ": duplicate utt_id '" +
                           rec.utt_id + "'",
                       r.offset());
    }
    set.records.push_back(std::move(rec));
  }
  if (!r.AtEnd()) throw ParseError("trailing bytes after last record", r.offset());
  return set;
}

void WriteContainerFile(const LabeledEmbeddingSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  WriteContainer(set, out);
}

LabeledEmbeddingSet ReadContainerFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadContainer(in);
}

LabeledEmbeddingSet ReadTextTable(std::istream& in) {
  LabeledEmbeddingSet set;
  set.pooled = true;
  std::string line;
  std::int64_t offset = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::int64_t line_offset = offset;
    offset += static_cast<std::int64_t>(line.size()) + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    UtteranceRecord rec;
    std::string label;
    if (!(fields >> rec.utt_id >> rec.speaker_id >> label >> rec.attack_id)) {
      throw ParseError("line " + std::to_string(line_no) +
                           ": expected utt_id speaker_id label attack_id values",
                       line_offset);
    }
    if (label != "0" && label != "1") {
      throw ParseError("line " + std::to_string(line_no) + ": label must be 0 or 1",
                       line_offset);
    }
    rec.label = label == "1" ? kSpoof : kBonafide;
    if (rec.attack_id == "-") rec.attack_id.clear();
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": bad value '" +
                             token + "'",
                         line_offset);
      }
      values.push_back(v);
    }
    if (values.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": no values",
                       line_offset);
    }
    if (set.dim == 0) set.dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != set.dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(set.dim) + " values, got " +
                           std::to_string(values.size()),
                       line_offset);
    }
    rec.frames = Eigen::Map<const FrameMatrix>(values.data(), 1, set.dim);
    set.records.push_back(std::move(rec));
  }
  if (set.dim == 0) throw ParseError("text table has no records", -1);
  ValidateSet(set);
  return set;
}

void WriteTextTable(const LabeledEmbeddingSet& set, std::ostream& out) {
  ValidateSet(set);
  if (!set.pooled) throw ValidationError("text table holds pooled sets only");
  const auto check_token = [](const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_of(" \t\r\n") != std::string::npos) {
      throw ValidationError(what + " '" + s +
                            "' is empty or contains whitespace");
    }
  };
  char buf[32];
  for (const auto& r : set.records) {
    check_token(r.utt_id, "utt_id");
    check_token(r.speaker_id, "speaker_id");
    out << r.utt_id << ' ' << r.speaker_id << ' ' << r.label << ' '
        << (r.attack_id.empty() ? "-" : r.attack_id);
    for (Eigen::Index d = 0; d < r.frames.cols(); ++d) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.frames(0, d));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write of text table failed");
}

LabeledEmbeddingSet LoadEmbeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[8] = {};
  in.read(magic, 8);
  const bool binary =
      in.gcount() == 8 && std::memcmp(magic, kContainerMagic, 8) == 0;
  in.clear();
  in.seekg(0);
  return binary ? ReadContainer(in) : ReadTextTable(in);
}

std::pair<LabeledEmbeddingSet, LabeledEmbeddingSet> StratifiedSplit(
    const LabeledEmbeddingSet& set, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie strictly inside (0, 1)");
  }
  if (set.empty()) throw DegenerateInputError("cannot split an empty set");

  // Strata keyed in first-appearance order so the draw sequence only depends
  // on record order and seed.
  std::map<std::pair<int, std::string>, std::size_t> stratum_index;
  std::vector<std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto key = std::make_pair(set.records[i].label, set.records[i].attack_id);
    auto [it, inserted] = stratum_index.emplace(key, strata.size());
    if (inserted) strata.emplace_back();
    strata[it->second].push_back(i);
  }

  Rng rng(seed);
  std::vector<bool> to_train(set.records.size(), false);
  for (auto& members : strata) {
    const auto n_train = static_cast<std::size_t>(
        std::llround(static_cast<double>(members.size()) * train_fraction));
    rng.Shuffle(members);
    for (std::size_t j = 0; j < n_train && j < members.size(); ++j) {
      to_train[members[j]] = true;
    }
  }

  LabeledEmbeddingSet train, validation;
  train.dim = validation.dim = set.dim;
  train.pooled = validation.pooled = set.pooled;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    (to_train[i] ? train : validation).records.push_back(set.records[i]);
  }
  return {std::move(train), std::move(validation)};
}

LabeledEmbeddingSet SelectSpeakers(const LabeledEmbeddingSet& set,
                                   const std::vector<std::string>& speakers) {
  const std::set<std::string> keep(speakers.begin(), speakers.end());
  LabeledEmbeddingSet out;
  out.dim = set.dim;
  out.pooled = set.pooled;
  for (const auto& r : set.records) {
    if (keep.count(r.speaker_id)) out.records.push_back(r);
  }
  return out;
}

}  // namespace snap
