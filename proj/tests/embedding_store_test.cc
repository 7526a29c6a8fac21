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

#include <cstring>
#include <map>
#include <set>
#include <sstream>

#include <doctest.h>

#include "oracles.h"
#include "snap/embedding_store.h"
#include "snap/error.h"

namespace snap {
namespace {

using testing::RandomInt;

UtteranceRecord MakeRecord(const std::string& utt, const std::string& spk, int label,
                           const std::string& attack, const FrameMatrix& frames) {
  return {utt, spk, label, attack, frames};
}

// Values are drawn as float32 so the container round trip is exact.
LabeledEmbeddingSet RandomSet(Rng& rng, int n, int dim, bool pooled) {
  LabeledEmbeddingSet set;
  set.dim = dim;
  set.pooled = pooled;
  for (int i = 0; i < n; ++i) {
    const int t = pooled ? 1 : RandomInt(rng, 1, 4);
    FrameMatrix frames(t, dim);
    for (int r = 0; r < t; ++r) {
      for (int c = 0; c < dim; ++c) frames(r, c) = static_cast<float>(rng.Normal());
    }
    const int label = static_cast<int>(rng.Index(2));
    set.records.push_back(MakeRecord("utt" + std::to_string(i),
                                     "spk" + std::to_string(rng.Index(3)), label,
                                     label == kSpoof ? "A0" + std::to_string(rng.Index(3)) : "",
                                     frames));
  }
  return set;
}

std::string ToBytes(const LabeledEmbeddingSet& set) {
  std::ostringstream out(std::ios::binary);
  WriteContainer(set, out);
  return out.str();
}

LabeledEmbeddingSet FromBytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return ReadContainer(in);
}

void CheckSame(const LabeledEmbeddingSet& a, const LabeledEmbeddingSet& b) {
  REQUIRE(a.dim == b.dim);
  REQUIRE(a.pooled == b.pooled);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    CHECK(x.utt_id == y.utt_id);
    CHECK(x.speaker_id == y.speaker_id);
    CHECK(x.label == y.label);
    CHECK(x.attack_id == y.attack_id);
    REQUIRE(x.frames.rows() == y.frames.rows());
    CHECK(std::memcmp(x.frames.data(), y.frames.data(),
                      sizeof(double) * static_cast<std::size_t>(x.frames.size())) == 0);
  }
}

TEST_CASE("empty set writes a header-only container") {
  LabeledEmbeddingSet set;
  set.dim = 4;
  set.pooled = true;
  const std::string bytes = ToBytes(set);
  CHECK(bytes.size() == kContainerHeaderBytes);
  CHECK(bytes.substr(0, 8) == "SNAPEMB1");
  const LabeledEmbeddingSet back = FromBytes(bytes);
  CHECK(back.dim == 4);
  CHECK(back.empty());
}

TEST_CASE("header fields are little-endian") {
  Rng rng(1);
  const std::string bytes = ToBytes(RandomSet(rng, 3, 5, true));
  const auto u32 = [&](int off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + 3])) << 24;
  };
  CHECK(u32(8) == 1);
  CHECK(u32(12) == 3);
  CHECK(u32(16) == 5);
  CHECK(u32(20) == 1);
}

TEST_CASE("container round trip is bit exact") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const bool pooled = trial % 2 == 0;
    const LabeledEmbeddingSet set = RandomSet(rng, RandomInt(rng, 1, 12), RandomInt(rng, 1, 9), pooled);
    const std::string bytes = ToBytes(set);
    const LabeledEmbeddingSet back = FromBytes(bytes);
    CheckSame(set, back);
    CHECK(ToBytes(back) == bytes);
  }
}

TEST_CASE("writing is deterministic") {
  Rng a(3), b(3);
  CHECK(ToBytes(RandomSet(a, 6, 4, false)) == ToBytes(RandomSet(b, 6, 4, false)));
}

TEST_CASE("duplicate utt_id is rejected on write") {
  Rng rng(2);
  LabeledEmbeddingSet set = RandomSet(rng, 3, 2, true);
  set.records[2].utt_id = set.records[0].utt_id;
  CHECK_THROWS_AS(ToBytes(set), ValidationError);
  try {
    ToBytes(set);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(set.records[0].utt_id) != std::string::npos);
  }
}

TEST_CASE("set invariants are enforced on write") {
  Rng rng(4);
  LabeledEmbeddingSet set = RandomSet(rng, 2, 3, true);
  SUBCASE("width mismatch") { set.records[1].frames = FrameMatrix::Zero(1, 2); }
  SUBCASE("pooled with two frames") { set.records[1].frames = FrameMatrix::Zero(2, 3); }
  SUBCASE("non-finite value") {
    set.records[0].frames(0, 1) = std::numeric_limits<double>::quiet_NaN();
  }
  SUBCASE("bad label") { set.records[0].label = 2; }
  SUBCASE("value beyond float32 range") { set.records[0].frames(0, 0) = 1e300; }
  CHECK_THROWS_AS(ToBytes(set), ValidationError);
}

TEST_CASE("bad magic is rejected at offset zero") {
  Rng rng(5);
  std::string bytes = ToBytes(RandomSet(rng, 2, 3, true));
  bytes.replace(0, 8, "XXXXXXXX");
  try {
    FromBytes(bytes);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
    CHECK(std::string(e.what()).find("magic") != std::string::npos);
  }
}

TEST_CASE("unsupported version is rejected") {
  Rng rng(5);
  std::string bytes = ToBytes(RandomSet(rng, 2, 3, true));
  bytes[8] = 2;
  try {
    FromBytes(bytes);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 8);
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
}

// Record i starts after the header and the encoded size of records < i.
std::size_t RecordOffset(const LabeledEmbeddingSet& set, std::size_t index) {
  std::size_t off = kContainerHeaderBytes;
  for (std::size_t i = 0; i < index; ++i) {
    const auto& r = set.records[i];
    off += 2 + r.utt_id.size() + 2 + r.speaker_id.size() + 1 + 2 + r.attack_id.size() + 4 +
           4 * static_cast<std::size_t>(r.frames.size());
  }
  return off;
}

TEST_CASE("truncation mid-record cites the record index") {
  Rng rng(11);
  const LabeledEmbeddingSet set = RandomSet(rng, 5, 6, false);
  const std::string bytes = ToBytes(set);
  REQUIRE(RecordOffset(set, 5) == bytes.size());
  for (std::size_t index = 0; index < 5; ++index) {
    const std::size_t begin = RecordOffset(set, index);
    const std::size_t end = RecordOffset(set, index + 1);
    for (std::size_t cut : {begin + 1, (begin + end) / 2, end - 1}) {
      try {
        FromBytes(bytes.substr(0, cut));
        FAIL("expected a parse error");
      } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("truncated record " + std::to_string(index)) !=
              std::string::npos);
        CHECK(e.offset() <= static_cast<std::int64_t>(cut));
      }
    }
  }
}

TEST_CASE("non-finite float in the stream is rejected") {
  Rng rng(12);
  const LabeledEmbeddingSet set = RandomSet(rng, 2, 2, true);
  std::string bytes = ToBytes(set);
  const std::size_t value_off = RecordOffset(set, 2) - 4;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(&bytes[value_off], &nan, 4);
  CHECK_THROWS_AS(FromBytes(bytes), ParseError);
}

TEST_CASE("trailing garbage is rejected") {
  Rng rng(13);
  const std::string bytes = ToBytes(RandomSet(rng, 2, 2, true)) + "x";
  try {
    FromBytes(bytes);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == static_cast<std::int64_t>(bytes.size() - 1));
  }
}

TEST_CASE("duplicate utt_id in a stream is rejected") {
  LabeledEmbeddingSet set;
  set.dim = 1;
  set.pooled = true;
  set.records.push_back(MakeRecord("a", "s", 0, "", FrameMatrix::Constant(1, 1, 1.0)));
  set.records.push_back(MakeRecord("b", "s", 0, "", FrameMatrix::Constant(1, 1, 1.0)));
  std::string bytes = ToBytes(set);
  bytes[RecordOffset(set, 1) + 2] = 'a';
  CHECK_THROWS_AS(FromBytes(bytes), ParseError);
}

TEST_CASE("text table round trip") {
  std::istringstream in(
      "# utt spk label attack values\n"
      "u1 s1 0 - 0.5 0.25\n"
      "\n"
      "u2 s2 1 A07 -1 3e-3\n");
  const LabeledEmbeddingSet set = ReadTextTable(in);
  REQUIRE(set.size() == 2);
  CHECK(set.dim == 2);
  CHECK(set.pooled);
  CHECK(set.records[0].attack_id.empty());
  CHECK(set.records[1].attack_id == "A07");
  CHECK(set.records[1].frames(0, 1) == 3e-3);
  std::ostringstream out;
  WriteTextTable(set, out);
  std::istringstream again(out.str());
  const LabeledEmbeddingSet back = ReadTextTable(again);
  CheckSame(set, back);
}

TEST_CASE("text table rejects ragged rows") {
  std::istringstream in("u1 s1 0 - 1 2\nu2 s1 1 A 1\n");
  CHECK_THROWS_AS(ReadTextTable(in), ParseError);
}

LabeledEmbeddingSet StrataSet(const std::vector<std::pair<std::pair<int, std::string>, int>>& counts) {
  LabeledEmbeddingSet set;
  set.dim = 1;
  set.pooled = true;
  int id = 0;
  for (const auto& [stratum, n] : counts) {
    for (int i = 0; i < n; ++i) {
      set.records.push_back(MakeRecord("u" + std::to_string(id++), "s", stratum.first,
                                       stratum.second, FrameMatrix::Constant(1, 1, id)));
    }
  }
  return set;
}

std::map<std::pair<int, std::string>, int> GroupCounts(const LabeledEmbeddingSet& set) {
  std::map<std::pair<int, std::string>, int> counts;
  for (const auto& r : set.records) counts[{r.label, r.attack_id}] += 1;
  return counts;
}

TEST_CASE("ten per stratum split eight to two") {
  const LabeledEmbeddingSet set = StrataSet({{{0, ""}, 10}, {{1, "A01"}, 10}, {{1, "A02"}, 10}});
  const auto [train, val] = StratifiedSplit(set, 0.8, 42);
  for (const auto& [key, n] : GroupCounts(train)) CHECK(n == 8);
  for (const auto& [key, n] : GroupCounts(val)) CHECK(n == 2);
}

TEST_CASE("split is deterministic per seed") {
  Rng rng(21);
  const LabeledEmbeddingSet set = RandomSet(rng, 60, 2, true);
  const auto a = StratifiedSplit(set, 0.8, 9);
  const auto b = StratifiedSplit(set, 0.8, 9);
  CheckSame(a.first, b.first);
  CheckSame(a.second, b.second);
}

TEST_CASE("split is a stable stratified partition") {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const LabeledEmbeddingSet set = RandomSet(rng, 100, 1, true);
    const auto [train, val] = StratifiedSplit(set, 0.8, static_cast<std::uint64_t>(trial));

    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto* part : {&train, &val}) {
      std::size_t last = 0;
      bool first = true;
      for (const auto& r : part->records) {
        CHECK(seen.insert(r.utt_id).second);
        const std::size_t pos = std::stoul(r.utt_id.substr(3));
        if (!first) CHECK(pos > last);
        last = pos;
        first = false;
        ++total;
      }
    }
    CHECK(total == set.size());

    const auto all = GroupCounts(set);
    const auto tr = GroupCounts(train);
    for (const auto& [key, n] : all) {
      const int got = tr.count(key) ? tr.at(key) : 0;
      CHECK(std::abs(got - 0.8 * n) <= 1.0);
    }
  }
}

TEST_CASE("split argument checks") {
  Rng rng(1);
  const LabeledEmbeddingSet set = RandomSet(rng, 4, 1, true);
  CHECK_THROWS_AS(StratifiedSplit(set, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(StratifiedSplit(set, 1.0, 1), ValidationError);
  LabeledEmbeddingSet empty;
  empty.dim = 1;
  empty.pooled = true;
  CHECK_THROWS_AS(StratifiedSplit(empty, 0.5, 1), DegenerateInputError);
}

TEST_CASE("select speakers keeps input order") {
  Rng rng(8);
  const LabeledEmbeddingSet set = RandomSet(rng, 30, 1, true);
  const LabeledEmbeddingSet sel = SelectSpeakers(set, {"spk2", "spk0"});
  std::vector<std::string> expected;
  for (const auto& r : set.records) {
    if (r.speaker_id != "spk1") expected.push_back(r.utt_id);
  }
  REQUIRE(sel.size() == expected.size());
  for (std::size_t i = 0; i < sel.size(); ++i) CHECK(sel.records[i].utt_id == expected[i]);
}

}  // namespace
}  // namespace snap
