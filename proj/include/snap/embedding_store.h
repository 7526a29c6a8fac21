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

#ifndef SNAP_EMBEDDING_STORE_H_
#define SNAP_EMBEDDING_STORE_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace snap {

// Row-major so that a record's frames map directly onto the on-disk layout.
using FrameMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kBonafide = 0;
inline constexpr int kSpoof = 1;

// One utterance. frames is T x D' (T == 1 once pooled). An empty attack_id
// means bona fide / not applicable.
struct UtteranceRecord {
  std::string utt_id;
  std::string speaker_id;
  int label = kBonafide;
  std::string attack_id;
  FrameMatrix frames;

  // Pooled view of a T == 1 record.
  Eigen::VectorXd Embedding() const { return frames.row(0).transpose(); }
};

struct LabeledEmbeddingSet {
  int dim = 0;
  bool pooled = false;
  std::vector<UtteranceRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Stacks the pooled embeddings as an N x D' matrix. Requires pooled.
  Eigen::MatrixXd EmbeddingMatrix() const;
  std::vector<int> Labels() const;
};

// Throws ValidationError naming the first offending record.
void ValidateSet(const LabeledEmbeddingSet& set);

// SNAPEMB1 binary container. Values are narrowed to float32 on write and
// widened back to double on read.
inline constexpr char kContainerMagic[8] = {'S', 'N', 'A', 'P',
                                            'E', 'M', 'B', '1'};
inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 24;

std::uint64_t WriteContainer(const LabeledEmbeddingSet& set, std::ostream& out);
LabeledEmbeddingSet ReadContainer(std::istream& in);

void WriteContainerFile(const LabeledEmbeddingSet& set, const std::string& path);
LabeledEmbeddingSet ReadContainerFile(const std::string& path);

// Whitespace-separated text table, one pooled record per line:
//   utt_id speaker_id label attack_id v_1 ... v_D
// attack_id "-" stands for the empty tag. Lines starting with '#' are
// comments.
LabeledEmbeddingSet ReadTextTable(std::istream& in);
void WriteTextTable(const LabeledEmbeddingSet& set, std::ostream& out);

// Reads either format, sniffing the SNAPEMB1 magic.
LabeledEmbeddingSet LoadEmbeddings(const std::string& path);

// Partitions the set per (label, attack_id) stratum. Each stratum of size n
// contributes round(n * train_fraction) records to the training side, chosen
// by a seeded shuffle. Both outputs keep input order.
std::pair<LabeledEmbeddingSet, LabeledEmbeddingSet> StratifiedSplit(
    const LabeledEmbeddingSet& set, double train_fraction, std::uint64_t seed);

// Keeps the records whose speaker_id is in speakers, in input order.
LabeledEmbeddingSet SelectSpeakers(const LabeledEmbeddingSet& set,
                                   const std::vector<std::string>& speakers);

}  // namespace snap

#endif  // SNAP_EMBEDDING_STORE_H_
