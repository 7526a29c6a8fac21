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

#ifndef SNAP_MODEL_IO_H_
#define SNAP_MODEL_IO_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "snap/linear_classifier.h"
#include "snap/speaker_subspace.h"

namespace snap {

inline constexpr int kModelFormatVersion = 1;

// A fitted detector: nulling subspace followed by the logistic head.
struct SnapModel {
  SpeakerSubspace subspace;
  LinearClassifier classifier;
  // Free-form key/value pairs. Keys must be non-empty and whitespace-free;
  // values must not contain line breaks.
  std::map<std::string, std::string> metadata;

  // Probability of spoof for one pooled, normalized embedding.
  double Score(const Eigen::VectorXd& z) const {
    return Predict(classifier, NullProject(subspace, z));
  }
};

// Text model document. Every real is written as a C99 hexadecimal float, so
// a save/load round trip is bit-exact. The last line carries a CRC-32 of all
// preceding bytes:
//
//   SNAPMODEL
//   format_version 1
//   dim <D'>
//   k <K>
//   centroid_mean <D' reals>
//   eigenvalues <K reals>
//   basis_row <K reals>          (D' lines)
//   weights <D' reals>
//   bias <real>
//   metadata <key> <value>       (zero or more, sorted by key)
//   checksum <8 hex digits>
std::string SerializeModel(const SnapModel& model);
SnapModel ParseModel(std::string_view text);

void SaveModel(const SnapModel& model, const std::string& path);
SnapModel LoadModel(const std::string& path);

// CRC-32 (IEEE) of a byte range.
std::uint32_t Crc32(std::string_view bytes);

}  // namespace snap

#endif  // SNAP_MODEL_IO_H_
