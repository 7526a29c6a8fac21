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

#include "snap/feature_pipeline.h"

#include <string>

#include "snap/error.h"

namespace snap {

FrameMatrix ConcatLayers(const FrameMatrix& low, const FrameMatrix& high) {
  if (low.rows() != high.rows() || low.cols() != high.cols()) {
    throw ShapeError("layer shapes differ: " + std::to_string(low.rows()) + "x" +
                     std::to_string(low.cols()) + " vs " +
                     std::to_string(high.rows()) + "x" +
                     std::to_string(high.cols()));
  }
  if (!low.allFinite() || !high.allFinite()) {
    throw ValidationError("layer features contain non-finite values");
  }
  FrameMatrix out(low.rows(), low.cols() + high.cols());
  out.leftCols(low.cols()) = low;
  out.rightCols(high.cols()) = high;
  return out;
}

Eigen::VectorXd PoolMean(const FrameMatrix& frames) {
  if (frames.rows() < 1 || frames.cols() < 1) {
    throw DegenerateInputError("cannot pool an empty frame matrix");
  }
  return frames.colwise().mean().transpose();
}

Eigen::VectorXd L2Normalize(const Eigen::VectorXd& f) {
  const double norm = f.norm();
  if (!(norm > kNormEpsilon)) {
    throw DegenerateInputError("vector norm is zero or below 1e-12");
  }
  return f / norm;
}

LabeledEmbeddingSet PrepareSet(const LabeledEmbeddingSet& set) {
  ValidateSet(set);
  LabeledEmbeddingSet out;
  out.dim = set.dim;
  out.pooled = true;
  out.records.reserve(set.records.size());
  for (const auto& r : set.records) {
    UtteranceRecord rec;
    rec.utt_id = r.utt_id;
    rec.speaker_id = r.speaker_id;
    rec.label = r.label;
    rec.attack_id = r.attack_id;
    try {
      rec.frames = L2Normalize(PoolMean(r.frames)).transpose();
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError("utterance '" + r.utt_id + "': " + e.what());
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace snap
