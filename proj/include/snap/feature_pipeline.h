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

#ifndef SNAP_FEATURE_PIPELINE_H_
#define SNAP_FEATURE_PIPELINE_H_

#include <Eigen/Dense>

#include "snap/embedding_store.h"

namespace snap {

// Norms at or below this are rejected by L2Normalize.
inline constexpr double kNormEpsilon = 1e-12;

// Joins two T x D layer outputs into T x 2D, low layer first.
FrameMatrix ConcatLayers(const FrameMatrix& low, const FrameMatrix& high);

// Temporal mean of a T x D' frame matrix.
Eigen::VectorXd PoolMean(const FrameMatrix& frames);

// f / ||f||_2. Throws DegenerateInputError when ||f||_2 <= kNormEpsilon.
Eigen::VectorXd L2Normalize(const Eigen::VectorXd& f);

// Pools and normalizes every record. Errors name the offending utt_id.
LabeledEmbeddingSet PrepareSet(const LabeledEmbeddingSet& set);

}  // namespace snap

#endif  // SNAP_FEATURE_PIPELINE_H_
