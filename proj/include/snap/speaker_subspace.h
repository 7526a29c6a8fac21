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

#ifndef SNAP_SPEAKER_SUBSPACE_H_
#define SNAP_SPEAKER_SUBSPACE_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snap/embedding_store.h"

namespace snap {

inline constexpr int kDefaultSubspaceRank = 5;

// Per-speaker mean embeddings, rows in first-appearance order of speakers.
struct CentroidTable {
  std::vector<std::string> speaker_ids;
  Eigen::MatrixXd centroids;  // |S| x D'

  int num_speakers() const { return static_cast<int>(centroids.rows()); }
  int dim() const { return static_cast<int>(centroids.cols()); }
};

// Orthonormal basis of the top-k principal directions of speaker centroid
// variation. The nulling projector I - U U^T is applied implicitly.
struct SpeakerSubspace {
  Eigen::VectorXd centroid_mean;  // D'
  Eigen::MatrixXd basis;          // D' x k, orthonormal columns
  Eigen::VectorXd eigenvalues;    // k, descending

  int dim() const { return static_cast<int>(basis.rows()); }
  int k() const { return static_cast<int>(basis.cols()); }

  // Rank-0 subspace; projecting with it is the identity.
  static SpeakerSubspace Identity(int dim);
};

CentroidTable SpeakerCentroids(const LabeledEmbeddingSet& set);

// Principal directions of the centered centroids, computed from the SVD of
// (C - mean) / sqrt(|S| - 1) so the covariance is never formed. Each basis
// column has its largest-magnitude entry positive.
//
// Requires 0 <= k <= min(D', |S| - 1). Throws RankDeficiencyError when the
// centered centroids have numerical rank below k.
SpeakerSubspace FitSpeakerSubspace(const CentroidTable& table, int k);

// Full descending spectrum of the centroid covariance (length min(|S|, D')).
Eigen::VectorXd CentroidCovarianceSpectrum(const CentroidTable& table);

// z - U (U^T z).
Eigen::VectorXd NullProject(const SpeakerSubspace& subspace,
                            const Eigen::VectorXd& z);

// Record-wise NullProject on a pooled set; labels and order kept.
LabeledEmbeddingSet NullProjectSet(const SpeakerSubspace& subspace,
                                   const LabeledEmbeddingSet& set);

// Applies NullProject to every row of an N x D' matrix.
Eigen::MatrixXd NullProjectRows(const SpeakerSubspace& subspace,
                                const Eigen::MatrixXd& rows);

void ValidateSubspace(const SpeakerSubspace& subspace);

}  // namespace snap

#endif  // SNAP_SPEAKER_SUBSPACE_H_
