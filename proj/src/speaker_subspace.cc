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

#include "snap/speaker_subspace.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "snap/error.h"

namespace snap {

SpeakerSubspace SpeakerSubspace::Identity(int dim) {
  SpeakerSubspace s;
  s.centroid_mean = Eigen::VectorXd::Zero(dim);
  s.basis.resize(dim, 0);
  s.eigenvalues.resize(0);
  return s;
}

CentroidTable SpeakerCentroids(const LabeledEmbeddingSet& set) {
  if (set.empty()) throw DegenerateInputError("no utterances to average");
  if (!set.pooled) throw ValidationError("speaker centroids need a pooled set");

  std::unordered_map<std::string, Eigen::Index> row_of;
  std::vector<std::string> ids;
  for (const auto& r : set.records) {
    if (row_of.emplace(r.speaker_id, static_cast<Eigen::Index>(ids.size())).second) {
      ids.push_back(r.speaker_id);
    }
  }
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ids.size()), set.dim);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ids.size()));
  for (const auto& r : set.records) {
    const Eigen::Index row = row_of.at(r.speaker_id);
    sums.row(row) += r.frames.row(0);
    counts(row) += 1.0;
  }
  CentroidTable table;
  table.speaker_ids = std::move(ids);
  table.centroids = sums.array().colwise() / counts.array();
  return table;
}

namespace {

void FixColumnSigns(Eigen::MatrixXd& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index arg = 0;
    basis.col(c).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, c) < 0.0) basis.col(c) *= -1.0;
  }
}

}  // namespace

Eigen::VectorXd CentroidCovarianceSpectrum(const CentroidTable& table) {
  const Eigen::Index n = table.centroids.rows();
  if (n < 2) throw DegenerateInputError("covariance needs at least two speakers");
  const Eigen::RowVectorXd mean = table.centroids.colwise().mean();
  const Eigen::MatrixXd scaled =
      (table.centroids.rowwise() - mean) / std::sqrt(static_cast<double>(n - 1));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
  return svd.singularValues().array().square();
}

SpeakerSubspace FitSpeakerSubspace(const CentroidTable& table, int k) {
  const Eigen::Index n = table.centroids.rows();
  const Eigen::Index dim = table.centroids.cols();
  if (n < 1 || dim < 1) throw DegenerateInputError("empty centroid table");
  if (!table.centroids.allFinite()) {
    throw ValidationError("centroid table contains non-finite values");
  }
  const Eigen::Index max_k = std::min<Eigen::Index>(dim, n - 1);
  if (k < 0 || k > max_k) {
    throw ValidationError("subspace rank k=" + std::to_string(k) +
                          " outside [0, " + std::to_string(max_k) + "] for " +
                          std::to_string(n) + " speakers in dim " +
                          std::to_string(dim));
  }

  SpeakerSubspace out;
  out.centroid_mean = table.centroids.colwise().mean().transpose();
  if (k == 0) {
    out.basis.resize(dim, 0);
    out.eigenvalues.resize(0);
    return out;
  }

  const Eigen::MatrixXd scaled =
      (table.centroids.rowwise() - out.centroid_mean.transpose()) /
      std::sqrt(static_cast<double>(n - 1));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();

  const double tol = sv.size() > 0 ? static_cast<double>(std::max(n, dim)) *
                                         std::numeric_limits<double>::epsilon() *
                                         sv(0)
                                   : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  if (rank < k) {
    throw RankDeficiencyError("centered centroids have rank " +
                                  std::to_string(rank) + ", below requested k=" +
                                  std::to_string(k),
                              rank);
  }

  out.basis = svd.matrixV().leftCols(k);
  out.eigenvalues = sv.head(k).array().square();
  FixColumnSigns(out.basis);
  return out;
}

void ValidateSubspace(const SpeakerSubspace& s) {
  if (s.centroid_mean.size() != s.basis.rows()) {
    throw ShapeError("centroid mean length does not match basis rows");
  }
  if (s.eigenvalues.size() != s.basis.cols()) {
    throw ShapeError("eigenvalue count does not match basis columns");
  }
  if (!s.basis.allFinite() || !s.eigenvalues.allFinite() ||
      !s.centroid_mean.allFinite()) {
    throw ValidationError("subspace contains non-finite values");
  }
  const Eigen::MatrixXd gram = s.basis.transpose() * s.basis;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(s.k(), s.k());
  if (s.k() > 0 && (gram - eye).cwiseAbs().maxCoeff() > 1e-8) {
    throw ValidationError("subspace basis is not orthonormal");
  }
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) < -1e-10 ||
        (i > 0 && s.eigenvalues(i) > s.eigenvalues(i - 1))) {
      throw ValidationError("eigenvalues must be nonnegative and descending");
    }
  }
}

Eigen::VectorXd NullProject(const SpeakerSubspace& subspace,
                            const Eigen::VectorXd& z) {
  if (z.size() != subspace.basis.rows()) {
    throw ShapeError("embedding length " + std::to_string(z.size()) +
                     " does not match subspace dim " +
                     std::to_string(subspace.basis.rows()));
  }
  if (subspace.k() == 0) return z;
  const Eigen::VectorXd coords = subspace.basis.transpose() * z;
  return z - subspace.basis * coords;
}

Eigen::MatrixXd NullProjectRows(const SpeakerSubspace& subspace,
                                const Eigen::MatrixXd& rows) {
  if (rows.cols() != subspace.basis.rows()) {
    throw ShapeError("row width " + std::to_string(rows.cols()) +
                     " does not match subspace dim " +
                     std::to_string(subspace.basis.rows()));
  }
  if (subspace.k() == 0) return rows;
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = NullProject(subspace, rows.row(i).transpose()).transpose();
  }
  return out;
}

LabeledEmbeddingSet NullProjectSet(const SpeakerSubspace& subspace,
                                   const LabeledEmbeddingSet& set) {
  if (!set.pooled) throw ValidationError("nulling projection needs a pooled set");
  LabeledEmbeddingSet out;
  out.dim = set.dim;
  out.pooled = true;
  out.records.reserve(set.records.size());
  for (const auto& r : set.records) {
    if (r.frames.cols() != subspace.dim()) {
      throw ShapeError("utterance '" + r.utt_id + "' has dim " +
                       std::to_string(r.frames.cols()) + ", subspace has " +
                       std::to_string(subspace.dim()));
    }
    UtteranceRecord rec = r;
    rec.frames = NullProject(subspace, r.Embedding()).transpose();
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace snap
