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

#ifndef SNAP_EVAL_METRICS_H_
#define SNAP_EVAL_METRICS_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snap/embedding_store.h"
#include "snap/speaker_subspace.h"

namespace snap {

// Label 1 (spoof) is the positive class; higher scores are more spoof-like.
struct ScoredRecord {
  std::string utt_id;
  int label = 0;
  double score = 0.0;
};

using ScoredSet = std::vector<ScoredRecord>;

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Sweeps thresholds at -inf, the midpoints between consecutive distinct
// scores, and +inf. FAR(t) is the fraction of negatives with score >= t and
// FRR(t) the fraction of positives with score < t. The EER is read off where
// FAR - FRR changes sign, interpolating linearly between the two bracketing
// sweep points. For the threshold, -inf stands for the lowest score and +inf
// for the next double above the highest score.
EerResult ComputeEer(const ScoredSet& scored);
EerResult ComputeEer(std::span<const double> scores, std::span<const int> labels);

struct ConfusionMetrics {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the corresponding denominator was zero and the value reported
  // as 0.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
};

// Predicted positive iff score >= threshold.
ConfusionMetrics ComputeConfusion(const ScoredSet& scored, double threshold);

struct EvalReport {
  double eer = 0.0;
  double eer_threshold = 0.0;
  double threshold = 0.5;
  ConfusionMetrics confusion;
  long n_pos = 0;
  long n_neg = 0;
};

EvalReport Evaluate(const ScoredSet& scored, double threshold = 0.5);

// Human-readable table and key=value document.
void WriteReportTable(const EvalReport& report, std::ostream& out);
void WriteReportKeyValue(const EvalReport& report, std::ostream& out);

// Score table: "utt_id label score" per line, '#' comments, 17 significant
// digits.
void WriteScoreTable(const ScoredSet& scored, std::ostream& out);
ScoredSet ReadScoreTable(std::istream& in);

struct SilhouetteResult {
  Eigen::VectorXd coefficients;
  double mean = 0.0;
};

// Silhouette under cosine distance 1 - x.y / (|x||y|). Singleton-cluster
// members get 0, as do samples with a = b = 0.
SilhouetteResult SilhouetteCosine(const Eigen::MatrixXd& embeddings,
                                  std::span<const int> clusters);

// Maps arbitrary string ids onto dense cluster indices in first-seen order.
std::vector<int> ClusterIndices(const std::vector<std::string>& ids);

struct EntanglementReport {
  SilhouetteResult baseline_speaker;
  SilhouetteResult baseline_class;
  std::optional<SilhouetteResult> snap_speaker;
  std::optional<SilhouetteResult> snap_class;
};

// Speaker- and class-clustered silhouettes on the raw embeddings and, when a
// subspace is given, on the nulled residuals.
EntanglementReport ComputeEntanglement(
    const LabeledEmbeddingSet& set,
    const std::optional<SpeakerSubspace>& subspace = std::nullopt);

}  // namespace snap

#endif  // SNAP_EVAL_METRICS_H_
