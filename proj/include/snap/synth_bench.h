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

#ifndef SNAP_SYNTH_BENCH_H_
#define SNAP_SYNTH_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "snap/embedding_store.h"
#include "snap/linear_classifier.h"

namespace snap {

// Generative model for labeled embeddings:
//
//   h = base + B_S c_spk * speaker_scale + B_A m * shift(y) + B_C c_ctx * context_scale
//       + noise_scale * e,    z = h / |h|
//
// B_S, B_A, B_C are mutually orthonormal random bases, c_spk is fixed per
// speaker, m is a fixed unit mixture of the artifact basis, shift(y) is 0 for
// bona fide and artifact_scale for spoof, and c_ctx, e are fresh standard
// normal draws per utterance. base is a fixed random direction of length
// base_scale shared by every utterance.
struct SynthConfig {
  int dim = 64;
  int n_speakers = 20;
  int utts_per_speaker_per_class = 25;
  int speaker_rank = 5;
  int artifact_rank = 3;
  int context_rank = 10;
  double speaker_scale = 1.0;
  double artifact_scale = 0.25;
  double context_scale = 0.5;
  double noise_scale = 0.1;
  double base_scale = 1.0;
  std::uint64_t seed = 42;

  void Validate() const;
};

// Unknown keys raise ConfigError naming the key.
SynthConfig SynthConfigFromJson(const nlohmann::json& doc,
                                SynthConfig defaults = {});
nlohmann::json SynthConfigToJson(const SynthConfig& cfg);

struct GroundTruth {
  Eigen::MatrixXd speaker_basis;         // dim x speaker_rank
  Eigen::MatrixXd artifact_basis;        // dim x artifact_rank
  Eigen::MatrixXd context_basis;         // dim x context_rank
  Eigen::VectorXd base;                  // dim
  Eigen::VectorXd artifact_direction;    // dim, unit (zero if artifact_rank 0)
  Eigen::MatrixXd speaker_coefficients;  // n_speakers x speaker_rank
};

nlohmann::json GroundTruthToJson(const GroundTruth& truth);
GroundTruth GroundTruthFromJson(const nlohmann::json& doc);

struct SynthData {
  LabeledEmbeddingSet set;
  GroundTruth truth;
};

// Records are grouped per speaker (ids "spk000", ...), bona fide utterances
// first. Spoof records carry attack_id "A01". Deterministic in cfg.seed.
SynthData Generate(const SynthConfig& cfg);

// Speaker ids in first-appearance order.
std::vector<std::string> SpeakerOrder(const LabeledEmbeddingSet& set);

struct PipelineScores {
  double baseline_eer = 0.0;
  double snap_eer = 0.0;
};

// Trains a logistic head on raw and on nulled embeddings of `train` (with a
// subspace of rank k fitted on the training speakers) and returns both EERs
// on `test`. Both sets must be pooled and normalized.
PipelineScores CompareOnHeldOut(const LabeledEmbeddingSet& train,
                                const LabeledEmbeddingSet& test, int k,
                                const TrainConfig& train_cfg);

struct ExperimentOptions {
  int k = 5;
  int held_out_speakers = 5;
  TrainConfig train;
};

struct ExperimentReport {
  double baseline_speaker_silhouette = 0.0;
  double snap_speaker_silhouette = 0.0;
  double baseline_class_silhouette = 0.0;
  double snap_class_silhouette = 0.0;
  double baseline_eer = 0.0;
  double snap_eer = 0.0;
  int train_speakers = 0;
  int test_speakers = 0;
};

// Generates data, fits the subspace on all but the last held_out_speakers
// speakers and reports silhouettes and EERs on the held-out ones.
ExperimentReport RunEntanglementExperiment(const SynthConfig& cfg,
                                           const ExperimentOptions& options);

struct SweepRow {
  int train_speakers = 0;
  int k = 0;  // effective rank, min(k, train_speakers - 1)
  double baseline_eer = 0.0;
  double snap_eer = 0.0;
};

// For each count c, trains on the first c speakers and evaluates on the
// speakers after the largest count, which are never used for training.
std::vector<SweepRow> RunSpeakerSweep(const SynthConfig& cfg,
                                      const std::vector<int>& speaker_counts, int k,
                                      const TrainConfig& train_cfg = {});

}  // namespace snap

#endif  // SNAP_SYNTH_BENCH_H_
