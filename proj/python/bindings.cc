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

#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snap/embedding_store.h"
#include "snap/error.h"
#include "snap/eval_metrics.h"
#include "snap/feature_pipeline.h"
#include "snap/linear_classifier.h"
#include "snap/model_io.h"
#include "snap/speaker_subspace.h"
#include "snap/synth_bench.h"

namespace py = pybind11;


PYBIND11_MODULE(_snap, m) {
  m.doc() = "Speaker-subspace nulling core";

  auto base = py::register_exception<snap::Error>(m, "SnapError", PyExc_RuntimeError);
  py::register_exception<snap::ValidationError>(m, "ValidationError", base);
  py::register_exception<snap::ShapeError>(m, "ShapeError", base);
  py::register_exception<snap::DegenerateInputError>(m, "DegenerateInputError", base);
  py::register_exception<snap::CorruptionError>(m, "CorruptionError", base);
  py::register_exception<snap::UndefinedScoreError>(m, "UndefinedScoreError", base);
  py::register_exception<snap::ConfigError>(m, "ConfigError", base);
  py::register_exception<snap::IoError>(m, "IoError", base);
  py::register_exception<snap::ParseError>(m, "ParseError", base);
  py::register_exception<snap::RankDeficiencyError>(m, "RankDeficiencyError", base);
  py::register_exception<snap::DivergenceError>(m, "DivergenceError", base);

  m.attr("BONAFIDE") = snap::kBonafide;
  m.attr("SPOOF") = snap::kSpoof;
  m.attr("DEFAULT_SUBSPACE_RANK") = snap::kDefaultSubspaceRank;

  py::class_<snap::UtteranceRecord>(m, "UtteranceRecord")
      .def(py::init<>())
      .def(py::init([](std::string utt, std::string spk, int label, std::string attack,
                       snap::FrameMatrix frames) {
             return snap::UtteranceRecord{std::move(utt), std::move(spk), label,
                                          std::move(attack), std::move(frames)};
           }),
           py::arg("utt_id"), py::arg("speaker_id"), py::arg("label"),
           py::arg("attack_id"), py::arg("frames"))
      .def_readwrite("utt_id", &snap::UtteranceRecord::utt_id)
      .def_readwrite("speaker_id", &snap::UtteranceRecord::speaker_id)
      .def_readwrite("label", &snap::UtteranceRecord::label)
      .def_readwrite("attack_id", &snap::UtteranceRecord::attack_id)
      .def_readwrite("frames", &snap::UtteranceRecord::frames)
      .def("embedding", &snap::UtteranceRecord::Embedding);

  py::class_<snap::LabeledEmbeddingSet>(m, "LabeledEmbeddingSet")
      .def(py::init<>())
      .def_readwrite("dim", &snap::LabeledEmbeddingSet::dim)
      .def_readwrite("pooled", &snap::LabeledEmbeddingSet::pooled)
      .def_readwrite("records", &snap::LabeledEmbeddingSet::records)
      .def("__len__", &snap::LabeledEmbeddingSet::size)
      .def("embedding_matrix", &snap::LabeledEmbeddingSet::EmbeddingMatrix)
      .def("labels", &snap::LabeledEmbeddingSet::Labels);

  m.def("validate_set", &snap::ValidateSet);
  m.def("read_container", &snap::ReadContainerFile, py::arg("path"));
  m.def("write_container", &snap::WriteContainerFile, py::arg("set"), py::arg("path"));
  m.def("load_embeddings", &snap::LoadEmbeddings, py::arg("path"));
  m.def("stratified_split", &snap::StratifiedSplit, py::arg("set"),
        py::arg("train_fraction"), py::arg("seed"));
  m.def("select_speakers", &snap::SelectSpeakers, py::arg("set"), py::arg("speakers"));

  m.def("concat_layers", &snap::ConcatLayers, py::arg("low"), py::arg("high"));
  m.def("pool_mean", &snap::PoolMean, py::arg("frames"));
  m.def("l2_normalize", &snap::L2Normalize, py::arg("f"));
  m.def("prepare_set", &snap::PrepareSet, py::arg("set"));

  py::class_<snap::CentroidTable>(m, "CentroidTable")
      .def(py::init<>())
      .def_readwrite("speaker_ids", &snap::CentroidTable::speaker_ids)
      .def_readwrite("centroids", &snap::CentroidTable::centroids);

  py::class_<snap::SpeakerSubspace>(m, "SpeakerSubspace")
      .def(py::init<>())
      .def_readwrite("centroid_mean", &snap::SpeakerSubspace::centroid_mean)
      .def_readwrite("basis", &snap::SpeakerSubspace::basis)
      .def_readwrite("eigenvalues", &snap::SpeakerSubspace::eigenvalues)
      .def_property_readonly("dim", &snap::SpeakerSubspace::dim)
      .def_property_readonly("k", &snap::SpeakerSubspace::k)
      .def_static("identity", &snap::SpeakerSubspace::Identity, py::arg("dim"));

  m.def("speaker_centroids", &snap::SpeakerCentroids, py::arg("set"));
  m.def("fit_speaker_subspace", &snap::FitSpeakerSubspace, py::arg("table"),
        py::arg("k") = snap::kDefaultSubspaceRank);
  m.def("centroid_covariance_spectrum", &snap::CentroidCovarianceSpectrum, py::arg("table"));
  m.def("null_project", &snap::NullProject, py::arg("subspace"), py::arg("z"));
  m.def("null_project_rows", &snap::NullProjectRows, py::arg("subspace"), py::arg("rows"));
  m.def("null_project_set", &snap::NullProjectSet, py::arg("subspace"), py::arg("set"));
  m.def("validate_subspace", &snap::ValidateSubspace);

  py::class_<snap::LinearClassifier>(m, "LinearClassifier")
      .def(py::init<>())
      .def_readwrite("weights", &snap::LinearClassifier::weights)
      .def_readwrite("bias", &snap::LinearClassifier::bias)
      .def_static("zero", &snap::LinearClassifier::Zero, py::arg("dim"))
      .def_property_readonly("dim", &snap::LinearClassifier::dim);

  py::class_<snap::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &snap::TrainConfig::learning_rate)
      .def_readwrite("epochs", &snap::TrainConfig::epochs)
      .def_readwrite("l2_penalty", &snap::TrainConfig::l2_penalty)
      .def_readwrite("batch_size", &snap::TrainConfig::batch_size)
      .def_readwrite("seed", &snap::TrainConfig::seed)
      .def_readwrite("early_stop_patience", &snap::TrainConfig::early_stop_patience);

  py::class_<snap::TrainTrace>(m, "TrainTrace")
      .def_readonly("train_loss", &snap::TrainTrace::train_loss)
      .def_readonly("validation_loss", &snap::TrainTrace::validation_loss)
      .def_readonly("best_epoch", &snap::TrainTrace::best_epoch)
      .def_readonly("stopped_early", &snap::TrainTrace::stopped_early);

  py::class_<snap::TrainResult>(m, "TrainResult")
      .def_readonly("classifier", &snap::TrainResult::classifier)
      .def_readonly("trace", &snap::TrainResult::trace);

  m.def("sigmoid", &snap::Sigmoid);
  m.def("predict", &snap::Predict, py::arg("clf"), py::arg("z"));
  m.def("predict_rows", &snap::PredictRows, py::arg("clf"), py::arg("features"));
  m.def(
      "bce_loss",
      [](const snap::LinearClassifier& clf, const Eigen::MatrixXd& x,
         const std::vector<int>& y, double l2) { return snap::BceLoss(clf, x, y, l2); },
      py::arg("clf"), py::arg("features"), py::arg("labels"), py::arg("l2_penalty") = 0.0);
  m.def(
      "bce_loss_gradient",
      [](const snap::LinearClassifier& clf, const Eigen::MatrixXd& x,
         const std::vector<int>& y, double l2) {
        const snap::BceGradient g = snap::BceLossGradient(clf, x, y, l2);
        return py::make_tuple(g.weights, g.bias);
      },
      py::arg("clf"), py::arg("features"), py::arg("labels"), py::arg("l2_penalty") = 0.0);
  m.def(
      "train",
      [](const Eigen::MatrixXd& x, const std::vector<int>& y, const snap::TrainConfig& cfg,
         std::optional<Eigen::MatrixXd> val_x, std::optional<std::vector<int>> val_y) {
        if (val_x.has_value() != val_y.has_value()) {
          throw snap::ConfigError("validation features and labels must be given together");
        }
        if (!val_x) return snap::Train(x, y, cfg);
        return snap::Train(x, y, cfg, snap::LabeledMatrix{*val_x, *val_y});
      },
      py::arg("features"), py::arg("labels"), py::arg("config") = snap::TrainConfig{},
      py::arg("validation_features") = py::none(), py::arg("validation_labels") = py::none());

  py::class_<snap::SnapModel>(m, "SnapModel")
      .def(py::init<>())
      .def_readwrite("subspace", &snap::SnapModel::subspace)
      .def_readwrite("classifier", &snap::SnapModel::classifier)
      .def_readwrite("metadata", &snap::SnapModel::metadata)
      .def("score", &snap::SnapModel::Score, py::arg("z"));
  m.def("serialize_model", &snap::SerializeModel);
  m.def("parse_model", [](const std::string& text) { return snap::ParseModel(text); });
  m.def("save_model", &snap::SaveModel, py::arg("model"), py::arg("path"));
  m.def("load_model", &snap::LoadModel, py::arg("path"));

  py::class_<snap::EerResult>(m, "EerResult")
      .def_readonly("eer", &snap::EerResult::eer)
      .def_readonly("threshold", &snap::EerResult::threshold);
  m.def(
      "compute_eer",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return snap::ComputeEer(scores, labels);
      },
      py::arg("scores"), py::arg("labels"));

  py::class_<snap::SilhouetteResult>(m, "SilhouetteResult")
      .def_readonly("coefficients", &snap::SilhouetteResult::coefficients)
      .def_readonly("mean", &snap::SilhouetteResult::mean);
  m.def(
      "silhouette_cosine",
      [](const Eigen::MatrixXd& x, const std::vector<int>& clusters) {
        return snap::SilhouetteCosine(x, clusters);
      },
      py::arg("embeddings"), py::arg("clusters"));

  py::class_<snap::SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("dim", &snap::SynthConfig::dim)
      .def_readwrite("n_speakers", &snap::SynthConfig::n_speakers)
      .def_readwrite("utts_per_speaker_per_class", &snap::SynthConfig::utts_per_speaker_per_class)
      .def_readwrite("speaker_rank", &snap::SynthConfig::speaker_rank)
      .def_readwrite("artifact_rank", &snap::SynthConfig::artifact_rank)
      .def_readwrite("context_rank", &snap::SynthConfig::context_rank)
      .def_readwrite("speaker_scale", &snap::SynthConfig::speaker_scale)
      .def_readwrite("artifact_scale", &snap::SynthConfig::artifact_scale)
      .def_readwrite("context_scale", &snap::SynthConfig::context_scale)
      .def_readwrite("noise_scale", &snap::SynthConfig::noise_scale)
      .def_readwrite("base_scale", &snap::SynthConfig::base_scale)
      .def_readwrite("seed", &snap::SynthConfig::seed);
  m.def("generate", [](const snap::SynthConfig& cfg) { return snap::Generate(cfg).set; },
        py::arg("config") = snap::SynthConfig{});

}
