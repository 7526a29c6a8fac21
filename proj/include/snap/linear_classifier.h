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

#ifndef SNAP_LINEAR_CLASSIFIER_H_
#define SNAP_LINEAR_CLASSIFIER_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace snap {

// Logistic-regression head: p = sigmoid(w . x + b). D' + 1 parameters.
struct LinearClassifier {
  Eigen::VectorXd weights;
  double bias = 0.0;

  static LinearClassifier Zero(int dim) {
    return {Eigen::VectorXd::Zero(dim), 0.0};
  }
  int dim() const { return static_cast<int>(weights.size()); }
  int parameter_count() const { return dim() + 1; }
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2_penalty = 1e-4;
  int batch_size = 0;  // 0 means full batch
  std::uint64_t seed = 42;
  std::optional<int> early_stop_patience = 20;  // used only with validation data
};

struct TrainTrace {
  std::vector<double> train_loss;       // penalized objective after each epoch
  std::vector<double> validation_loss;  // unpenalized BCE after each epoch
  int best_epoch = -1;                  // 0-based epoch restored by early stop
  bool stopped_early = false;
};

struct TrainResult {
  LinearClassifier classifier;
  TrainTrace trace;
};

struct LabeledMatrix {
  const Eigen::MatrixXd& features;  // N x D'
  std::span<const int> labels;      // N values in {0, 1}
};

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before log.
inline constexpr double kProbClamp = 1e-12;

// Numerically stable logistic function.
double Sigmoid(double t);

double Predict(const LinearClassifier& clf, const Eigen::VectorXd& z);
Eigen::VectorXd PredictRows(const LinearClassifier& clf,
                            const Eigen::MatrixXd& features);

// Mean binary cross-entropy plus l2_penalty * ||w||^2 / 2.
double BceLoss(const LinearClassifier& clf, const Eigen::MatrixXd& features,
               std::span<const int> labels, double l2_penalty = 0.0);

struct BceGradient {
  Eigen::VectorXd weights;
  double bias = 0.0;
};

// Gradient of BceLoss: X^T (p - y) / N + l2_penalty * w, mean(p - y).
BceGradient BceLossGradient(const LinearClassifier& clf,
                            const Eigen::MatrixXd& features,
                            std::span<const int> labels,
                            double l2_penalty = 0.0);

// Gradient descent from w = 0, b = 0. With validation data and a patience,
// stops once validation BCE has not improved for that many epochs and returns
// the best-validation parameters.
TrainResult Train(const Eigen::MatrixXd& features, std::span<const int> labels,
                  const TrainConfig& cfg,
                  std::optional<LabeledMatrix> validation = std::nullopt);

}  // namespace snap

#endif  // SNAP_LINEAR_CLASSIFIER_H_
