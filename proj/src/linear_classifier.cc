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

#include "snap/linear_classifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "snap/error.h"
#include "snap/rng.h"

namespace snap {

namespace {

void CheckInputs(const LinearClassifier& clf, const Eigen::MatrixXd& features,
                 std::span<const int> labels) {
  if (features.rows() < 1) throw DegenerateInputError("no samples");
  if (features.cols() != clf.weights.size()) {
    throw ShapeError("feature width " + std::to_string(features.cols()) +
                     " does not match classifier dim " +
                     std::to_string(clf.weights.size()));
  }
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw ShapeError("label count " + std::to_string(labels.size()) +
                     " does not match sample count " +
                     std::to_string(features.rows()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw ValidationError("label " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

Eigen::VectorXd LabelVector(std::span<const int> labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = labels[i];
  }
  return y;
}

}  // namespace

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double Predict(const LinearClassifier& clf, const Eigen::VectorXd& z) {
  if (z.size() != clf.weights.size()) {
    throw ShapeError("embedding length " + std::to_string(z.size()) +
                     " does not match classifier dim " +
                     std::to_string(clf.weights.size()));
  }
  return Sigmoid(clf.weights.dot(z) + clf.bias);
}

Eigen::VectorXd PredictRows(const LinearClassifier& clf,
                            const Eigen::MatrixXd& features) {
  if (features.cols() != clf.weights.size()) {
    throw ShapeError("feature width " + std::to_string(features.cols()) +
                     " does not match classifier dim " +
                     std::to_string(clf.weights.size()));
  }
  Eigen::VectorXd logits = features * clf.weights;
  return logits.unaryExpr([&](double t) { return Sigmoid(t + clf.bias); });
}

double BceLoss(const LinearClassifier& clf, const Eigen::MatrixXd& features,
               std::span<const int> labels, double l2_penalty) {
  CheckInputs(clf, features, labels);
  const Eigen::VectorXd p = PredictRows(clf, features);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p(i), kProbClamp, 1.0 - kProbClamp);
    sum += labels[static_cast<std::size_t>(i)] == 1 ? std::log(q)
                                                     : std::log(1.0 - q);
  }
  return -sum / static_cast<double>(p.size()) +
         0.5 * l2_penalty * clf.weights.squaredNorm();
}

BceGradient BceLossGradient(const LinearClassifier& clf,
                            const Eigen::MatrixXd& features,
                            std::span<const int> labels, double l2_penalty) {
  CheckInputs(clf, features, labels);
  const Eigen::VectorXd residual = PredictRows(clf, features) - LabelVector(labels);
  const double n = static_cast<double>(features.rows());
  BceGradient g;
  g.weights = features.transpose() * residual / n + l2_penalty * clf.weights;
  g.bias = residual.sum() / n;
  return g;
}

TrainResult Train(const Eigen::MatrixXd& features, std::span<const int> labels,
                  const TrainConfig& cfg, std::optional<LabeledMatrix> validation) {
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(cfg.l2_penalty >= 0.0)) throw ConfigError("l2 penalty must be >= 0");
  if (cfg.batch_size < 0) throw ConfigError("batch size must be >= 0");
  if (cfg.early_stop_patience && *cfg.early_stop_patience < 1) {
    throw ConfigError("early-stop patience must be >= 1");
  }

  LinearClassifier clf = LinearClassifier::Zero(static_cast<int>(features.cols()));
  CheckInputs(clf, features, labels);
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    throw DegenerateInputError("training data contains a single class");
  }
  if (validation) CheckInputs(clf, validation->features, validation->labels);

  const Eigen::Index n = features.rows();
  const Eigen::Index batch =
      cfg.batch_size == 0 ? n : std::min<Eigen::Index>(cfg.batch_size, n);
  Rng rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainResult result;
  LinearClassifier best = clf;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const bool early_stop = validation.has_value() && cfg.early_stop_patience;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch == n) {
      const BceGradient g = BceLossGradient(clf, features, labels, cfg.l2_penalty);
      clf.weights -= cfg.learning_rate * g.weights;
      clf.bias -= cfg.learning_rate * g.bias;
    } else {
      rng.Shuffle(order);
      for (Eigen::Index start = 0; start < n; start += batch) {
        const Eigen::Index len = std::min(batch, n - start);
        Eigen::MatrixXd xb(len, features.cols());
        std::vector<int> yb(static_cast<std::size_t>(len));
        for (Eigen::Index j = 0; j < len; ++j) {
          const Eigen::Index src = order[static_cast<std::size_t>(start + j)];
          xb.row(j) = features.row(src);
          yb[static_cast<std::size_t>(j)] = labels[static_cast<std::size_t>(src)];
        }
        const BceGradient g = BceLossGradient(clf, xb, yb, cfg.l2_penalty);
        clf.weights -= cfg.learning_rate * g.weights;
        clf.bias -= cfg.learning_rate * g.bias;
      }
    }

    const double loss = BceLoss(clf, features, labels, cfg.l2_penalty);
    if (!std::isfinite(loss) || !clf.weights.allFinite() || !std::isfinite(clf.bias)) {
      throw DivergenceError("training diverged at epoch " + std::to_string(epoch),
                            epoch);
    }
    result.trace.train_loss.push_back(loss);

    if (validation) {
      const double val = BceLoss(clf, validation->features, validation->labels);
      result.trace.validation_loss.push_back(val);
      if (val < best_val) {
        best_val = val;
        best = clf;
        result.trace.best_epoch = epoch;
        since_best = 0;
      } else if (early_stop && ++since_best >= *cfg.early_stop_patience) {
        result.trace.stopped_early = true;
        break;
      }
    }
  }

  result.classifier = early_stop ? best : clf;
  if (!validation) result.trace.best_epoch = static_cast<int>(result.trace.train_loss.size()) - 1;
  return result;
}

}  // namespace snap
