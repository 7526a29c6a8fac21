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

#include "snap/eval_metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "snap/error.h"

namespace snap {

EerResult ComputeEer(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("score and label counts differ");
  }
  long n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw ValidationError("label " + std::to_string(i) + " is not 0 or 1");
    }
    if (!std::isfinite(scores[i])) {
      throw ValidationError("score " + std::to_string(i) + " is not finite");
    }
    (labels[i] == 1 ? n_pos : n_neg) += 1;
  }
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateInputError("EER needs both positive and negative samples");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // One sweep point per threshold: -inf, then the midpoint above each
  // distinct score (the last of which is +inf).
  struct SweepPoint {
    double far, frr, threshold;
  };
  std::vector<SweepPoint> sweep;
  sweep.push_back({1.0, 0.0, scores[order.front()]});
  long neg_below = 0, pos_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double value = scores[order[i]];
    while (i < order.size() && scores[order[i]] == value) {
      (labels[order[i]] == 1 ? pos_below : neg_below) += 1;
      ++i;
    }
    const double threshold =
        i < order.size() ? 0.5 * (value + scores[order[i]])
                         : std::nextafter(value, std::numeric_limits<double>::infinity());
    sweep.push_back({static_cast<double>(n_neg - neg_below) / static_cast<double>(n_neg),
                     static_cast<double>(pos_below) / static_cast<double>(n_pos),
                     threshold});
  }

  for (std::size_t j = 0; j < sweep.size(); ++j) {
    const double d = sweep[j].far - sweep[j].frr;
    if (d > 0.0) continue;
    if (d == 0.0 || j == 0) return {sweep[j].far, sweep[j].threshold};
    const auto& prev = sweep[j - 1];
    const double d_prev = prev.far - prev.frr;
    const double alpha = d_prev / (d_prev - d);
    return {prev.far + alpha * (sweep[j].far - prev.far),
            prev.threshold + alpha * (sweep[j].threshold - prev.threshold)};
  }
  // Unreachable: the final sweep point has FAR 0 and FRR 1.
  return {sweep.back().far, sweep.back().threshold};
}

EerResult ComputeEer(const ScoredSet& scored) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(scored.size());
  labels.reserve(scored.size());
  for (const auto& r : scored) {
    scores.push_back(r.score);
    labels.push_back(r.label);
  }
  return ComputeEer(scores, labels);
}

ConfusionMetrics ComputeConfusion(const ScoredSet& scored, double threshold) {
  if (scored.empty()) throw DegenerateInputError("no scored records");
  ConfusionMetrics m;
  for (const auto& r : scored) {
    if (r.label != 0 && r.label != 1) {
      throw ValidationError("record '" + r.utt_id + "' has label outside {0,1}");
    }
    const bool predicted = r.score >= threshold;
    if (r.label == 1) {
      (predicted ? m.tp : m.fn) += 1;
    } else {
      (predicted ? m.fp : m.tn) += 1;
    }
  }
  const double total = static_cast<double>(scored.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  m.precision_degenerate = m.tp + m.fp == 0;
  m.recall_degenerate = m.tp + m.fn == 0;
  m.precision = m.precision_degenerate
                    ? 0.0
                    : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  m.recall = m.recall_degenerate
                 ? 0.0
                 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

EvalReport Evaluate(const ScoredSet& scored, double threshold) {
  EvalReport report;
  const EerResult eer = ComputeEer(scored);
  report.eer = eer.eer;
  report.eer_threshold = eer.threshold;
  report.threshold = threshold;
  report.confusion = ComputeConfusion(scored, threshold);
  report.n_pos = report.confusion.tp + report.confusion.fn;
  report.n_neg = report.confusion.tn + report.confusion.fp;
  return report;
}

void WriteReportTable(const EvalReport& r, std::ostream& out) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "EER        %.2f%%  (threshold %.6f)\n"
                "Accuracy   %.3f\n"
                "Precision  %.3f%s\n"
                "Recall     %.3f%s\n"
                "F1         %.3f\n"
                "at threshold %.3f over %ld spoof / %ld bona fide\n",
                100.0 * r.eer, r.eer_threshold, r.confusion.accuracy,
                r.confusion.precision,
                r.confusion.precision_degenerate ? "  (undefined)" : "",
                r.confusion.recall, r.confusion.recall_degenerate ? "  (undefined)" : "",
                r.confusion.f1, r.threshold, r.n_pos, r.n_neg);
  out << buf;
}

void WriteReportKeyValue(const EvalReport& r, std::ostream& out) {
  const auto real = [&](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
    out << buf;
  };
  real("eer", r.eer);
  real("eer_threshold", r.eer_threshold);
  real("threshold", r.threshold);
  real("accuracy", r.confusion.accuracy);
  real("precision", r.confusion.precision);
  real("recall", r.confusion.recall);
  real("f1", r.confusion.f1);
  out << "precision_degenerate=" << (r.confusion.precision_degenerate ? 1 : 0) << '\n'
      << "recall_degenerate=" << (r.confusion.recall_degenerate ? 1 : 0) << '\n'
      << "tp=" << r.confusion.tp << '\n'
      << "fp=" << r.confusion.fp << '\n'
      << "tn=" << r.confusion.tn << '\n'
      << "fn=" << r.confusion.fn << '\n'
      << "n_pos=" << r.n_pos << '\n'
      << "n_neg=" << r.n_neg << '\n';
}

void WriteScoreTable(const ScoredSet& scored, std::ostream& out) {
  out << "# utt_id label score\n";
  char buf[40];
  for (const auto& r : scored) {
    if (r.utt_id.empty() || r.utt_id.find_first_of(" \t\r\n") != std::string::npos) {
      throw ValidationError("utt_id '" + r.utt_id + "' is empty or has whitespace");
    }
    std::snprintf(buf, sizeof(buf), "%.17g", r.score);
    out << r.utt_id << ' ' << r.label << ' ' << buf << '\n';
  }
  if (!out) throw IoError("write of score table failed");
}

ScoredSet ReadScoreTable(std::istream& in) {
  ScoredSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    ScoredRecord r;
    std::string label, score, extra;
    if (!(fields >> r.utt_id >> label >> score) || (fields >> extra)) {
      throw ParseError("score line " + std::to_string(line_no) +
                           ": expected 'utt_id label score'",
                       -1);
    }
    if (label != "0" && label != "1") {
      throw ParseError("score line " + std::to_string(line_no) + ": bad label", -1);
    }
    r.label = label == "1" ? 1 : 0;
    char* end = nullptr;
    r.score = std::strtod(score.c_str(), &end);
    if (*end != '\0' || end == score.c_str() || !std::isfinite(r.score)) {
      throw ParseError("score line " + std::to_string(line_no) + ": bad score", -1);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<int> ClusterIndices(const std::vector<std::string>& ids) {
  std::unordered_map<std::string, int> index;
  std::vector<int> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    out.push_back(index.emplace(id, static_cast<int>(index.size())).first->second);
  }
  return out;
}

SilhouetteResult SilhouetteCosine(const Eigen::MatrixXd& embeddings,
                                  std::span<const int> clusters) {
  const Eigen::Index n = embeddings.rows();
  if (n < 2) throw DegenerateInputError("silhouette needs at least two samples");
  if (static_cast<Eigen::Index>(clusters.size()) != n) {
    throw ShapeError("cluster label count does not match sample count");
  }
  std::unordered_map<int, int> dense;
  std::vector<int> cluster_of(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    cluster_of[static_cast<std::size_t>(i)] =
        dense.emplace(clusters[static_cast<std::size_t>(i)], static_cast<int>(dense.size()))
            .first->second;
  }
  const int n_clusters = static_cast<int>(dense.size());
  if (n_clusters < 2) throw UndefinedScoreError("silhouette needs at least two clusters");

  Eigen::MatrixXd unit = embeddings;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = unit.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DegenerateInputError("sample " + std::to_string(i) +
                                 " is a zero or non-finite vector");
    }
    unit.row(i) /= norm;
  }
  const Eigen::MatrixXd distance =
      Eigen::MatrixXd::Ones(n, n) - unit * unit.transpose();

  std::vector<double> size(static_cast<std::size_t>(n_clusters), 0.0);
  for (int c : cluster_of) size[static_cast<std::size_t>(c)] += 1.0;

  SilhouetteResult result;
  result.coefficients.resize(n);
  std::vector<double> sums(static_cast<std::size_t>(n_clusters));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int own = cluster_of[static_cast<std::size_t>(i)];
    if (size[static_cast<std::size_t>(own)] < 2.0) {
      result.coefficients(i) = 0.0;
      continue;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) sums[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(j)])] += distance(i, j);
    }
    const double a = sums[static_cast<std::size_t>(own)] / (size[static_cast<std::size_t>(own)] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_clusters; ++c) {
      if (c != own) b = std::min(b, sums[static_cast<std::size_t>(c)] / size[static_cast<std::size_t>(c)]);
    }
    const double denom = std::max(a, b);
    result.coefficients(i) = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  result.mean = result.coefficients.mean();
  return result;
}

EntanglementReport ComputeEntanglement(const LabeledEmbeddingSet& set,
                                       const std::optional<SpeakerSubspace>& subspace) {
  if (!set.pooled) throw ValidationError("entanglement report needs a pooled set");
  std::vector<std::string> speakers;
  std::vector<int> classes;
  for (const auto& r : set.records) {
    speakers.push_back(r.speaker_id);
    classes.push_back(r.label);
  }
  const std::vector<int> speaker_clusters = ClusterIndices(speakers);
  const Eigen::MatrixXd raw = set.EmbeddingMatrix();

  EntanglementReport report;
  report.baseline_speaker = SilhouetteCosine(raw, speaker_clusters);
  report.baseline_class = SilhouetteCosine(raw, classes);
  if (subspace) {
    const Eigen::MatrixXd nulled = NullProjectRows(*subspace, raw);
    report.snap_speaker = SilhouetteCosine(nulled, speaker_clusters);
    report.snap_class = SilhouetteCosine(nulled, classes);
  }
  return report;
}

}  // namespace snap
