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

// Reference implementations used to check the library. Each one follows the
// textbook definition directly and shares no code with src/.

#ifndef SNAP_TESTS_ORACLES_H_
#define SNAP_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "snap/rng.h"

namespace snap::testing {

inline Eigen::VectorXd RandomVector(Rng& rng, int n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * rng.Normal();
  return v;
}

inline Eigen::MatrixXd RandomMatrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.Normal();
  }
  return m;
}

// Integer in [lo, hi].
inline int RandomInt(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.Index(static_cast<std::size_t>(hi - lo + 1)));
}

// Random dim x k matrix with orthonormal columns (modified Gram-Schmidt,
// repeated twice for accuracy).
inline Eigen::MatrixXd RandomOrthonormal(Rng& rng, int dim, int k) {
  Eigen::MatrixXd q = RandomMatrix(rng, dim, k);
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      q.col(j) /= q.col(j).norm();
    }
  }
  return q;
}

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns match values
};

// Cyclic Jacobi rotations on a dense symmetric matrix.
inline SymmetricEigen JacobiEigen(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= 1e-300 || std::sqrt(off) <= 1e-18 * a.norm()) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x) > a(y, y); });
  SymmetricEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (int i = 0; i < n; ++i) {
    out.values(i) = a(idx[i], idx[i]);
    out.vectors.col(i) = v.col(idx[i]);
  }
  return out;
}

// Sigma = Cbar^T Cbar / (n - 1) with Cbar the column-centered centroids.
inline Eigen::MatrixXd CentroidCovariance(const Eigen::MatrixXd& centroids) {
  const int n = static_cast<int>(centroids.rows());
  const int d = static_cast<int>(centroids.cols());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) mean += centroids.row(i).transpose();
  mean /= n;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd c = centroids.row(i).transpose() - mean;
    sigma += c * c.transpose();
  }
  return sigma / (n - 1);
}

// Largest principal angle between the column spans of two orthonormal bases
// of equal rank, computed as asin of the largest singular value of
// (I - B B^T) A, which stays accurate for tiny angles.
inline double MaxPrincipalAngle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() == 0) return 0.0;
  const Eigen::MatrixXd r = a - b * (b.transpose() * a);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

struct OracleEer {
  double eer;
  double threshold;
};

// Evaluates FAR and FRR by direct counting at -inf, at every midpoint between
// consecutive distinct scores and at +inf, then interpolates linearly at the
// first sign change of FAR - FRR.
inline OracleEer BruteForceEer(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<double> distinct = scores;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> thresholds = {-inf};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    thresholds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  }
  thresholds.push_back(inf);

  double n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1;
  double prev_far = 0, prev_frr = 0, prev_t = 0;
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    const double t = thresholds[j];
    double fa = 0, fr = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] == 0 && scores[i] >= t) fa += 1;
      if (labels[i] == 1 && scores[i] < t) fr += 1;
    }
    const double far = fa / n_neg, frr = fr / n_pos;
    if (far - frr <= 0) {
      if (far == frr || j == 0) return {far, t};
      const double d0 = prev_far - prev_frr, d1 = far - frr;
      const double alpha = d0 / (d0 - d1);
      return {prev_far + alpha * (far - prev_far), prev_t + alpha * (t - prev_t)};
    }
    prev_far = far;
    prev_frr = frr;
    prev_t = t;
  }
  return {0.0, inf};
}

inline double CosineDistance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return 1.0 - x.dot(y) / (x.norm() * y.norm());
}

// Per-sample silhouette straight from the definition.
inline std::vector<double> DoubleLoopSilhouette(const Eigen::MatrixXd& x,
                                                const std::vector<int>& clusters) {
  const int n = static_cast<int>(x.rows());
  std::map<int, int> sizes;
  for (int c : clusters) sizes[c] += 1;
  std::vector<double> s(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (sizes[clusters[i]] == 1) continue;
    std::map<int, double> sum;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[clusters[j]] += CosineDistance(x.row(i).transpose(), x.row(j).transpose());
    }
    const double a = sum[clusters[i]] / (sizes[clusters[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [c, total] : sum) {
      if (c != clusters[i]) b = std::min(b, total / sizes[c]);
    }
    const double m = std::max(a, b);
    s[i] = m > 0 ? (b - a) / m : 0.0;
  }
  return s;
}

inline double NaiveSigmoid(double t) {
  return static_cast<double>(1.0L / (1.0L + std::exp(-static_cast<long double>(t))));
}

// Mean clamped BCE plus l2 * |w|^2 / 2, one sample at a time.
inline double NaiveBce(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& x,
                       const std::vector<int>& y, double l2) {
  double total = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    double logit = b;
    for (int d = 0; d < x.cols(); ++d) logit += w(d) * x(i, d);
    double p = NaiveSigmoid(logit);
    p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
    total += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(x.rows()) + 0.5 * l2 * w.squaredNorm();
}

}  // namespace snap::testing

#endif  // SNAP_TESTS_ORACLES_H_
