// Copyright 2026 The privsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privsim/metrics/frechet.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/status_macros.h"

namespace privsim::metrics {
namespace {

constexpr double kNegativeEigenTolerance = 1e-8;

// c = a * b for dim x dim row-major matrices.
std::vector<double> MatMul(const std::vector<double>& a,
                           const std::vector<double>& b, size_t d) {
  std::vector<double> c(d * d, 0.0);
  for (size_t i = 0; i < d; ++i) {
    double* ci = c.data() + i * d;
    for (size_t k = 0; k < d; ++k) {
      const double aik = a[i * d + k];
      if (aik == 0.0) continue;
      const double* bk = b.data() + k * d;
      for (size_t j = 0; j < d; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

void Symmetrize(std::vector<double>& a, size_t d) {
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = i + 1; j < d; ++j) {
      const double m = 0.5 * (a[i * d + j] + a[j * d + i]);
      a[i * d + j] = m;
      a[j * d + i] = m;
    }
  }
}

double Trace(const std::vector<double>& a, size_t d) {
  double t = 0.0;
  for (size_t i = 0; i < d; ++i) t += a[i * d + i];
  return t;
}

absl::Status CheckEigenvalues(const std::vector<double>& values) {
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  for (double v : values) {
    if (!std::isfinite(v)) {
      return absl::InternalError("non-finite eigenvalue");
    }
    if (v < -kNegativeEigenTolerance * scale) {
      return absl::InternalError(
          absl::StrCat("matrix is not PSD: eigenvalue ", v));
    }
  }
  return absl::OkStatus();
}

// Tr of the PSD square root of a symmetric PSD matrix.
absl::StatusOr<double> TraceSqrt(std::vector<double> a, size_t d) {
  SymmetricEigen eig = JacobiEigen(std::move(a), d);
  RETURN_IF_ERROR(CheckEigenvalues(eig.values));
  double t = 0.0;
  for (double v : eig.values) t += std::sqrt(std::max(v, 0.0));
  return t;
}

absl::StatusOr<double> Combine(const GaussianFit& a, const GaussianFit& b,
                               double trace_sqrt) {
  double mean_term = 0.0;
  for (size_t i = 0; i < a.dim; ++i) {
    const double diff = a.mean[i] - b.mean[i];
    mean_term += diff * diff;
  }
  const double tr_a = Trace(a.cov, a.dim);
  const double tr_b = Trace(b.cov, b.dim);
  const double result = mean_term + tr_a + tr_b - 2.0 * trace_sqrt;
  if (result < 0.0) {
    if (result < -kNegativeEigenTolerance * std::max(1.0, tr_a + tr_b)) {
      return absl::InternalError(
          absl::StrCat("negative Frechet distance ", result));
    }
    return 0.0;
  }
  return result;
}

absl::Status CheckCompatible(const GaussianFit& a, const GaussianFit& b) {
  if (a.dim != b.dim || a.dim == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Gaussian fits have dimensions ", a.dim, " and ", b.dim));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<GaussianFit> FitGaussian(const EmbeddingMatrix& x,
                                        double ridge) {
  if (x.rows() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 samples, got ", x.rows()));
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    return absl::InvalidArgumentError("ridge must be finite and >= 0");
  }
  const size_t n = x.rows(), d = x.dim();
  for (double v : x.data()) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("non-finite embedding value");
    }
  }
  GaussianFit fit;
  fit.dim = d;
  fit.mean.assign(d, 0.0);
  for (size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (size_t j = 0; j < d; ++j) fit.mean[j] += r[j];
  }
  for (double& m : fit.mean) m /= static_cast<double>(n);

  fit.cov.assign(d * d, 0.0);
  std::vector<double> centered(d);
  for (size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (size_t j = 0; j < d; ++j) centered[j] = r[j] - fit.mean[j];
    for (size_t j = 0; j < d; ++j) {
      const double cj = centered[j];
      if (cj == 0.0) continue;
      double* row = fit.cov.data() + j * d;
      for (size_t k = j; k < d; ++k) row[k] += cj * centered[k];
    }
  }
  const double norm = 1.0 / static_cast<double>(n - 1);
  for (size_t j = 0; j < d; ++j) {
    for (size_t k = j; k < d; ++k) {
      const double v = fit.cov[j * d + k] * norm;
      fit.cov[j * d + k] = v;
      fit.cov[k * d + j] = v;
    }
    fit.cov[j * d + j] += ridge;
  }
  return fit;
}

SymmetricEigen JacobiEigen(std::vector<double> a, size_t d, double tol,
                           int max_sweeps) {
  SymmetricEigen out;
  // Rotations are accumulated into the rows of vt (vt = V^T) so every update
  // touches contiguous memory.
  std::vector<double> vt(d * d, 0.0);
  for (size_t i = 0; i < d; ++i) vt[i * d + i] = 1.0;

  double frob = 0.0;
  for (double v : a) frob += v * v;
  const double threshold = tol * std::max(1.0, std::sqrt(frob));

  auto off_norm = [&] {
    double s = 0.0;
    for (size_t p = 0; p < d; ++p) {
      for (size_t q = p + 1; q < d; ++q) s += a[p * d + q] * a[p * d + q];
    }
    return std::sqrt(2.0 * s);
  };

  for (out.sweeps = 0; out.sweeps < max_sweeps; ++out.sweeps) {
    if (off_norm() < threshold) {
      out.converged = true;
      break;
    }
    for (size_t p = 0; p + 1 < d; ++p) {
      double* row_p = a.data() + p * d;
      for (size_t q = p + 1; q < d; ++q) {
        const double apq = row_p[q];
        if (apq == 0.0) continue;
        double* row_q = a.data() + q * d;
        const double app = row_p[p];
        const double aqq = row_q[q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Rows p and q hold columns p and q by symmetry; rotate them in place
        // and mirror into the columns.
        for (size_t k = 0; k < d; ++k) {
          const double akp = row_p[k];
          const double akq = row_q[k];
          row_p[k] = c * akp - s * akq;
          row_q[k] = s * akp + c * akq;
        }
        for (size_t k = 0; k < d; ++k) {
          a[k * d + p] = row_p[k];
          a[k * d + q] = row_q[k];
        }
        row_p[p] = app - t * apq;
        row_q[q] = aqq + t * apq;
        row_p[q] = row_q[p] = 0.0;
        double* vp = vt.data() + p * d;
        double* vq = vt.data() + q * d;
        for (size_t k = 0; k < d; ++k) {
          const double vkp = vp[k];
          const double vkq = vq[k];
          vp[k] = c * vkp - s * vkq;
          vq[k] = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!out.converged && off_norm() < threshold) out.converged = true;
  out.values.resize(d);
  for (size_t i = 0; i < d; ++i) out.values[i] = a[i * d + i];
  out.vectors.resize(d * d);
  for (size_t i = 0; i < d; ++i) {
    for (size_t k = 0; k < d; ++k) out.vectors[i * d + k] = vt[k * d + i];
  }
  return out;
}

absl::StatusOr<std::vector<double>> PsdSqrt(const std::vector<double>& a,
                                            size_t d) {
  if (a.size() != d * d) {
    return absl::InvalidArgumentError("matrix size does not match dim");
  }
  SymmetricEigen eig = JacobiEigen(a, d);
  RETURN_IF_ERROR(CheckEigenvalues(eig.values));
  std::vector<double> root(d * d, 0.0);
  for (size_t k = 0; k < d; ++k) {
    const double s = std::sqrt(std::max(eig.values[k], 0.0));
    if (s == 0.0) continue;
    for (size_t i = 0; i < d; ++i) {
      const double vik = eig.vectors[i * d + k] * s;
      if (vik == 0.0) continue;
      double* row = root.data() + i * d;
      for (size_t j = 0; j < d; ++j) row[j] += vik * eig.vectors[j * d + k];
    }
  }
  Symmetrize(root, d);
  return root;
}

absl::StatusOr<double> FrechetDistance(const GaussianFit& a,
                                       const GaussianFit& b) {
  RETURN_IF_ERROR(CheckCompatible(a, b));
  ASSIGN_OR_RETURN(std::vector<double> root_a, PsdSqrt(a.cov, a.dim));
  std::vector<double> m = MatMul(root_a, MatMul(b.cov, root_a, a.dim), a.dim);
  Symmetrize(m, a.dim);
  ASSIGN_OR_RETURN(double trace_sqrt, TraceSqrt(std::move(m), a.dim));
  return Combine(a, b, trace_sqrt);
}

absl::StatusOr<double> FrechetDistance(const EmbeddingMatrix& a,
                                       const EmbeddingMatrix& b,
                                       double ridge) {
  if (a.dim() != b.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedding dimensions differ: ", a.dim(), " vs ", b.dim()));
  }
  ASSIGN_OR_RETURN(GaussianFit fa, FitGaussian(a, ridge));
  ASSIGN_OR_RETURN(GaussianFit fb, FitGaussian(b, ridge));
  return FrechetDistance(fa, fb);
}

absl::StatusOr<FrechetReference> FrechetReference::Create(
    const EmbeddingMatrix& ref, double ridge) {
  ASSIGN_OR_RETURN(GaussianFit fit, FitGaussian(ref, ridge));
  ASSIGN_OR_RETURN(std::vector<double> root, PsdSqrt(fit.cov, fit.dim));
  return FrechetReference(std::move(fit), std::move(root), ridge);
}

absl::StatusOr<double> FrechetReference::Distance(
    const GaussianFit& other) const {
  RETURN_IF_ERROR(CheckCompatible(fit_, other));
  const size_t d = fit_.dim;
  std::vector<double> m = MatMul(sqrt_cov_, MatMul(other.cov, sqrt_cov_, d), d);
  Symmetrize(m, d);
  ASSIGN_OR_RETURN(double trace_sqrt, TraceSqrt(std::move(m), d));
  return Combine(fit_, other, trace_sqrt);
}

absl::StatusOr<double> FrechetReference::Distance(
    const EmbeddingMatrix& other) const {
  ASSIGN_OR_RETURN(GaussianFit fit, FitGaussian(other, ridge_));
  return Distance(fit);
}

}  // namespace privsim::metrics
