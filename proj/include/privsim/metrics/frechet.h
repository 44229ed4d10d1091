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

// Frechet embedding distance (FED): the 2-Wasserstein distance between
// Gaussian fits of two embedding sets,
//
//   |mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2).

#ifndef PRIVSIM_METRICS_FRECHET_H_
#define PRIVSIM_METRICS_FRECHET_H_

#include <cstddef>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"

namespace privsim::metrics {

inline constexpr double kDefaultRidge = 1e-6;

struct GaussianFit {
  size_t dim = 0;
  std::vector<double> mean;
  std::vector<double> cov;  // dim x dim, row-major, symmetric.
};

// Sample mean and unbiased covariance plus ridge * I.
absl::StatusOr<GaussianFit> FitGaussian(const EmbeddingMatrix& x,
                                        double ridge = kDefaultRidge);

struct SymmetricEigen {
  std::vector<double> values;
  std::vector<double> vectors;  // column k is the eigenvector of values[k].
  int sweeps = 0;
  bool converged = false;
};

// Cyclic Jacobi on a symmetric dim x dim row-major matrix. Stops once the
// off-diagonal Frobenius norm drops below tol * max(1, |A|_F).
SymmetricEigen JacobiEigen(std::vector<double> a, size_t dim,
                           double tol = 1e-10, int max_sweeps = 100);

// PSD square root V sqrt(L) V^T. Eigenvalues in [-1e-8 * scale, 0) clamp to
// zero; anything more negative is an error.
absl::StatusOr<std::vector<double>> PsdSqrt(const std::vector<double>& a,
                                            size_t dim);

absl::StatusOr<double> FrechetDistance(const GaussianFit& a,
                                       const GaussianFit& b);

absl::StatusOr<double> FrechetDistance(const EmbeddingMatrix& a,
                                       const EmbeddingMatrix& b,
                                       double ridge = kDefaultRidge);

// Caches the fit and square root of a fixed reference set so repeated
// distances against it need one eigendecomposition each.
class FrechetReference {
 public:
  static absl::StatusOr<FrechetReference> Create(const EmbeddingMatrix& ref,
                                                 double ridge = kDefaultRidge);

  absl::StatusOr<double> Distance(const EmbeddingMatrix& other) const;
  absl::StatusOr<double> Distance(const GaussianFit& other) const;

  const GaussianFit& fit() const { return fit_; }
  double ridge() const { return ridge_; }

 private:
  FrechetReference(GaussianFit fit, std::vector<double> sqrt_cov, double ridge)
      : fit_(std::move(fit)), sqrt_cov_(std::move(sqrt_cov)), ridge_(ridge) {}

  GaussianFit fit_;
  std::vector<double> sqrt_cov_;
  double ridge_;
};

}  // namespace privsim::metrics

#endif  // PRIVSIM_METRICS_FRECHET_H_
