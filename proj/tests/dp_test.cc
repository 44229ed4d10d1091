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

#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"
#include "privsim/dp/calibration.h"
#include "privsim/dp/nn_histogram.h"
#include "privsim/dp/report_noisy_max.h"
#include "test_util.h"

namespace privsim::dp {
namespace {

using ::privsim::testing::BinomialBand;
using ::privsim::testing::RandomMatrix;

EmbeddingMatrix Column(std::vector<double> values) {
  const size_t n = values.size();
  return EmbeddingMatrix(n, 1, std::move(values));
}

// Hockey-stick divergence between N(D, s^2) and N(0, s^2), integrated
// numerically with Simpson's rule. Shares no code with the closed form.
double NumericDelta(double epsilon, double sigma, double sensitivity) {
  const double lo = -12.0 * sigma;
  const double hi = sensitivity + 12.0 * sigma;
  const int n = 400000;
  const double h = (hi - lo) / n;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  auto f = [&](double x) {
    const double p = norm * std::exp(-0.5 * std::pow((x - sensitivity) / sigma, 2));
    const double q = norm * std::exp(-0.5 * std::pow(x / sigma, 2));
    return std::max(p - std::exp(epsilon) * q, 0.0);
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4 : 2);
  return sum * h / 3.0;
}

std::vector<int64_t> BruteForceVotes(const EmbeddingMatrix& priv,
                                     const EmbeddingMatrix& synth) {
  std::vector<int64_t> votes(synth.rows(), 0);
  for (size_t i = 0; i < priv.rows(); ++i) {
    size_t best = 0;
    double best_d = INFINITY;
    for (size_t j = 0; j < synth.rows(); ++j) {
      double d = 0;
      for (size_t k = 0; k < priv.dim(); ++k) {
        d += (priv.row(i)[k] - synth.row(j)[k]) * (priv.row(i)[k] - synth.row(j)[k]);
      }
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    ++votes[best];
  }
  return votes;
}

TEST(DpNnHistogramTest, OneDimensionalExample) {
  RngStream rng(1);
  auto hist = DpNnHistogram(Column({0.0, 0.1, 0.9}), Column({0.05, 1.0}), 0.0,
                            0.0, rng);
  PRIVSIM_ASSERT_OK(hist.status());
  EXPECT_EQ(hist->raw, (std::vector<int64_t>{2, 1}));
  EXPECT_EQ(hist->thresholded, (std::vector<double>{2.0, 1.0}));

  auto thresholded = DpNnHistogram(Column({0.0, 0.1, 0.9}),
                                   Column({0.05, 1.0}), 0.0, 1.0, rng);
  PRIVSIM_ASSERT_OK(thresholded.status());
  EXPECT_EQ(thresholded->thresholded, (std::vector<double>{1.0, 0.0}));
}

TEST(DpNnHistogramTest, RejectsBadInputs) {
  RngStream rng(1);
  EXPECT_FALSE(DpNnHistogram(Column({0.0}), EmbeddingMatrix(0, 1), 0, 0, rng).ok());
  EXPECT_FALSE(DpNnHistogram(Column({0.0}), Column({1.0}), -1, 0, rng).ok());
  EXPECT_FALSE(DpNnHistogram(Column({0.0}), Column({1.0}), 0, -1, rng).ok());
  EXPECT_FALSE(
      DpNnHistogram(Column({0.0}), EmbeddingMatrix(1, 2), 0, 0, rng).ok());
}

TEST(DpNnHistogramTest, ZeroVotersGivePureNoise) {
  RngStream rng(2);
  constexpr size_t n = 10000;
  auto hist = DpNnHistogram(EmbeddingMatrix(0, 3), EmbeddingMatrix(n, 3), 2.0,
                            0.0, rng);
  PRIVSIM_ASSERT_OK(hist.status());
  EXPECT_EQ(hist->num_votes(), 0);
  // Moment bounds for N(0, 4): standard errors of mean, variance, skewness
  // and excess kurtosis are about 0.02, 0.057, 0.024 and 0.049.
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (double v : hist->noised) m1 += v;
  m1 /= n;
  for (double v : hist->noised) {
    const double c = v - m1;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 5 * 0.02);
  EXPECT_NEAR(m2, 4.0, 5 * 0.057);
  EXPECT_NEAR(m3 / std::pow(m2, 1.5), 0.0, 5 * 0.024);
  EXPECT_NEAR(m4 / (m2 * m2) - 3.0, 0.0, 5 * 0.049);
}

TEST(DpNnHistogramTest, MatchesBruteForceOracle) {
  RngStream rng(3);
  for (auto [n, m, d] : std::vector<std::tuple<size_t, size_t, size_t>>{
           {1, 1, 1}, {7, 3, 2}, {50, 40, 5}, {200, 17, 1}, {500, 500, 4}}) {
    EmbeddingMatrix priv = RandomMatrix(n, d, rng);
    EmbeddingMatrix synth = RandomMatrix(m, d, rng);
    RngStream noise(0);
    auto hist = DpNnHistogram(priv, synth, 0.0, 0.0, noise, 2);
    PRIVSIM_ASSERT_OK(hist.status());
    const auto expected = BruteForceVotes(priv, synth);
    EXPECT_EQ(hist->raw, expected) << n << "x" << m;
    EXPECT_EQ(hist->num_votes(), static_cast<int64_t>(n));
  }
}

TEST(DpNnHistogramTest, ThresholdingNeverNegativeAndNoiseIsReproducible) {
  RngStream data(4);
  EmbeddingMatrix priv = RandomMatrix(100, 3, data);
  EmbeddingMatrix synth = RandomMatrix(30, 3, data);
  RngStream a(9), b(9);
  auto ha = DpNnHistogram(priv, synth, 5.0, 2.0, a, 1);
  auto hb = DpNnHistogram(priv, synth, 5.0, 2.0, b, 3);
  PRIVSIM_ASSERT_OK(ha.status());
  PRIVSIM_ASSERT_OK(hb.status());
  EXPECT_EQ(ha->noised, hb->noised);
  for (size_t j = 0; j < ha->size(); ++j) {
    EXPECT_GE(ha->thresholded[j], 0.0);
    EXPECT_DOUBLE_EQ(ha->thresholded[j], std::max(ha->noised[j] - 2.0, 0.0));
  }
}

TEST(SensitivityCheckTest, HoldsOnRandomInstances) {
  RngStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 1 + rng.UniformIndex(25);
    const size_t m = 1 + rng.UniformIndex(15);
    EmbeddingMatrix priv = RandomMatrix(n, 3, rng);
    EmbeddingMatrix synth = RandomMatrix(m, 3, rng);
    EXPECT_TRUE(HistogramSensitivityCheck(priv, synth)) << "trial " << trial;
  }
}

TEST(SensitivityCheckTest, DuplicatesAndEmptySet) {
  EXPECT_TRUE(HistogramSensitivityCheck(Column({0.2, 0.2, 0.2, 0.8}),
                                        Column({0.0, 1.0, 0.2})));
  EXPECT_TRUE(HistogramSensitivityCheck(EmbeddingMatrix(0, 1), Column({1.0})));
}

TEST(DefaultDeltaTest, NaturalLogFormula) {
  auto three = DefaultDelta(3);
  PRIVSIM_ASSERT_OK(three.status());
  EXPECT_DOUBLE_EQ(*three, 1.0 / (3.0 * std::log(3.0)));
  auto large = DefaultDelta(60000);
  PRIVSIM_ASSERT_OK(large.status());
  EXPECT_NEAR(*large, 1.5148e-6, 1e-9);
  EXPECT_DOUBLE_EQ(*DefaultDelta(1024, LogBase::kTwo), 1.0 / (1024.0 * 10.0));
  EXPECT_DOUBLE_EQ(*DefaultDelta(1000, LogBase::kTen), 1.0 / 3000.0);
  EXPECT_FALSE(DefaultDelta(1).ok());
  EXPECT_FALSE(DefaultDelta(0).ok());
}

TEST(CalibrateSigmaTest, ClosedFormAgreesWithNumericIntegration) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (double eps : {0.5, 2.0}) {
      const double closed = AnalyticGaussianDelta(eps, sigma, 1.0);
      EXPECT_NEAR(closed, NumericDelta(eps, sigma, 1.0), 1e-8 + 1e-6 * closed);
    }
  }
}

TEST(CalibrateSigmaTest, ReturnedSigmaIsTheBoundary) {
  for (auto [eps, delta, t] : std::vector<std::tuple<double, double, int>>{
           {1.0, 1e-5, 1}, {4.0, 5e-5, 4}, {10.0, 6.6e-5, 4}, {0.5, 1e-3, 10}}) {
    auto sigma = CalibrateSigma(eps, delta, t);
    PRIVSIM_ASSERT_OK(sigma.status());
    const double d = std::sqrt(static_cast<double>(t));
    EXPECT_LE(NumericDelta(eps, *sigma, d), delta * (1 + 1e-6));
    EXPECT_GT(NumericDelta(eps, 0.99 * *sigma, d), delta);
    EXPECT_TRUE(AnalyticGaussianHolds(eps, delta, *sigma, d));
    EXPECT_FALSE(AnalyticGaussianHolds(eps, delta, 0.99 * *sigma, d));
  }
}

TEST(CalibrateSigmaTest, ScalesWithSquareRootOfIterations) {
  auto one = CalibrateSigma(3.0, 1e-5, 1);
  auto four = CalibrateSigma(3.0, 1e-5, 4);
  auto nine = CalibrateSigma(3.0, 1e-5, 9);
  EXPECT_NEAR(*four / *one, 2.0, 1e-9);
  EXPECT_NEAR(*nine / *one, 3.0, 1e-9);
}

TEST(CalibrateSigmaTest, LargeEpsilonNeedsLittleNoise) {
  auto sigma = CalibrateSigma(100.0, 1e-6, 1);
  PRIVSIM_ASSERT_OK(sigma.status());
  EXPECT_LT(*sigma, 0.5);
  EXPECT_LE(NumericDelta(100.0, 0.5, 1.0), 1e-6);
}

TEST(CalibrateSigmaTest, Monotone) {
  EXPECT_GT(*CalibrateSigma(1.0, 1e-5, 2), *CalibrateSigma(2.0, 1e-5, 2));
  EXPECT_GT(*CalibrateSigma(1.0, 1e-6, 2), *CalibrateSigma(1.0, 1e-5, 2));
  EXPECT_LT(*CalibrateSigma(1.0, 1e-5, 2), *CalibrateSigma(1.0, 1e-5, 3));
}

TEST(CalibrateSigmaTest, RejectsBadInputs) {
  EXPECT_EQ(CalibrateSigma(0.0, 1e-5, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(CalibrateSigma(-1.0, 1e-5, 1).ok());
  EXPECT_FALSE(CalibrateSigma(1.0, 0.0, 1).ok());
  EXPECT_FALSE(CalibrateSigma(1.0, 1.0, 1).ok());
  EXPECT_FALSE(CalibrateSigma(1.0, 1e-5, 0).ok());
  EXPECT_FALSE(CalibrateSigma(INFINITY, 1e-5, 1).ok());
}

TEST(ReportNoisyMaxTest, SingleCandidate) {
  RngStream rng(6);
  const std::vector<double> scores = {0.3};
  EXPECT_EQ(*ReportNoisyMax(scores, 1.0, 1.0, rng), 0u);
}

TEST(ReportNoisyMaxTest, HugeEpsilonIsExactArgmax) {
  RngStream rng(7);
  const std::vector<double> scores = {0.1, 0.7, 0.65, 0.2};
  int hits = 0;
  for (int i = 0; i < 1000; ++i) hits += *ReportNoisyMax(scores, 0.01, 1e9, rng) == 1;
  EXPECT_EQ(hits, 1000);
}

TEST(ReportNoisyMaxTest, EqualScoresAreUniform) {
  RngStream rng(8);
  const std::vector<double> scores(4, 0.5);
  constexpr int n = 10000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i) ++counts[*ReportNoisyMax(scores, 1.0, 1.0, rng)];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.25, BinomialBand(0.25, n, 5));
}

TEST(ReportNoisyMaxTest, RejectsBadInputs) {
  RngStream rng(9);
  const std::vector<double> scores = {1.0};
  EXPECT_FALSE(ReportNoisyMax({}, 1.0, 1.0, rng).ok());
  EXPECT_FALSE(ReportNoisyMax(scores, 0.0, 1.0, rng).ok());
  EXPECT_FALSE(ReportNoisyMax(scores, 1.0, 0.0, rng).ok());
}

}  // namespace
}  // namespace privsim::dp
