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

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"
#include "privsim/data_backend/baselines.h"
#include "privsim/data_backend/corpus.h"
#include "privsim/data_backend/kmeans.h"
#include "test_util.h"

namespace privsim::data_backend {
namespace {

using ::privsim::testing::BinomialBand;
using ::privsim::testing::RandomMatrix;

absl::StatusOr<Corpus> BuildFrom(EmbeddingMatrix e, size_t k_max,
                                 std::vector<int> labels = {}) {
  std::vector<Sample> samples(e.rows());
  for (size_t i = 0; i < labels.size(); ++i) samples[i].label = labels[i];
  return Corpus::Build(std::move(samples), std::move(e), k_max);
}

EmbeddingMatrix Column(std::vector<double> values) {
  const size_t n = values.size();
  return EmbeddingMatrix(n, 1, std::move(values));
}

// Self first, then by (squared distance, index).
std::vector<uint32_t> BruteForceRow(const EmbeddingMatrix& e, size_t i,
                                    size_t k) {
  std::vector<std::pair<double, uint32_t>> order;
  for (size_t j = 0; j < e.rows(); ++j) {
    double d = 0;
    for (size_t c = 0; c < e.dim(); ++c) {
      d += (e.row(i)[c] - e.row(j)[c]) * (e.row(i)[c] - e.row(j)[c]);
    }
    order.push_back({j == i ? -1.0 : d, static_cast<uint32_t>(j)});
  }
  std::sort(order.begin(), order.end());
  std::vector<uint32_t> row;
  for (size_t j = 0; j < k; ++j) row.push_back(order[j].second);
  return row;
}

std::vector<uint32_t> Row(const Corpus& c, size_t i) {
  auto r = c.neighbors(i);
  return {r.begin(), r.end()};
}

TEST(KnnTableTest, CollinearExample) {
  auto corpus = BuildFrom(Column({0.0, 1.0, 10.0}), 2);
  PRIVSIM_ASSERT_OK(corpus.status());
  EXPECT_EQ(Row(*corpus, 0), (std::vector<uint32_t>{0, 1}));
  EXPECT_EQ(Row(*corpus, 1), (std::vector<uint32_t>{1, 0}));
  EXPECT_EQ(Row(*corpus, 2), (std::vector<uint32_t>{2, 1}));
}

TEST(KnnTableTest, SingleNeighborIsSelf) {
  RngStream rng(1);
  auto corpus = BuildFrom(RandomMatrix(30, 3, rng), 1);
  PRIVSIM_ASSERT_OK(corpus.status());
  for (size_t i = 0; i < 30; ++i) EXPECT_EQ(Row(*corpus, i), (std::vector<uint32_t>{uint32_t(i)}));
}

TEST(KnnTableTest, DuplicatesTieToLowerIndex) {
  auto corpus = BuildFrom(Column({0.0, 3.0, 7.0, 1.0, 9.0, 7.0}), 3);
  PRIVSIM_ASSERT_OK(corpus.status());
  EXPECT_EQ(Row(*corpus, 2)[1], 5u);
  EXPECT_EQ(Row(*corpus, 5)[1], 2u);
  EXPECT_EQ(Row(*corpus, 2), BruteForceRow(corpus->embeddings(), 2, 3));
}

TEST(KnnTableTest, MatchesBruteForce) {
  RngStream rng(2);
  for (auto [m, k] : std::vector<std::pair<size_t, size_t>>{{5, 5}, {100, 7}, {2000, 10}}) {
    EmbeddingMatrix e = RandomMatrix(m, 4, rng);
    // Quantize so exact ties occur.
    for (size_t i = 0; i < m; ++i) {
      for (double& v : e.row(i)) v = std::round(v * 8) / 8;
    }
    auto corpus = BuildFrom(e, k);
    PRIVSIM_ASSERT_OK(corpus.status());
    for (size_t i = 0; i < m; ++i) {
      ASSERT_EQ(Row(*corpus, i), BruteForceRow(e, i, k)) << "m=" << m << " i=" << i;
    }
  }
}

TEST(KnnTableTest, ThreadCountDoesNotMatter) {
  RngStream rng(3);
  EmbeddingMatrix e = RandomMatrix(300, 5, rng);
  EXPECT_EQ(*BuildKnnTable(e, 8, 1), *BuildKnnTable(e, 8, 4));
}

TEST(KnnTableTest, RejectsBadSizes) {
  EXPECT_FALSE(BuildFrom(EmbeddingMatrix(0, 1), 1).ok());
  EXPECT_FALSE(BuildFrom(Column({0.0, 1.0}), 3).ok());
  EXPECT_FALSE(BuildFrom(Column({0.0, 1.0}), 0).ok());
}

TEST(DataRandomApiTest, SingletonCorpus) {
  auto corpus = BuildFrom(Column({4.0}), 1);
  RngStream rng(4);
  auto idx = DataRandomIndices(*corpus, 50, std::nullopt, rng);
  PRIVSIM_ASSERT_OK(idx.status());
  for (size_t i : *idx) EXPECT_EQ(i, 0u);
}

TEST(DataRandomApiTest, UniformOverItems) {
  RngStream rng(5);
  auto corpus = BuildFrom(RandomMatrix(10, 2, rng), 1);
  constexpr size_t n = 100000;
  auto idx = DataRandomIndices(*corpus, n, std::nullopt, rng);
  PRIVSIM_ASSERT_OK(idx.status());
  std::vector<int> counts(10, 0);
  for (size_t i : *idx) ++counts[i];
  for (int c : counts) {
    EXPECT_GE(c / double(n), 0.09);
    EXPECT_LE(c / double(n), 0.11);
  }
}

TEST(DataRandomApiTest, ClassFilter) {
  RngStream rng(6);
  auto unlabeled = BuildFrom(RandomMatrix(10, 2, rng), 1);
  EXPECT_FALSE(DataRandomIndices(*unlabeled, 5, 0, rng).ok());

  auto labeled = BuildFrom(RandomMatrix(6, 2, rng), 1, {0, 1, 0, 1, 1, 1});
  auto idx = DataRandomIndices(*labeled, 200, 0, rng);
  PRIVSIM_ASSERT_OK(idx.status());
  for (size_t i : *idx) EXPECT_TRUE(i == 0 || i == 2);
  EXPECT_FALSE(DataRandomIndices(*labeled, 5, 2, rng).ok());

  auto samples = DataRandomApi(*labeled, 3, 1, rng);
  PRIVSIM_ASSERT_OK(samples.status());
  for (const Sample& s : *samples) {
    EXPECT_EQ(s.label, 1);
    EXPECT_TRUE(std::holds_alternative<DatasetIndex>(s.provenance));
  }
}

TEST(DataVariationApiTest, GammaOneIsIdentity) {
  RngStream rng(7);
  auto corpus = BuildFrom(RandomMatrix(20, 2, rng), 4);
  for (size_t i = 0; i < 20; ++i) EXPECT_EQ(*DataVariationIndex(*corpus, i, 1, rng), i);
}

TEST(DataVariationApiTest, FullGammaCoversTheCorpus) {
  RngStream rng(8);
  auto corpus = BuildFrom(RandomMatrix(6, 2, rng), 6);
  std::set<size_t> seen;
  for (int i = 0; i < 2000; ++i) seen.insert(*DataVariationIndex(*corpus, 3, 6, rng));
  EXPECT_EQ(seen.size(), 6u);
}

TEST(DataVariationApiTest, SupportIsTheFirstGammaNeighbors) {
  auto corpus = BuildFrom(Column({0.0, 1.0, 10.0}), 2);
  RngStream rng(9);
  constexpr int n = 10000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    const size_t j = *DataVariationIndex(*corpus, 0, 2, rng);
    ASSERT_LE(j, 1u);
    zeros += j == 0;
  }
  EXPECT_NEAR(zeros / double(n), 0.5, BinomialBand(0.5, n, 5));
  EXPECT_FALSE(DataVariationIndex(*corpus, 0, 0, rng).ok());
  EXPECT_FALSE(DataVariationIndex(*corpus, 0, 3, rng).ok());
  EXPECT_FALSE(DataVariationIndex(*corpus, 3, 1, rng).ok());
}

TEST(CorpusTest, SubsetKeepsGlobalIds) {
  RngStream rng(10);
  auto corpus = BuildFrom(RandomMatrix(10, 2, rng), 2, {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  const std::vector<size_t> items = {7, 2, 9};
  auto sub = corpus->Subset(items, 2);
  PRIVSIM_ASSERT_OK(sub.status());
  EXPECT_EQ(sub->size(), 3u);
  EXPECT_EQ(sub->global_id(0), 7);
  EXPECT_EQ(sub->LocalIndex(9), 2u);
  EXPECT_FALSE(sub->LocalIndex(0).has_value());
  const Sample s = sub->MakeSample(1, 5);
  EXPECT_EQ(std::get<DatasetIndex>(s.provenance).value, 2);
  auto slice = corpus->ClassSlice(1, 3);
  PRIVSIM_ASSERT_OK(slice.status());
  EXPECT_EQ(slice->size(), 5u);
  EXPECT_TRUE(slice->labeled());
}

TEST(BaselineDirectTest, SelfVotesWithoutNoise) {
  RngStream rng(11);
  EmbeddingMatrix e = RandomMatrix(40, 3, rng);
  auto corpus = BuildFrom(e, 1);
  RngStream sel(12);
  auto out = BaselineDirectHistogram(e, *corpus, 0.0, 0.0, 500, sel);
  PRIVSIM_ASSERT_OK(out.status());
  EXPECT_EQ(out->histogram.raw, std::vector<int64_t>(40, 1));
  EXPECT_FALSE(out->uniform_fallback);

  // Only items that got a vote can be drawn.
  const EmbeddingMatrix priv = e.Gather(std::vector<size_t>{3, 3, 17});
  auto partial = BaselineDirectHistogram(priv, *corpus, 0.0, 0.0, 500, sel);
  for (size_t i : partial->selected) EXPECT_TRUE(i == 3 || i == 17);
}

TEST(BaselineDirectTest, ThresholdAboveVotesFallsBackToUniform) {
  RngStream rng(13);
  EmbeddingMatrix e = RandomMatrix(10, 2, rng);
  auto corpus = BuildFrom(e, 1);
  auto out = BaselineDirectHistogram(e, *corpus, 0.0, 11.0, 100, rng);
  PRIVSIM_ASSERT_OK(out.status());
  EXPECT_TRUE(out->uniform_fallback);
  EXPECT_EQ(out->selected.size(), 100u);
}

TEST(BaselineDirectTest, SingleVoter) {
  RngStream rng(14);
  auto corpus = BuildFrom(RandomMatrix(25, 2, rng), 1);
  auto out = BaselineDirectHistogram(RandomMatrix(1, 2, rng), *corpus, 1.0, 0.0, 10, rng);
  PRIVSIM_ASSERT_OK(out.status());
  EXPECT_EQ(std::count_if(out->histogram.raw.begin(), out->histogram.raw.end(),
                          [](int64_t v) { return v != 0; }),
            1);
}

TEST(BaselineClusterTest, SingletonClustersMatchDirect) {
  RngStream rng(15);
  EmbeddingMatrix e = RandomMatrix(30, 2, rng);
  auto corpus = BuildFrom(e, 1);
  EmbeddingMatrix priv = RandomMatrix(50, 2, rng);
  RngStream a(16), b(16);
  auto direct = BaselineDirectHistogram(priv, *corpus, 2.0, 0.0, 300, a);
  auto cluster = BaselineClusterHistogram(priv, *corpus, 30, 2.0, 0.0, 300, b);
  PRIVSIM_ASSERT_OK(cluster.status());
  EXPECT_EQ(direct->histogram.raw, cluster->histogram.raw);
  EXPECT_EQ(direct->selected, cluster->selected);
}

TEST(BaselineClusterTest, OneClusterIsUniform) {
  RngStream rng(17);
  auto corpus = BuildFrom(RandomMatrix(8, 2, rng), 1);
  constexpr size_t n = 40000;
  auto out = BaselineClusterHistogram(RandomMatrix(3, 2, rng), *corpus, 1, 0.0,
                                      0.0, n, rng);
  PRIVSIM_ASSERT_OK(out.status());
  std::vector<int> counts(8, 0);
  for (size_t i : out->selected) ++counts[i];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.125, BinomialBand(0.125, n, 5));
  EXPECT_FALSE(BaselineClusterHistogram(RandomMatrix(3, 2, rng), *corpus, 9, 0.0,
                                        0.0, n, rng)
                   .ok());
}

TEST(BaselineClusterTest, SeparatedBlobsFollowThePrivateData) {
  RngStream rng(18);
  EmbeddingMatrix e(0, 2);
  for (int i = 0; i < 400; ++i) {
    const double c = i < 200 ? 0.0 : 20.0;
    e.AppendRow(std::vector<double>{c + rng.Normal(), c + rng.Normal()});
  }
  auto corpus = BuildFrom(e, 1);
  EmbeddingMatrix priv(0, 2);
  for (int i = 0; i < 100; ++i) priv.AppendRow(std::vector<double>{rng.Normal(), rng.Normal()});
  auto out = BaselineClusterHistogram(priv, *corpus, 10, 0.0, 0.0, 1000, rng);
  PRIVSIM_ASSERT_OK(out.status());
  const auto in_a = std::count_if(out->selected.begin(), out->selected.end(),
                                  [](size_t i) { return i < 200; });
  EXPECT_GE(in_a, 990);
}

TEST(PartitionTest, PartsAreOrderedByDistance) {
  RngStream rng(19);
  auto corpus = BuildFrom(RandomMatrix(103, 3, rng), 1);
  EmbeddingMatrix priv = RandomMatrix(20, 3, rng, 0.0, 0.3);
  auto parts = PartitionByAlignment(*corpus, priv, 5);
  PRIVSIM_ASSERT_OK(parts.status());
  ASSERT_EQ(parts->size(), 5u);
  size_t total = 0;
  for (size_t p = 0; p < 5; ++p) {
    total += (*parts)[p].items.size();
    EXPECT_EQ((*parts)[p].items.size(), p == 4 ? 23u : 20u);
    if (p > 0) EXPECT_LE((*parts)[p - 1].mean_score, (*parts)[p].mean_score);
  }
  EXPECT_EQ(total, 103u);
  EXPECT_LT((*parts)[0].mean_score, (*parts)[4].mean_score);
}

TEST(PartitionTest, CorpusEqualToPrivateSet) {
  RngStream rng(20);
  EmbeddingMatrix e = RandomMatrix(10, 2, rng);
  auto corpus = BuildFrom(e, 1);
  auto parts = PartitionByAlignment(*corpus, e, 2);
  PRIVSIM_ASSERT_OK(parts.status());
  EXPECT_EQ((*parts)[0].mean_score, 0.0);
  EXPECT_FALSE(PartitionByAlignment(*corpus, e, 1).ok());
}

TEST(KMeansTest, FindsSeparatedClusters) {
  RngStream rng(21);
  EmbeddingMatrix e(0, 1);
  for (double c : {0.0, 100.0, 200.0}) {
    for (int i = 0; i < 30; ++i) e.AppendRow(std::vector<double>{c + rng.Uniform(-1, 1)});
  }
  RngStream km(22);
  auto model = KMeans(e, 3, km);
  PRIVSIM_ASSERT_OK(model.status());
  for (int block = 0; block < 3; ++block) {
    for (int i = 1; i < 30; ++i) {
      EXPECT_EQ(model->assignment[block * 30 + i], model->assignment[block * 30]);
    }
  }
  EXPECT_EQ(std::set<size_t>(model->assignment.begin(), model->assignment.end()).size(), 3u);
  EXPECT_LT(model->inertia, 90.0);
  EXPECT_FALSE(KMeans(e, 0, km).ok());
  EXPECT_FALSE(KMeans(e, 91, km).ok());
}

TEST(KMeansTest, Deterministic) {
  RngStream rng(23);
  EmbeddingMatrix e = RandomMatrix(200, 4, rng);
  RngStream a(5), b(5);
  EXPECT_EQ(KMeans(e, 7, a)->assignment, KMeans(e, 7, b)->assignment);
}

}  // namespace
}  // namespace privsim::data_backend
