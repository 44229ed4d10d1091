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
#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "privsim/core/rng.h"
#include "privsim/data_backend/corpus.h"
#include "privsim/engine/backend_registry.h"
#include "privsim/engine/resample.h"
#include "privsim/engine/run_pe.h"
#include "privsim/metrics/embedding.h"
#include "privsim/simulators/parametric_backend.h"
#include "test_util.h"

namespace privsim::engine {
namespace {

using ::privsim::testing::BinomialBand;

constexpr ImageShape kShape = {8, 8, 1};

// Flat gray images: intensity 20 * level. Class "cls" does not change pixels.
absl::StatusOr<Image> RenderLevel(const ParamVector& p) {
  Image img(kShape);
  std::fill(img.pixels.begin(), img.pixels.end(),
            static_cast<uint8_t>(std::lround(20 * p.numerical[0])));
  return img;
}

simulators::ParametricBackend LevelBackend(std::string id = "levels") {
  auto space = ParamSpace::Create({{"cls", 2}}, {{"level", 0.0, 10.0, 1.0}});
  return *simulators::ParametricBackend::Create(std::move(id), *space, kShape,
                                                RenderLevel, "cls", 2);
}

Image LevelImage(double level) {
  return *RenderLevel(ParamVector{{0}, {level}});
}

PrivateData PrivateLevels(const std::vector<std::pair<double, int>>& items,
                          const metrics::PixelEmbedder& embedder) {
  PrivateData data;
  data.embeddings = EmbeddingMatrix(0, metrics::PixelEmbedder::kDim);
  for (auto [level, label] : items) {
    data.embeddings.AppendRow(*embedder.Embed(LevelImage(level)));
    data.labels.push_back(label);
  }
  return data;
}

RunConfig LevelConfig(int iterations, size_t n_syn, double alpha, double beta) {
  RunConfig config;
  config.n_syn = n_syn;
  config.classes = {0, 1};
  config.class_mode = ClassMode::kAvailable;
  config.seed = 42;
  config.schedule.iterations = iterations;
  config.schedule.backend_ids.assign(iterations + 1, "levels");
  config.schedule.alpha["level"].assign(iterations, alpha);
  config.schedule.beta["cls"].assign(iterations, beta);
  config.privacy.iterations = iterations;
  return config;
}

data_backend::Corpus LevelCorpus(const metrics::PixelEmbedder& embedder) {
  std::vector<Sample> samples;
  for (int level = 0; level <= 10; ++level) {
    Sample s;
    s.image = LevelImage(level);
    s.label = level % 2;
    samples.push_back(std::move(s));
  }
  EmbeddingMatrix e = *embedder.EmbedAll(std::span<const Sample>(samples));
  return *data_backend::Corpus::Build(std::move(samples), std::move(e), 3);
}

TEST(ResampleTest, PointMass) {
  RngStream rng(1);
  const std::vector<double> p = {0, 0, 1, 0};
  auto idx = ResampleWithReplacement(p, 100, rng);
  PRIVSIM_ASSERT_OK(idx.status());
  EXPECT_EQ(*idx, std::vector<size_t>(100, 2));
}

TEST(ResampleTest, UniformFrequencies) {
  RngStream rng(2);
  constexpr size_t n = 100000;
  const std::vector<double> p(4, 0.25);
  auto idx = ResampleWithReplacement(p, n, rng);
  PRIVSIM_ASSERT_OK(idx.status());
  std::vector<int> counts(4, 0);
  for (size_t i : *idx) ++counts[i];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.25, BinomialBand(0.25, n, 5));
}

TEST(ResampleTest, RejectsInvalidDistributions) {
  RngStream rng(3);
  EXPECT_FALSE(ResampleWithReplacement(std::vector<double>{0.25, 0.25}, 5, rng).ok());
  EXPECT_FALSE(ResampleWithReplacement(std::vector<double>{1.5, -0.5}, 5, rng).ok());
  EXPECT_FALSE(ResampleWithReplacement(std::vector<double>{}, 5, rng).ok());
  const std::vector<int> items = {7, 8};
  EXPECT_FALSE(ResampleWithReplacement(std::span<const int>(items),
                                       std::vector<double>{1.0}, 3, rng)
                   .ok());
  auto drawn = ResampleWithReplacement(std::span<const int>(items),
                                       std::vector<double>{0.0, 1.0}, 3, rng);
  EXPECT_EQ(*drawn, (std::vector<int>{8, 8, 8}));
}

TEST(ResampleTest, NormalizeHistogram) {
  EXPECT_FALSE(NormalizeHistogram(std::vector<double>{0, 0}).has_value());
  auto p = NormalizeHistogram(std::vector<double>{1, 3});
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(*p, (std::vector<double>{0.25, 0.75}));
}

class RunPeTest : public ::testing::Test {
 protected:
  RunPeTest() : embedder_(kShape) {
    (void)registry_.Add(LevelBackend());
  }
  metrics::PixelEmbedder embedder_;
  BackendRegistry registry_;
};

TEST_F(RunPeTest, ZeroIterationsReturnsInitialPopulation) {
  RunConfig config = LevelConfig(0, 20, 0, 0);
  const PrivateData priv = PrivateLevels({{3, 0}, {8, 1}}, embedder_);
  auto result = RunPe(config, registry_, priv, embedder_);
  PRIVSIM_ASSERT_OK(result.status());
  ASSERT_EQ(result->trace.records.size(), 1u);
  EXPECT_EQ(result->synthetic.size(), 20u);
  EXPECT_EQ(result->trace.noise_applications, (std::vector<int>{0, 0}));
  size_t k = 0;
  for (const auto& rec : result->trace.records[0]) {
    for (const Sample& s : rec.population) {
      EXPECT_EQ(s.image, result->synthetic[k++].image);
    }
  }
}

TEST_F(RunPeTest, SingletonPrivateSetCollapsesOntoNearestSample) {
  RunConfig config = LevelConfig(1, 8, 0.0, 0.0);
  const PrivateData priv = PrivateLevels({{7, 0}, {2, 1}}, embedder_);
  auto result = RunPe(config, registry_, priv, embedder_);
  PRIVSIM_ASSERT_OK(result.status());
  ASSERT_EQ(result->trace.records.size(), 2u);
  const double targets[] = {7, 2};
  for (size_t g = 0; g < 2; ++g) {
    const IterationRecord& initial = result->trace.records[0][g];
    ASSERT_EQ(initial.population.size(), 4u);
    // Hand oracle: the initial sample whose level is closest to the private
    // point, lowest index on ties.
    size_t best = 0;
    for (size_t i = 1; i < 4; ++i) {
      const double li = std::get<ParamVector>(initial.population[i].provenance).numerical[0];
      const double lb = std::get<ParamVector>(initial.population[best].provenance).numerical[0];
      if (std::abs(li - targets[g]) < std::abs(lb - targets[g])) best = i;
    }
    const ParamVector expected = std::get<ParamVector>(initial.population[best].provenance);
    for (const Sample& s : result->trace.records[1][g].population) {
      EXPECT_EQ(std::get<ParamVector>(s.provenance), expected);
      EXPECT_EQ(s.label, static_cast<int>(g));
    }
  }
}

TEST_F(RunPeTest, InvariantsOverAFullRun) {
  RunConfig config = LevelConfig(4, 60, 2.0, 0.5);
  const PrivateData priv =
      PrivateLevels({{1, 0}, {2, 0}, {2, 0}, {9, 1}, {8, 1}}, embedder_);
  auto result = RunPe(config, registry_, priv, embedder_);
  PRIVSIM_ASSERT_OK(result.status());
  EXPECT_EQ(result->trace.noise_applications, (std::vector<int>{4, 4}));
  ASSERT_EQ(result->trace.records.size(), 5u);
  for (const auto& iteration : result->trace.records) {
    for (size_t g = 0; g < iteration.size(); ++g) {
      const IterationRecord& rec = iteration[g];
      EXPECT_EQ(rec.population.size(), 30u);
      for (const Sample& s : rec.population) {
        EXPECT_EQ(std::get<ParamVector>(s.provenance).categorical[0], static_cast<int>(g));
        EXPECT_EQ(s.label, static_cast<int>(g));
      }
      if (rec.iteration == 0) continue;
      ASSERT_TRUE(rec.histogram.has_value());
      EXPECT_EQ(rec.histogram->num_votes(), g == 0 ? 3 : 2);
      if (rec.uniform_fallback) continue;
      for (size_t parent : rec.parents) EXPECT_GT(rec.histogram->raw[parent], 0);
    }
  }
}

TEST_F(RunPeTest, SameSeedSameOutput) {
  RunConfig config = LevelConfig(3, 40, 3.0, 0.3);
  config.privacy.sigma = 1.5;
  const PrivateData priv = PrivateLevels({{4, 0}, {6, 1}, {5, 1}}, embedder_);
  auto a = RunPe(config, registry_, priv, embedder_);
  config.threads = 3;
  auto b = RunPe(config, registry_, priv, embedder_);
  PRIVSIM_ASSERT_OK(a.status());
  PRIVSIM_ASSERT_OK(b.status());
  ASSERT_EQ(a->synthetic.size(), b->synthetic.size());
  for (size_t i = 0; i < a->synthetic.size(); ++i) {
    EXPECT_EQ(a->synthetic[i].image, b->synthetic[i].image);
    EXPECT_EQ(a->synthetic[i].provenance, b->synthetic[i].provenance);
  }
  config.seed = 43;
  auto c = RunPe(config, registry_, priv, embedder_);
  bool differs = false;
  for (size_t i = 0; i < a->synthetic.size(); ++i) {
    differs |= a->synthetic[i].provenance != c->synthetic[i].provenance;
  }
  EXPECT_TRUE(differs);
}

TEST_F(RunPeTest, KeepTraceFalseRetainsLastIteration) {
  RunConfig config = LevelConfig(2, 10, 1.0, 0.0);
  const PrivateData priv = PrivateLevels({{4, 0}, {6, 1}}, embedder_);
  int observed = 0;
  RunOptions options;
  options.keep_trace = false;
  options.observer = [&](int t, std::span<const IterationRecord> recs) {
    EXPECT_EQ(t, observed++);
    EXPECT_EQ(recs.size(), 2u);
    return absl::OkStatus();
  };
  auto result = RunPe(config, registry_, priv, embedder_, options);
  PRIVSIM_ASSERT_OK(result.status());
  EXPECT_EQ(observed, 3);
  ASSERT_EQ(result->trace.records.size(), 1u);
  EXPECT_EQ(result->trace.records[0][0].iteration, 2);
}

TEST_F(RunPeTest, ValidationErrors) {
  const PrivateData priv = PrivateLevels({{4, 0}, {6, 1}}, embedder_);
  RunConfig config = LevelConfig(1, 9, 0, 0);  // 9 not divisible by 2
  EXPECT_FALSE(RunPe(config, registry_, priv, embedder_).ok());
  config = LevelConfig(1, 10, 0, 0);
  config.privacy.iterations = 2;
  EXPECT_FALSE(RunPe(config, registry_, priv, embedder_).ok());
  config = LevelConfig(1, 10, 0, 0);
  config.schedule.backend_ids[1] = "missing";
  EXPECT_FALSE(RunPe(config, registry_, priv, embedder_).ok());
  config = LevelConfig(1, 10, 0, 0);
  config.classes = {0, 1, 2};
  config.n_syn = 12;
  EXPECT_FALSE(RunPe(config, registry_, priv, embedder_).ok());  // class 2 empty
  config = LevelConfig(1, 10, 0, 0);
  config.privacy.sigma = -1;
  EXPECT_FALSE(RunPe(config, registry_, priv, embedder_).ok());
  PrivateData unlabeled = priv;
  unlabeled.labels.clear();
  EXPECT_FALSE(RunPe(LevelConfig(1, 10, 0, 0), registry_, unlabeled, embedder_).ok());
}

TEST_F(RunPeTest, DataBackendRunStaysOnCorpus) {
  auto source = DataSource::Create("corpus", LevelCorpus(embedder_));
  PRIVSIM_ASSERT_OK(source.status());
  PRIVSIM_ASSERT_OK(registry_.Add(*source));
  RunConfig config = LevelConfig(2, 20, 0, 0);
  config.class_mode = ClassMode::kAuto;
  config.schedule.backend_ids = {"corpus", "corpus", "corpus"};
  config.schedule.gamma = {3, 2};
  const PrivateData priv = PrivateLevels({{4, 0}, {6, 1}}, embedder_);
  auto result = RunPe(config, registry_, priv, embedder_);
  PRIVSIM_ASSERT_OK(result.status());
  for (const Sample& s : result->synthetic) {
    EXPECT_TRUE(std::holds_alternative<DatasetIndex>(s.provenance));
  }
  config.schedule.gamma = {4, 2};  // exceeds the 3-neighbor table
  EXPECT_FALSE(RunPe(config, registry_, priv, embedder_).ok());
}

TEST_F(RunPeTest, HybridRunHandsOffAtTheSwitch) {
  auto source = DataSource::Create("corpus", LevelCorpus(embedder_));
  PRIVSIM_ASSERT_OK(registry_.Add(*source));
  RunConfig config = LevelConfig(2, 20, 1.0, 0.0);
  config.schedule.backend_ids = {"levels", "levels", "corpus"};
  config.schedule.gamma = {1, 1};
  config.class_mode = ClassMode::kAuto;
  const PrivateData priv = PrivateLevels({{4, 0}, {6, 1}}, embedder_);
  auto result = RunPe(config, registry_, priv, embedder_);
  PRIVSIM_ASSERT_OK(result.status());
  const auto& last = result->trace.records.back();
  EXPECT_EQ(last[0].handoffs, 10u);
  // With gamma 1 every handed-off sample lands on the corpus item showing the
  // same level as its parent.
  const auto& before = result->trace.records[1];
  for (size_t g = 0; g < 2; ++g) {
    for (size_t i = 0; i < last[g].population.size(); ++i) {
      const Sample& parent = before[g].population[last[g].parents[i]];
      const double level = std::get<ParamVector>(parent.provenance).numerical[0];
      EXPECT_EQ(std::get<DatasetIndex>(last[g].population[i].provenance).value,
                static_cast<int64_t>(level));
    }
  }
}

TEST(VariationDispatchTest, RoutesByBackendKind) {
  metrics::PixelEmbedder embedder(kShape);
  BackendRegistry registry;
  PRIVSIM_ASSERT_OK(registry.Add(LevelBackend()));
  const data_backend::Corpus corpus = LevelCorpus(embedder);
  PRIVSIM_ASSERT_OK(registry.Add(*DataSource::Create("corpus", corpus)));
  IterationSchedule schedule;
  schedule.iterations = 1;
  schedule.backend_ids = {"levels", "corpus"};
  schedule.gamma = {1};
  RngStream rng(4);

  // Corpus sample with gamma 1 comes back unchanged.
  const Sample item = corpus.MakeSample(5, 1);
  auto same = VariationDispatch(item, corpus.embeddings().row(5), "corpus",
                                schedule, 1, 1, false, registry, rng);
  PRIVSIM_ASSERT_OK(same.status());
  EXPECT_EQ(std::get<DatasetIndex>(same->provenance).value, 5);
  EXPECT_EQ(same->image, item.image);

  // A simulator sample is moved to its nearest corpus item (brute force).
  Sample sim;
  sim.image = *RenderLevel(ParamVector{{0}, {7.4}});
  sim.provenance = ParamVector{{0}, {7.4}};
  const std::vector<double> emb = *embedder.Embed(sim.image);
  size_t nearest = 0;
  double best = INFINITY;
  for (size_t i = 0; i < corpus.size(); ++i) {
    double d = 0;
    for (size_t k = 0; k < emb.size(); ++k) {
      d += std::pow(emb[k] - corpus.embeddings().row(i)[k], 2);
    }
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  bool handoff = false;
  auto moved = VariationDispatch(sim, emb, "corpus", schedule, 1, 0, false,
                                 registry, rng, &handoff);
  PRIVSIM_ASSERT_OK(moved.status());
  EXPECT_TRUE(handoff);
  EXPECT_EQ(std::get<DatasetIndex>(moved->provenance).value,
            static_cast<int64_t>(nearest));

  // Parametric backend with zero degrees leaves the parameters alone.
  const ParamVector p = {{1}, {3.0}};
  Sample param_sample;
  param_sample.provenance = p;
  auto varied = VariationDispatch(param_sample, {}, "levels", schedule, 1, 1,
                                  true, registry, rng);
  PRIVSIM_ASSERT_OK(varied.status());
  EXPECT_EQ(std::get<ParamVector>(varied->provenance), p);

  // Corpus items cannot go back to a simulator.
  EXPECT_EQ(VariationDispatch(item, {}, "levels", schedule, 1, 1, true,
                              registry, rng)
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(BackendRegistryTest, DuplicateAndUnknownIds) {
  BackendRegistry registry;
  PRIVSIM_ASSERT_OK(registry.Add(LevelBackend("a")));
  EXPECT_FALSE(registry.Add(LevelBackend("a")).ok());
  EXPECT_TRUE(registry.Contains("a"));
  EXPECT_FALSE(registry.Kind("b").ok());
  EXPECT_FALSE(registry.Data("a").ok());
}

}  // namespace
}  // namespace privsim::engine
