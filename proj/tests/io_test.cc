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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "privsim/core/rng.h"
#include "privsim/io/config.h"
#include "privsim/io/csv.h"
#include "privsim/io/tensor_file.h"
#include "privsim/simulators/avatar_renderer.h"
#include "test_util.h"

namespace privsim::io {
namespace {

using ::privsim::testing::ScratchDir;

TEST(ConfigTest, ParsesSectionsListsAndComments) {
  auto config = Config::Parse(R"(
# leading comment
[run]
seed = 7        ; trailing comment
name = desk run
classes = 0-2, 5
[schedule]
alpha.size = 5, 4,3
flag = true
)");
  PRIVSIM_ASSERT_OK(config.status());
  EXPECT_EQ(*config->GetInt("run", "seed", 0), 7);
  EXPECT_EQ(config->GetString("run", "name", ""), "desk run");
  EXPECT_EQ(*config->GetIntList("run", "classes"), (std::vector<int>{0, 1, 2, 5}));
  EXPECT_EQ(*config->GetDoubleList("schedule", "alpha.size"),
            (std::vector<double>{5, 4, 3}));
  EXPECT_TRUE(*config->GetBool("schedule", "flag", false));
  EXPECT_EQ(*config->GetDouble("run", "missing", 2.5), 2.5);
  EXPECT_EQ(config->Keys("schedule"), (std::vector<std::string>{"alpha.size", "flag"}));
}

TEST(ConfigTest, RejectsMalformedText) {
  EXPECT_FALSE(Config::Parse("[run\nx = 1").ok());
  EXPECT_FALSE(Config::Parse("[run]\njust words").ok());
  EXPECT_FALSE(Config::Parse("[run]\nx = 1\nx = 2").ok());
  EXPECT_FALSE(Config::Parse("[run]\n = 2").ok());
  auto config = Config::Parse("[run]\nseed = seven\nlist = 1, x");
  PRIVSIM_ASSERT_OK(config.status());
  EXPECT_FALSE(config->GetInt("run", "seed", 0).ok());
  EXPECT_FALSE(config->GetIntList("run", "list").ok());
  EXPECT_FALSE(config->RequireString("run", "nope").ok());
}

TEST(ConfigTest, TracksUnusedKeys) {
  auto config = Config::Parse("[run]\na = 1\nb = 2\n[backend.text]\nc = 3\n[other]\nd = 4");
  PRIVSIM_ASSERT_OK(config.status());
  (void)config->Get("run", "a");
  EXPECT_EQ(config->UnusedKeys({"run", "backend"}),
            (std::vector<std::string>{"backend.text.c", "run.b"}));
}

TEST(ConfigTest, CanonicalFormIsOrderIndependent) {
  auto a = Config::Parse("[b]\ny = 2\nx = 1\n[a]\nz = 3");
  auto b = Config::Parse("[a]\nz = 3\n[b]\nx = 1\ny = 2");
  EXPECT_EQ(a->Canonical(), b->Canonical());
  b->Set("a", "z", "4");
  EXPECT_NE(a->Canonical(), b->Canonical());
}

TEST(ConfigTest, LoadResolvesPathsAgainstTheFile) {
  const std::string dir = ScratchDir("cfg");
  const std::string path = dir + "/x.cfg";
  PRIVSIM_ASSERT_OK(WriteFileBytes(path, "[run]\nprivate = data/p.spe\n"));
  auto config = Config::Load(path);
  PRIVSIM_ASSERT_OK(config.status());
  EXPECT_EQ(config->ResolvePath("data/p.spe"), dir + "/data/p.spe");
  EXPECT_EQ(config->ResolvePath("/abs/p.spe"), "/abs/p.spe");
  EXPECT_EQ(Config::Load(dir + "/missing.cfg").status().code(),
            absl::StatusCode::kNotFound);
}

TEST(CsvTest, FormatsAndQuotes) {
  CsvTable table({"name", "value", "opt"});
  table.AddRow().Add("plain").Add(0.5).Add(std::optional<double>());
  table.AddRow().Add("with, comma").Add(int64_t{3}).Add(std::optional<double>(1e-7));
  table.AddRow().Add("say \"hi\"").Add(size_t{4}).Add(2);
  EXPECT_EQ(table.ToString(),
            "name,value,opt\n"
            "plain,0.5,\n"
            "\"with, comma\",3,1e-07\n"
            "\"say \"\"hi\"\"\",4,2\n");
  EXPECT_EQ(FormatNumber(1.0 / 3.0), "0.3333333333");
}

TensorData SmallTensor(DType dtype, bool labels) {
  TensorData t;
  t.dtype = dtype;
  t.n = 3;
  t.height = 2;
  t.width = 2;
  t.channels = 1;
  for (int i = 0; i < 12; ++i) {
    if (dtype == DType::kU8) t.u8.push_back(static_cast<uint8_t>(i * 20));
    else t.f32.push_back(i * 0.25f - 1.0f);
  }
  if (labels) t.labels = std::vector<uint16_t>{0, 9, 65535};
  return t;
}

TEST(TensorFileTest, RoundTripBothDtypes) {
  const std::string dir = ScratchDir("tensor");
  for (DType dtype : {DType::kU8, DType::kF32}) {
    for (bool labels : {false, true}) {
      const TensorData t = SmallTensor(dtype, labels);
      const std::string path = dir + "/t.spe";
      PRIVSIM_ASSERT_OK(WriteTensorFile(path, t, "test"));
      auto back = ReadTensorFile(path);
      PRIVSIM_ASSERT_OK(back.status());
      EXPECT_EQ(*back, t);
      const size_t expected = kTensorHeaderSize +
                              12 * (dtype == DType::kU8 ? 1 : 4) +
                              (labels ? 6 : 0);
      EXPECT_EQ(std::filesystem::file_size(path), expected);
      EXPECT_EQ(t.ByteSize(), expected);
    }
  }
}

TEST(TensorFileTest, HeaderLayout) {
  auto bytes = EncodeTensor(SmallTensor(DType::kU8, true));
  PRIVSIM_ASSERT_OK(bytes.status());
  EXPECT_EQ(bytes->substr(0, 4), "SPE1");
  EXPECT_EQ((*bytes)[4], 0);
  EXPECT_EQ(static_cast<uint8_t>((*bytes)[5]), 3);  // n, little-endian
  EXPECT_EQ((*bytes)[6], 0);
  EXPECT_EQ((*bytes)[21], 1);
  // Last label 65535 as two 0xff bytes.
  EXPECT_EQ(static_cast<uint8_t>(bytes->back()), 0xff);
}

TEST(TensorFileTest, CorruptFilesAreDataLoss) {
  std::string bytes = *EncodeTensor(SmallTensor(DType::kU8, false));
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(DecodeTensor(bad_magic).status().code(), absl::StatusCode::kDataLoss);
  EXPECT_EQ(DecodeTensor(bytes.substr(0, 10)).status().code(),
            absl::StatusCode::kDataLoss);
  EXPECT_EQ(DecodeTensor(bytes.substr(0, bytes.size() - 1)).status().code(),
            absl::StatusCode::kDataLoss);
  const std::string dir = ScratchDir("corrupt");
  PRIVSIM_ASSERT_OK(WriteFileBytes(dir + "/bad.spe", bad_magic));
  EXPECT_EQ(ReadTensorFile(dir + "/bad.spe").status().code(),
            absl::StatusCode::kDataLoss);
}

TEST(TensorFileTest, AvatarCorpusSize) {
  RngStream rng(1);
  auto samples = simulators::RandomApi(simulators::MakeAvatarBackend(), 1000,
                                       std::nullopt, rng);
  PRIVSIM_ASSERT_OK(samples.status());
  for (size_t i = 0; i < samples->size(); ++i) (*samples)[i].label = i % 7;
  auto tensor = TensorFromSamples(*samples);
  PRIVSIM_ASSERT_OK(tensor.status());
  auto bytes = EncodeTensor(*tensor);
  EXPECT_EQ(bytes->size(), 22u + 1000u * 32 * 32 * 3 + 1000u * 2);
}

TEST(TensorFileTest, SamplesRoundTrip) {
  std::vector<Sample> samples(2);
  for (Sample& s : samples) s.image = Image({3, 2, 1});
  samples[1].image.pixels[4] = 77;
  auto tensor = TensorFromSamples(samples);
  PRIVSIM_ASSERT_OK(tensor.status());
  EXPECT_FALSE(tensor->labels.has_value());
  auto back = SamplesFromTensor(*tensor);
  PRIVSIM_ASSERT_OK(back.status());
  ASSERT_EQ(back->size(), 2u);
  EXPECT_EQ((*back)[1].image, samples[1].image);
  EXPECT_EQ(std::get<DatasetIndex>((*back)[1].provenance).value, 1);

  samples[1].image = Image({2, 3, 1});
  EXPECT_FALSE(TensorFromSamples(samples).ok());
}

TEST(TensorFileTest, SidecarRecordsShapeAndDigest) {
  const std::string dir = ScratchDir("meta");
  const std::string path = dir + "/c.spe";
  PRIVSIM_ASSERT_OK(WriteTensorFile(path, SmallTensor(DType::kU8, true), "unit"));
  auto meta = ReadFileBytes(path + ".meta");
  PRIVSIM_ASSERT_OK(meta.status());
  EXPECT_NE(meta->find("shape = 3 2 2 1"), std::string::npos);
  EXPECT_NE(meta->find("fnv1a64 = " + *FileDigest(path)), std::string::npos);
  EXPECT_NE(meta->find("source = unit"), std::string::npos);
}

TEST(FileIoTest, UnwritablePath) {
  const std::string dir = ScratchDir("unwritable");
  PRIVSIM_ASSERT_OK(WriteFileBytes(dir + "/plain", "x"));
  // A regular file cannot be a parent directory.
  EXPECT_FALSE(WriteFileBytes(dir + "/plain/y.bin", "abc").ok());
}

}  // namespace
}  // namespace privsim::io
