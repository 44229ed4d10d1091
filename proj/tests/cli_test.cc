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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "privsim/cli/commands.h"
#include "privsim/cli/exit_codes.h"
#include "privsim/cli/run_config.h"
#include "privsim/io/config.h"
#include "privsim/io/tensor_file.h"
#include "test_util.h"

namespace privsim::cli {
namespace {

namespace fs = std::filesystem;
using ::privsim::testing::ScratchDir;

constexpr char kTextCorpora[] = R"(
[corpus.private]
backend = text
count = 100
seed = 11
out = data/private.spe
region.font = 6, 7
region.size = 18, 24
region.stroke = 1, 2
region.rotation = -15, 15

[corpus.test]
backend = text
count = 50
seed = 12
out = data/test.spe
region.font = 6, 7
region.size = 18, 24
)";

constexpr char kTextRun[] = R"(
[run]
seed = 3
n_syn = 100
classes = 0-9
class_mode = available
private = data/private.spe
test = data/test.spe
out = out

[privacy]
epsilon = 10
delta = auto

[schedule]
iterations = 2
backends = text
beta.font = 0.5, 0.2
alpha.size = 3, 2
alpha.rotation = 6, 3

[backend.text]
type = text
)";

constexpr char kBlobConfig[] = R"(
[corpus.pool]
generator = two_blobs
blob = both
count = 1200
seed = 1
labels = false
out = data/pool.spe

[corpus.private]
generator = two_blobs
blob = 0
count = 200
seed = 2
out = data/private.spe

[corpus.test]
generator = two_blobs
blob = 0
count = 100
seed = 3
out = data/test.spe

[run]
seed = 5
n_syn = 100
classes = 0-9
private = data/private.spe
test = data/test.spe
out = out

[privacy]
epsilon = 4

[schedule]
iterations = 6
backends = pool
gamma = 1000, 500, 200, 100, 50, 20

[backend.pool]
type = data
corpus = data/pool.spe

[baselines]
num_clusters = 20
)";

std::string WriteConfig(const std::string& dir, const std::string& text) {
  const std::string path = dir + "/test.cfg";
  EXPECT_TRUE(io::WriteFileBytes(path, text).ok());
  return path;
}

CommandOptions Options(const std::string& config_path) {
  CommandOptions options;
  options.config_path = config_path;
  return options;
}

std::string Read(const std::string& path) {
  auto bytes = io::ReadFileBytes(path);
  EXPECT_TRUE(bytes.ok()) << bytes.status();
  return bytes.value_or("");
}

// Value of a "# key=value" manifest line, or "" when missing.
std::string ManifestField(const std::string& manifest, const std::string& key) {
  for (const std::string& line : std::vector<std::string>(absl::StrSplit(manifest, '\n'))) {
    const std::string prefix = absl::StrCat("# ", key, "=");
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return "";
}

int RunBinary(const std::string& args) {
  const std::string cmd = absl::StrCat(PRIVSIM_BINARY, " ", args, " >/dev/null 2>&1");
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(ExitCodeTest, StatusMapping) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), kExitOk);
  EXPECT_EQ(ExitCodeFor(absl::InvalidArgumentError("x")), kExitConfig);
  EXPECT_EQ(ExitCodeFor(absl::FailedPreconditionError("x")), kExitConfig);
  EXPECT_EQ(ExitCodeFor(absl::NotFoundError("x")), kExitIo);
  EXPECT_EQ(ExitCodeFor(absl::DataLossError("x")), kExitIo);
  EXPECT_EQ(ExitCodeFor(absl::PermissionDeniedError("x")), kExitIo);
  EXPECT_EQ(ExitCodeFor(AsCalibrationError(absl::InvalidArgumentError("x"))),
            kExitCalibration);
  EXPECT_EQ(ExitCodeFor(absl::InternalError("x")), kExitInternal);
}

TEST(ExitCodeTest, BinaryReportsConfigIoAndCalibrationErrors) {
  const std::string dir = ScratchDir("exit");
  EXPECT_EQ(RunBinary(""), kExitConfig);
  EXPECT_EQ(RunBinary(absl::StrCat("run --config ", dir, "/missing.cfg")), kExitIo);
  const std::string typo = WriteConfig(dir, absl::StrCat(kTextCorpora, kTextRun, "\n[run2]\n"));
  io::WriteFileBytes(typo, absl::StrCat(kTextCorpora, kTextRun)).IgnoreError();
  ASSERT_EQ(RunBinary(absl::StrCat("gen-corpus --config ", typo)), kExitOk);
  std::string text = absl::StrCat(kTextCorpora, kTextRun);
  io::WriteFileBytes(typo, text + "itrations = 3\n").IgnoreError();
  EXPECT_EQ(RunBinary(absl::StrCat("run --dry-run --config ", typo)), kExitConfig);
  std::string bad_eps = text;
  bad_eps.replace(bad_eps.find("epsilon = 10"), 12, "epsilon = -1");
  io::WriteFileBytes(typo, bad_eps).IgnoreError();
  EXPECT_EQ(RunBinary(absl::StrCat("run --dry-run --config ", typo)), kExitCalibration);
  io::WriteFileBytes(typo, text).IgnoreError();
  EXPECT_EQ(RunBinary(absl::StrCat("run --dry-run --config ", typo)), kExitOk);
}

TEST(GenCorpusTest, CountMustBePositive) {
  const std::string dir = ScratchDir("zero");
  std::string text = absl::StrCat(kTextCorpora, "[backend.text]\ntype = text\n");
  text.replace(text.find("count = 100"), 11, "count = 0");
  const std::string path = WriteConfig(dir, text);
  const absl::Status status = GenCorpusCommand(Options(path));
  EXPECT_EQ(ExitCodeFor(status), kExitConfig) << status;
}

TEST(GenCorpusTest, SameSeedSameFile) {
  const std::string a = ScratchDir("a"), b = ScratchDir("b");
  const std::string text = absl::StrCat(kTextCorpora, "[backend.text]\ntype = text\n");
  PRIVSIM_ASSERT_OK(GenCorpusCommand(Options(WriteConfig(a, text))));
  PRIVSIM_ASSERT_OK(GenCorpusCommand(Options(WriteConfig(b, text))));
  EXPECT_EQ(*io::FileDigest(a + "/data/private.spe"),
            *io::FileDigest(b + "/data/private.spe"));
  auto tensor = io::ReadTensorFile(a + "/data/private.spe");
  PRIVSIM_ASSERT_OK(tensor.status());
  EXPECT_EQ(tensor->n, 100u);
  EXPECT_EQ(tensor->height, 28u);
  ASSERT_TRUE(tensor->labels.has_value());
  EXPECT_TRUE(fs::exists(a + "/data/private.spe.meta"));
}

TEST(GenCorpusTest, AvatarCorpusHasExpectedSize) {
  const std::string dir = ScratchDir("avatar");
  const std::string path = WriteConfig(dir, R"(
[backend.avatar]
type = avatar

[corpus.avatars]
backend = avatar
count = 1000
seed = 5
out = avatars.spe
)");
  PRIVSIM_ASSERT_OK(GenCorpusCommand(Options(path)));
  // Header, 1000 RGB 32x32 images and u16 labels from the class-less
  // backend's first categorical.
  const auto size = fs::file_size(dir + "/avatars.spe");
  const auto tensor = io::ReadTensorFile(dir + "/avatars.spe");
  PRIVSIM_ASSERT_OK(tensor.status());
  EXPECT_EQ(size, 22u + 1000u * 32 * 32 * 3 +
                      (tensor->labels.has_value() ? 2000u : 0u));
}

class RunCommandTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = ScratchDir("run");
    config_ = WriteConfig(dir_, absl::StrCat(kTextCorpora, kTextRun));
    ASSERT_TRUE(GenCorpusCommand(Options(config_)).ok());
  }
  std::string dir_;
  std::string config_;
};

TEST_F(RunCommandTest, DryRunWritesNothing) {
  CommandOptions options = Options(config_);
  options.dry_run = true;
  PRIVSIM_ASSERT_OK(RunCommand(options));
  EXPECT_FALSE(fs::exists(dir_ + "/out"));
}

TEST_F(RunCommandTest, ManifestLedgerAndDeterminism) {
  CommandOptions first = Options(config_);
  first.overrides.out = dir_ + "/out1";
  PRIVSIM_ASSERT_OK(RunCommand(first));
  CommandOptions second = Options(config_);
  second.overrides.out = dir_ + "/out2";
  PRIVSIM_ASSERT_OK(RunCommand(second));

  const std::string manifest = Read(dir_ + "/out1/manifest.csv");
  PRIVSIM_EXPECT_OK(CheckManifest(manifest));
  EXPECT_EQ(manifest, Read(dir_ + "/out2/manifest.csv"));
  EXPECT_EQ(Read(dir_ + "/out1/synthetic.spe"), Read(dir_ + "/out2/synthetic.spe"));
  EXPECT_EQ(ManifestField(manifest, "iterations"), "2");
  EXPECT_EQ(ManifestField(manifest, "epsilon"), "10");
  const double delta = 1.0 / (100 * std::log(100.0));
  EXPECT_NEAR(std::stod(ManifestField(manifest, "delta")), delta, 1e-9 * delta);
  EXPECT_NE(manifest.find("iteration,class,fed,knn_accuracy"), std::string::npos);

  auto synthetic = io::ReadTensorFile(dir_ + "/out1/synthetic.spe");
  PRIVSIM_ASSERT_OK(synthetic.status());
  EXPECT_EQ(synthetic->n, 100u);
  const std::string ledger = Read(dir_ + "/out1/ledger.txt");
  EXPECT_NE(ledger.find("sigma"), std::string::npos);
  EXPECT_NE(ledger.find("guarantee"), std::string::npos);

  CommandOptions reseeded = Options(config_);
  reseeded.overrides.out = dir_ + "/out3";
  reseeded.overrides.seed = 99;
  PRIVSIM_ASSERT_OK(RunCommand(reseeded));
  const std::string other = Read(dir_ + "/out3/manifest.csv");
  EXPECT_EQ(ManifestField(other, "seed"), "99");
  EXPECT_NE(ManifestField(other, "config_hash"), ManifestField(manifest, "config_hash"));
}

TEST_F(RunCommandTest, MetricsCommandReproducesFinalFed) {
  PRIVSIM_ASSERT_OK(RunCommand(Options(config_)));
  PRIVSIM_ASSERT_OK(MetricsCommand(Options(config_)));
  const std::string manifest = Read(dir_ + "/out/manifest.csv");
  const std::string metrics = Read(dir_ + "/out/metrics.csv");
  // Last "all" row of the run against the metrics row.
  std::string run_fed, metrics_fed;
  for (const std::string& line : std::vector<std::string>(absl::StrSplit(manifest, '\n'))) {
    std::vector<std::string> cells = absl::StrSplit(line, ',');
    if (cells.size() > 2 && cells[0] == "2" && cells[1] == "all") run_fed = cells[2];
  }
  ASSERT_FALSE(run_fed.empty());
  EXPECT_NE(metrics.find(run_fed), std::string::npos) << metrics;
}

TEST(CheckManifestTest, MissingFieldsFail) {
  std::string manifest;
  for (const std::string& key : RequiredManifestFields()) {
    absl::StrAppend(&manifest, "# ", key, "=1\n");
  }
  absl::StrAppend(&manifest, "iteration,class,fed\n0,all,1\n");
  PRIVSIM_EXPECT_OK(CheckManifest(manifest));
  for (const std::string& key : RequiredManifestFields()) {
    std::string missing = manifest;
    const std::string line = absl::StrCat("# ", key, "=1\n");
    missing.erase(missing.find(line), line.size());
    EXPECT_EQ(CheckManifest(missing).code(), absl::StatusCode::kFailedPrecondition)
        << key;
  }
  EXPECT_FALSE(CheckManifest("# epsilon=1\n").ok());
}

class BlobCommandTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = ScratchDir("blobs");
    config_ = WriteConfig(dir_, kBlobConfig);
    ASSERT_TRUE(GenCorpusCommand(Options(config_)).ok());
  }
  std::string dir_;
  std::string config_;
};

TEST_F(BlobCommandTest, BaselinesWriteThreeMatchedRows) {
  PRIVSIM_ASSERT_OK(BaselinesCommand(Options(config_)));
  const std::string csv = Read(dir_ + "/out/baselines.csv");
  std::vector<std::vector<std::string>> rows;
  for (const std::string& line :
       std::vector<std::string>(absl::StrSplit(csv, '\n', absl::SkipEmpty()))) {
    if (line[0] != '#') rows.push_back(absl::StrSplit(line, ','));
  }
  ASSERT_EQ(rows.size(), 4u) << csv;
  EXPECT_EQ(rows[0][0], "method");
  EXPECT_EQ(rows[0][1], "sigma");
  // Both one-shot baselines are single releases at the same budget.
  EXPECT_EQ(rows[1][1], rows[2][1]);
  EXPECT_EQ(rows[1][2], "1");
  EXPECT_EQ(rows[3][2], "6");
  EXPECT_GT(std::stod(rows[3][1]), std::stod(rows[1][1]));
}

TEST_F(BlobCommandTest, ScheduleSmallClampsGamma) {
  CommandOptions options = Options(config_);
  options.axis = "schedule-small";
  PRIVSIM_ASSERT_OK(AblateCommand(options));
  const std::string manifest = Read(dir_ + "/out/schedule-small/manifest.csv");
  EXPECT_EQ(ManifestField(manifest, "gamma"), "20 20 20 20 20 20");
}

TEST_F(BlobCommandTest, AlignmentWritesFiveManifests) {
  std::string text = kBlobConfig;
  text.replace(text.find("gamma = 1000, 500, 200, 100, 50, 20"), 35,
               "gamma = 20, 10, 5, 2, 1, 1");
  WriteConfig(dir_, text);
  CommandOptions options = Options(config_);
  options.axis = "alignment";
  PRIVSIM_ASSERT_OK(AblateCommand(options));
  for (int i = 0; i < 5; ++i) {
    const std::string manifest =
        Read(absl::StrCat(dir_, "/out/alignment/part-", i, "/manifest.csv"));
    PRIVSIM_EXPECT_OK(CheckManifest(manifest));
    EXPECT_EQ(ManifestField(manifest, "alignment_part"), absl::StrCat(i));
  }
  EXPECT_TRUE(fs::exists(dir_ + "/out/alignment/summary.csv"));
}

TEST_F(BlobCommandTest, UnknownAxisIsAConfigError) {
  CommandOptions options = Options(config_);
  options.axis = "sideways";
  EXPECT_EQ(ExitCodeFor(AblateCommand(options)), kExitConfig);
}

TEST(RenderPreviewTest, WritesRequestedCount) {
  const std::string dir = ScratchDir("preview");
  const std::string path = WriteConfig(dir, R"(
[backend.avatar]
type = avatar

[preview]
backend = avatar
count = 16
seed = 3
out = preview.spe
)");
  PRIVSIM_ASSERT_OK(RenderPreviewCommand(Options(path)));
  auto tensor = io::ReadTensorFile(dir + "/preview.spe");
  PRIVSIM_ASSERT_OK(tensor.status());
  EXPECT_EQ(tensor->n, 16u);
  EXPECT_EQ(tensor->channels, 3u);
}

TEST(DispatchTest, UnknownVerb) {
  EXPECT_FALSE(DispatchCommand("fly", CommandOptions()).ok());
  EXPECT_EQ(CommandNames().size(), 6u);
}

}  // namespace
}  // namespace privsim::cli
