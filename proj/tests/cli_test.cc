// Copyright 2026 The LatentLab Authors.
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

#include "cli.h"

#include <gtest/gtest.h>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "latentlab/dataset_io.h"
#include "latentlab/file_util.h"
#include "latentlab/tensor.h"
#include "synthetic.h"
#include "test_util.h"

namespace latentlab {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult RunCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> TreeBytes(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).string()] = ReadFileBytes(entry.path());
    }
  }
  return files;
}

TEST(CliTest, SplitPrintsLabeledIndices) {
  const RunResult r = RunCli({"split", "--frames", "10", "--ratio", "0.2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0,5\n");
  EXPECT_NE(r.err.find("# latentlab split:"), std::string::npos);
  EXPECT_NE(r.err.find("split_ratio=0.2"), std::string::npos);
}

TEST(CliTest, UnknownFlagIsUsageError) {
  const RunResult r = RunCli({"split", "--frames", "10", "--bogus", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("usage error"), std::string::npos);
  EXPECT_EQ(RunCli({}).code, 2);
  EXPECT_EQ(RunCli({"nosuchcommand"}).code, 2);
}

TEST(CliTest, ModuleErrorIsExitOneWithCode) {
  const RunResult r = RunCli({"split", "--frames", "10", "--ratio", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error[invalid-ratio]"), std::string::npos);
  // Diagnostics are a single line.
  const std::string last = r.err.substr(r.err.find("error["));
  EXPECT_EQ(last.find('\n'), last.size() - 1);
}

TEST(CliTest, ConfigFileOverriddenByFlags) {
  TempDir dir;
  WriteFileAtomic(dir / "run.cfg", "split_ratio = 0.5\njobs = 3\n");
  RunResult r = RunCli({"split", "--frames", "10", "--config", (dir / "run.cfg").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0,2,4,6,8\n");
  EXPECT_NE(r.err.find("jobs=3"), std::string::npos);
  r = RunCli({"split", "--frames", "10", "--config", (dir / "run.cfg").string(),
              "--ratio", "0.2"});
  EXPECT_EQ(r.out, "0,5\n");
}

TEST(CliTest, JobsEnvironmentDefault) {
  TempDir dir;
  ::setenv("LATENTLAB_JOBS", "4", 1);
  RunResult r = RunCli({"split", "--frames", "3"});
  EXPECT_NE(r.err.find("jobs=4"), std::string::npos);
  WriteFileAtomic(dir / "run.cfg", "jobs = 2\n");
  r = RunCli({"split", "--frames", "3", "--config", (dir / "run.cfg").string()});
  EXPECT_NE(r.err.find("jobs=2"), std::string::npos);
  ::unsetenv("LATENTLAB_JOBS");
}

TEST(CliTest, ManifestFromSplit) {
  TempDir dir;
  fs::create_directories(dir / "pseudo");
  ASSERT_EQ(RunCli({"split", "--frames", "4", "--ratio", "0.5", "--out",
                    (dir / "split.tsv").string()})
                .code,
            0);
  for (const char* f : {"000001", "000003"}) {
    WriteFileAtomic(dir.path() / "pseudo" / (std::string(f) + ".label"), "");
  }
  RunResult r = RunCli({"manifest", "--split", (dir / "split.tsv").string(), "--gt-dir",
                        (dir / "gt").string(), "--pseudo-dir", (dir / "pseudo").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("000000\t"), std::string::npos);
  EXPECT_NE(r.out.find("ground_truth"), std::string::npos);
  fs::remove(dir.path() / "pseudo" / "000003.label");
  r = RunCli({"manifest", "--split", (dir / "split.tsv").string(), "--gt-dir",
              (dir / "gt").string(), "--pseudo-dir", (dir / "pseudo").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error[missing-pseudo]"), std::string::npos);
  EXPECT_NE(r.err.find("000003"), std::string::npos);
}

class CliDataTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::WriteSyntheticSequence(dir_.path() / "seq", 2, 2000, 5);
    seq_ = dir_.path() / "seq";
  }
  std::string Scan(int i) const {
    return (seq_ / "velodyne" / ("00000" + std::to_string(i) + ".bin")).string();
  }
  std::string Labels(int i) const {
    return (seq_ / "labels" / ("00000" + std::to_string(i) + ".label")).string();
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  TempDir dir_;
  fs::path seq_;
};

TEST_F(CliDataTest, MixWithZeroProbabilityCopiesInputs) {
  const RunResult r = RunCli({"mix", "--scan-a", Scan(0), "--labels-a", Labels(0),
                              "--scan-b", Scan(1), "--labels-b", Labels(1), "--p", "0",
                              "--seed", "1", "--out-dir", Path("mix")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("unmixed", 0), 0u);
  EXPECT_EQ(ReadFileBytes(Path("mix/mix_1.bin")), ReadFileBytes(Scan(0)));
  EXPECT_EQ(ReadFileBytes(Path("mix/mix_1.label")), ReadFileBytes(Labels(0)));
  EXPECT_EQ(ReadFileBytes(Path("mix/mix_2.bin")), ReadFileBytes(Scan(1)));
  EXPECT_EQ(ReadFileBytes(Path("mix/mix_2.label")), ReadFileBytes(Labels(1)));
}

TEST_F(CliDataTest, MixConservesPointsAndIsDeterministic) {
  std::vector<std::string> args{"mix",      "--scan-a",   Scan(0), "--labels-a", Labels(0),
                                "--scan-b", Scan(1),      "--labels-b", Labels(1),
                                "--p",      "1",          "--seed", "9", "--out-dir"};
  auto a = args, b = args;
  a.push_back(Path("m1"));
  b.push_back(Path("m2"));
  const RunResult r1 = RunCli(a);
  const RunResult r2 = RunCli(b);
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(r1.out.rfind("mixed", 0), 0u);
  EXPECT_EQ(TreeBytes(Path("m1")), TreeBytes(Path("m2")));
  const auto n = [&](const std::string& p) { return fs::file_size(p) / 16; };
  EXPECT_EQ(n(Path("m1/mix_1.bin")) + n(Path("m1/mix_2.bin")), n(Scan(0)) + n(Scan(1)));
  const std::string prov = ReadFileBytes(Path("m1/mix_1.prov"));
  EXPECT_NE(prov.find("000000,"), std::string::npos);
}

TEST_F(CliDataTest, MixWithoutSeedIsUsageError) {
  const RunResult r = RunCli({"mix", "--scan-a", Scan(0), "--labels-a", Labels(0),
                              "--scan-b", Scan(1), "--labels-b", Labels(1), "--out-dir",
                              Path("mix")});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliDataTest, ProjectBoxesHeatmapChain) {
  RunResult r = RunCli({"voxelize", "--scan", Scan(0), "--out", Path("vox.llt1")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Tensor vox = ReadTensor(Path("vox.llt1"));
  EXPECT_EQ(vox.dims, (std::vector<std::uint32_t>{
                          static_cast<std::uint32_t>(fs::file_size(Scan(0)) / 16), 3}));
  r = RunCli({"project", "--scan", Scan(0), "--calib", (seq_ / "calib.txt").string(),
              "--out", Path("map.llt1")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(ReadTensor(Path("map.llt1")).dim(0), 0u);
  r = RunCli({"boxes", "--mapping", Path("map.llt1"), "--labels", Labels(0), "--out",
              Path("boxes.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto boxes = ReadBoxesTsv(Path("boxes.tsv"));
  EXPECT_EQ(boxes.size(), 3u);
  r = RunCli({"heatmap", "--boxes", Path("boxes.tsv"), "--out", Path("hm.llt1"), "--png",
              Path("hm.png")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Tensor hm = ReadTensor(Path("hm.llt1"));
  EXPECT_EQ(hm.dims, (std::vector<std::uint32_t>{376, 1241}));
  EXPECT_EQ(*std::max_element(hm.data.begin(), hm.data.end()), 1.0f);
  EXPECT_EQ(ReadFileBytes(Path("hm.png")).substr(1, 3), "PNG");
}

TEST_F(CliDataTest, MissingCalibrationKey) {
  WriteFileAtomic(Path("bad_calib.txt"), "P2: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  const RunResult r = RunCli({"project", "--scan", Scan(0), "--calib",
                              Path("bad_calib.txt"), "--out", Path("m.llt1")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error[missing-calibration]"), std::string::npos);
}

TEST(CliTest, HeatmapFromMasks) {
  TempDir dir;
  WriteTensor(dir / "masks.llt1", Tensor({2, 1, 3}, {1, 1, 0, 0, 1, 1}));
  const RunResult r = RunCli({"heatmap", "--masks", (dir / "masks.llt1").string(),
                              "--scores", "0.8,0.6", "--out", (dir / "hm.llt1").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadTensor(dir / "hm.llt1").data, (std::vector<float>{0.8f, 1.0f, 0.6f}));
}

TEST(CliTest, DecodeWritesPanopticMap) {
  TempDir dir;
  Tensor sem({4, 4}), centers({4, 4}), offsets({4, 4, 2}), mask({4, 4});
  std::fill(sem.data.begin(), sem.data.end(), 10.0f);
  std::fill(mask.data.begin(), mask.data.end(), 1.0f);
  sem.data[15] = 40.0f;
  centers.data[5] = 0.9f;
  WriteTensor(dir / "sem.llt1", sem);
  WriteTensor(dir / "c.llt1", centers);
  WriteTensor(dir / "o.llt1", offsets);
  WriteTensor(dir / "m.llt1", mask);
  const RunResult r = RunCli({"decode", "--sem", (dir / "sem.llt1").string(), "--centers-hm",
                              (dir / "c.llt1").string(), "--offsets", (dir / "o.llt1").string(),
                              "--fore-mask", (dir / "m.llt1").string(), "--out",
                              (dir / "pan.llt1").string(), "--things", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Tensor pan = ReadTensor(dir / "pan.llt1");
  ASSERT_EQ(pan.dims, (std::vector<std::uint32_t>{2, 4, 4}));
  for (int i = 0; i < 15; ++i) EXPECT_EQ(pan.data[16 + i], 1.0f) << i;
  EXPECT_EQ(pan.data[16 + 15], 0.0f);
  EXPECT_EQ(pan.data[15], 40.0f);
}

TEST(CliTest, EvalPerfectMatchReportsPqOne) {
  TempDir dir;
  const std::vector<PointLabel> labels{{10, 1}, {10, 1}, {10, 2}, {40, 0}, {0, 0}};
  WriteLabels(dir / "gt.label", labels);
  const RunResult r = RunCli({"eval", "--pred", (dir / "gt.label").string(), "--gt",
                              (dir / "gt.label").string(), "--things", "10", "--stuff",
                              "40", "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_EQ(report["pq"].get<double>(), 1.0);
  EXPECT_EQ(report["classes"]["10"]["pq"].get<double>(), 1.0);
  EXPECT_EQ(report["classes"]["40"]["pq"].get<double>(), 1.0);
  EXPECT_EQ(report["miou"].get<double>(), 1.0);
  const RunResult text = RunCli({"eval", "--pred", (dir / "gt.label").string(), "--gt",
                                 (dir / "gt.label").string(), "--things", "10",
                                 "--report", "text"});
  EXPECT_NE(text.out.find("PQ\t1\n"), std::string::npos) << text.out;
}

TEST(CliTest, LossBundle) {
  TempDir dir;
  const std::vector<Tensor> bundle{
      Tensor({2, 3}, {0, 0, 0, 0, 0, 0}), Tensor({2}, {1, 2}),
      Tensor({2}, {0.5f, 0}),             Tensor({2}, {0, 0}),
      Tensor({2, 2}, {1, 0, 0, 0}),       Tensor({2, 2}, {0, 0, 0, 0}),
      Tensor({2}, {0, 0}),                Tensor({2}, {0, 0})};
  WriteTensorBundle(dir / "b.llt1", bundle);
  const RunResult r = RunCli({"loss", "--inputs", (dir / "b.llt1").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_NEAR(report["sem"].get<double>(), std::log(3.0), 1e-9);
  EXPECT_DOUBLE_EQ(report["hm"].get<double>(), 0.125);
  EXPECT_DOUBLE_EQ(report["os"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(report["total"].get<double>(), std::log(3.0) + 12.5 + 2.5);
  const RunResult w = RunCli({"loss", "--inputs", (dir / "b.llt1").string(), "--weights",
                              "0,0,0"});
  EXPECT_NEAR(nlohmann::json::parse(w.out)["total"].get<double>(), std::log(3.0), 1e-9);
}

TEST(CliPipelineTest, WritesStagesAndIsDeterministic) {
  TempDir dir;
  testing::WriteSyntheticSequence(dir / "seq", 5, 1500, 3);
  const std::vector<std::string> base{"pipeline", "--data-dir", (dir / "seq").string(),
                                      "--ratio",  "1",          "--seed", "7", "--p", "1"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out-dir", (dir / "out1").string()});
  b.insert(b.end(), {"--out-dir", (dir / "out2").string(), "--jobs", "3"});
  const RunResult r1 = RunCli(a);
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_EQ(RunCli(b).code, 0);
  auto t1 = TreeBytes(dir / "out1");
  auto t2 = TreeBytes(dir / "out2");
  // run.log echoes the effective config, which includes jobs.
  t1.erase("run.log");
  t2.erase("run.log");
  EXPECT_EQ(t1, t2);
  EXPECT_TRUE(t1.count("split.tsv"));
  EXPECT_TRUE(t1.count("pairs.tsv"));
  EXPECT_TRUE(t1.count("mixed/pair_0000_1.bin"));
  EXPECT_TRUE(t1.count("mixed/pair_0001_2.prov"));
  EXPECT_TRUE(t1.count("voxels/000000.llt1"));
  EXPECT_TRUE(t1.count("mapping/000004.llt1"));
  EXPECT_TRUE(t1.count("boxes/000002.tsv"));
  EXPECT_TRUE(t1.count("heatmap/000003.llt1"));
  EXPECT_NE(t1["pairs.tsv"].find("leftover\t"), std::string::npos);
  EXPECT_EQ(t1["mixed/pair_0000.status"], "mixed\n");
}

TEST(CliPipelineTest, ResumeKeepsFinishedStages) {
  TempDir dir;
  testing::WriteSyntheticSequence(dir / "seq", 3, 500, 4);
  const std::vector<std::string> args{"pipeline", "--data-dir", (dir / "seq").string(),
                                      "--out-dir", (dir / "out").string(), "--seed", "1",
                                      "--ratio", "1"};
  ASSERT_EQ(RunCli(args).code, 0);
  const fs::path box = dir.path() / "out" / "boxes" / "000001.tsv";
  WriteFileAtomic(box, "# sentinel\n");
  auto resume = args;
  resume.push_back("--resume");
  ASSERT_EQ(RunCli(resume).code, 0);
  EXPECT_EQ(ReadFileBytes(box), "# sentinel\n");
  ASSERT_EQ(RunCli(args).code, 0);
  EXPECT_NE(ReadFileBytes(box), "# sentinel\n");
}

TEST(CliPipelineTest, NeedsSeed) {
  TempDir dir;
  testing::WriteSyntheticSequence(dir / "seq", 2, 100, 4);
  const RunResult r = RunCli({"pipeline", "--data-dir", (dir / "seq").string(), "--out-dir",
                              (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
}

}  // namespace
}  // namespace latentlab
