// Copyright 2026 The IQDZ Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "iqdz/cli/cli.h"
#include "iqdz/common/byte_io.h"
#include "iqdz/metrics/image.h"

namespace iqdz::cli {
namespace {

namespace fs = std::filesystem;
const std::string kData = IQDZ_TEST_DATA_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunArgs(std::vector<std::string> args) {
  args.insert(args.begin(), "iqdz");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("iqdz_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  // Small grayscale model; a few steps keep it fast.
  std::string TrainSmall(const std::string& name, const std::string& seed = "3") {
    const Result r = RunArgs({"train", "--steps", "20", "--seed", seed, "--set", "patch_size=4",
                              "--set", "latent_dim=4", "--set", "hidden_layers=1", "--set",
                              "hidden_width=16", "--set", "synthetic_images=8", "--set",
                              "synthetic_size=32", "--out", Path(name), "--log", Path(name + ".csv")});
    EXPECT_EQ(r.code, 0) << r.err;
    return Path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, SelftestPasses) {
  const Result r = RunArgs({"selftest"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("coder: PASS"), std::string::npos);
  EXPECT_EQ(r.err.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  const Result r = RunArgs({"encode", "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(r.err.rfind("iqdz: error[usage]: ", 0), 0u) << r.err;
  EXPECT_EQ(RunArgs({}).code, kExitUsage);
}

TEST_F(CliTest, HelpExitsZero) {
  const Result r = RunArgs({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("rdsweep"), std::string::npos);
}

TEST_F(CliTest, MissingInputIsIoFailure) {
  const std::string model = TrainSmall("m.iqdzm");
  const Result r = RunArgs({"encode", "--model", model, "--in", Path("none.ppm"), "--out", Path("x")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_EQ(r.err.rfind("iqdz: error[io]: ", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, InvalidSettingIsUsageError) {
  const Result r = RunArgs({"train", "--alpha", "1.5", "--out", Path("m")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(r.err.rfind("iqdz: error[configuration]: ", 0), 0u) << r.err;
}

TEST_F(CliTest, CorpusFlagsAreExclusive) {
  const Result r = RunArgs({"train", "--balanced-lattice", "--mixed-sources", "--out", Path("m")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("mutually exclusive"), std::string::npos) << r.err;
  const Result c = RunArgs({"train", "--mixed-sources", "--set", "channels=3", "--out", Path("m")});
  EXPECT_EQ(c.code, kExitUsage);
}

TEST_F(CliTest, EncodeDecodeRoundTrip) {
  const std::string model = TrainSmall("m.iqdzm");
  const std::string img = kData + "/fixture_gray.pgm";
  ASSERT_EQ(RunArgs({"encode", "--model", model, "--in", img, "--q", "1.0", "--offset", "0.45",
                     "--out", Path("img.iqdz")}).code, 0);
  const Result r = RunArgs({"decode", "--model", model, "--in", Path("img.iqdz"), "--out", Path("out.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const metrics::Image rec = metrics::LoadPnm(Path("out.pgm"));
  EXPECT_EQ(rec.width, 256);
  EXPECT_EQ(rec.height, 256);
  EXPECT_EQ(rec.channels, 1);
}

TEST_F(CliTest, TrainingIsByteIdenticalForTheSameSeed) {
  const std::string a = TrainSmall("a.iqdzm");
  const std::string b = TrainSmall("b.iqdzm");
  const std::string c = TrainSmall("c.iqdzm", "4");
  EXPECT_EQ(ReadFileBytes(a), ReadFileBytes(b));
  EXPECT_NE(ReadFileBytes(a), ReadFileBytes(c));
  EXPECT_EQ(ReadFileBytes(a + ".csv"), ReadFileBytes(b + ".csv"));
  const std::vector<uint8_t> log = ReadFileBytes(a + ".csv");
  EXPECT_EQ(std::string(log.begin(), log.begin() + 23), "step,L,rate_bits,d1,d2\n");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 21);
}

TEST_F(CliTest, RdSweepWritesTheFullGrid) {
  const std::string model = TrainSmall("m.iqdzm");
  fs::create_directories(dir_ / "imgs");
  fs::copy_file(kData + "/fixture_gray.pgm", dir_ / "imgs" / "a.pgm");
  const Result r = RunArgs({"rdsweep", "--model", model, "--dir", Path("imgs"), "--out", Path("rd.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::vector<uint8_t> csv = ReadFileBytes(Path("rd.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 34);
  EXPECT_EQ(std::string(csv.begin(), csv.begin() + 31), "Q,offset,bpp,psnr_db,msssim_db\n");
}

TEST_F(CliTest, RdSweepAcceptsExplicitGrids) {
  const std::string model = TrainSmall("m.iqdzm");
  const Result r = RunArgs({"rdsweep", "--model", model, "--in", kData + "/fixture_gray.pgm",
                            "--q", "1,2", "--offset", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  EXPECT_NE(r.out.find("\n2,0.5,"), std::string::npos);
}

TEST_F(CliTest, IsometryCheckReportsConstants) {
  const std::string model = TrainSmall("m.iqdzm");
  const Result r = RunArgs({"isometry-check", "--model", model, "--set", "patch_size=4", "--set",
                            "synthetic_images=4", "--set", "synthetic_size=32", "--samples", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("expected_c=750\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("samples=10\n"), std::string::npos);
  EXPECT_NE(r.out.find("max_offdiag_ratio="), std::string::npos);
}

TEST_F(CliTest, GradcheckPasses) {
  const Result r = RunArgs({"gradcheck", "--seed", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(" PASS\n"), std::string::npos);
}

}  // namespace
}  // namespace iqdz::cli
