// Copyright 2026 The InstaCluster Authors
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


// End-to-end tests of the insta binary: exit codes, output and trace
// reproducibility across separate invocations.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("insta-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args, const std::string& env = "") {
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + INSTA_BIN + "' " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) return r;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.output.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  std::string read(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

TEST_F(CliTest, ProvisionStatusStopStart) {
  Result r = run("provision --slaves 3 --services spark,hue --seed 4");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("phase=ready"), std::string::npos);
  EXPECT_NE(r.output.find("spark/spark-driver:7077 -> slave-1"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "instacluster.state.json"));

  r = run("status");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("slave-3"), std::string::npos);

  r = run("stop");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("phase=stopped"), std::string::npos);

  r = run("start");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("4 address(es) changed, key generation 2"), std::string::npos);

  r = run("extend --count 2");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("slave-5"), std::string::npos);
  EXPECT_NE(r.output.find("key_generation=3"), std::string::npos);

  r = run("install --services hdfs");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("hdfs/hdfs -> slave-1 slave-2 slave-3 slave-4 slave-5"), std::string::npos);
}

TEST_F(CliTest, OneClusterPerRegion) {
  ASSERT_EQ(run("provision --slaves 1").code, 0);
  const Result r = run("provision --slaves 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("ClusterAlreadyExists"), std::string::npos);
  EXPECT_EQ(run("provision --slaves 1 --region eu-west-1").code, 0);
  EXPECT_EQ(run("status --region eu-west-1").code, 0);
}

TEST_F(CliTest, OperationalErrorsExitOne) {
  Result r = run("status");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("NoCluster"), std::string::npos);
  r = run("provision --services impala");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("InvalidSpec"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("provision --slaves x").code, 2);
  EXPECT_EQ(run("provision --slaves -1").code, 2);
  EXPECT_EQ(run("extend").code, 2);
  EXPECT_EQ(run("install").code, 2);
  EXPECT_EQ(run("validate-spec").code, 2);
  EXPECT_EQ(run("provision --backend aws").code, 2);
  EXPECT_EQ(run("status provision").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, DeactivatedKeyBlocksStop) {
  ASSERT_EQ(run("provision --slaves 2 --deactivate-key").code, 0);
  const Result r = run("stop");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("InactiveCredentials"), std::string::npos);
}

TEST_F(CliTest, CredentialsFromEnvironmentAndFlags) {
  ASSERT_EQ(run("provision --slaves 1", "INSTA_ACCESS_KEY_ID=AKIDENV INSTA_SECRET_KEY=env-secret").code, 0);
  EXPECT_NE(read("instacluster.state.json").find("AKIDENV"), std::string::npos);
  Result r = run("stop --secret-key wrong");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("InactiveCredentials"), std::string::npos);
  EXPECT_EQ(run("stop").code, 0);
}

TEST_F(CliTest, SpecExportValidateReprovision) {
  ASSERT_EQ(run("provision --slaves 2 --services spark --seed 12 --state a.json").code, 0);
  Result r = run("export-spec --state a.json --spec out.cluster.json");
  ASSERT_EQ(r.code, 0) << r.output;
  r = run("validate-spec --spec out.cluster.json");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output, "valid\n");
  r = run("provision --spec out.cluster.json --state b.json");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(run("status --state a.json").output, run("status --state b.json").output);
  EXPECT_EQ(run("export-spec --state b.json").output, read("out.cluster.json"));
}

TEST_F(CliTest, ValidateSpecReportsPaths) {
  write("bad.json", R"({"version":1,"region":"r","slave_count":-1,"services":["spark","impala"],"extra":true})");
  const Result r = run("validate-spec --spec bad.json");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find(".extra: unknown field"), std::string::npos);
  EXPECT_NE(r.output.find(".slave_count: must be >= 0"), std::string::npos);
  EXPECT_NE(r.output.find(".services[1]: unknown service 'impala'"), std::string::npos);
  write("junk.json", "not json");
  EXPECT_EQ(run("validate-spec --spec junk.json").code, 1);
  EXPECT_EQ(run("validate-spec --spec missing.json").code, 2);
}

TEST_F(CliTest, SameArgvSameSeedSameTrace) {
  const std::vector<std::string> steps = {"provision --slaves 3 --seed 21", "stop", "start", "extend --count 2"};
  for (const char* state : {"one.json", "two.json"}) {
    for (const auto& s : steps) {
      ASSERT_EQ(run(s + " --state " + state + " --trace " + state + ".trace").code, 0);
    }
  }
  const std::string a = read("one.json.trace");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read("two.json.trace"));
}

TEST_F(CliTest, CorruptStateFileIsAnError) {
  write("instacluster.state.json", "{ nope");
  const Result r = run("status");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("corrupt"), std::string::npos);
}

}  // namespace
