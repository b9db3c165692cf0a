#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "desk_corpus.hpp"

namespace {

namespace fs = std::filesystem;
using i2e::desk::TempDir;

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt";
  const std::string cmd = std::string("\"") + I2E_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          (scratch / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

TEST(Cli, EnergyMarkdown) {
  TempDir tmp;
  const auto r = cli("energy", tmp.path());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("542.86"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("28.68"), std::string::npos) << r.out;
}

TEST(Cli, EnergyJson) {
  TempDir tmp;
  const auto r = cli("energy --format json -T 2", tmp.path());
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["snn_plus_encoder_uj"].get<double>(), 7.17115392, 1e-9) << r.out;
}

TEST(Cli, Kernels) {
  TempDir tmp;
  const auto r = cli("kernels", tmp.path());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["order_labels"], "efghabcd");
}

TEST(Cli, UsageErrors) {
  TempDir tmp;
  EXPECT_EQ(cli("energy --no-such-flag", tmp.path()).code, 1);
  EXPECT_EQ(cli("", tmp.path()).code, 1);
  EXPECT_EQ(cli("kernels --order abc", tmp.path()).code, 1);
  EXPECT_EQ(cli("convert --input x", tmp.path()).code, 1);
}

TEST(Cli, ConvertValidateStats) {
  TempDir in, out, tmp;
  i2e::desk::write_class_tree(in.path(), i2e::desk::desk_corpus(4, 32), 2);
  const std::string args = "convert --input \"" + in.path().string() + "\" --output \"" + out.path().string() +
                           "\" --size 32 -j 2 --augment random --seed 3";
  ASSERT_EQ(cli(args, tmp.path()).code, 0);
  EXPECT_TRUE(fs::exists(out.path() / "manifest.json"));
  EXPECT_EQ(cli("validate \"" + out.path().string() + "\"", tmp.path()).code, 0);
  const auto s = cli("stats --dataset \"" + out.path().string() + "\"", tmp.path());
  EXPECT_EQ(s.code, 0);
  EXPECT_FALSE(s.out.empty());

  // Corrupt a shard: validation must fail with a data error.
  for (const auto& e : fs::directory_iterator(out.path())) {
    if (e.path().extension() == ".i2e") {
      std::fstream f(e.path(), std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(-1, std::ios::end);
      f.put('\x7f');
      break;
    }
  }
  EXPECT_EQ(cli("validate \"" + out.path().string() + "\"", tmp.path()).code, 2);
}

TEST(Cli, MissingInputIsDataError) {
  TempDir tmp;
  EXPECT_EQ(cli("convert --input \"" + (tmp.path() / "nope").string() + "\" --output \"" +
                    (tmp.path() / "o").string() + "\"",
                tmp.path())
                .code,
            2);
}

}  // namespace
