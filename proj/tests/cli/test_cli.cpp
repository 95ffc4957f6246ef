#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#ifndef AUXPOWER_PATH
#error "AUXPOWER_PATH must name the auxpower binary"
#endif

namespace {

const std::filesystem::path kTmp = std::filesystem::temp_directory_path() / "auxtest_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(AUXPOWER_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { std::filesystem::create_directories(kTmp); }
  void TearDown() override { std::filesystem::remove_all(kTmp); }
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("ztest --reps 20 --n 50"), 0);
  EXPECT_EQ(run("ztest --reps 20 --alpha 1.5"), 2);
  EXPECT_EQ(run("ztest --reps 20 --alpha 0"), 2);
  EXPECT_EQ(run("chisq --reps 20 --t -3"), 2);
  EXPECT_EQ(run("ztest --aux sideways"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("ztest --reps 20 --out /nonexistent-dir/x.csv"), 1);
  EXPECT_EQ(run("power --config /nonexistent-dir/c.json"), 1);
  const auto bad = kTmp / "bad.json";
  std::ofstream(bad) << R"({"reps": -4})";
  EXPECT_EQ(run("power --config " + bad.string()), 2);
}

TEST_F(Cli, CsvFormatAndDeterminism) {
  const auto a = kTmp / "a.csv";
  const auto b = kTmp / "b.csv";
  ASSERT_EQ(run("gain-table --reps 200 --n 100,200 --seed 9 --out " + a.string()), 0);
  ASSERT_EQ(run("gain-table --reps 200 --n 100,200 --seed 9 --workers 3 --out " + b.string()), 0);
  const std::string text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "test,n,t,accept_classic,accept_aux,gain_ratio,log_gain_ratio,predicted_xn");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST_F(Cli, ConfigFileDrivesPower) {
  const auto cfg = kTmp / "c.json";
  std::ofstream(cfg) << R"({"test": "chisq-aux-condmean", "n": [120], "reps": 100, "t": 4.0})";
  const auto out = kTmp / "p.csv";
  ASSERT_EQ(run("power --config " + cfg.string() + " --out " + out.string()), 0);
  const std::string text = slurp(out);
  EXPECT_NE(text.find("\nchisq-aux-condmean,120,4,"), std::string::npos) << text;
}

TEST_F(Cli, EcdfAndRake) {
  const auto e = kTmp / "e.csv";
  ASSERT_EQ(run("ecdf --reps 50 --n 100 --out " + e.string()), 0);
  EXPECT_EQ(slurp(e).rfind("test,n,statistic,value,ecdf\n", 0), 0u);
  const auto r = kTmp / "r.csv";
  ASSERT_EQ(run("rake --reps 50 --n 100 --out " + r.string()), 0);
  EXPECT_FALSE(slurp(r).empty());
}
