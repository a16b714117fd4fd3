#include "junta/boolfn.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using json = nlohmann::ordered_json;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(JUNTA_LAB_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

json run_json(const std::string& args, int expected_code = 0) {
  const Result r = run(args);
  EXPECT_EQ(r.code, expected_code) << args << "\n" << r.out;
  return json::parse(r.out);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("junta-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    return {std::istreambuf_iterator<char>(in), {}};
  }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, DeltaReportsExactValue) {
  const json doc = run_json("delta --t 4 --seed 7");
  EXPECT_EQ(doc["command"], "delta");
  EXPECT_EQ(doc["seed"], 7);
  EXPECT_EQ(doc["delta"]["value"], "5/16");
  EXPECT_DOUBLE_EQ(doc["delta"]["float"].get<double>(), 0.3125);
  EXPECT_EQ(doc.items().begin().key(), "command");
  EXPECT_EQ((--doc.end()).key(), "timing");
}

TEST_F(CliTest, VerifyKWiseDistance) {
  const json doc = run_json("verify --lemma k-wise-distance --n 4");
  ASSERT_EQ(doc["instances"].size(), 1U);
  EXPECT_EQ(doc["instances"][0]["lhs"], "1/4");
  EXPECT_EQ(doc["instances"][0]["verdict"], "pass");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("delta").code, 2);
  EXPECT_EQ(run("suite --name bogus").code, 2);
  EXPECT_EQ(run("verify --lemma no-such-lemma").code, 2);
  EXPECT_EQ(run("params --mode tolerant --k 10 --eps1 1/2 --eps2 1/4").code, 2);
  EXPECT_EQ(run("nonsense").code, 2);
}

TEST_F(CliTest, ReportsAreReproducibleApartFromTiming) {
  const std::string args = "advantage --k 8 --ell 2 --r 1 --p 3/16 --strategy random --trials 50 --seed 11";
  json a = run_json(args), b = run_json(args);
  a.erase("timing");
  b.erase("timing");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["seed"], 11);
}

TEST_F(CliTest, SampleAndDistanceRoundTrip) {
  const json s = run_json("sample --k 4 --ell 2 --r 1 --p 1/8 --dist yes --seed 3 --table " + path("f.tt"));
  const junta::TruthTable f = junta::parse_truth_table(read("f.tt"));
  EXPECT_EQ(f.arity(), 6);
  EXPECT_EQ(s["ones"], f.count_ones());
  const json d = run_json("distance --fn " + path("f.tt") + " --k 4");
  EXPECT_EQ(d["dist_to_k_juntas"]["value"], junta::to_string(junta::dist_to_k_juntas(f, 4).distance));
}

TEST_F(CliTest, DistanceOnGivenSet) {
  write("and.tt", junta::truth_table_text(junta::and_function(2)));
  const json d = run_json("distance --fn " + path("and.tt") + " --k 1 --set 2");
  EXPECT_EQ(d["dist_to_k_juntas"]["value"], "1/4");
  EXPECT_EQ(d["dist_to_junta_on_set"]["value"], "1/4");
  EXPECT_EQ(d["dist_to_constants"]["value"], "1/4");
}

TEST_F(CliTest, LiftPreservesDistance) {
  write("f.tt", "n=2\n8\n");
  run_json("lift --fn " + path("f.tt") + " --b 2 --table " + path("F.tt"));
  const junta::TruthTable F = junta::parse_truth_table(read("F.tt"));
  EXPECT_EQ(F.arity(), 4);
  EXPECT_EQ(junta::dist_to_k_juntas(F, 2).distance, junta::Rational(1, 4));
}

TEST_F(CliTest, ColoringIsValid) {
  const json doc = run_json("coloring --ell 4 --d 1 --table " + path("chi.txt"));
  EXPECT_TRUE(doc["valid"].get<bool>());
  EXPECT_LE(doc["num_colors"].get<long>(), 5);
  EXPECT_FALSE(read("chi.txt").empty());
}

TEST_F(CliTest, BallTesterOnConstant) {
  write("c.tt", junta::truth_table_text(junta::TruthTable::constant(10, true)));
  const json doc = run_json("balltester --fn " + path("c.tt") + " --k 2 --eps 1/4 --m 50 --radius 3 --seed 1");
  EXPECT_EQ(doc["decision"], "accept");
}

TEST_F(CliTest, OutFlagWritesFile) {
  const Result r = run("delta --t 2 --out " + path("d.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(read("d.json"))["delta"]["value"], "1/4");
}
