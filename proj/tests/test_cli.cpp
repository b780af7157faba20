#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mubcert/cli.hpp"
#include "mubcert/io.hpp"

namespace mubcert {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mubcert");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mubcert_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, MubD4PairMetrics) {
  const auto r = run({"mub", "--construction", "paper-d4", "--out", path("pair.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto doc = json::parse(read_text_file(path("pair.json")));
  EXPECT_NEAR(doc["metrics"]["overlap_entropy"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(doc["metrics"]["norm_sum_first"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(doc["metrics"]["s_max"].get<double>(), 0.5, 1e-12);
  EXPECT_TRUE(doc["metrics"]["unbiased"].get<bool>());
  EXPECT_TRUE(fs::exists(path("pair.json.manifest.json")));
}

TEST_F(CliTest, MubFourierAndBadDimension) {
  const auto r = run({"mub", "--construction", "fourier", "--d", "3"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(json::parse(r.out)["metrics"]["unbiased"].get<bool>());
  EXPECT_EQ(run({"mub", "--construction", "fourier", "--d", "1"}).code, kExitArgs);
  EXPECT_EQ(run({"mub", "--construction", "sic"}).code, kExitArgs);
  EXPECT_EQ(run({"bogus"}).code, kExitArgs);
}

TEST_F(CliTest, IdealSimulationCertifiesFixedPoint) {
  ASSERT_EQ(run({"simulate", "--ideal", "--rounds", "60000", "--seed", "1", "--out", path("c.csv")}).code, kExitOk);
  const auto r = run({"certify", "--counts", path("c.csv"), "--d", "4", "--out", path("r.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rep = json::parse(read_text_file(path("r.json")));
  EXPECT_DOUBLE_EQ(rep["asp"]["value"].get<double>(), 0.75);
  EXPECT_NEAR(rep["hs_lower"]["value"].get<double>(), 4.0, 1e-10);
  EXPECT_NEAR(rep["norm_sum_lower"]["value"].get<double>(), 4.0, 1e-10);
  EXPECT_NEAR(rep["smax_upper"]["value"].get<double>(), 0.5, 1e-10);
  EXPECT_NEAR(rep["incompat_upper"]["value"].get<double>(), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(rep["entropic_lower"]["value"].get<double>(), 2.0, 1e-10);
}

TEST_F(CliTest, SimulateIsByteReproducibleAndReplayable) {
  const std::vector<std::string> base = {"simulate", "--seed", "7", "--rounds", "3000"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.csv")});
  b.insert(b.end(), {"--out", path("b.csv")});
  ASSERT_EQ(run(a).code, kExitOk);
  ASSERT_EQ(run(b).code, kExitOk);
  EXPECT_EQ(read_text_file(path("a.csv")), read_text_file(path("b.csv")));

  const auto before = read_text_file(path("a.csv"));
  fs::remove(path("a.csv"));
  ASSERT_EQ(run({"replay", "--manifest", path("a.csv.manifest.json")}).code, kExitOk);
  EXPECT_EQ(read_text_file(path("a.csv")), before);
}

TEST_F(CliTest, UnseededRunRecordsItsSeed) {
  ASSERT_EQ(run({"simulate", "--rounds", "2000", "--out", path("u.csv")}).code, kExitOk);
  const auto manifest = json::parse(read_text_file(path("u.csv.manifest.json")));
  ASSERT_TRUE(manifest["seed"].is_number_unsigned());
  const auto first = read_text_file(path("u.csv"));
  ASSERT_EQ(run({"replay", "--manifest", path("u.csv.manifest.json")}).code, kExitOk);
  EXPECT_EQ(read_text_file(path("u.csv")), first);
}

TEST_F(CliTest, ConfigErrorsExitThree) {
  write_text_file(path("bad.json"), R"({"mu": -0.2})");
  EXPECT_EQ(run({"simulate", "--config", path("bad.json"), "--seed", "1"}).code, kExitConfig);
  write_text_file(path("junk.json"), "{not json");
  EXPECT_EQ(run({"simulate", "--config", path("junk.json"), "--seed", "1"}).code, kExitConfig);
  EXPECT_EQ(run({"simulate", "--config", path("missing.json"), "--seed", "1"}).code, kExitConfig);
}

TEST_F(CliTest, CertifyDirectAsp) {
  const auto r = run({"certify", "--asp", "0.74924", "--sigma", "0.00011", "--d", "4", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rep = json::parse(r.out);
  EXPECT_NEAR(rep["hs_lower"]["value"].get<double>(), 3.99122, 5e-4);
  const auto low = run({"certify", "--asp", "0.70", "--sigma", "0.001", "--d", "4", "--format", "json"});
  ASSERT_EQ(low.code, kExitOk);
  const auto lrep = json::parse(low.out);
  EXPECT_TRUE(lrep["norm_sum_lower"].is_null());
  EXPECT_TRUE(lrep["incompat_upper"].is_null());
  EXPECT_FALSE(lrep["hs_lower"].is_null());
  EXPECT_FALSE(lrep["entropic_lower"].is_null());
  const auto table = run({"certify", "--asp", "0.75", "--sigma", "0"});
  EXPECT_NE(table.out.find("eta* <="), std::string::npos);
}

TEST_F(CliTest, CertifyDataErrorsExitFour) {
  EXPECT_EQ(run({"certify", "--asp", "0.4", "--d", "4"}).code, kExitData);
  EXPECT_EQ(run({"certify", "--asp", "1.2", "--d", "4"}).code, kExitData);
  write_text_file(path("dup.csv"), "i,j,y,outcome,count\n1,1,1,1,3\n1,1,1,1,3\n");
  EXPECT_EQ(run({"certify", "--counts", path("dup.csv"), "--d", "4"}).code, kExitData);
  EXPECT_EQ(run({"certify", "--counts", path("nothere.csv"), "--d", "4"}).code, kExitData);
  EXPECT_EQ(run({"certify", "--d", "4"}).code, kExitArgs);
}

TEST_F(CliTest, FigureDataFromIdealCounts) {
  ASSERT_EQ(run({"simulate", "--ideal", "--rounds", "60000", "--out", path("c.csv"), "--seed", "3"}).code, kExitOk);
  ASSERT_EQ(run({"figure-data", "--counts", path("c.csv"), "--out-prefix", path("fig")}).code, kExitOk);
  const auto outcomes = read_text_file(path("fig_outcomes.csv"));
  std::istringstream lines(outcomes);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(header, "i,j,measurement,p1,p2,p3,p4,detections");
  EXPECT_EQ(first.substr(0, 15), "1,1,A,0.75,0.08");

  std::istringstream asp_lines(read_text_file(path("fig_asp.csv")));
  std::string line;
  std::getline(asp_lines, line);
  int rows = 0;
  std::string red_line;
  while (std::getline(asp_lines, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_DOUBLE_EQ(std::stod(cells[2]), 0.75);
    EXPECT_DOUBLE_EQ(std::stod(cells[3]), 0.75);
    if (red_line.empty()) red_line = cells[5];
    EXPECT_EQ(cells[5], red_line);
  }
  EXPECT_EQ(rows, 16);
  write_text_file(path("bad.csv"), "garbage\n");
  EXPECT_EQ(run({"figure-data", "--counts", path("bad.csv")}).code, kExitData);
}

}  // namespace
}  // namespace mubcert
