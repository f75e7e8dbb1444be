#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = diamlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) v.push_back(line);
  return v;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  bool header_seen = false;
  for (const auto& l : lines(csv)) {
    if (l.empty() || l[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(l);
  }
  return rows;
}

std::vector<double> split_numbers(const std::string& row) {
  std::vector<double> v;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  return v;
}

}  // namespace

TEST(CliSimulate, CsvRowsAndDeterminism) {
  const std::vector<std::string> args = {"simulate", "--family", "uniform-ball", "--d",      "2",     "--n",
                                         "1000",     "--reps",   "10",           "--seed",   "7",     "--format",
                                         "csv"};
  const auto a = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const auto ls = lines(a.out);
  EXPECT_EQ(ls[0], "# diamlab simulate");
  EXPECT_EQ(ls[1].rfind("# config: ", 0), 0u);
  const auto config = json::parse(ls[1].substr(10));
  EXPECT_EQ(config.at("seed"), 7);
  EXPECT_EQ(config.at("distribution").at("family"), "uniform-ball");
  EXPECT_EQ(ls[2], "replication,n_points,diameter,scaled_deficit");
  EXPECT_EQ(data_rows(a.out).size(), 10u);
  EXPECT_EQ(ls.back().rfind("# summary: ", 0), 0u);
  EXPECT_TRUE(json::parse(ls.back().substr(11)).at("ks").is_number());

  const auto b = run(args);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliSimulate, ThreadCountDoesNotChangeOutput) {
  const std::vector<std::string> base = {"simulate", "--family", "uniform-sphere", "--d", "3", "--n", "400",
                                         "--reps", "40", "--seed", "3", "--process", "poisson"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto many = base;
  many.insert(many.end(), {"--threads", "5"});
  EXPECT_EQ(run(one).out, run(many).out);

  setenv("DIAMLAB_THREADS", "3", 1);
  const auto env = run(base);
  unsetenv("DIAMLAB_THREADS");
  EXPECT_EQ(env.out, run(one).out);
}

TEST(CliSimulate, SegmentsDiametersAtMostTwo) {
  const auto r = run({"simulate", "--family", "segments", "--d", "2", "--dirs", "1,0;0,1", "--probs", "0.5,0.5",
                      "--n", "500", "--reps", "20", "--seed", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 20u);
  for (const auto& row : rows) {
    const auto v = split_numbers(row);
    EXPECT_LE(v[2], 2.0);
    EXPECT_GE(v[3], 0.0);
  }
}

TEST(CliSimulate, ConfigErrors) {
  EXPECT_EQ(run({"simulate", "--family", "uniform-ball", "--n", "10", "--reps", "2", "--seed", "1"}).code, 2);
  EXPECT_EQ(run({"simulate", "--family", "uniform-ball", "--d", "2", "--n", "10", "--reps", "2", "--seed", "1",
                 "--bogus", "3"})
                .code,
            2);
  EXPECT_EQ(run({"simulate", "--family", "uniform-ball", "--d", "2", "--alpha", "1", "--n", "10", "--reps", "2",
                 "--seed", "1"})
                .code,
            2);
  EXPECT_EQ(run({"simulate", "--family", "segments", "--d", "2", "--dirs", "1,x", "--probs", "1", "--n", "10",
                 "--reps", "2", "--seed", "1"})
                .code,
            2);
  EXPECT_EQ(run({"simulate", "--family", "sector", "--d", "3", "--cap-center", "0,0,1", "--cap-angle", "1e-4",
                 "--n", "10", "--reps", "2", "--seed", "1"})
                .code,
            2);
  EXPECT_EQ(run({"simulate", "--family", "uniform-ball", "--d", "2", "--n", "2.5", "--reps", "2", "--seed", "1"}).code,
            2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(CliSimulate, NumericalFailureExitCode) {
  const auto r = run({"simulate", "--family", "uniform-ball", "--d", "2", "--n", "1e-9", "--reps", "3", "--seed",
                      "1", "--process", "poisson"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numerical error"), std::string::npos);
}

TEST(CliSimulate, SpecFileInput) {
  const auto path = std::filesystem::temp_directory_path() / "diamlab_cli_spec.json";
  {
    std::ofstream f(path);
    f << R"({"family": "sector", "d": 3, "cap_center": [0, 0, 1], "cap_angle": 0.8,
             "base": {"family": "uniform-sphere", "d": 3}})";
  }
  const auto r = run({"simulate", "--spec", path.string(), "--n", "200", "--reps", "5", "--seed", "2", "--format",
                      "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc.at("config").at("distribution").at("family"), "sector");
  EXPECT_EQ(doc.at("rows").size(), 5u);
  std::filesystem::remove(path);
}

TEST(CliLimit, PlanarBallRowsAndEnvelope) {
  const auto r = run({"limit", "--family", "uniform-ball", "--d", "2", "--t-min", "0", "--t-max", "5", "--t-steps",
                      "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("t,cdf,envelope_lower,envelope_upper\n"), std::string::npos);
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(split_numbers(rows[0])[1], 0.0);
  const auto at1 = split_numbers(rows[10]);
  EXPECT_EQ(at1[0], 1.0);
  EXPECT_NEAR(at1[1], 0.28788, 5e-5);
  for (const auto& row : rows) {
    const auto v = split_numbers(row);
    EXPECT_LE(v[2], v[1]);
    EXPECT_LE(v[1], v[3]);
  }
}

TEST(CliLimit, ExplicitLaws) {
  auto r = run({"limit", "--law", "segments", "--probs", "1", "--t-max", "2", "--t-steps", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(split_numbers(data_rows(r.out)[1])[1], 0.26424, 5e-6);
  EXPECT_EQ(r.out.find("envelope"), std::string::npos);

  r = run({"limit", "--law", "continuous", "--gamma", "1", "--sigma0", "1", "--t-max", "2", "--t-steps", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(split_numbers(data_rows(r.out)[1])[1], 1 - std::exp(-1.0), 1e-15);

  r = run({"limit", "--law", "segments-zeta", "--t-max", "3", "--t-steps", "1"});
  ASSERT_EQ(r.code, 0) << r.err;

  EXPECT_EQ(run({"limit", "--law", "continuous", "--gamma", "1"}).code, 2);
  EXPECT_EQ(run({"limit", "--law", "continuous", "--gamma", "-1", "--sigma0", "1"}).code, 2);
  EXPECT_EQ(run({"limit", "--law", "segments", "--probs", "0.8,0.8"}).code, 2);
  EXPECT_EQ(run({"limit", "--law", "weibull"}).code, 2);
  EXPECT_EQ(run({"limit", "--family", "uniform-ball", "--d", "2", "--t-min", "-1"}).code, 2);
}

TEST(CliCompare, Triple) {
  const auto r = run({"compare", "--family", "uniform-ball", "--d", "2", "--n", "2000", "--reps", "100", "--seed",
                      "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  const auto& row = doc.at("rows").at(0);
  for (const char* k : {"ks_poisson", "ks_binomial", "ks_cross"}) {
    EXPECT_GE(row.at(k).get<double>(), 0.0);
    EXPECT_LE(row.at(k).get<double>(), 1.0);
  }
}

TEST(CliTable, RowsPerN) {
  const auto r = run({"table", "--family", "sphere", "--d", "3", "--n-list", "50,500", "--reps", "100", "--seed",
                      "2", "--process", "poisson"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\nn,ks\n"), std::string::npos);
  EXPECT_EQ(data_rows(r.out).size(), 2u);
  EXPECT_EQ(run({"table", "--family", "sphere", "--d", "3", "--n-list", "500,50", "--seed", "2"}).code, 2);
}

TEST(CliOracle, PassCount) {
  const auto r = run({"oracle", "--cases", "40", "--seed", "9", "--max-points", "300", "--segment-reps", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("40/40 passed"), std::string::npos);
  EXPECT_NE(r.out.find("\"result\":\"40/40 passed\""), std::string::npos);
}

TEST(CliOutput, FileWithLfEndings) {
  const auto path = std::filesystem::temp_directory_path() / "diamlab_cli_out.csv";
  const auto r = run({"limit", "--law", "segments-zeta", "--t-steps", "4", "--output", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(data_rows(text).size(), 5u);
  std::filesystem::remove(path);
}

TEST(CliOutput, SeventeenSignificantDigits) {
  const auto r = run({"limit", "--law", "continuous", "--gamma", "1", "--sigma0", "1", "--t-min", "1", "--t-max",
                      "1", "--t-steps", "1"});
  const auto v = data_rows(r.out)[0];
  EXPECT_EQ(v.substr(v.find(',') + 1), "0.39346934028736658");
}
