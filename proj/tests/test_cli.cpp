#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aninorm/cli.hpp"
#include "aninorm/model_io.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = aninorm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kModels = ANINORM_MODELS_DIR;

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "aninorm_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

json slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST(Cli, ConvertScalarModel) {
  const auto path = scratch("dt.json");
  const Result r = run({"convert", "--ct", kModels + "/scalar.json", "--T", "1", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = slurp(path);
  EXPECT_DOUBLE_EQ(j["A_T"][0][0].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(j["B_T"][0][0].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["C_T"][0][0].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["D_T"][0][0].get<double>(), 0.5);
}

TEST(Cli, ConvertRoundTrip) {
  const auto dt = scratch("example_dt.json");
  const auto back = scratch("example_back.json");
  ASSERT_EQ(run({"convert", "--ct", kModels + "/example_lcti.json", "--T", "0.1890", "--out",
                 dt.string()}).code, 0);
  const Result r = run({"convert", "--inverse", "--dt", dt.string(), "--T", "0.1890", "--out",
                        back.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json in = slurp(kModels + "/example_lcti.json");
  const json out = slurp(back);
  for (const char* key : {"A", "B", "C", "D"}) {
    const auto& X = in[key];
    for (std::size_t i = 0; i < X.size(); ++i)
      for (std::size_t k = 0; k < X[i].size(); ++k)
        EXPECT_NEAR(out[key][i][k].get<double>(), X[i][k].get<double>(), 1e-10) << key;
  }
}

TEST(Cli, NormOnExampleModel) {
  const Result r = run({"norm", "--ct", kModels + "/example_lcti.json", "--T", "0.1890", "--a", "1.2264"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["norm"].get<double>(), 17.6938, 2e-2);
  EXPECT_GT(j["q"].get<double>(), 0.0);
  EXPECT_LT(j["isometry_residual"].get<double>(), 1e-8);
}

TEST(Cli, UnstableModelIsNumericalFailure) {
  const Result r = run({"norm", "--ct", kModels + "/unstable.json", "--T", "1", "--a", "0.5"});
  EXPECT_EQ(r.code, 2);
  const json e = json::parse(r.err);
  EXPECT_EQ(e["code"], "NotHurwitz");
  EXPECT_TRUE(e.contains("message"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"norm", "--ct", kModels + "/scalar.json", "--T", "1"}).code, 1);  // no --a
  EXPECT_EQ(run({"norm", "--ct", "/nonexistent.json", "--T", "1", "--a", "1"}).code, 1);
  EXPECT_EQ(run({"h2", "--T", "1"}).code, 1);  // no model
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SweepCsv) {
  const Result r = run({"sweep", "--ct", kModels + "/scalar.json", "--T", "1", "--a-values", "0,0.5,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a,norm,q");
  int rows = 0;
  double previous = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const double norm = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(norm, previous);
    previous = norm;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Cli, SingularValuesCsv) {
  const Result r = run({"sv", "--ct", kModels + "/example_lcti.json", "--T", "0.1890", "--grid", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "phi,sigma_1,sigma_2");
}

TEST(Cli, DeterministicOutputs) {
  const std::vector<std::string> args{"hinf", "--ct", kModels + "/example_lcti.json", "--T", "0.1890"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> val{"validate", "--ct", kModels + "/scalar.json", "--T", "1",
                                     "--a", "0.05", "--steps", "20000", "--seed", "5"};
  EXPECT_EQ(run(val).out, run(val).out);
}

TEST(Cli, NumbersKeepSeventeenDigits) {
  EXPECT_EQ(aninorm::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(aninorm::format_double(2.0), "2.0");
}
