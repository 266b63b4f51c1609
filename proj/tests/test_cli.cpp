#include "cliffym/cli.hpp"
#include "cliffym/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cliffym;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cliffym_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST(ParseSigns, AcceptedSpellings) {
  EXPECT_EQ(parse_signs("+,-,1,-1,+1"), (std::vector<int>{1, -1, 1, -1, 1}));
  EXPECT_THROW(parse_signs("+,x"), ConfigError);
  EXPECT_THROW(parse_signs(""), ConfigError);
}

TEST(SignVariants, TrailingMinus) {
  const auto v = sign_variants(2);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], (std::vector<int>{1, 1}));
  EXPECT_EQ(v[1], (std::vector<int>{1, -1}));
  EXPECT_EQ(v[2], (std::vector<int>{-1, -1}));
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, kExitConfigError);
  EXPECT_EQ(invoke({"classify", "--bogus"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"classify", "--m", "3"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"build", "--m", "4", "--k", "2", "--signs", "+,?"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"build", "--m", "3", "--k", "2", "--signs", "+,+"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"build", "--m", "1", "--k", "2"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"classify", "--m", "3", "--k", "2", "--fd-step", "1"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"export", "--in", "/nonexistent.json"}).code, kExitConfigError);
  EXPECT_EQ(invoke({"classify", "--m", "3", "--k", "2", "--fd-tol", "-1"}).code, kExitConfigError);
}

TEST(Cli, HelpExitsZero) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("classify"), std::string::npos);
}

TEST(Cli, ClassifyOrderThreeFamily) {
  const auto r = invoke({"classify", "--m", "3", "--k", "2", "--seed", "7", "--samples", "8"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rep = parse_report(r.out);
  EXPECT_TRUE(rep.verdicts.is_NYM_evidence);
  EXPECT_EQ(rep.config.seed, 7u);
  EXPECT_NE(r.err.find("is_NYM_evidence=true"), std::string::npos);
}

TEST(Cli, BuildThenClassifyFromSystemFile) {
  const auto sys = temp_file("system.json");
  ASSERT_EQ(invoke({"build", "--m", "4", "--k", "2", "--signs", "+,-", "--out", sys}).code, kExitOk);
  const auto rep_path = temp_file("report.json");
  const auto r = invoke({"classify", "--system", sys, "--samples", "4", "--out", rep_path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rep = load_report(rep_path);
  EXPECT_EQ(rep.family.block_signs, (std::vector<int>{1, -1}));
  std::filesystem::remove(sys);
  std::filesystem::remove(rep_path);
}

TEST(Cli, ExportReportToCsvAndBack) {
  const auto rep_path = temp_file("export.json");
  ASSERT_EQ(invoke({"classify", "--m", "2", "--k", "2", "--samples", "4", "--out", rep_path}).code, kExitOk);
  const auto csv_path = temp_file("export.csv");
  ASSERT_EQ(invoke({"export", "--in", rep_path, "--out", csv_path}).code, kExitOk);
  const auto csv = slurp(csv_path);
  EXPECT_EQ(parse_rows_csv(csv).size(), kVerdictFields.size());
  const auto table = invoke({"export", "--in", csv_path});
  ASSERT_EQ(table.code, kExitOk);
  const auto table_path = temp_file("table.json");
  {
    std::ofstream(table_path) << table.out;
  }
  EXPECT_EQ(invoke({"export", "--in", table_path}).out, csv);
  for (const auto& p : {rep_path, csv_path, table_path}) std::filesystem::remove(p);
}

TEST(Cli, TruncatedReportExitsTwo) {
  const auto rep_path = temp_file("trunc.json");
  const auto full = invoke({"classify", "--m", "2", "--k", "2", "--samples", "2"}).out;
  {
    std::ofstream(rep_path) << full.substr(0, full.size() / 3);
  }
  const auto r = invoke({"export", "--in", rep_path});
  EXPECT_EQ(r.code, kExitConfigError);
  std::filesystem::remove(rep_path);
}

TEST(Cli, ScanWritesSixRowsPerFamily) {
  const auto r = invoke({"scan", "--m", "2", "--k", "2", "--samples", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  // Only m = 2, k = 2 is constructible within these bounds.
  const auto rows = parse_rows_csv(r.out);
  ASSERT_EQ(rows.size(), kVerdictFields.size());
  EXPECT_EQ(rows[0].m, 2);
  EXPECT_EQ(rows[0].k, 2);
}

TEST(Cli, SequentialRunsAreByteIdentical) {
  const std::vector<std::string> args{"classify", "--m", "4", "--k", "2", "--signs", "+,-",
                                      "--samples", "6", "--seed", "11", "--sequential"};
  EXPECT_EQ(invoke(args).out, invoke(args).out);
}

TEST(Cli, ThresholdsAreStoredInReport) {
  const auto r = invoke({"classify", "--m", "2", "--k", "2", "--samples", "2", "--tol", "1e-6", "--fd-tol", "0.01"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rep = parse_report(r.out);
  EXPECT_EQ(rep.config.thresholds.zero, 1e-6);
  EXPECT_EQ(rep.config.thresholds.fd_relative, 0.01);
  EXPECT_EQ(rep.verdicts.zero_threshold, 1e-6);
}

TEST(Cli, FdCrosscheckBreachExitsOne) {
  // A tolerance below the attainable FD agreement is an invariant breach.
  const auto r = invoke({"classify", "--m", "2", "--k", "2", "--samples", "2", "--fd-crosscheck", "--fd-tol", "1e-15"});
  EXPECT_EQ(r.code, kExitInvariantBreach);
}

TEST(Cli, SelftestPasses) {
  const auto r = invoke({"selftest", "--samples", "4"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_NE(r.out.find("selftest passed"), std::string::npos);
}
