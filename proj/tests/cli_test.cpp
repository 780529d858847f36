// Runs the built geosched executable and checks its output and exit codes.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geosched/schedule_io.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(GEOSCHED_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> data_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

TEST(CliScheduleTest, LinearCsv) {
  const auto r = run("schedule --process linear --steps 2 --generator geodesic --format csv");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(data_rows(r.out), (std::vector<std::string>{"t,alpha", "0,1", "0.5,0.5", "1,0"}));
}

TEST(CliScheduleTest, ConstantBetaEndpointPinned) {
  const auto r = run("schedule --process const-beta=1 --steps 4 --generator geodesic");
  ASSERT_EQ(r.exit_code, 0);
  const auto file = geosched::read_schedule_json(r.out);
  ASSERT_EQ(file.schedule.alphas.size(), 5u);
  EXPECT_NEAR(file.schedule.alphas[4], std::exp(-1.0), 1e-12);
  EXPECT_EQ(file.schedule.times[4], 1.0);
}

TEST(CliScheduleTest, OutputReloadsExactly) {
  const auto r = run("schedule --process const-beta=2.5 --steps 33 --generator uniform-alpha");
  ASSERT_EQ(r.exit_code, 0);
  const auto np = geosched::NoiseProcess::constant_beta(2.5);
  const auto expected = geosched::uniform_alpha_schedule(np, 33);
  const auto file = geosched::read_schedule_json(r.out);
  EXPECT_EQ(file.schedule.times, expected.times);
  EXPECT_EQ(file.schedule.alphas, expected.alphas);
  EXPECT_EQ(geosched::schedule_to_json(file), r.out);
  EXPECT_EQ(run("schedule --process const-beta=2.5 --steps 33 --generator uniform-alpha").out,
            r.out);
}

TEST(CliScheduleTest, TabulatedProcessFromFile) {
  const std::string path = testing::TempDir() + "geosched_rates.csv";
  {
    std::ofstream table(path);
    table << "# piecewise rate\nt,beta\n0,1\n0.5,3\n1,2\n";
  }
  const auto r = run("schedule --process table=" + path + " --steps 8");
  ASSERT_EQ(r.exit_code, 0);
  const auto file = geosched::read_schedule_json(r.out);
  EXPECT_EQ(file.process.kind(), geosched::ProcessKind::TabulatedBeta);
  EXPECT_EQ(file.schedule.steps(), 8u);
}

TEST(CliScheduleTest, UsageErrors) {
  EXPECT_EQ(run("schedule --process linear --steps 0").exit_code, 2);
  EXPECT_EQ(run("schedule --process sigmoid --steps 4").exit_code, 2);
  EXPECT_EQ(run("schedule --steps 4 --generator bogus").exit_code, 2);
  EXPECT_EQ(run("schedule --process const-beta=-1 --steps 4").exit_code, 2);
  EXPECT_EQ(run("schedule --process const-beta=1 --steps 4 --generator cosine").exit_code, 2);
  EXPECT_EQ(run("schedule --process table=/nonexistent/rates.csv --steps 4").exit_code, 2);
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
}

TEST(CliVerifyTest, FisherSuitePasses) {
  const auto r = run("verify --suite fisher --seed 7 --max-N 3 --max-vocab 3");
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
  EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos);
}

TEST(CliVerifyTest, GeometryAndTaylorSuitesPass) {
  EXPECT_EQ(run("verify --suite geometry").exit_code, 0);
  EXPECT_EQ(run("verify --suite taylor --seed 7").exit_code, 0);
}

TEST(CliSimulateTest, CsvColumnsAndDeterminism) {
  const std::string args =
      "simulate --data uniform-pair --N 2 --vocab 2 --process linear --steps 1,16 "
      "--schedules geodesic,uniform-time --samples 20000 --seed 1 --no-timing";
  const auto r = run(args);
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "schedule,T,tv,kl,max_step_len,min_step_len,wall_time_s");
  EXPECT_EQ(rows[1].rfind("geodesic,1,", 0), 0u);
  EXPECT_EQ(rows[4].rfind("uniform-time,16,", 0), 0u);
  EXPECT_EQ(run(args).out, r.out);
}

TEST(CliSimulateTest, Errors) {
  EXPECT_EQ(run("simulate --data random=3 --N 12 --vocab 4 --steps 2 --samples 10").exit_code, 3);
  EXPECT_EQ(run("simulate --data nope --steps 2").exit_code, 2);
  EXPECT_EQ(run("simulate --schedules geodesic,bogus --steps 2").exit_code, 2);
  EXPECT_EQ(run("simulate --steps 0").exit_code, 2);
}

}  // namespace
