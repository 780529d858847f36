#include "geosched/schedule_io.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>

namespace geosched {
namespace {

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_THROW(format_double(INFINITY), std::invalid_argument);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = unif(gen);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
}

TEST(ScheduleJsonTest, LinearGeodesicDocument) {
  const ScheduleFile file{NoiseProcess::linear_alpha(), cosine_schedule(2)};
  const std::string expected =
      "{\n"
      "  \"format_version\": \"geo-sched/1\",\n"
      "  \"process\": {\"kind\": \"linear-alpha\", \"params\": []},\n"
      "  \"steps\": 2,\n"
      "  \"times\": [0, 0.5, 1],\n"
      "  \"alphas\": [1, 0.5, 0],\n"
      "  \"total_arc_length_per_sqrtN\": 3.141592653589793,\n"
      "  \"generator\": \"geodesic-closed-form\"\n"
      "}\n";
  EXPECT_EQ(schedule_to_json(file), expected);
}

// write -> read -> write is byte-identical and the reloaded grid is exact,
// across families, generators and step counts.
TEST(ScheduleJsonTest, RoundTripProperty) {
  const NoiseProcess processes[] = {
      NoiseProcess::linear_alpha(), NoiseProcess::constant_beta(0.37),
      NoiseProcess::tabulated_beta({0.0, 0.25, 1.0}, {1.0, 2.0, 3.0})};
  for (const auto& np : processes) {
    for (const char* gen : {"geodesic", "uniform-time", "uniform-alpha"}) {
      for (int steps : {1, 7, 100}) {
        const ScheduleFile file{np, make_schedule(np, steps, gen)};
        const std::string text = schedule_to_json(file);
        const ScheduleFile back = read_schedule_json(text);
        EXPECT_EQ(back.schedule.times, file.schedule.times);
        EXPECT_EQ(back.schedule.alphas, file.schedule.alphas);
        EXPECT_EQ(back.schedule.length_per_sqrt_n, file.schedule.length_per_sqrt_n);
        EXPECT_EQ(back.schedule.generator, file.schedule.generator);
        EXPECT_EQ(back.process.params(), np.params());
        EXPECT_EQ(schedule_to_json(back), text);
      }
    }
  }
}

TEST(ScheduleJsonTest, RejectsInvalidDocuments) {
  std::string good = schedule_to_json({NoiseProcess::linear_alpha(), cosine_schedule(2)});
  auto mutate = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(read_schedule_json("not json"), std::invalid_argument);
  EXPECT_THROW(read_schedule_json(mutate("geo-sched/1", "geo-sched/2")), std::invalid_argument);
  EXPECT_THROW(read_schedule_json(mutate("[0, 0.5, 1]", "[0, 0.7, 0.6]")), std::invalid_argument);
  EXPECT_THROW(read_schedule_json(mutate("[1, 0.5, 0]", "[1, 0.5, 0.6]")), std::invalid_argument);
  EXPECT_THROW(read_schedule_json(mutate("\"steps\": 2", "\"steps\": 3")), std::invalid_argument);
  EXPECT_THROW(read_schedule_json(mutate("linear-alpha", "sigmoid")), std::invalid_argument);
  EXPECT_THROW(read_schedule_json(mutate("\"generator\"", "\"gen\"")), std::invalid_argument);
}

TEST(ScheduleCsvTest, Layout) {
  std::ostringstream out;
  write_schedule_csv(out, {NoiseProcess::linear_alpha(), cosine_schedule(2)});
  const std::string text = out.str();
  EXPECT_NE(text.find("# format_version: geo-sched/1\n"), std::string::npos);
  EXPECT_NE(text.find("t,alpha\n0,1\n0.5,0.5\n1,0\n"), std::string::npos);
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(RateTableTest, ParsesCommentsAndHeader) {
  std::istringstream in("# rates\nt,beta\n0, 1\n0.5,2\n\n1,3\n");
  EXPECT_EQ(read_rate_table(in), (std::vector<double>{0, 1, 0.5, 2, 1, 3}));
  std::istringstream bad("0,1\n0.5;2\n");
  EXPECT_THROW(read_rate_table(bad), std::invalid_argument);
  std::istringstream garbage("0,1\nx,y\n");
  EXPECT_THROW(read_rate_table(garbage), std::invalid_argument);
}

}  // namespace
}  // namespace geosched
