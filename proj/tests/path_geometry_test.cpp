#include "geosched/path_geometry.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "geosched/exact_path.hpp"

namespace geosched {
namespace {

std::vector<NoiseProcess> families() {
  return {NoiseProcess::linear_alpha(), NoiseProcess::constant_beta(1.0),
          NoiseProcess::constant_beta(4.0),
          NoiseProcess::tabulated_beta({0.0, 0.5, 1.0}, {1.0, 3.0, 0.5})};
}

// Lambda(1) for constant-beta(1), N = 1: 2 (pi/2 - arcsin sqrt(1/e)),
// evaluated with mpmath at 30 digits and by independent quadrature.
constexpr double kConstBetaOneLength = 1.8382133145871768;
// Numeric geodesic phi*(1/2) for constant-beta(1) (mpmath findroot on the
// quadrature of sqrt(delta)), and the corresponding alpha.
constexpr double kConstBetaOneMidTime = 0.21907019637983863;
constexpr double kConstBetaOneMidAlpha = 0.80326532985631671;

TEST(FisherRaoMetricTest, ClosedFormValues) {
  const auto linear = NoiseProcess::linear_alpha();
  EXPECT_NEAR(fisher_rao_metric(linear, 2, 0.5), 8.0, 1e-12);
  EXPECT_NEAR(fisher_rao_metric(linear, 1, 0.5), 4.0, 1e-12);
  EXPECT_NEAR(fisher_rao_metric(NoiseProcess::constant_beta(1.0), 1, std::log(2.0)), 1.0, 1e-12);
}

TEST(FisherRaoMetricTest, MatchesEnumerationOracle) {
  // The enumerated variance of the score is the oracle for the closed form.
  const TokenSpace space{2, 1};
  const DataDistribution data = DataDistribution::uniform_over(space, {{0, 0}});
  EXPECT_NEAR(empirical_fisher(data, NoiseProcess::linear_alpha(), 0.5), 8.0, 1e-10);
  const DataDistribution one = DataDistribution::uniform_over({1, 1}, {{0}});
  EXPECT_NEAR(empirical_fisher(one, NoiseProcess::constant_beta(1.0), std::log(2.0)), 1.0, 1e-10);
}

TEST(FisherRaoMetricTest, SingularEndpoints) {
  EXPECT_THROW(fisher_rao_metric(NoiseProcess::linear_alpha(), 1, 0.0), SingularityError);
  EXPECT_THROW(fisher_rao_metric(NoiseProcess::linear_alpha(), 1, 1.0), SingularityError);
  EXPECT_THROW(fisher_rao_metric(NoiseProcess::linear_alpha(), 0, 0.5), std::invalid_argument);
  EXPECT_NO_THROW(fisher_rao_metric(NoiseProcess::constant_beta(1.0), 1, 1.0));
}

TEST(ArcLengthTest, ClosedFormValues) {
  const auto linear = NoiseProcess::linear_alpha();
  EXPECT_NEAR(arc_length_closed(linear, 1, 1.0), M_PI, 1e-15);
  EXPECT_NEAR(arc_length_closed(linear, 4, 0.5), M_PI, 1e-15);
  for (const auto& np : families()) EXPECT_EQ(arc_length_closed(np, 7, 0.0), 0.0);
  EXPECT_NEAR(arc_length_closed(NoiseProcess::constant_beta(1.0), 1, 1.0), kConstBetaOneLength,
              1e-14);
}

TEST(ArcLengthTest, NumericMatchesClosed) {
  EXPECT_NEAR(arc_length_numeric(fisher_rao_curve(NoiseProcess::linear_alpha(), 1), 1.0, 1e-9),
              M_PI, 1e-9);
  EXPECT_NEAR(arc_length_numeric(MetricCurve{[](double) { return 4.0; }}, 0.5, 1e-9), 1.0, 1e-12);
  EXPECT_NEAR(
      arc_length_numeric(fisher_rao_curve(NoiseProcess::constant_beta(1.0), 1), 1.0, 1e-9),
      kConstBetaOneLength, 1e-9);
  // 20 (process, t) pairs.
  for (const auto& np : families()) {
    const auto metric = fisher_rao_curve(np, 3);
    for (double t : {0.01, 0.2, 0.5, 0.9, 1.0}) {
      EXPECT_NEAR(arc_length_numeric(metric, t), arc_length_closed(np, 3, t), 1e-8)
          << to_string(np.kind()) << " t=" << t;
    }
  }
}

TEST(ArcLengthTest, NonIntegrableMetricIsReported) {
  const MetricCurve inverse_square{[](double t) { return 1.0 / (t * t); }, true, false};
  EXPECT_THROW(arc_length_numeric(inverse_square, 1.0), IntegrationError);
}

TEST(GeodesicGeneratorTest, NumericValues) {
  const MetricCurve flat{[](double) { return 2.0; }};
  EXPECT_EQ(geodesic_generator_numeric(flat, 0.0), 0.0);
  EXPECT_EQ(geodesic_generator_numeric(flat, 1.0), 1.0);
  EXPECT_NEAR(geodesic_generator_numeric(flat, 0.3), 0.3, 1e-9);
  const auto linear = fisher_rao_curve(NoiseProcess::linear_alpha(), 1);
  EXPECT_NEAR(geodesic_generator_numeric(linear, 0.5), 0.5, 1e-9);
  const auto c1 = fisher_rao_curve(NoiseProcess::constant_beta(1.0), 1);
  EXPECT_NEAR(geodesic_generator_numeric(c1, 0.5), kConstBetaOneMidTime, 1e-9);
}

TEST(OptimalScheduleTest, LinearAlphaIsCosine) {
  const Schedule two = optimal_schedule(NoiseProcess::linear_alpha(), 2);
  EXPECT_EQ(two.alphas, (std::vector<double>{1.0, 0.5, 0.0}));
  EXPECT_EQ(two.times, (std::vector<double>{0.0, 0.5, 1.0}));
  const Schedule four = optimal_schedule(NoiseProcess::linear_alpha(), 4);
  EXPECT_NEAR(four.alphas[1], (1 + std::sqrt(2.0) / 2) / 2, 1e-15);
  EXPECT_EQ(cosine_schedule(1).alphas, (std::vector<double>{1.0, 0.0}));
  EXPECT_NEAR(cosine_schedule(3).alphas[1], 0.75, 1e-15);
  EXPECT_EQ(cosine_schedule(2).generator, ScheduleGenerator::GeodesicClosedForm);
}

TEST(OptimalScheduleTest, ConstantBetaMatchesNumericGeodesic) {
  const auto np = NoiseProcess::constant_beta(1.0);
  const Schedule s = optimal_schedule(np, 2);
  EXPECT_NEAR(s.alphas[1], kConstBetaOneMidAlpha, 1e-12);
  EXPECT_NEAR(s.times[1], geodesic_generator_numeric(fisher_rao_curve(np, 1), 0.5), 1e-8);
  EXPECT_EQ(s.alphas[2], np.terminal_alpha());
  EXPECT_EQ(s.times[2], 1.0);
}

TEST(OptimalScheduleTest, IndependentOfTokenCount) {
  // The construction never sees N; the grid must be identical whatever N the
  // caller later uses, and per-step lengths scale exactly with sqrt(N).
  for (const auto& np : families()) {
    const Schedule s = optimal_schedule(np, 8);
    const auto l1 = per_step_lengths(np, 1, s);
    for (int n : {2, 16}) {
      const auto ln = per_step_lengths(np, n, s);
      for (std::size_t i = 0; i < l1.size(); ++i) {
        EXPECT_NEAR(ln[i], std::sqrt(n) * l1[i], 1e-13);
      }
    }
  }
}

TEST(OptimalScheduleTest, RejectsZeroSteps) {
  EXPECT_THROW(optimal_schedule(NoiseProcess::linear_alpha(), 0), std::invalid_argument);
  EXPECT_THROW(uniform_time_schedule(NoiseProcess::linear_alpha(), 0), std::invalid_argument);
}

TEST(BaselineScheduleTest, Values) {
  const auto linear = NoiseProcess::linear_alpha();
  EXPECT_EQ(uniform_time_schedule(linear, 4).times,
            (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(uniform_alpha_schedule(linear, 2).times, (std::vector<double>{0.0, 0.5, 1.0}));
  const auto c1 = NoiseProcess::constant_beta(1.0);
  const Schedule ua = uniform_alpha_schedule(c1, 2);
  EXPECT_EQ(ua.alphas[0], 1.0);
  EXPECT_NEAR(ua.alphas[1], (1 + std::exp(-1.0)) / 2, 1e-15);
  EXPECT_NEAR(ua.alphas[2], std::exp(-1.0), 1e-15);
}

TEST(PerStepLengthsTest, GeodesicStepsAreEqual) {
  const auto linear = NoiseProcess::linear_alpha();
  for (double l : per_step_lengths(linear, 1, cosine_schedule(4))) EXPECT_NEAR(l, M_PI / 4, 1e-10);
}

TEST(PerStepLengthsTest, UniformTimeStepsAreUnequal) {
  // Lambda at 0, .25, .5, .75, 1 for linear-alpha: steps pi/3, pi/6, pi/6, pi/3.
  const auto l = per_step_lengths(NoiseProcess::linear_alpha(), 1,
                                  uniform_time_schedule(NoiseProcess::linear_alpha(), 4));
  ASSERT_EQ(l.size(), 4u);
  EXPECT_NEAR(l[0], M_PI / 3, 1e-12);
  EXPECT_NEAR(l[1], M_PI / 6, 1e-12);
  EXPECT_NEAR(l[2], M_PI / 6, 1e-12);
  EXPECT_NEAR(l[3], M_PI / 3, 1e-12);
}

TEST(PerStepLengthsTest, SingleStepIsWholeLength) {
  for (const auto& np : families()) {
    const auto l = per_step_lengths(np, 5, optimal_schedule(np, 1));
    ASSERT_EQ(l.size(), 1u);
    EXPECT_NEAR(l[0], arc_length_closed(np, 5, 1.0), 1e-15);
  }
}

TEST(GeometryPropertyTest, GeodesicEqualizesEveryFamily) {
  for (const auto& np : families()) {
    for (int steps = 1; steps <= 64; ++steps) {
      const Schedule s = optimal_schedule(np, steps);
      const double total = arc_length_closed(np, 1, 1.0);
      const auto lengths = per_step_lengths(np, 1, s);
      double sum = 0.0;
      for (double l : lengths) {
        EXPECT_LE(std::abs(l - total / steps), 1e-8 * total);
        sum += l;
      }
      EXPECT_NEAR(sum, total, 1e-12);
    }
  }
}

TEST(GeometryPropertyTest, ClosedFormAgreesWithTheoremOneEngine) {
  for (const auto& np : families()) {
    const Schedule closed = optimal_schedule(np, 8);
    const Schedule numeric = geodesic_schedule_numeric(np, 8);
    for (std::size_t i = 0; i < closed.times.size(); ++i) {
      EXPECT_NEAR(closed.times[i], numeric.times[i], 1e-7);
    }
  }
}

TEST(GeometryPropertyTest, EnergyBoundsLengthSquared) {
  for (const auto& np : families()) {
    const double lambda = arc_length_closed(np, 1, 1.0);
    for (double k : {0.5, 1.0, 2.0, 3.0}) {
      const double e = discrete_energy(np, 1, [k](double u) { return std::pow(u, k); }, 64);
      EXPECT_GT(e - lambda * lambda, 1e-6) << "k=" << k;
    }
    const double geo =
        discrete_energy(np, 1, [&](double u) { return geodesic_generator_closed(np, u); }, 64);
    EXPECT_NEAR(geo, lambda * lambda, 1e-6);
  }
}

TEST(GeometryPropertyTest, MonotoneAndPinnedForAllGenerators) {
  for (const auto& np : families()) {
    for (int steps = 1; steps <= 1024; steps += (steps < 32 ? 1 : 61)) {
      for (const char* name : {"geodesic", "uniform-time", "uniform-alpha"}) {
        const Schedule s = make_schedule(np, steps, name);
        EXPECT_NO_THROW(validate_schedule(s)) << name << " T=" << steps;
        EXPECT_EQ(s.times.size(), static_cast<std::size_t>(steps) + 1);
      }
    }
  }
}

TEST(MakeScheduleTest, CosineNeedsVanishingTerminalAlpha) {
  EXPECT_THROW(make_schedule(NoiseProcess::constant_beta(1.0), 4, "cosine"),
               std::invalid_argument);
  EXPECT_THROW(make_schedule(NoiseProcess::linear_alpha(), 4, "bogus"), std::invalid_argument);
}

}  // namespace
}  // namespace geosched
