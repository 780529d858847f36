#pragma once

// Self-checks run by `geosched verify`. Each check compares a closed-form
// result with an independent route (enumeration, quadrature, bisection) and
// reports the measured error next to its tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "geosched/exact_path.hpp"
#include "geosched/noise_process.hpp"
#include "geosched/path_geometry.hpp"

namespace geosched::verify {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
  int max_tokens = 3;
  int max_vocab = 3;
  int distributions_per_space = 5;
};

inline CheckResult at_most(std::string name, double measured, double tolerance) {
  return {std::move(name), measured, tolerance, measured <= tolerance};
}

// Seed of the k-th random data distribution on an (N, m) space.
inline std::uint64_t data_seed(std::uint64_t seed, int tokens, int vocab, int k) {
  return seed * 1000003u + static_cast<std::uint64_t>(tokens) * 1000u +
         static_cast<std::uint64_t>(vocab) * 100u + static_cast<std::uint64_t>(k);
}

inline std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    pmf[static_cast<std::size_t>(k)] =
        std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) *
        std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  return pmf;
}

inline std::vector<NoiseProcess> reference_processes() {
  return {NoiseProcess::linear_alpha(), NoiseProcess::constant_beta(1.0),
          NoiseProcess::constant_beta(3.0),
          NoiseProcess::tabulated_beta({0.0, 0.3, 0.7, 1.0}, {0.5, 2.0, 1.0, 4.0})};
}

inline std::vector<CheckResult> geometry_suite() {
  std::vector<CheckResult> out;
  const auto processes = reference_processes();

  double cosine_err = 0.0;
  for (int steps : {1, 2, 3, 4, 64}) {
    const Schedule s = optimal_schedule(NoiseProcess::linear_alpha(), steps);
    for (int i = 0; i <= steps; ++i) {
      const double c = std::cos(i * kPi / (2.0 * steps));
      cosine_err = std::max(cosine_err, std::abs(s.alphas[static_cast<std::size_t>(i)] - c * c));
    }
  }
  out.push_back(at_most("cosine recovery max |alpha_i - cos^2(i pi/2T)|", cosine_err, 1e-12));

  double spread = 0.0;
  for (const auto& np : processes) {
    for (int steps = 1; steps <= 64; ++steps) {
      const Schedule s = optimal_schedule(np, steps);
      const auto lengths = per_step_lengths(np, 1, s);
      const double total = s.total_length(1);
      for (double l : lengths) spread = std::max(spread, std::abs(l - total / steps) / total);
    }
  }
  out.push_back(at_most("geodesic per-step length spread / Lambda(1)", spread, 1e-8));

  double arc_err = 0.0;
  for (const auto& np : processes) {
    const MetricCurve metric = fisher_rao_curve(np, 1);
    for (double t : {0.05, 0.25, 0.5, 0.8, 1.0}) {
      arc_err = std::max(arc_err,
                         std::abs(arc_length_closed(np, 1, t) - arc_length_numeric(metric, t)));
    }
  }
  out.push_back(at_most("closed vs quadrature arc length (20 pairs)", arc_err, 1e-8));

  double geo_err = 0.0;
  for (const auto& np : {processes[0], processes[1]}) {
    for (int steps : {4, 16}) {
      const Schedule closed = optimal_schedule(np, steps);
      const Schedule numeric = geodesic_schedule_numeric(np, steps);
      for (std::size_t i = 0; i < closed.times.size(); ++i) {
        geo_err = std::max(geo_err, std::abs(closed.times[i] - numeric.times[i]));
      }
    }
  }
  out.push_back(at_most("closed-form vs numeric geodesic times", geo_err, 1e-7));

  double geodesic_gap = 0.0;
  double min_other_gap = std::numeric_limits<double>::infinity();
  for (const auto& np : processes) {
    const double total = arc_length_closed(np, 1, 1.0);
    const double lambda_sq = total * total;
    geodesic_gap = std::max(geodesic_gap,
                            discrete_energy(np, 1, [&](double u) {
                              return geodesic_generator_closed(np, u);
                            }, 64) - lambda_sq);
    for (double k : {0.5, 1.0, 2.0, 3.0}) {
      const double e = discrete_energy(np, 1, [k](double u) { return std::pow(u, k); }, 64);
      min_other_gap = std::min(min_other_gap, e - lambda_sq);
    }
  }
  out.push_back(at_most("energy gap of the geodesic generator", std::abs(geodesic_gap), 1e-6));
  out.push_back({"energy of t^k minus Lambda^2 (must exceed 1e-6)", min_other_gap, 1e-6,
                 min_other_gap > 1e-6});

  bool monotone = true;
  for (const auto& np : processes) {
    for (const char* name : {"geodesic", "uniform-time", "uniform-alpha"}) {
      for (int steps = 1; steps <= 1024; steps = steps < 16 ? steps + 1 : steps * 2) {
        try {
          validate_schedule(make_schedule(np, steps, name));
        } catch (const std::exception&) {
          monotone = false;
        }
      }
    }
  }
  out.push_back({"schedule monotonicity and endpoint pinning", monotone ? 0.0 : 1.0, 0.0,
                 monotone});
  return out;
}

inline std::vector<CheckResult> fisher_suite(const SuiteOptions& opt) {
  double rel_err = 0.0;
  double mean_err = 0.0;
  double binom_err = 0.0;
  double norm_err = 0.0;
  const NoiseProcess processes[] = {NoiseProcess::linear_alpha(),
                                    NoiseProcess::constant_beta(1.0)};
  for (int n = 1; n <= opt.max_tokens; ++n) {
    for (int m = 1; m <= opt.max_vocab; ++m) {
      for (int k = 0; k < opt.distributions_per_space; ++k) {
        const DataDistribution data =
            DataDistribution::random_flat({n, m}, data_seed(opt.seed, n, m, k));
        for (const auto& np : processes) {
          for (int step = 1; step <= 9; ++step) {
            const double t = step / 10.0;
            const double closed = fisher_rao_metric(np, n, t);
            const ScoreMoments moments = fisher_score_moments(data, np, t);
            rel_err = std::max(rel_err, std::abs(moments.variance - closed) / closed);
            mean_err = std::max(mean_err, std::abs(moments.mean));
            const auto counts = mask_count_distribution(data, np, t);
            const auto pmf = binomial_pmf(n, np.mask_probability(t));
            for (std::size_t i = 0; i < pmf.size(); ++i) {
              binom_err = std::max(binom_err, std::abs(counts[i] - pmf[i]));
            }
            const PathMarginal q = marginal(data, np, t);
            double total = 0.0;
            for (double p : q.probs) total += p;
            norm_err = std::max(norm_err, std::abs(total - 1.0));
          }
        }
      }
    }
  }
  return {at_most("closed-form vs enumerated Fisher information (relative)", rel_err, 1e-8),
          at_most("Fisher score mean under q_t", mean_err, 1e-10),
          at_most("mask count vs Binomial(N, 1 - alpha_t) pmf", binom_err, 1e-10),
          at_most("marginal normalization", norm_err, 1e-10)};
}

inline std::vector<CheckResult> taylor_suite(const SuiteOptions& opt) {
  const NoiseProcess np = NoiseProcess::linear_alpha();
  const TokenSpace space{2, 2};
  const std::vector<int> origin{0, 1};
  const DataDistribution point = DataDistribution::point_mass(space, origin);
  const DataDistribution random = DataDistribution::random_flat(space, data_seed(opt.seed, 2, 2, 0));
  std::vector<CheckResult> out;
  double fitted = 0.0;
  for (const DataDistribution* data : {&point, &random}) {
    for (double delta : {1e-2, 1e-3, 1e-4}) {
      fitted = std::max(fitted, std::abs(taylor_ratio(*data, np, 0.5, delta) - 1.0) / delta);
    }
  }
  out.push_back(at_most("Taylor ratio at delta=1e-3 (point mass)",
                        std::abs(taylor_ratio(point, np, 0.5, 1e-3) - 1.0), 0.02));
  out.push_back(at_most("Taylor ratio at delta=1e-4 (point mass)",
                        std::abs(taylor_ratio(point, np, 0.5, 1e-4) - 1.0), 1e-3));
  out.push_back(at_most("Taylor ratio at delta=1e-4 (random data)",
                        std::abs(taylor_ratio(random, np, 0.5, 1e-4) - 1.0), 1e-3));
  out.push_back({"fitted C in |ratio - 1| <= C delta", fitted, 0.0, true});
  return out;
}

}  // namespace geosched::verify
