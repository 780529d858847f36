#pragma once

// Fisher-Rao geometry of the masked-diffusion probability path and the
// schedules derived from it.
//
// For a path t -> q_t with scalar metric delta(t), the arc length is
// Lambda(s) = int_0^s sqrt(delta(r)) dr and the constant-speed generator is
// phi*(u) = Lambda^{-1}(u * Lambda(1)). For masked diffusion with N tokens
//
//   I(t)      = N alpha'(t)^2 / (alpha(t) (1 - alpha(t)))
//   Lambda(t) = 2 sqrt(N) (pi/2 - arcsin sqrt(alpha(t)))
//
// so alpha(phi*(u)) = cos^2(u (pi/2 - arcsin sqrt(alpha(1)))), independent
// of N.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include "geosched/errors.hpp"
#include "geosched/noise_process.hpp"
#include "geosched/quadrature.hpp"

namespace geosched {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Scalar Riemannian metric on the unit time interval.
struct MetricCurve {
  std::function<double(double)> evaluate;
  bool singular_at_zero = false;
  bool singular_at_one = false;
};

enum class ScheduleGenerator { GeodesicClosedForm, GeodesicNumeric, UniformTime, UniformAlpha };

inline std::string_view to_string(ScheduleGenerator g) {
  switch (g) {
    case ScheduleGenerator::GeodesicClosedForm:
      return "geodesic-closed-form";
    case ScheduleGenerator::GeodesicNumeric:
      return "geodesic-numeric";
    case ScheduleGenerator::UniformTime:
      return "uniform-time";
    case ScheduleGenerator::UniformAlpha:
      return "uniform-alpha";
  }
  return "unknown";
}

inline std::optional<ScheduleGenerator> parse_schedule_generator(std::string_view name) {
  if (name == "geodesic-closed-form") return ScheduleGenerator::GeodesicClosedForm;
  if (name == "geodesic-numeric") return ScheduleGenerator::GeodesicNumeric;
  if (name == "uniform-time") return ScheduleGenerator::UniformTime;
  if (name == "uniform-alpha") return ScheduleGenerator::UniformAlpha;
  return std::nullopt;
}

// A discretisation grid 0 = t_0 < ... < t_T = 1 with alpha at each point.
// length_per_sqrt_n is Lambda(1) / sqrt(N); the grid never depends on N.
struct Schedule {
  std::vector<double> times;
  std::vector<double> alphas;
  double length_per_sqrt_n = 0.0;
  ScheduleGenerator generator = ScheduleGenerator::GeodesicClosedForm;

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  double total_length(int token_count) const {
    return std::sqrt(static_cast<double>(token_count)) * length_per_sqrt_n;
  }
};

inline void validate_schedule(const Schedule& s) {
  if (s.times.size() < 2 || s.times.size() != s.alphas.size()) {
    throw std::invalid_argument("schedule needs T+1 >= 2 matching times and alphas");
  }
  if (s.times.front() != 0.0 || s.times.back() != 1.0) {
    throw std::invalid_argument("schedule times must start at 0 and end at 1");
  }
  if (s.alphas.front() != 1.0) {
    throw std::invalid_argument("schedule alphas must start at 1");
  }
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    if (!(s.times[i] > s.times[i - 1])) {
      throw std::invalid_argument("schedule times must be strictly increasing");
    }
    if (!(s.alphas[i] < s.alphas[i - 1])) {
      throw std::invalid_argument("schedule alphas must be strictly decreasing");
    }
  }
  if (!(s.length_per_sqrt_n >= 0.0) || !std::isfinite(s.length_per_sqrt_n)) {
    throw std::invalid_argument("schedule length must be finite and nonnegative");
  }
}

namespace detail {

inline void check_token_count(int n) {
  if (n < 1) throw std::invalid_argument("token count N must be positive");
}

inline void check_steps(int steps) {
  if (steps < 1) throw std::invalid_argument("step count T must be at least 1");
}

// pi/2 - arcsin sqrt(alpha(t)), evaluated as atan2 to stay accurate at both
// ends of the path.
inline double arccos_sqrt_alpha(const NoiseProcess& np, double t) {
  return std::atan2(std::sqrt(np.mask_probability(t)), std::sqrt(np.alpha(t)));
}

}  // namespace detail

// I(t) = N beta(t)^2 alpha(t) / (1 - alpha(t)), equal to N alpha'^2 / (alpha (1-alpha)).
inline double fisher_rao_metric(const NoiseProcess& np, int token_count, double t) {
  detail::check_token_count(token_count);
  const double masked = np.mask_probability(t);
  const double kept = np.alpha(t);
  if (!(masked > 0.0)) throw SingularityError("Fisher-Rao metric diverges where alpha = 1");
  if (!(kept > 0.0)) throw SingularityError("Fisher-Rao metric diverges where alpha = 0");
  const double b = np.beta(t);
  return token_count * b * b * kept / masked;
}

inline MetricCurve fisher_rao_curve(const NoiseProcess& np, int token_count) {
  detail::check_token_count(token_count);
  return MetricCurve{[np, token_count](double t) { return fisher_rao_metric(np, token_count, t); },
                     true, np.terminal_alpha() == 0.0};
}

// Lambda(t) = 2 sqrt(N) (pi/2 - arcsin sqrt(alpha_t)).
inline double arc_length_closed(const NoiseProcess& np, int token_count, double t) {
  detail::check_token_count(token_count);
  return 2.0 * std::sqrt(static_cast<double>(token_count)) * detail::arccos_sqrt_alpha(np, t);
}

// int_0^t sqrt(delta(r)) dr by adaptive quadrature; flagged endpoint
// singularities are removed by a change of variables.
inline double arc_length_numeric(const MetricCurve& metric, double t,
                                 double tol = quadrature::kDefaultTolerance) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("arc length: time must lie in [0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("arc length: tolerance must be positive");
  if (t == 0.0) return 0.0;
  auto speed = [&](double r) { return std::sqrt(metric.evaluate(r)); };
  return quadrature::integrate_singular(speed, 0.0, t, metric.singular_at_zero,
                                        metric.singular_at_one && t == 1.0, tol);
}

// phi*(u) = Lambda^{-1}(u Lambda(1)) by bisection on s -> Lambda(s).
// Returns s with |Lambda(s) - u Lambda(1)| <= tol Lambda(1).
inline double geodesic_generator_numeric(const MetricCurve& metric, double u,
                                         double tol = quadrature::kDefaultTolerance) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("geodesic generator: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double quad_tol = 0.1 * tol;
  const double total = arc_length_numeric(metric, 1.0, quad_tol);
  const double target = u * total;
  double lo = 0.0;
  double hi = 1.0;
  double best = u;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kBisectionMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gap = arc_length_numeric(metric, mid, quad_tol * total) - target;
    if (std::abs(gap) < best_gap) {
      best_gap = std::abs(gap);
      best = mid;
    }
    if (std::abs(gap) <= 1e-3 * tol * total) break;
    if (gap < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

// The constant-speed generator in closed form: the time at which
// alpha = cos^2(u (pi/2 - arcsin sqrt(alpha_1))).
inline double geodesic_generator_closed(const NoiseProcess& np, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("geodesic generator: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  const double sweep = 2.0 * detail::arccos_sqrt_alpha(np, 1.0);
  // cos^2(x) = (1 + cos 2x) / 2 lands on exact values at common grid points.
  const double a = 0.5 * (1.0 + std::cos(u * sweep));
  return np.time_at_alpha(a);
}

namespace detail {

inline Schedule schedule_from_alphas(const NoiseProcess& np, std::vector<double> alphas,
                                     ScheduleGenerator generator) {
  Schedule s;
  const std::size_t steps = alphas.size() - 1;
  s.times.resize(alphas.size());
  alphas.front() = 1.0;
  alphas.back() = np.terminal_alpha();
  s.times.front() = 0.0;
  s.times.back() = 1.0;
  for (std::size_t i = 1; i < steps; ++i) s.times[i] = np.time_at_alpha(alphas[i]);
  s.alphas = std::move(alphas);
  s.length_per_sqrt_n = 2.0 * arccos_sqrt_alpha(np, 1.0);
  s.generator = generator;
  return s;
}

}  // namespace detail

// Fisher-Rao optimal schedule: alpha_i = cos^2((i/T)(pi/2 - arcsin sqrt(alpha_1))),
// t_i = F^{-1}(-log alpha_i). Endpoints are pinned to (0, 1) and (1, alpha_1).
inline Schedule optimal_schedule(const NoiseProcess& np, int steps) {
  detail::check_steps(steps);
  const double sweep = 2.0 * detail::arccos_sqrt_alpha(np, 1.0);
  std::vector<double> alphas(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double u = static_cast<double>(i) / steps;
    alphas[static_cast<std::size_t>(i)] = 0.5 * (1.0 + std::cos(u * sweep));
  }
  return detail::schedule_from_alphas(np, std::move(alphas), ScheduleGenerator::GeodesicClosedForm);
}

// alpha_i = cos^2(i pi / 2T): the optimal schedule of the linear-alpha process.
inline Schedule cosine_schedule(int steps) {
  return optimal_schedule(NoiseProcess::linear_alpha(), steps);
}

// Optimal schedule computed from the metric alone: quadrature for Lambda and
// bisection for its inverse. Used to cross-check the closed form.
inline Schedule geodesic_schedule_numeric(const NoiseProcess& np, int steps,
                                          double tol = quadrature::kDefaultTolerance) {
  detail::check_steps(steps);
  const MetricCurve metric = fisher_rao_curve(np, 1);
  Schedule s;
  s.times.resize(static_cast<std::size_t>(steps) + 1);
  s.alphas.resize(s.times.size());
  for (int i = 0; i <= steps; ++i) {
    const double u = static_cast<double>(i) / steps;
    const double t = geodesic_generator_numeric(metric, u, tol);
    s.times[static_cast<std::size_t>(i)] = t;
    s.alphas[static_cast<std::size_t>(i)] = np.alpha(t);
  }
  s.length_per_sqrt_n = arc_length_numeric(metric, 1.0, tol);
  s.generator = ScheduleGenerator::GeodesicNumeric;
  return s;
}

inline Schedule uniform_time_schedule(const NoiseProcess& np, int steps) {
  detail::check_steps(steps);
  Schedule s;
  s.times.resize(static_cast<std::size_t>(steps) + 1);
  s.alphas.resize(s.times.size());
  for (int i = 0; i <= steps; ++i) {
    const double t = i == steps ? 1.0 : static_cast<double>(i) / steps;
    s.times[static_cast<std::size_t>(i)] = t;
    s.alphas[static_cast<std::size_t>(i)] = np.alpha(t);
  }
  s.length_per_sqrt_n = 2.0 * detail::arccos_sqrt_alpha(np, 1.0);
  s.generator = ScheduleGenerator::UniformTime;
  return s;
}

// alpha_i = 1 - (i/T)(1 - alpha_1).
inline Schedule uniform_alpha_schedule(const NoiseProcess& np, int steps) {
  detail::check_steps(steps);
  const double drop = 1.0 - np.terminal_alpha();
  std::vector<double> alphas(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    alphas[static_cast<std::size_t>(i)] = 1.0 - static_cast<double>(i) * drop / steps;
  }
  return detail::schedule_from_alphas(np, std::move(alphas), ScheduleGenerator::UniformAlpha);
}

// Schedule by command-line name: geodesic | cosine | geodesic-numeric |
// uniform-time | uniform-alpha. "cosine" requires alpha(1) = 0.
inline Schedule make_schedule(const NoiseProcess& np, int steps, std::string_view name) {
  if (name == "geodesic") return optimal_schedule(np, steps);
  if (name == "cosine") {
    if (np.terminal_alpha() != 0.0) {
      throw std::invalid_argument("cosine schedule requires a process with alpha(1) = 0");
    }
    return cosine_schedule(steps);
  }
  if (name == "geodesic-numeric") return geodesic_schedule_numeric(np, steps);
  if (name == "uniform-time") return uniform_time_schedule(np, steps);
  if (name == "uniform-alpha") return uniform_alpha_schedule(np, steps);
  throw std::invalid_argument("unknown schedule generator '" + std::string(name) + "'");
}

// [Lambda(t_{i+1}) - Lambda(t_i)] for i = 0..T-1.
inline std::vector<double> per_step_lengths(const NoiseProcess& np, int token_count,
                                            const Schedule& sched) {
  detail::check_token_count(token_count);
  std::vector<double> out;
  if (sched.times.size() < 2) return out;
  out.reserve(sched.times.size() - 1);
  double prev = arc_length_closed(np, token_count, sched.times.front());
  for (std::size_t i = 1; i < sched.times.size(); ++i) {
    const double next = arc_length_closed(np, token_count, sched.times[i]);
    out.push_back(next - prev);
    prev = next;
  }
  return out;
}

// Energy of a reparametrisation phi discretised on T uniform steps:
// E_T(phi) = T sum_i (Lambda(phi((i+1)/T)) - Lambda(phi(i/T)))^2.
// By Cauchy-Schwarz E_T >= Lambda(1)^2, with equality iff all increments
// are equal, i.e. for the constant-speed generator.
template <typename Reparam>
double discrete_energy(const NoiseProcess& np, int token_count, Reparam&& phi, int steps) {
  detail::check_token_count(token_count);
  detail::check_steps(steps);
  double energy = 0.0;
  double prev = arc_length_closed(np, token_count, phi(0.0));
  for (int i = 1; i <= steps; ++i) {
    const double next =
        arc_length_closed(np, token_count, phi(static_cast<double>(i) / steps));
    const double step = next - prev;
    energy += step * step;
    prev = next;
  }
  return energy * steps;
}

}  // namespace geosched
