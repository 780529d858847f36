#pragma once

// Forward masking-rate families. A process is fixed by its rate beta(t);
// everything else follows from the survival function
//
//   alpha(t) = exp(-F(t)),   F(t) = int_0^t beta(s) ds.
//
// alpha(t) is the probability that a token is still unmasked at time t.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geosched/errors.hpp"

namespace geosched {

enum class ProcessKind { LinearAlpha, ConstantBeta, TabulatedBeta };

inline std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::LinearAlpha:
      return "linear-alpha";
    case ProcessKind::ConstantBeta:
      return "constant-beta";
    case ProcessKind::TabulatedBeta:
      return "tabulated-beta";
  }
  return "unknown";
}

inline std::optional<ProcessKind> parse_process_kind(std::string_view name) {
  if (name == "linear-alpha") return ProcessKind::LinearAlpha;
  if (name == "constant-beta") return ProcessKind::ConstantBeta;
  if (name == "tabulated-beta") return ProcessKind::TabulatedBeta;
  return std::nullopt;
}

// Iteration cap for bisection on monotone maps.
inline constexpr int kBisectionMaxIterations = 200;
// |F(F^{-1}(y)) - y| <= kInverseTolerance * (1 + y).
inline constexpr double kInverseTolerance = 1e-10;

class NoiseProcess {
 public:
  // alpha(t) = 1 - t, beta(t) = 1/(1-t); alpha(1) = 0 under exp(-inf) = 0.
  static NoiseProcess linear_alpha() { return NoiseProcess(ProcessKind::LinearAlpha); }

  // beta(t) = c, alpha(t) = exp(-c t).
  static NoiseProcess constant_beta(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("constant-beta rate must be positive and finite");
    }
    NoiseProcess np(ProcessKind::ConstantBeta);
    np.rate_ = rate;
    return np;
  }

  // Piecewise-linear beta through (knots[k], betas[k]); the knots must run
  // from exactly 0 to exactly 1. F is accumulated with the trapezoid rule,
  // which is exact for the linear interpolant.
  static NoiseProcess tabulated_beta(std::vector<double> knots, std::vector<double> betas) {
    if (knots.size() != betas.size()) {
      throw std::invalid_argument("tabulated-beta needs one rate per knot");
    }
    if (knots.size() < 2) {
      throw std::invalid_argument("tabulated-beta needs at least 2 knots");
    }
    if (knots.front() != 0.0 || knots.back() != 1.0) {
      throw std::invalid_argument("tabulated-beta knots must span [0, 1]");
    }
    for (std::size_t k = 1; k < knots.size(); ++k) {
      if (!(knots[k] > knots[k - 1])) {
        throw std::invalid_argument("tabulated-beta knots must be strictly increasing");
      }
    }
    for (double b : betas) {
      if (!(b > 0.0) || !std::isfinite(b)) {
        throw std::invalid_argument("tabulated-beta rates must be positive and finite");
      }
    }
    NoiseProcess np(ProcessKind::TabulatedBeta);
    np.cumulative_.resize(knots.size());
    np.cumulative_[0] = 0.0;
    for (std::size_t k = 1; k < knots.size(); ++k) {
      np.cumulative_[k] =
          np.cumulative_[k - 1] + 0.5 * (betas[k - 1] + betas[k]) * (knots[k] - knots[k - 1]);
    }
    np.knots_ = std::move(knots);
    np.betas_ = std::move(betas);
    return np;
  }

  ProcessKind kind() const { return kind_; }

  // Parameters in the flat form accepted by make_process.
  std::vector<double> params() const {
    switch (kind_) {
      case ProcessKind::LinearAlpha:
        return {};
      case ProcessKind::ConstantBeta:
        return {rate_};
      case ProcessKind::TabulatedBeta: {
        std::vector<double> flat;
        flat.reserve(2 * knots_.size());
        for (std::size_t k = 0; k < knots_.size(); ++k) {
          flat.push_back(knots_[k]);
          flat.push_back(betas_[k]);
        }
        return flat;
      }
    }
    return {};
  }

  double beta(double t) const {
    check_time(t);
    switch (kind_) {
      case ProcessKind::LinearAlpha:
        return t == 1.0 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - t);
      case ProcessKind::ConstantBeta:
        return rate_;
      case ProcessKind::TabulatedBeta: {
        const std::size_t k = segment(t);
        const double w = (t - knots_[k]) / (knots_[k + 1] - knots_[k]);
        return betas_[k] + w * (betas_[k + 1] - betas_[k]);
      }
    }
    return 0.0;
  }

  // F(t); +inf at t = 1 for linear-alpha.
  double cumulative_rate(double t) const {
    check_time(t);
    switch (kind_) {
      case ProcessKind::LinearAlpha:
        return t == 1.0 ? std::numeric_limits<double>::infinity() : -std::log1p(-t);
      case ProcessKind::ConstantBeta:
        return rate_ * t;
      case ProcessKind::TabulatedBeta: {
        const std::size_t k = segment(t);
        return cumulative_[k] + 0.5 * (betas_[k] + beta(t)) * (t - knots_[k]);
      }
    }
    return 0.0;
  }

  double alpha(double t) const {
    check_time(t);
    if (kind_ == ProcessKind::LinearAlpha) return 1.0 - t;
    return std::exp(-cumulative_rate(t));
  }

  // 1 - alpha(t), the per-token masking probability. Computed without
  // cancellation so that it stays accurate as t -> 0.
  double mask_probability(double t) const {
    check_time(t);
    if (kind_ == ProcessKind::LinearAlpha) return t;
    return -std::expm1(-cumulative_rate(t));
  }

  // d alpha / dt = -beta(t) alpha(t). For linear-alpha this is -1 on all of
  // [0, 1], including the endpoint where beta diverges.
  double alpha_dot(double t) const {
    check_time(t);
    if (kind_ == ProcessKind::LinearAlpha) return -1.0;
    return -beta(t) * alpha(t);
  }

  double terminal_alpha() const { return alpha(1.0); }
  double terminal_rate() const { return cumulative_rate(1.0); }

  // F^{-1}(y) for y in [0, F(1)]. y = +inf maps to t = 1 when F(1) = +inf.
  double inverse_cumulative_rate(double y) const {
    if (std::isnan(y) || y < 0.0) {
      throw DomainError("F^{-1}: argument must be nonnegative");
    }
    const double top = terminal_rate();
    if (y > top) {
      throw DomainError("F^{-1}: argument exceeds F(1)");
    }
    switch (kind_) {
      case ProcessKind::LinearAlpha:
        return std::isinf(y) ? 1.0 : -std::expm1(-y);
      case ProcessKind::ConstantBeta:
        return std::min(1.0, y / rate_);
      case ProcessKind::TabulatedBeta:
        break;
    }
    if (y == 0.0) return 0.0;
    if (y == top) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    const double tol = kInverseTolerance * (1.0 + y);
    for (int it = 0; it < kBisectionMaxIterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;  // interval collapsed to adjacent doubles
      if (cumulative_rate(mid) < y) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double flo = std::abs(cumulative_rate(lo) - y);
    const double fhi = std::abs(cumulative_rate(hi) - y);
    const double t = flo <= fhi ? lo : hi;
    if (std::min(flo, fhi) > tol) {
      throw DomainError("F^{-1}: bisection did not reach tolerance");
    }
    return t;
  }

  // The time at which alpha(t) == a, for a in [alpha(1), 1]. Exact
  // algebraic inverses are used where they exist so that schedule grids
  // hit round values (e.g. alpha = 0.5 -> t = 0.5 for linear-alpha).
  double time_at_alpha(double a) const {
    if (std::isnan(a) || a > 1.0 || a < 0.0) {
      throw DomainError("time_at_alpha: alpha must lie in [0, 1]");
    }
    if (a == 1.0) return 0.0;
    if (a <= terminal_alpha()) {
      if (a < terminal_alpha() && terminal_alpha() - a > 1e-15) {
        throw DomainError("time_at_alpha: alpha below alpha(1)");
      }
      return 1.0;
    }
    if (kind_ == ProcessKind::LinearAlpha) return 1.0 - a;
    return inverse_cumulative_rate(std::min(-std::log(a), terminal_rate()));
  }

 private:
  explicit NoiseProcess(ProcessKind kind) : kind_(kind) {}

  static void check_time(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw DomainError("time must lie in [0, 1]");
    }
  }

  std::size_t segment(double t) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const auto k = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    return std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, knots_.size() - 2);
  }

  ProcessKind kind_;
  double rate_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> betas_;
  std::vector<double> cumulative_;
};

// Builds a process from a family tag and flat parameter list:
//   linear-alpha   []
//   constant-beta  [c]
//   tabulated-beta [t0, b0, t1, b1, ...]
inline NoiseProcess make_process(ProcessKind kind, std::span<const double> params) {
  switch (kind) {
    case ProcessKind::LinearAlpha:
      if (!params.empty()) throw std::invalid_argument("linear-alpha takes no parameters");
      return NoiseProcess::linear_alpha();
    case ProcessKind::ConstantBeta:
      if (params.size() != 1) throw std::invalid_argument("constant-beta takes one rate");
      return NoiseProcess::constant_beta(params[0]);
    case ProcessKind::TabulatedBeta: {
      if (params.size() % 2 != 0) {
        throw std::invalid_argument("tabulated-beta takes (t, beta) pairs");
      }
      std::vector<double> knots;
      std::vector<double> betas;
      for (std::size_t i = 0; i + 1 < params.size(); i += 2) {
        knots.push_back(params[i]);
        betas.push_back(params[i + 1]);
      }
      return NoiseProcess::tabulated_beta(std::move(knots), std::move(betas));
    }
  }
  throw std::invalid_argument("unknown process kind");
}

}  // namespace geosched
