#pragma once

// Forward masking, the exact Bayes denoiser and an ancestral reverse
// sampler, plus the harness that scores schedules by the distance between
// generated samples and the true data law.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "geosched/errors.hpp"
#include "geosched/exact_path.hpp"
#include "geosched/noise_process.hpp"
#include "geosched/path_geometry.hpp"
#include "geosched/rng.hpp"

namespace geosched {

using SequenceState = std::vector<int>;

// Per-position categorical distributions over the m clean tokens.
using PositionMarginals = std::vector<std::vector<double>>;

// x_t ~ q(x_t | x_0): each token survives with probability alpha(t) and is
// otherwise replaced by the mask.
inline SequenceState forward_sample(const TokenSpace& space, std::span<const int> clean,
                                    const NoiseProcess& np, double t, CounterRng& rng) {
  if (clean.size() != static_cast<std::size_t>(space.length)) {
    throw std::invalid_argument("forward_sample: sequence length does not match token space");
  }
  for (int tok : clean) {
    if (tok < 0 || tok >= space.vocab) {
      throw std::invalid_argument("forward_sample: input must be a clean sequence");
    }
  }
  const double kept = np.alpha(t);
  SequenceState out(clean.begin(), clean.end());
  for (int& tok : out) {
    if (!rng.bernoulli(kept)) tok = space.mask();
  }
  return out;
}

// Exact posterior marginals q_0(x_0^(n) | x) given that x_0 agrees with x on
// every unmasked position. Unmasked positions come back as point masses.
inline PositionMarginals oracle_denoiser(const DataDistribution& data, std::span<const int> state) {
  const TokenSpace& space = data.space();
  if (state.size() != static_cast<std::size_t>(space.length)) {
    throw std::invalid_argument("oracle_denoiser: state length does not match token space");
  }
  const auto n = static_cast<std::size_t>(space.length);
  const auto m = static_cast<std::size_t>(space.vocab);
  PositionMarginals out(n, std::vector<double>(m, 0.0));
  double evidence = 0.0;
  for (std::size_t y = 0; y < space.clean_count(); ++y) {
    const double p = data.prob(y);
    if (p == 0.0) continue;
    const std::vector<int> clean = space.decode_clean(y);
    bool agrees = true;
    for (std::size_t pos = 0; pos < n && agrees; ++pos) {
      agrees = state[pos] == space.mask() || state[pos] == clean[pos];
    }
    if (!agrees) continue;
    evidence += p;
    for (std::size_t pos = 0; pos < n; ++pos) {
      out[pos][static_cast<std::size_t>(clean[pos])] += p;
    }
  }
  if (evidence == 0.0) {
    throw InconsistentStateError("oracle_denoiser: no support sequence matches the state");
  }
  for (auto& dist : out) {
    for (double& p : dist) p /= evidence;
  }
  return out;
}

namespace detail {

inline int sample_categorical(std::span<const double> probs, CounterRng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  int last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_nonzero = static_cast<int>(i);
    if (u < cumulative) return last_nonzero;
  }
  return last_nonzero;
}

}  // namespace detail

// One ancestral step t -> s (s < t). Each masked position unmasks with
// probability (alpha_s - alpha_t) / (1 - alpha_t) and draws its token from the
// denoiser's marginal at the current state. Unmasked positions are frozen.
template <typename Denoiser>
SequenceState reverse_step(const TokenSpace& space, SequenceState state, double t, double s,
                           const NoiseProcess& np, Denoiser&& denoiser, CounterRng& rng) {
  if (!(s >= 0.0 && s <= t && t <= 1.0)) {
    throw std::invalid_argument("reverse_step: requires 0 <= s <= t <= 1");
  }
  const double masked_t = np.mask_probability(t);
  if (masked_t == 0.0 || s == t) return state;
  const double masked_s = np.mask_probability(s);
  const double unmask = std::clamp((masked_t - masked_s) / masked_t, 0.0, 1.0);
  std::vector<std::size_t> reveal;
  for (std::size_t pos = 0; pos < state.size(); ++pos) {
    if (state[pos] == space.mask() && rng.bernoulli(unmask)) reveal.push_back(pos);
  }
  if (reveal.empty()) return state;
  const auto& posterior = denoiser(std::span<const int>(state));
  for (std::size_t pos : reveal) {
    state[pos] = detail::sample_categorical(posterior[pos], rng);
  }
  return state;
}

struct ScheduleReport {
  std::string schedule_tag;
  int steps = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double tv_distance = 0.0;
  double kl_estimate = 0.0;
  std::vector<double> per_step_lengths;
  double wall_time = 0.0;
};

struct GenerationResult {
  std::vector<std::uint64_t> counts;  // indexed by clean sequence
  std::vector<double> empirical;
  ScheduleReport report;
};

// KL(data || p_hat) with p_hat = (c/n + eps) / (1 + S eps), eps = 1/(n S).
inline double smoothed_kl(std::span<const double> data, std::span<const std::uint64_t> counts,
                          std::size_t n_samples) {
  const double states = static_cast<double>(data.size());
  const double n = static_cast<double>(n_samples);
  const double eps = 1.0 / (n * states);
  std::vector<double> smoothed(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    smoothed[i] = (static_cast<double>(counts[i]) / n + eps) / (1.0 + states * eps);
  }
  return kl_divergence(data, smoothed);
}

// Runs n_samples independent reverse trajectories from the all-mask state
// along the schedule reversed (t_T -> ... -> t_0). Trajectory j draws from
// CounterRng(seed, j), so the output does not depend on thread count.
inline GenerationResult generate(const DataDistribution& data, const NoiseProcess& np,
                                 const Schedule& sched, std::size_t n_samples,
                                 std::uint64_t seed, unsigned threads = 1,
                                 std::string tag = {}) {
  validate_schedule(sched);
  if (n_samples < 1) throw std::invalid_argument("generate: n_samples must be at least 1");
  const auto started = std::chrono::steady_clock::now();
  const TokenSpace& space = data.space();
  const std::size_t clean_states = space.clean_count();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_samples)));

  auto run_chunk = [&](std::size_t begin, std::size_t end, std::vector<std::uint64_t>& counts) {
    std::unordered_map<std::size_t, PositionMarginals> cache;
    auto denoise = [&](std::span<const int> x) -> const PositionMarginals& {
      const std::size_t key = space.encode_state(x);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, oracle_denoiser(data, x)).first;
      return it->second;
    };
    for (std::size_t j = begin; j < end; ++j) {
      CounterRng rng(seed, j);
      SequenceState x(static_cast<std::size_t>(space.length), space.mask());
      for (std::size_t i = sched.times.size() - 1; i > 0; --i) {
        x = reverse_step(space, std::move(x), sched.times[i], sched.times[i - 1], np, denoise,
                         rng);
      }
      ++counts[space.encode_clean(x)];
    }
  };

  std::vector<std::vector<std::uint64_t>> partial(threads,
                                                  std::vector<std::uint64_t>(clean_states, 0));
  if (threads == 1) {
    run_chunk(0, n_samples, partial[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_samples + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t begin = std::min(n_samples, w * chunk);
      const std::size_t end = std::min(n_samples, begin + chunk);
      pool.emplace_back(run_chunk, begin, end, std::ref(partial[w]));
    }
    for (auto& th : pool) th.join();
  }

  GenerationResult result;
  result.counts.assign(clean_states, 0);
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < clean_states; ++i) result.counts[i] += part[i];
  }
  result.empirical.resize(clean_states);
  for (std::size_t i = 0; i < clean_states; ++i) {
    result.empirical[i] =
        static_cast<double>(result.counts[i]) / static_cast<double>(n_samples);
  }
  ScheduleReport& report = result.report;
  report.schedule_tag = tag.empty() ? std::string(to_string(sched.generator)) : std::move(tag);
  report.steps = static_cast<int>(sched.steps());
  report.n_samples = n_samples;
  report.seed = seed;
  report.tv_distance = total_variation(data.probs(), result.empirical);
  report.kl_estimate = smoothed_kl(data.probs(), result.counts, n_samples);
  report.per_step_lengths = per_step_lengths(np, space.length, sched);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

// One report per (T, tag), T-major. Every tag at a given T sees the same
// seed, so differences between rows are paired comparisons.
inline std::vector<ScheduleReport> compare_schedules(const DataDistribution& data,
                                                     const NoiseProcess& np,
                                                     std::span<const int> step_counts,
                                                     std::span<const std::string> tags,
                                                     std::size_t n_samples, std::uint64_t seed,
                                                     unsigned threads = 1) {
  std::vector<ScheduleReport> reports;
  reports.reserve(step_counts.size() * tags.size());
  for (int steps : step_counts) {
    for (const std::string& tag : tags) {
      const Schedule sched = make_schedule(np, steps, tag);
      reports.push_back(generate(data, np, sched, n_samples, seed, threads, tag).report);
    }
  }
  return reports;
}

}  // namespace geosched
