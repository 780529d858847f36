#pragma once

// Exact enumeration of the masked-diffusion path on small token spaces.
//
// Layout: a sequence of N tokens is a mixed-radix integer with the first
// token most significant. Clean data sequences use radix m (tokens 0..m-1);
// path states use radix m+1 with digit m standing for the mask.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "geosched/errors.hpp"
#include "geosched/noise_process.hpp"
#include "geosched/rng.hpp"

namespace geosched {

inline constexpr std::size_t kMaxEnumeratedStates = 1'000'000;

// Sequence length N and vocabulary size m (also the mask index).
struct TokenSpace {
  int length = 1;
  int vocab = 1;

  int mask() const { return vocab; }

  std::size_t clean_count() const { return checked_power(vocab); }
  std::size_t state_count() const { return checked_power(vocab + 1); }

  // Digits of a path state, first token first.
  std::vector<int> decode_state(std::size_t index) const { return decode(index, vocab + 1); }
  std::vector<int> decode_clean(std::size_t index) const { return decode(index, vocab); }

  std::size_t encode_state(std::span<const int> tokens) const {
    return encode(tokens, vocab + 1);
  }
  std::size_t encode_clean(std::span<const int> tokens) const {
    for (int tok : tokens) {
      if (tok == mask()) throw std::invalid_argument("clean sequence contains a mask token");
    }
    return encode(tokens, vocab);
  }

  int mask_count(std::span<const int> tokens) const {
    int count = 0;
    for (int tok : tokens) count += tok == mask() ? 1 : 0;
    return count;
  }

 private:
  std::size_t checked_power(int radix) const {
    std::size_t out = 1;
    for (int i = 0; i < length; ++i) {
      out *= static_cast<std::size_t>(radix);
      if (out > kMaxEnumeratedStates) {
        throw CapacityError("state space exceeds " + std::to_string(kMaxEnumeratedStates) +
                            " states");
      }
    }
    return out;
  }

  std::vector<int> decode(std::size_t index, int radix) const {
    std::vector<int> tokens(static_cast<std::size_t>(length));
    for (int pos = length - 1; pos >= 0; --pos) {
      tokens[static_cast<std::size_t>(pos)] = static_cast<int>(index % radix);
      index /= static_cast<std::size_t>(radix);
    }
    return tokens;
  }

  std::size_t encode(std::span<const int> tokens, int radix) const {
    if (tokens.size() != static_cast<std::size_t>(length)) {
      throw std::invalid_argument("sequence length does not match token space");
    }
    std::size_t index = 0;
    for (int tok : tokens) {
      if (tok < 0 || tok >= radix) throw std::invalid_argument("token out of range");
      index = index * static_cast<std::size_t>(radix) + static_cast<std::size_t>(tok);
    }
    return index;
  }
};

// Exact categorical law q_0 over the m^N clean sequences.
class DataDistribution {
 public:
  DataDistribution(TokenSpace space, std::vector<double> probs)
      : space_(space), probs_(std::move(probs)) {
    if (space_.length < 1 || space_.vocab < 1) {
      throw std::invalid_argument("token space needs N >= 1 and m >= 1");
    }
    space_.state_count();  // capacity check on the path space
    if (probs_.size() != space_.clean_count()) {
      throw std::invalid_argument("data distribution needs one probability per clean sequence");
    }
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("data probabilities must be finite and nonnegative");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("data probabilities must sum to 1");
    }
  }

  static DataDistribution point_mass(TokenSpace space, std::span<const int> tokens) {
    std::vector<double> probs(space.clean_count(), 0.0);
    probs[space.encode_clean(tokens)] = 1.0;
    return {space, std::move(probs)};
  }

  // Uniform over the listed clean sequences.
  static DataDistribution uniform_over(TokenSpace space,
                                       const std::vector<std::vector<int>>& support) {
    if (support.empty()) throw std::invalid_argument("support must be nonempty");
    std::vector<double> probs(space.clean_count(), 0.0);
    for (const auto& seq : support) probs[space.encode_clean(seq)] += 1.0;
    for (double& p : probs) p /= static_cast<double>(support.size());
    return {space, std::move(probs)};
  }

  // Flat Dirichlet draw (normalized unit exponentials), reproducible from seed.
  static DataDistribution random_flat(TokenSpace space, std::uint64_t seed) {
    CounterRng rng(seed, 0xD15EA5Eu);
    std::vector<double> probs(space.clean_count());
    for (double& p : probs) p = -std::log1p(-rng.uniform());
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& p : probs) p /= total;
    // Fold the rounding residue into the largest entry.
    const double residue = 1.0 - std::accumulate(probs.begin(), probs.end(), 0.0);
    *std::max_element(probs.begin(), probs.end()) += residue;
    return {space, std::move(probs)};
  }

  const TokenSpace& space() const { return space_; }
  std::span<const double> probs() const { return probs_; }
  double prob(std::size_t clean_index) const { return probs_.at(clean_index); }

 private:
  TokenSpace space_;
  std::vector<double> probs_;
};

// Exact q_t over all (m+1)^N states.
struct PathMarginal {
  double t = 0.0;
  TokenSpace space;
  std::vector<double> probs;
};

// q_t(x) = (1-alpha)^{n_m(x)} alpha^{N-n_m(x)} * q_0{sequences agreeing with x
// on its unmasked positions}. Built by pushing each clean sequence through
// every mask pattern.
inline PathMarginal marginal(const DataDistribution& data, const NoiseProcess& np, double t) {
  const TokenSpace& space = data.space();
  const int n = space.length;
  const double kept = np.alpha(t);
  const double masked = np.mask_probability(t);
  std::vector<double> weight(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    weight[static_cast<std::size_t>(k)] = std::pow(masked, k) * std::pow(kept, n - k);
  }
  PathMarginal out{t, space, std::vector<double>(space.state_count(), 0.0)};
  const std::size_t patterns = std::size_t{1} << n;
  std::vector<int> tokens(static_cast<std::size_t>(n));
  for (std::size_t y = 0; y < space.clean_count(); ++y) {
    const double p = data.prob(y);
    if (p == 0.0) continue;
    const std::vector<int> clean = space.decode_clean(y);
    for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
      int k = 0;
      for (int pos = 0; pos < n; ++pos) {
        const bool hidden = (pattern >> pos) & 1u;
        tokens[static_cast<std::size_t>(pos)] =
            hidden ? space.mask() : clean[static_cast<std::size_t>(pos)];
        k += hidden ? 1 : 0;
      }
      const double w = weight[static_cast<std::size_t>(k)];
      if (w != 0.0) out.probs[space.encode_state(tokens)] += p * w;
    }
  }
  return out;
}

// d/dt log q_t(x) = -k alpha'/(1-alpha) + (N-k) alpha'/alpha with k = n_m(x).
inline double fisher_score_for_mask_count(const NoiseProcess& np, int token_count,
                                          int mask_count, double t) {
  if (token_count < 1) throw std::invalid_argument("token count N must be positive");
  if (mask_count < 0 || mask_count > token_count) {
    throw std::invalid_argument("mask count must lie in [0, N]");
  }
  const double kept = np.alpha(t);
  const double masked = np.mask_probability(t);
  if (!(kept > 0.0) || !(masked > 0.0)) {
    throw SingularityError("Fisher score is singular where alpha is 0 or 1");
  }
  const double rate = np.alpha_dot(t);
  return -mask_count * rate / masked + (token_count - mask_count) * rate / kept;
}

inline double fisher_score(const NoiseProcess& np, const TokenSpace& space,
                           std::span<const int> state, double t) {
  if (state.size() != static_cast<std::size_t>(space.length)) {
    throw std::invalid_argument("state length does not match token space");
  }
  for (int tok : state) {
    if (tok < 0 || tok > space.mask()) throw std::invalid_argument("token out of range");
  }
  return fisher_score_for_mask_count(np, space.length, space.mask_count(state), t);
}

struct ScoreMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean and variance of the Fisher score under the exact q_t.
inline ScoreMoments fisher_score_moments(const DataDistribution& data, const NoiseProcess& np,
                                         double t) {
  const TokenSpace& space = data.space();
  const PathMarginal q = marginal(data, np, t);
  std::vector<double> score(static_cast<std::size_t>(space.length) + 1);
  for (int k = 0; k <= space.length; ++k) {
    score[static_cast<std::size_t>(k)] = fisher_score_for_mask_count(np, space.length, k, t);
  }
  double first = 0.0;
  double second = 0.0;
  for (std::size_t x = 0; x < q.probs.size(); ++x) {
    if (q.probs[x] == 0.0) continue;
    const auto k = static_cast<std::size_t>(space.mask_count(space.decode_state(x)));
    first += q.probs[x] * score[k];
    second += q.probs[x] * score[k] * score[k];
  }
  return {first, second - first * first};
}

// Var_{q_t}(d/dt log q_t): the Fisher information of the path by enumeration.
inline double empirical_fisher(const DataDistribution& data, const NoiseProcess& np, double t) {
  return fisher_score_moments(data, np, t).variance;
}

// Law of n_m(x) under q_t, aggregated from the exact marginal.
inline std::vector<double> mask_count_distribution(const DataDistribution& data,
                                                   const NoiseProcess& np, double t) {
  const TokenSpace& space = data.space();
  const PathMarginal q = marginal(data, np, t);
  std::vector<double> counts(static_cast<std::size_t>(space.length) + 1, 0.0);
  for (std::size_t x = 0; x < q.probs.size(); ++x) {
    if (q.probs[x] == 0.0) continue;
    counts[static_cast<std::size_t>(space.mask_count(space.decode_state(x)))] += q.probs[x];
  }
  return counts;
}

// KL(p || q) = sum p log(p/q), with 0 log 0 = 0.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("KL: vectors differ in size");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw AbsoluteContinuityError("KL: p is not absolutely continuous with respect to q");
    }
    total += p[i] * std::log(p[i] / q[i]);
  }
  return total < 0.0 ? 0.0 : total;
}

inline double kl_divergence(const PathMarginal& p, const PathMarginal& q) {
  return kl_divergence(std::span<const double>(p.probs), std::span<const double>(q.probs));
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("TV: vectors differ in size");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

// KL(q_t || q_{t+delta}) / (I(t) delta^2 / 2); tends to 1 as delta -> 0.
inline double taylor_ratio(const DataDistribution& data, const NoiseProcess& np, double t,
                           double delta) {
  if (delta == 0.0) throw UndefinedRatioError("Taylor ratio is undefined at delta = 0");
  const double kl = kl_divergence(marginal(data, np, t), marginal(data, np, t + delta));
  return kl / (0.5 * empirical_fisher(data, np, t) * delta * delta);
}

}  // namespace geosched
