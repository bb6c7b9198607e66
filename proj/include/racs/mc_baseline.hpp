#ifndef RACS_MC_BASELINE_HPP
#define RACS_MC_BASELINE_HPP

// Monte Carlo permutation sampling for Bernoulli hitting-capacity games.
//
// Random numbers come from a counter-based generator so that any permutation
// can be regenerated from (seed, permutation index) alone:
//
//   mix64(x)            SplitMix64 finalizer
//   key(seed, k)        mix64(mix64(seed) + k * 0xD1B54A32D192ED03)
//   word(key, c)        mix64(key + (c + 1) * 0x9E3779B97F4A7C15)
//   uniform(bound)      Lemire multiply-shift with rejection; each draw
//                       (accepted or rejected) consumes one counter value
//
// Permutation k is a Fisher-Yates shuffle of 0..n-1 (j from n-1 down to 1,
// swap j with uniform(j+1)) driven by key(seed, k) with counters starting at
// zero. Chunks cover contiguous ranges of k and are reduced in chunk order,
// so the estimate depends only on (game, samples, seed, chunk).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

#include "racs/error.hpp"
#include "racs/exact_engine.hpp"
#include "racs/game_core.hpp"

namespace racs {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  static constexpr std::uint64_t kStreamStep = 0xD1B54A32D192ED03ULL;
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_{mix64(mix64(seed) + stream * kStreamStep)} {}

  std::uint64_t next() { return mix64(key_ + (counter_++ + 1) * kGolden); }

  /// Uniform integer in [0, bound).
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const unsigned __int128 prod = static_cast<unsigned __int128>(next()) * bound;
      if (static_cast<std::uint64_t>(prod) >= threshold) return static_cast<std::uint64_t>(prod >> 64);
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Permutation number `index` of the stream identified by `seed`.
inline std::vector<int> sample_permutation(int n, std::uint64_t seed, std::uint64_t index) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng{seed, index};
  for (int j = n - 1; j >= 1; --j) {
    const auto k = static_cast<std::size_t>(rng.uniform(static_cast<std::uint64_t>(j) + 1));
    std::swap(perm[static_cast<std::size_t>(j)], perm[k]);
  }
  return perm;
}

/// Marginal contribution of each player when players join in `order`:
/// p_i times the probability that nobody earlier is in the random set. The
/// contributions telescope to T(E).
inline std::vector<double> permutation_marginals(std::span<const double> probs, std::span<const int> order) {
  std::vector<double> out(probs.size(), 0.0);
  long double miss = 1;
  for (int i : order) {
    const double p = probs[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = static_cast<double>(p * miss);
    miss *= 1.0L - p;
  }
  return out;
}

struct McConfig {
  std::uint64_t samples = 10'000;
  std::uint64_t seed = 0;
  std::uint64_t chunk = 0;  // permutations per chunk; 0 selects 4096
  unsigned threads = 0;     // 0 selects hardware concurrency; never changes the result
};

struct McEstimate {
  std::vector<double> values;
  std::vector<double> std_error;
  std::uint64_t samples_used = 0;

  ShapleyVector to_shapley_vector() const {
    ShapleyMeta meta;
    meta.std_error = std_error;
    return make_shapley_vector(values, Method::monte_carlo, std::move(meta));
  }
};

namespace detail {

// Per-player running mean and sum of squared deviations (Welford), merged with
// Chan's pairwise formula.
struct MomentAccumulator {
  std::uint64_t count = 0;
  std::vector<long double> mean;
  std::vector<long double> m2;

  explicit MomentAccumulator(std::size_t n = 0) : mean(n, 0.0L), m2(n, 0.0L) {}

  void add(std::span<const double> x) {
    ++count;
    const long double c = static_cast<long double>(count);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double delta = x[i] - mean[i];
      mean[i] += delta / c;
      m2[i] += delta * (x[i] - mean[i]);
    }
  }

  void merge(const MomentAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const long double na = static_cast<long double>(count);
    const long double nb = static_cast<long double>(other.count);
    const long double total = na + nb;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const long double delta = other.mean[i] - mean[i];
      mean[i] += delta * nb / total;
      m2[i] += other.m2[i] + delta * delta * na * nb / total;
    }
    count += other.count;
  }
};

}  // namespace detail

inline McEstimate shapley_mc(std::span<const double> probs, const McConfig& cfg) {
  if (cfg.samples == 0) throw DomainError("Monte Carlo needs at least one sample");
  const int n = static_cast<int>(probs.size());
  if (n == 0) throw DomainError("a game needs at least one player");
  const std::uint64_t chunk = cfg.chunk == 0 ? 4096 : cfg.chunk;
  const std::uint64_t chunks = (cfg.samples + chunk - 1) / chunk;

  std::vector<detail::MomentAccumulator> parts(chunks, detail::MomentAccumulator{probs.size()});
  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t begin = c * chunk;
    const std::uint64_t end = std::min(cfg.samples, begin + chunk);
    auto& acc = parts[c];
    for (std::uint64_t k = begin; k < end; ++k) {
      const auto perm = sample_permutation(n, cfg.seed, k);
      acc.add(permutation_marginals(probs, perm));
    }
  };

  unsigned threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t c = t; c < chunks; c += threads) run_chunk(c);
      });
    }
  }

  detail::MomentAccumulator total{probs.size()};
  for (const auto& part : parts) total.merge(part);

  McEstimate est;
  est.samples_used = cfg.samples;
  est.values.resize(probs.size());
  est.std_error.resize(probs.size());
  const long double k = static_cast<long double>(cfg.samples);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    est.values[i] = static_cast<double>(total.mean[i]);
    est.std_error[i] = cfg.samples < 2 ? 0.0 : static_cast<double>(std::sqrt(total.m2[i] / (k - 1)) / std::sqrt(k));
  }
  return est;
}

inline McEstimate shapley_mc(const BernoulliGame& game, const McConfig& cfg) {
  const auto p = game.probabilities();
  return shapley_mc(std::span<const double>{p}, cfg);
}

struct ConvergenceCell {
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  double max_abs_error = 0;
};

/// Max absolute error against the exact values for every (seed, K) cell.
inline std::vector<ConvergenceCell> mc_convergence_curve(const BernoulliGame& game, std::span<const std::uint64_t> seeds,
                                                         std::span<const std::uint64_t> sample_grid) {
  if (seeds.empty() || sample_grid.empty()) throw DomainError("convergence curve needs seeds and sample sizes");
  const auto oracle = exact_shapley_values<double>(game, Method::exact_symmetric);
  std::vector<ConvergenceCell> out;
  for (auto seed : seeds) {
    for (auto k : sample_grid) {
      const auto est = shapley_mc(game, McConfig{k, seed});
      double worst = 0;
      for (std::size_t i = 0; i < oracle.size(); ++i) worst = std::max(worst, std::fabs(est.values[i] - oracle[i]));
      out.push_back({seed, k, worst});
    }
  }
  return out;
}

}  // namespace racs

#endif  // RACS_MC_BASELINE_HPP
