#ifndef RACS_EXACT_ENGINE_HPP
#define RACS_EXACT_ENGINE_HPP

// Ground-truth Shapley values for Bernoulli hitting-capacity games.
//
// Every game-level routine is a template over the scalar type: double,
// long double, or racs::Rational for exact arithmetic. Five independent routes
// are provided and cross-checked in the tests:
//   * shapley_exact_enum        subset enumeration, O(2^(n-1)) per player
//   * shapley_exact_capacity    the generic formula on a dense capacity table
//   * shapley_permutation_oracle  average over all n! join orders (n <= 8)
//   * shapley_exact_symmetric   coalition sizes regrouped through symmetric sums
//   * shapley_exact_integral    closed form of the diagonal multilinear integral

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "racs/error.hpp"
#include "racs/game_core.hpp"
#include "racs/rational.hpp"

namespace racs {

inline constexpr int kDefaultEnumLimit = 24;
inline constexpr int kMaxPermutationPlayers = 8;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Converts an exact rational to the working scalar type.
template <class T>
T scalar_from(const Rational& r) {
  if constexpr (is_exact_v<T>) {
    return r;
  } else {
    return rational_to_float<T>(r);
  }
}

template <class T>
T scalar_from(const Probability& p) {
  if constexpr (is_exact_v<T>) {
    return p.exact();
  } else if constexpr (std::is_same_v<T, double>) {
    return p.to_double();
  } else {
    return rational_to_float<T>(p.exact());
  }
}

template <class T>
std::vector<T> scalar_probabilities(const BernoulliGame& game) {
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(game.size()));
  for (const auto& pl : game.players()) out.push_back(scalar_from<T>(pl.p));
  return out;
}

namespace detail {

inline void require_player(int n, int i) {
  if (i < 0 || i >= n) throw DomainError("player index " + std::to_string(i) + " out of range");
}

/// Neumaier's variant of Kahan summation.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

template <class T>
T int_power(T base, std::uint64_t exponent) {
  T result{1};
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent != 0) base *= base;
  }
  return result;
}

// Depth-first walk over all subsets of `factors`, accumulating the product of
// each subset into by_size[|S|]. No divisions, so factors equal to zero (p = 1)
// are handled exactly.
template <class T>
void accumulate_subset_products(std::span<const T> factors, std::size_t depth, int size, const T& prod,
                                std::vector<T>& by_size) {
  if (depth == factors.size()) {
    by_size[static_cast<std::size_t>(size)] += prod;
    return;
  }
  accumulate_subset_products(factors, depth + 1, size, prod, by_size);
  accumulate_subset_products<T>(factors, depth + 1, size + 1, T(prod * factors[depth]), by_size);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementary symmetric sums

template <class T>
struct SymmetricSums {
  std::vector<T> e;  // e[0] = 1
  std::size_t size() const { return e.size(); }
  const T& operator[](std::size_t k) const { return e[k]; }
};

/// e_k = sum over k-subsets of the product of their values, k = 0..k_max, via
/// the running product of (1 + x_j t). Non-negative inputs never subtract.
template <class T>
SymmetricSums<T> elementary_symmetric_sums(std::span<const T> values, std::size_t k_max) {
  if (k_max > values.size()) throw DomainError("k_max exceeds the number of values");
  std::vector<T> e(k_max + 1, T{0});
  e[0] = T{1};
  std::size_t seen = 0;
  for (const T& x : values) {
    ++seen;
    for (std::size_t k = std::min(seen, k_max); k >= 1; --k) e[k] += e[k - 1] * x;
  }
  return SymmetricSums<T>{std::move(e)};
}

template <class T>
SymmetricSums<T> elementary_symmetric_sums(std::span<const T> values) {
  return elementary_symmetric_sums(values, values.size());
}

/// Elementary symmetric means M_k = e_k / C(m, k). Each update is a convex
/// combination, so values in [0,1] stay in [0,1] and nothing overflows at
/// large m.
template <class T>
std::vector<T> elementary_symmetric_means(std::span<const T> values) {
  const std::size_t m = values.size();
  std::vector<T> mean(m + 1, T{0});
  mean[0] = T{1};
  for (std::size_t j = 0; j < m; ++j) {
    const T& x = values[j];
    const T denom = T(static_cast<long>(j + 1));
    for (std::size_t k = j + 1; k >= 1; --k) {
      const T keep = T(static_cast<long>(j + 1 - k)) / denom;
      const T take = T(static_cast<long>(k)) / denom;
      mean[k] = keep * mean[k] + take * x * mean[k - 1];
    }
  }
  return mean;
}

// ---------------------------------------------------------------------------
// Oracles on Bernoulli games

/// sum_{S subset E\{i}} w(|S|) p_i prod_{j in S} (1 - p_j), by explicit
/// enumeration of the 2^(n-1) coalitions.
template <class T = double>
T shapley_exact_enum(const BernoulliGame& game, int i, int max_players = kDefaultEnumLimit) {
  const int n = game.size();
  detail::require_player(n, i);
  if (n > max_players) {
    throw SizeLimitError("exact enumeration is limited to n <= " + std::to_string(max_players) +
                         " (got " + std::to_string(n) + ")");
  }
  std::vector<T> factors;
  factors.reserve(static_cast<std::size_t>(n - 1));
  for (int j = 0; j < n; ++j) {
    if (j != i) factors.push_back(T{1} - scalar_from<T>(game.p(j)));
  }
  std::vector<T> by_size(static_cast<std::size_t>(n), T{0});
  detail::accumulate_subset_products<T>(factors, 0, 0, T{1}, by_size);
  T sum{0};
  for (int s = 0; s < n; ++s) sum += scalar_from<T>(shapley_weight(n, s)) * by_size[static_cast<std::size_t>(s)];
  return scalar_from<T>(game.p(i)) * sum;
}

/// Generic formula on an arbitrary capacity table:
/// sum_{S not containing i} w(|S|) [v(S + i) - v(S)].
inline Real shapley_exact_capacity(const Capacity& cap, int i) {
  const int n = cap.players();
  detail::require_player(n, i);
  const auto w = shapley_weights<Real>(n);
  const Subset bit = singleton(i);
  detail::CompensatedSum<Real> sum;
  for (Subset s = 0; s < cap.values().size(); ++s) {
    if (s & bit) continue;
    sum.add(w[static_cast<std::size_t>(popcount(s))] * (cap(s | bit) - cap(s)));
  }
  return sum.value();
}

/// (1/n!) sum over all orders of i's marginal contribution on joining.
inline Real shapley_permutation_oracle(const Capacity& cap, int i) {
  const int n = cap.players();
  detail::require_player(n, i);
  if (n > kMaxPermutationPlayers) {
    throw SizeLimitError("permutation oracle is limited to n <= 8 (got " + std::to_string(n) + ")");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Real sum = 0;
  long count = 0;
  do {
    Subset before = 0;
    for (int j : order) {
      if (j == i) break;
      before |= singleton(j);
    }
    sum += cap(before | singleton(i)) - cap(before);
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return sum / static_cast<Real>(count);
}

/// Closed form for identical probabilities: (1/n)[1 - (1 - p)^n] = T(E)/n.
template <class T = double>
T shapley_homogeneous(int n, const T& p) {
  if (n < 1) throw DomainError("homogeneous closed form needs n >= 1");
  if (p < T{0} || p > T{1}) throw DomainError("probability outside [0, 1]");
  if constexpr (is_exact_v<T>) {
    return (T{1} - pow(T{1} - p, static_cast<std::uint64_t>(n))) / T{n};
  } else {
    return -std::expm1(static_cast<T>(n) * std::log1p(-p)) / static_cast<T>(n);
  }
}

template <class T = double>
T shapley_homogeneous(int n, const Probability& p) {
  return shapley_homogeneous<T>(n, scalar_from<T>(p));
}

/// Coalition sizes regrouped: p_i sum_k w(n,k) e_k((1-p_j)_{j != i}). The sum
/// is evaluated as (p_i/n) sum_k M_k with M_k the symmetric means, which is
/// the same quantity because w(n,k) C(n-1,k) = 1/n, and is subtraction-free.
template <class T = double>
T shapley_exact_symmetric(const BernoulliGame& game, int i) {
  const int n = game.size();
  detail::require_player(n, i);
  std::vector<T> q;
  q.reserve(static_cast<std::size_t>(n - 1));
  for (int j = 0; j < n; ++j) {
    if (j != i) q.push_back(T{1} - scalar_from<T>(game.p(j)));
  }
  const auto mean = elementary_symmetric_means<T>(q);
  T sum{0};
  for (const T& m : mean) sum += m;
  return scalar_from<T>(game.p(i)) * sum / T(static_cast<long>(n));
}

/// p_i sum_s (-1)^s e_s((p_j)_{j != i}) / (s+1), the exact value of
/// p_i * integral_0^1 prod_{j != i}(1 - t p_j) dt. Floating evaluation runs in
/// long double with compensated summation because the series alternates.
template <class T = double>
T shapley_exact_integral(const BernoulliGame& game, int i) {
  const int n = game.size();
  detail::require_player(n, i);
  if constexpr (is_exact_v<T>) {
    std::vector<Rational> others;
    for (int j = 0; j < n; ++j) {
      if (j != i) others.push_back(game.p(j).exact());
    }
    const auto e = elementary_symmetric_sums<Rational>(others);
    Rational sum{0};
    for (std::size_t s = 0; s < e.size(); ++s) {
      Rational term = e[s] / Rational{static_cast<long>(s + 1)};
      if (s % 2 == 0) {
        sum += term;
      } else {
        sum -= term;
      }
    }
    return game.p(i).exact() * sum;
  } else {
    std::vector<long double> others;
    for (int j = 0; j < n; ++j) {
      if (j != i) others.push_back(game.p(j).to_long_double());
    }
    const auto e = elementary_symmetric_sums<long double>(others);
    detail::CompensatedSum<long double> sum;
    for (std::size_t s = 0; s < e.size(); ++s) {
      const long double term = e[s] / static_cast<long double>(s + 1);
      sum.add(s % 2 == 0 ? term : -term);
    }
    return static_cast<T>(game.p(i).to_long_double() * sum.value());
  }
}

/// [1 - (1 - p_i)(1 - p_bar)^(n-1)] / n. Exact only when every other player
/// has probability p_bar; elsewhere it is a reference expression for the
/// estimation-error diagnostic.
inline double shapley_one_vs_mean_reference(double p_i, double p_bar, int n) {
  if (n < 1) throw DomainError("reference expression needs n >= 1");
  if (p_i < 0 || p_i > 1 || p_bar < 0 || p_bar > 1) throw DomainError("probability outside [0, 1]");
  return (1.0 - (1.0 - p_i) * std::pow(1.0 - p_bar, n - 1)) / n;
}

// ---------------------------------------------------------------------------
// Whole-game wrappers

/// Exact values for every player in the requested scalar type. Accepts
/// exact_enum, exact_symmetric, exact_integral, and homogeneous (which requires
/// identical probabilities).
template <class T>
std::vector<T> exact_shapley_values(const BernoulliGame& game, Method method,
                                    int enum_limit = kDefaultEnumLimit) {
  const int n = game.size();
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(n));
  if (method == Method::homogeneous) {
    for (int j = 1; j < n; ++j) {
      if (!(game.p(j) == game.p(0))) throw DomainError("homogeneous closed form needs identical probabilities");
    }
    const T v = shapley_homogeneous<T>(n, game.p(0));
    out.assign(static_cast<std::size_t>(n), v);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    switch (method) {
      case Method::exact_enum: out.push_back(shapley_exact_enum<T>(game, i, enum_limit)); break;
      case Method::exact_symmetric: out.push_back(shapley_exact_symmetric<T>(game, i)); break;
      case Method::exact_integral: out.push_back(shapley_exact_integral<T>(game, i)); break;
      default: throw DomainError(std::string{"not an exact method: "} + std::string{to_string(method)});
    }
  }
  return out;
}

inline ShapleyVector exact_shapley(const BernoulliGame& game, Method method = Method::exact_symmetric,
                                   int enum_limit = kDefaultEnumLimit) {
  auto values = exact_shapley_values<double>(game, method, enum_limit);
  return make_shapley_vector(std::move(values), method);
}

/// Permutation oracle applied to the hitting capacity of a small game.
inline ShapleyVector permutation_shapley(const BernoulliGame& game) {
  const auto cap = build_capacity_table(game);
  std::vector<double> values;
  for (int i = 0; i < game.size(); ++i) values.push_back(static_cast<double>(shapley_permutation_oracle(cap, i)));
  return make_shapley_vector(std::move(values), Method::permutation);
}

}  // namespace racs

#endif  // RACS_EXACT_ENGINE_HPP
