#ifndef RACS_ANALYTIC_APPROX_HPP
#define RACS_ANALYTIC_APPROX_HPP

#include <cmath>
#include <span>
#include <vector>

#include "racs/error.hpp"
#include "racs/exact_engine.hpp"
#include "racs/game_core.hpp"

namespace racs {

/// Mean of (1 - p_j) over the other players.
inline double qbar(std::span<const double> probs, int i) {
  const int n = static_cast<int>(probs.size());
  if (n < 2) throw DomainError("qbar needs at least two players");
  detail::require_player(n, i);
  long double s = 0;
  for (int j = 0; j < n; ++j) {
    if (j != i) s += 1.0L - probs[static_cast<std::size_t>(j)];
  }
  return static_cast<double>(s / (n - 1));
}

/// Mean-field coalition sum with the subset counts kept:
/// p_i sum_k w(n,k) C(n-1,k) qbar^k = (p_i/n)(1 - qbar^n)/(1 - qbar).
/// Reduces to the homogeneous closed form when all probabilities agree.
inline double shapley_binomial_closed(std::span<const double> probs, int i) {
  const int n = static_cast<int>(probs.size());
  detail::require_player(n, i);
  const double pi = probs[static_cast<std::size_t>(i)];
  if (n == 1) return pi;
  // 1 - qbar is the mean of the other p_j; using it directly keeps the
  // homogeneous case bit-identical to the closed form.
  long double s = 0;
  for (int j = 0; j < n; ++j) {
    if (j != i) s += probs[static_cast<std::size_t>(j)];
  }
  const double p_bar = static_cast<double>(s / (n - 1));
  if (p_bar <= 0.0) return pi;
  const double one_minus_qn = -std::expm1(n * std::log1p(-p_bar));
  return pi / p_bar * one_minus_qn / n;
}

/// The coalition sum exactly as printed, without the C(n-1,k) subset count:
/// p_i sum_k [k!(n-1-k)!/n!] qbar^k. Kept as an explicit variant; it does not
/// reduce to the homogeneous closed form.
inline double shapley_binomial_literal(std::span<const double> probs, int i) {
  const int n = static_cast<int>(probs.size());
  detail::require_player(n, i);
  const double pi = probs[static_cast<std::size_t>(i)];
  if (n == 1) return pi;
  const double q = qbar(probs, i);
  double weight = 1.0 / n;  // k = 0
  double power = 1.0;
  double sum = 0;
  for (int k = 0; k < n; ++k) {
    sum += weight * power;
    if (k + 1 < n) {
      weight *= static_cast<double>(k + 1) / static_cast<double>(n - 1 - k);
      power *= q;
    }
  }
  return pi * sum;
}

/// Right-endpoint rule for p_i * integral_0^1 prod_{j != i}(1 - t p_j) dt with
/// `nodes` panels. Error is O(1/nodes).
inline double shapley_riemann(std::span<const double> probs, int i, int nodes) {
  const int n = static_cast<int>(probs.size());
  detail::require_player(n, i);
  if (nodes < 1) throw DomainError("riemann sum needs at least one node");
  const double pi = probs[static_cast<std::size_t>(i)];
  if (pi == 0) return 0.0;
  detail::CompensatedSum<long double> sum;
  for (int k = 1; k <= nodes; ++k) {
    const long double t = static_cast<long double>(k) / nodes;
    long double prod = 1;
    for (int j = 0; j < n; ++j) {
      if (j != i) prod *= 1.0L - t * probs[static_cast<std::size_t>(j)];
    }
    sum.add(prod);
  }
  return static_cast<double>(pi * sum.value() / nodes);
}

enum class BinomialVariant { closed, literal };

inline ShapleyVector shapley_binomial(std::span<const double> probs, BinomialVariant variant = BinomialVariant::closed) {
  std::vector<double> values(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int idx = static_cast<int>(i);
    values[i] = variant == BinomialVariant::closed ? shapley_binomial_closed(probs, idx)
                                                   : shapley_binomial_literal(probs, idx);
  }
  return make_shapley_vector(std::move(values), Method::binomial_sum);
}

/// nodes <= 0 selects n nodes.
inline ShapleyVector shapley_riemann(std::span<const double> probs, int nodes = 0) {
  const int n = static_cast<int>(probs.size());
  if (nodes <= 0) nodes = n;
  std::vector<double> values(probs.size());
  for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = shapley_riemann(probs, i, nodes);
  return make_shapley_vector(std::move(values), Method::riemann);
}

}  // namespace racs

#endif  // RACS_ANALYTIC_APPROX_HPP
