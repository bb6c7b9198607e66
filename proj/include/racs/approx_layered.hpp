#ifndef RACS_APPROX_LAYERED_HPP
#define RACS_APPROX_LAYERED_HPP

// Layer decomposition approximation. Sorted probabilities are peeled into
// homogeneous layers: layer k adds the increment r_k to each of the n_k
// players still above the previous level. Each layer has the homogeneous
// closed form (1/n_k)(1 - (1 - r_k)^{n_k}) and a player sums the layers it
// belongs to.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "racs/error.hpp"
#include "racs/exact_engine.hpp"
#include "racs/game_core.hpp"
#include "racs/racs_approx.hpp"

namespace racs {

template <class T>
struct Layer {
  int n_k = 0;  // players sharing the layer
  T r_k{};      // increment
};

template <class T>
struct LayerDecomposition {
  std::vector<Layer<T>> layers;
  std::vector<int> depth;  // number of layers each player belongs to; 0 for p = 0
};

/// Sort once and take successive differences of the distinct positive
/// values. Equal probabilities share one layer.
template <class T>
LayerDecomposition<T> decompose_layers(std::span<const T> probs) {
  if (probs.empty()) throw DomainError("layer decomposition needs at least one probability");
  for (const T& p : probs) {
    if (p < T{0} || p > T{1}) throw DomainError("probability outside [0, 1]");
  }
  std::vector<T> levels;
  for (const T& p : probs) {
    if (p > T{0}) levels.push_back(p);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  LayerDecomposition<T> out;
  out.depth.assign(probs.size(), 0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > T{0}) {
      auto it = std::lower_bound(levels.begin(), levels.end(), probs[i]);
      out.depth[i] = static_cast<int>(it - levels.begin()) + 1;
    }
  }
  std::vector<int> at_level(levels.size(), 0);
  for (int d : out.depth) {
    if (d > 0) ++at_level[static_cast<std::size_t>(d - 1)];
  }
  int survivors = std::accumulate(at_level.begin(), at_level.end(), 0);
  T previous{0};
  for (std::size_t k = 0; k < levels.size(); ++k) {
    out.layers.push_back(Layer<T>{survivors, T(levels[k] - previous)});
    survivors -= at_level[k];
    previous = levels[k];
  }
  return out;
}

template <class T>
LayerDecomposition<T> decompose_layers(const std::vector<T>& probs) {
  return decompose_layers(std::span<const T>{probs});
}

/// (1/n_k)(1 - (1 - r_k)^{n_k}).
inline double layer_shapley(const Layer<double>& layer) {
  if (layer.n_k < 1 || !(layer.r_k > 0)) throw DomainError("layer needs n_k >= 1 and r_k > 0");
  return shapley_homogeneous<double>(layer.n_k, layer.r_k);
}

enum class LayerVariant {
  literal,     // sum_k n_k r_k phi^(k)
  unweighted,  // sum_k phi^(k)
};

enum class Normalize { none, te, one };

inline ShapleyVector shapley_layered(std::span<const double> probs, LayerVariant variant = LayerVariant::unweighted,
                                     Normalize normalize = Normalize::none) {
  const auto dec = decompose_layers(probs);
  std::vector<double> prefix(dec.layers.size() + 1, 0.0);
  for (std::size_t k = 0; k < dec.layers.size(); ++k) {
    const auto& layer = dec.layers[k];
    double term = layer_shapley(layer);
    if (variant == LayerVariant::literal) term *= layer.n_k * layer.r_k;
    prefix[k + 1] = prefix[k] + term;
  }
  std::vector<double> values(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) values[i] = prefix[static_cast<std::size_t>(dec.depth[i])];

  if (normalize != Normalize::none) {
    long double sum = 0;
    for (double v : values) sum += v;
    if (sum > 0) {
      const long double goal = normalize == Normalize::te ? total_capacity(probs) : 1.0L;
      const long double scale = goal / sum;
      for (auto& v : values) v = static_cast<double>(v * scale);
    }
  }
  return make_shapley_vector(std::move(values), Method::layered);
}

inline ShapleyVector shapley_layered(const BernoulliGame& game, LayerVariant variant = LayerVariant::unweighted,
                                     Normalize normalize = Normalize::none) {
  const auto p = game.probabilities();
  return shapley_layered(std::span<const double>{p}, variant, normalize);
}

struct SecondOrderDiagnostic {
  double linearized = 0;        // p_i (1 - sum_{j != i} p_j / 2)
  double isolation = 0;         // -p_i (1 - p_i)^{n-1}
  double pairwise = 0;          // sum_{j != i} p_i p_j / 2
  double dominant_missing = 0;  // (p_i / 3) e_2(p_{-i})
  bool out_of_validity = false; // linearized value is negative
};

/// Low-order expansion terms of player i's value; these are diagnostics, not
/// estimates, and may be negative.
inline SecondOrderDiagnostic second_order_diagnostic(std::span<const double> probs, int i) {
  const int n = static_cast<int>(probs.size());
  detail::require_player(n, i);
  const double pi = probs[static_cast<std::size_t>(i)];
  std::vector<double> others;
  others.reserve(probs.size());
  for (int j = 0; j < n; ++j) {
    if (j != i) others.push_back(probs[static_cast<std::size_t>(j)]);
  }
  const auto e = elementary_symmetric_sums<double>(others, std::min<std::size_t>(2, others.size()));
  const double e1 = e.size() > 1 ? e[1] : 0.0;
  const double e2 = e.size() > 2 ? e[2] : 0.0;
  SecondOrderDiagnostic d;
  d.linearized = pi * (1.0 - e1 / 2.0);
  d.isolation = -pi * std::pow(1.0 - pi, n - 1);
  d.pairwise = pi * e1 / 2.0;
  d.dominant_missing = pi / 3.0 * e2;
  d.out_of_validity = d.linearized < 0;
  return d;
}

/// (1 - p_i)^{n-1} / (1 - prod_{j != i}(1 - p_j)); infinite when every other
/// player has p_j = 0.
inline double worst_case_relative_error(std::span<const double> probs, int i) {
  const int n = static_cast<int>(probs.size());
  detail::require_player(n, i);
  long double miss = 1;
  for (int j = 0; j < n; ++j) {
    if (j != i) miss *= 1.0L - probs[static_cast<std::size_t>(j)];
  }
  const double numerator = std::pow(1.0 - probs[static_cast<std::size_t>(i)], n - 1);
  const long double denom = 1.0L - miss;
  if (denom <= 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(numerator / denom);
}

}  // namespace racs

#endif  // RACS_APPROX_LAYERED_HPP
