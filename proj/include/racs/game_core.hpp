#ifndef RACS_GAME_CORE_HPP
#define RACS_GAME_CORE_HPP

// Core domain types for Bernoulli coalition games: exact probabilities, the
// hitting-capacity characteristic function, dense subset tables, the Moebius
// transform and its belief-function / random-set counterparts, and the exact
// Shapley coalition weights.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "racs/error.hpp"
#include "racs/rational.hpp"

namespace racs {

using Real = long double;
using Subset = std::uint32_t;

inline constexpr int kMaxTablePlayers = 24;

inline int popcount(Subset s) { return std::popcount(s); }
inline Subset full_set(int n) { return n >= 32 ? ~Subset{0} : (Subset{1} << n) - 1U; }
inline Subset singleton(int i) { return Subset{1} << i; }
inline bool contains(Subset s, int i) { return (s >> i) & 1U; }

/// Membership probability held as an exact fraction in lowest terms, plus a
/// derived binary view. The fraction is authoritative.
class Probability {
 public:
  Probability() : value_{0}, view_{0.0} {}

  explicit Probability(Rational value) : value_{std::move(value)} {
    if (value_ < 0 || value_ > 1) {
      throw DomainError("probability " + value_.str() + " is outside [0, 1]");
    }
    view_ = racs::to_double(value_);
  }

  static Probability parse(std::string_view text) { return Probability{parse_rational(text)}; }
  static Probability from_fraction(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw DomainError("probability denominator must be positive");
    return Probability{Rational{num, den}};
  }

  const Rational& exact() const { return value_; }
  BigInt num() const { return numerator_of(value_); }
  BigInt den() const { return denominator_of(value_); }
  double to_double() const { return view_; }
  long double to_long_double() const { return racs::to_long_double(value_); }
  std::string str() const { return value_.str(); }

  friend bool operator==(const Probability& a, const Probability& b) { return a.value_ == b.value_; }

 private:
  Rational value_;
  double view_;
};

struct Player {
  std::string id;
  Probability p;
};

/// Ordered players with independent inclusion probabilities.
class BernoulliGame {
 public:
  BernoulliGame() = default;

  explicit BernoulliGame(std::vector<Player> players) : players_{std::move(players)} {
    if (players_.empty()) throw DomainError("a game needs at least one player");
    std::unordered_set<std::string> seen;
    seen.reserve(players_.size());
    for (const auto& pl : players_) {
      if (!seen.insert(pl.id).second) throw DomainError("duplicate player id '" + pl.id + "'");
    }
  }

  /// Players named "1".."n".
  static BernoulliGame from_probabilities(std::span<const Probability> probs) {
    std::vector<Player> players;
    players.reserve(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) players.push_back({std::to_string(i + 1), probs[i]});
    return BernoulliGame{std::move(players)};
  }

  static BernoulliGame from_strings(std::span<const std::string_view> probs) {
    std::vector<Probability> ps;
    ps.reserve(probs.size());
    for (auto s : probs) ps.push_back(Probability::parse(s));
    return from_probabilities(ps);
  }

  static BernoulliGame from_strings(std::initializer_list<std::string_view> probs) {
    return from_strings(std::span<const std::string_view>{probs.begin(), probs.size()});
  }

  /// Each double is taken at its exact binary value.
  static BernoulliGame from_doubles(std::span<const double> probs) {
    std::vector<Probability> ps;
    ps.reserve(probs.size());
    for (double p : probs) {
      if (!std::isfinite(p)) throw DomainError("non-finite probability");
      ps.emplace_back(Rational{p});
    }
    return from_probabilities(ps);
  }

  static BernoulliGame homogeneous(int n, const Probability& p) {
    return from_probabilities(std::vector<Probability>(static_cast<std::size_t>(n), p));
  }

  int size() const { return static_cast<int>(players_.size()); }
  const std::vector<Player>& players() const { return players_; }
  const Player& player(int i) const { return players_.at(static_cast<std::size_t>(i)); }
  const Probability& p(int i) const { return player(i).p; }

  std::vector<double> probabilities() const {
    std::vector<double> out;
    out.reserve(players_.size());
    for (const auto& pl : players_) out.push_back(pl.p.to_double());
    return out;
  }

  std::vector<Rational> exact_probabilities() const {
    std::vector<Rational> out;
    out.reserve(players_.size());
    for (const auto& pl : players_) out.push_back(pl.p.exact());
    return out;
  }

  std::optional<int> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < players_.size(); ++i) {
      if (players_[i].id == id) return static_cast<int>(i);
    }
    return std::nullopt;
  }

 private:
  std::vector<Player> players_;
};

/// Dense table of a set function indexed by subset bitmask.
class SetTable {
 public:
  SetTable() = default;
  SetTable(int n, std::vector<Real> values) : n_{n}, values_{std::move(values)} {
    if (n < 0 || n > kMaxTablePlayers) throw SizeLimitError("subset tables support at most 24 players");
    if (values_.size() != (std::size_t{1} << n)) throw DomainError("table size must be 2^n");
  }

  int players() const { return n_; }
  std::size_t size() const { return values_.size(); }
  Real operator()(Subset s) const { return values_[s]; }
  Real& operator[](Subset s) { return values_[s]; }
  const Real& operator[](Subset s) const { return values_[s]; }
  std::span<const Real> values() const { return values_; }

 private:
  int n_ = 0;
  std::vector<Real> values_;
};

/// Characteristic function v: 2^E -> R. The normalized flag records that
/// v(E) = 1 was requested; the Bernoulli hitting capacity has v(E) < 1 so the
/// flag is not forced.
class Capacity {
 public:
  Capacity() = default;
  Capacity(int n, std::vector<Real> values, bool normalized = false)
      : table_{n, std::move(values)}, normalized_{normalized} {}

  int players() const { return table_.players(); }
  Real operator()(Subset s) const { return table_(s); }
  std::span<const Real> values() const { return table_.values(); }
  const SetTable& table() const { return table_; }
  bool normalized() const { return normalized_; }
  Real total() const { return table_(full_set(players())); }

 private:
  SetTable table_;
  bool normalized_ = false;
};

/// Probability distribution of a finite random set: mass(F) = P(X = F).
class MassFunction {
 public:
  MassFunction() = default;
  MassFunction(int n, std::vector<Real> masses) : table_{n, std::move(masses)} {
    for (Real m : table_.values()) {
      if (!(m >= 0)) throw DomainError("random-set masses must be non-negative");
    }
  }

  int players() const { return table_.players(); }
  Real operator()(Subset s) const { return table_(s); }
  std::span<const Real> values() const { return table_.values(); }

  Real total() const {
    Real t = 0;
    for (Real m : table_.values()) t += m;
    return t;
  }

 private:
  SetTable table_;
};

enum class Method {
  exact_enum,
  exact_symmetric,
  exact_integral,
  permutation,
  homogeneous,
  racs,
  racs_corrected,
  layered,
  meanfield,
  binomial_sum,
  riemann,
  monte_carlo,
};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::exact_enum: return "exact-enum";
    case Method::exact_symmetric: return "exact-symmetric";
    case Method::exact_integral: return "exact-integral";
    case Method::permutation: return "permutation";
    case Method::homogeneous: return "homogeneous";
    case Method::racs: return "racs";
    case Method::racs_corrected: return "racs-corrected";
    case Method::layered: return "layered";
    case Method::meanfield: return "meanfield";
    case Method::binomial_sum: return "binomial-sum";
    case Method::riemann: return "riemann";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

struct ShapleyMeta {
  std::optional<std::string> regime;
  std::optional<double> error_bound;
  std::vector<double> std_error;  // empty unless the method is stochastic
  std::vector<std::string> warnings;
};

struct ShapleyVector {
  std::vector<double> values;
  Method method = Method::exact_symmetric;
  ShapleyMeta meta;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double total() const {
    long double t = 0;
    for (double v : values) t += v;
    return static_cast<double>(t);
  }
};

inline ShapleyVector make_shapley_vector(std::vector<double> values, Method method, ShapleyMeta meta = {}) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("Shapley value is not finite");
  }
  return ShapleyVector{std::move(values), method, std::move(meta)};
}

// ---------------------------------------------------------------------------
// Capacity construction

namespace detail {

inline void require_table_size(int n) {
  if (n > kMaxTablePlayers) {
    throw SizeLimitError("n = " + std::to_string(n) + " exceeds the subset-table limit of 24 players");
  }
}

inline void require_subset(int n, Subset s) {
  if (n < 32 && (s & ~full_set(n)) != 0) throw DomainError("subset contains players outside the game");
}

// prod[S] = prod_{j in S} factor[j], built in O(2^n).
inline std::vector<Real> subset_products(std::span<const Real> factor) {
  const int n = static_cast<int>(factor.size());
  std::vector<Real> prod(std::size_t{1} << n);
  prod[0] = 1;
  for (Subset s = 1; s < prod.size(); ++s) {
    const int low = std::countr_zero(s);
    prod[s] = prod[s & (s - 1)] * factor[static_cast<std::size_t>(low)];
  }
  return prod;
}

inline std::vector<Real> long_double_probs(const BernoulliGame& game) {
  std::vector<Real> p;
  p.reserve(static_cast<std::size_t>(game.size()));
  for (const auto& pl : game.players()) p.push_back(pl.p.to_long_double());
  return p;
}

}  // namespace detail

/// T(S) = 1 - prod_{j in S} (1 - p_j), the probability that the random set
/// meets S.
inline Real capacity_of_subset(const BernoulliGame& game, Subset s) {
  detail::require_subset(game.size(), s);
  Real miss = 1;
  for (int j = 0; j < game.size(); ++j) {
    if (contains(s, j)) miss *= 1 - game.p(j).to_long_double();
  }
  return 1 - miss;
}

inline Rational capacity_of_subset_exact(const BernoulliGame& game, Subset s) {
  detail::require_subset(game.size(), s);
  Rational miss{1};
  for (int j = 0; j < game.size(); ++j) {
    if (contains(s, j)) miss *= 1 - game.p(j).exact();
  }
  return 1 - miss;
}

/// T(E), computed in linear time without a table.
inline Real total_capacity(const BernoulliGame& game) {
  Real miss = 1;
  for (const auto& pl : game.players()) miss *= 1 - pl.p.to_long_double();
  return 1 - miss;
}

inline Real total_capacity(std::span<const double> probs) {
  Real miss = 1;
  for (double p : probs) miss *= 1 - static_cast<Real>(p);
  return 1 - miss;
}

/// Materializes the hitting capacity T for every subset.
inline Capacity build_capacity_table(const BernoulliGame& game) {
  const int n = game.size();
  detail::require_table_size(n);
  auto p = detail::long_double_probs(game);
  std::vector<Real> q(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) q[j] = 1 - p[j];
  auto miss = detail::subset_products(q);
  for (auto& v : miss) v = 1 - v;
  return Capacity{n, std::move(miss), false};
}

/// Bel(A) = P(X subset of A) = prod_{j not in A} (1 - p_j).
inline Capacity belief_from_game(const BernoulliGame& game) {
  const int n = game.size();
  detail::require_table_size(n);
  auto p = detail::long_double_probs(game);
  std::vector<Real> q(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) q[j] = 1 - p[j];
  auto outside = detail::subset_products(q);
  const Subset all = full_set(n);
  std::vector<Real> bel(outside.size());
  for (Subset a = 0; a < bel.size(); ++a) bel[a] = outside[all & ~a];
  return Capacity{n, std::move(bel), true};
}

/// Product-form distribution of the Bernoulli random set:
/// mass(F) = prod_{j in F} p_j * prod_{j not in F} (1 - p_j).
inline MassFunction random_set_masses(const BernoulliGame& game) {
  const int n = game.size();
  detail::require_table_size(n);
  auto p = detail::long_double_probs(game);
  std::vector<Real> q(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) q[j] = 1 - p[j];
  auto in = detail::subset_products(p);
  auto out = detail::subset_products(q);
  const Subset all = full_set(n);
  std::vector<Real> mass(in.size());
  for (Subset f = 0; f < mass.size(); ++f) mass[f] = in[f] * out[all & ~f];
  return MassFunction{n, std::move(mass)};
}

/// m(S) = sum_{T subset S} (-1)^{|S|-|T|} v(T), by the in-place fast
/// transform (n passes of pairwise differences).
inline SetTable mobius_transform(const Capacity& cap) {
  const int n = cap.players();
  std::vector<Real> m(cap.values().begin(), cap.values().end());
  for (int j = 0; j < n; ++j) {
    const Subset bit = singleton(j);
    for (Subset s = 0; s < m.size(); ++s) {
      if (s & bit) m[s] -= m[s ^ bit];
    }
  }
  return SetTable{n, std::move(m)};
}

/// Inverse of mobius_transform: v(S) = sum_{T subset S} m(T).
inline SetTable zeta_transform(const SetTable& mobius) {
  const int n = mobius.players();
  std::vector<Real> v(mobius.values().begin(), mobius.values().end());
  for (int j = 0; j < n; ++j) {
    const Subset bit = singleton(j);
    for (Subset s = 0; s < v.size(); ++s) {
      if (s & bit) v[s] += v[s ^ bit];
    }
  }
  return SetTable{n, std::move(v)};
}

/// P(X meets S) = sum of masses of the sets F with F and S intersecting.
inline Real hitting_probability(const MassFunction& mass, Subset s) {
  detail::require_subset(mass.players(), s);
  Real hit = 0;
  const auto values = mass.values();
  for (Subset f = 0; f < values.size(); ++f) {
    if ((f & s) != 0) hit += values[f];
  }
  return hit;
}

/// u(S) = 1 - v(S^c). Requires v(E) = 1.
inline Capacity conjugate(const Capacity& cap, Real tolerance = 1e-12L) {
  const int n = cap.players();
  if (std::fabs(cap.total() - 1) > tolerance) {
    throw DomainError("conjugate requires a normalized capacity (v(E) = 1)");
  }
  const Subset all = full_set(n);
  std::vector<Real> u(cap.values().size());
  for (Subset s = 0; s < u.size(); ++s) u[s] = 1 - cap(all & ~s);
  return Capacity{n, std::move(u), true};
}

/// v_R(S) = 1 iff S contains R.
inline Capacity unanimity_game(int n, Subset carrier) {
  detail::require_table_size(n);
  detail::require_subset(n, carrier);
  std::vector<Real> v(std::size_t{1} << n);
  for (Subset s = 0; s < v.size(); ++s) v[s] = (s & carrier) == carrier ? 1 : 0;
  return Capacity{n, std::move(v), true};
}

// ---------------------------------------------------------------------------
// Shapley coalition weights

namespace detail {

inline BigInt factorial(int k) {
  BigInt f{1};
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return BigInt{0};
  k = std::min(k, n - k);
  BigInt c{1};
  for (int j = 1; j <= k; ++j) {
    c *= n - k + j;
    c /= j;
  }
  return c;
}

inline void require_weight_domain(int n, int s) {
  if (n < 1 || s < 0 || s > n - 1) {
    throw DomainError("weight requires n >= 1 and 0 <= s <= n-1 (got n=" + std::to_string(n) +
                      ", s=" + std::to_string(s) + ")");
  }
}

}  // namespace detail

/// s!(n-1-s)!/n!, the probability that a fixed size-s coalition precedes a
/// given player in a uniformly random order.
inline Rational shapley_weight(int n, int s) {
  detail::require_weight_domain(n, s);
  return Rational{detail::factorial(s) * detail::factorial(n - 1 - s), detail::factorial(n)};
}

/// Alternating binomial sum  sum_{l=0}^{n-1-s} C(n-1-s, l) (-1)^l / (l+s+1),
/// the Beta integral B(s+1, n-s) in disguise. Evaluated exactly; it equals
/// shapley_weight(n, s).
inline Rational beta_weight_identity(int n, int s) {
  detail::require_weight_domain(n, s);
  const int top = n - 1 - s;
  Rational sum{0};
  for (int l = 0; l <= top; ++l) {
    Rational term{detail::binomial(top, l), BigInt{l + s + 1}};
    if (l % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

/// Shapley weights for coalition sizes 0..n-1 as a floating type; each entry
/// comes from the exact rational and is rounded once.
template <class Float>
std::vector<Float> shapley_weights(int n) {
  std::vector<Float> w(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) w[static_cast<std::size_t>(s)] = rational_to_float<Float>(shapley_weight(n, s));
  return w;
}

// ---------------------------------------------------------------------------
// Validation

struct CapacityReport {
  bool empty_is_zero = true;
  bool top_is_one = false;
  Real top_value = 0;
  std::vector<std::pair<Subset, Subset>> monotonicity_violations;  // (S, B) with S subset B, v(S) > v(B)
  std::vector<Subset> negative_masses;
  bool is_monotone() const { return monotonicity_violations.empty(); }
  bool is_belief() const { return negative_masses.empty(); }
};

/// Checks normalization, monotonicity (over covering pairs S, S+{j}, which
/// suffices by transitivity) and Moebius non-negativity. Never throws.
inline CapacityReport validate_capacity(const Capacity& cap, Real tolerance = 1e-12L) {
  CapacityReport r;
  const int n = cap.players();
  r.empty_is_zero = std::fabs(cap(0)) <= tolerance;
  r.top_value = cap.total();
  r.top_is_one = std::fabs(r.top_value - 1) <= tolerance;
  for (Subset s = 0; s < cap.values().size(); ++s) {
    for (int j = 0; j < n; ++j) {
      if (contains(s, j)) continue;
      const Subset b = s | singleton(j);
      if (cap(s) > cap(b) + tolerance) r.monotonicity_violations.emplace_back(s, b);
    }
  }
  const auto m = mobius_transform(cap);
  for (Subset s = 0; s < m.size(); ++s) {
    if (m(s) < -tolerance) r.negative_masses.push_back(s);
  }
  return r;
}

}  // namespace racs

#endif  // RACS_GAME_CORE_HPP
