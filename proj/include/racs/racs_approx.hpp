#ifndef RACS_RACS_APPROX_HPP
#define RACS_RACS_APPROX_HPP

// Sub-player (random closed set) approximation of Bernoulli Shapley values.
//
// Each probability is written over a common denominator l as p_i = m_i / l and
// player i is replaced by m_i independent sub-players of probability 1/l. The
// resulting game is homogeneous, so every sub-player has Shapley value
// (1/m)(1 - (1 - 1/l)^m) with m = sum m_i, and player i receives m_i of them:
//
//     phi_i(mu) = (m_i / m) * (1 - (1 - 1/l)^m)
//
// After one shared factor the whole vector costs O(n). This header also holds
// the regime classification (r = m/l), the two regime corrections, the
// mean-field variant, and the error bounds.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "racs/error.hpp"
#include "racs/exact_engine.hpp"
#include "racs/game_core.hpp"
#include "racs/rational.hpp"

namespace racs {

/// Largest common denominator accepted. Counts and l are kept in 64-bit
/// integers; l beyond this is reported rather than wrapped.
inline constexpr std::uint64_t kMaxDenominator = std::uint64_t{1} << 62;

/// Largest m for which the shared factor is evaluated in exact arithmetic.
inline constexpr std::uint64_t kMaxExactPower = 10'000;

struct RationalizedGame {
  std::vector<std::uint64_t> counts;  // m_i
  std::uint64_t denominator = 1;      // l
  std::uint64_t total = 0;            // m
  double rounding_delta = 0;          // max |p_i - m_i / l|
  bool clamped = false;               // a positive p_i rounded to 0 was raised to 1/l
  std::shared_ptr<const BernoulliGame> source;

  int size() const { return static_cast<int>(counts.size()); }
  double ratio() const { return static_cast<double>(total) / static_cast<double>(denominator); }
  double p(int i) const {
    return static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(denominator);
  }

  /// Builds the game directly from integer counts (p_i = m_i / l), as used by
  /// vulnerability-count inputs.
  static RationalizedGame from_counts(std::vector<std::uint64_t> counts, std::uint64_t l,
                                      std::vector<std::string> ids = {}) {
    if (l == 0 || l > kMaxDenominator) throw DomainError("denominator must be in [1, 2^62]");
    if (counts.empty()) throw DomainError("a game needs at least one player");
    if (!ids.empty() && ids.size() != counts.size()) throw DomainError("ids and counts differ in length");
    RationalizedGame rg;
    std::vector<Player> players;
    players.reserve(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] > l) throw DomainError("count exceeds the denominator (p_i > 1)");
      if (rg.total > std::numeric_limits<std::uint64_t>::max() - counts[i]) throw OverflowError("sum of counts overflows");
      rg.total += counts[i];
      std::string id = ids.empty() ? std::to_string(i + 1) : ids[i];
      players.push_back({std::move(id), Probability{Rational{BigInt{counts[i]}, BigInt{l}}}});
    }
    rg.counts = std::move(counts);
    rg.denominator = l;
    rg.source = std::make_shared<const BernoulliGame>(std::move(players));
    return rg;
  }
};

enum class RegimeLabel { sparse, critical, dense };

inline std::string_view to_string(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::sparse: return "SPARSE";
    case RegimeLabel::critical: return "CRITICAL";
    case RegimeLabel::dense: return "DENSE";
  }
  return "UNKNOWN";
}

struct Regime {
  RegimeLabel label = RegimeLabel::sparse;
  double r = 0;  // m / l, equal to the sum of the probabilities
};

struct RegimeThresholds {
  double sparse_max = 0.5;
  double critical_max = 2.0;
};

struct ErrorReport {
  double e1 = 0;                  // |p_i - (1 - (1 - 1/l)^{m_i})|
  double e2 = 0;                  // reference-vs-estimate discrepancy
  double thm_bound = 0;           // m_i m / (2 l^2) + weight discrepancy
  double weight_discrepancy = 0;  // |m_i/m - w_i/W|, identically zero
  double residual_order = 0;      // m_i m^2 / l^3, reported, not added
};

// ---------------------------------------------------------------------------
// Rationalization

namespace detail {

inline std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t g = std::gcd(a, b);
  const unsigned __int128 l = static_cast<unsigned __int128>(a / g) * b;
  if (l > kMaxDenominator) throw OverflowError("common denominator exceeds 2^62; use delta mode");
  return static_cast<std::uint64_t>(l);
}

inline std::uint64_t to_u64_checked(const BigInt& v) {
  if (v < 0 || v > BigInt{kMaxDenominator}) throw OverflowError("denominator exceeds 2^62; use delta mode");
  return v.convert_to<std::uint64_t>();
}

}  // namespace detail

/// Least common denominator of fractions in lowest terms, by repeated
/// gcd (no factorization). Zero entries impose no constraint.
inline std::uint64_t common_denominator(std::span<const Rational> fractions) {
  std::uint64_t l = 1;
  for (const auto& f : fractions) {
    if (f < 0 || f > 1) throw DomainError("fraction " + f.str() + " outside [0, 1]");
    if (f == 0) continue;
    l = detail::checked_lcm(l, detail::to_u64_checked(denominator_of(f)));
  }
  return l;
}

struct RationalizeMode {
  enum class Kind { exact, delta };
  Kind kind = Kind::exact;
  double delta = 0;

  static RationalizeMode exact() { return {}; }
  static RationalizeMode within(double d) { return {Kind::delta, d}; }
};

namespace detail {

/// Smallest power of ten P with 1/(2P) < delta; rounding to the grid 1/P then
/// moves every value by strictly less than delta. delta is read as its
/// shortest decimal form, so 0.005 means 1/200 and not the nearest double.
inline std::uint64_t decimal_grid(double delta) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, delta);
  const Rational d = parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  std::uint64_t grid = 1;
  while (Rational{1, BigInt{2 * grid}} >= d) {
    if (grid > kMaxDenominator / 10) throw OverflowError("delta too small for a 64-bit grid");
    grid *= 10;
  }
  return grid;
}

inline RationalizedGame counts_from_fractions(std::span<const Rational> q, std::uint64_t l) {
  RationalizedGame rg;
  rg.denominator = l;
  rg.counts.reserve(q.size());
  const Rational big_l{BigInt{l}};
  for (const auto& f : q) {
    const Rational scaled = f * big_l;
    const std::uint64_t mi = numerator_of(scaled).convert_to<std::uint64_t>();
    if (rg.total > std::numeric_limits<std::uint64_t>::max() - mi) throw OverflowError("sum of counts overflows");
    rg.total += mi;
    rg.counts.push_back(mi);
  }
  return rg;
}

}  // namespace detail

/// Exact mode: m_i = p_i l with l the least common denominator. Delta mode:
/// each p_i is rounded to the decimal grid 1/P (P a power of ten, 1/(2P) < delta)
/// and the reduced fractions are put over their least common denominator.
inline RationalizedGame rationalize(const BernoulliGame& game, RationalizeMode mode = RationalizeMode::exact()) {
  auto source = std::make_shared<const BernoulliGame>(game);
  const auto exact = game.exact_probabilities();
  if (mode.kind == RationalizeMode::Kind::exact) {
    const std::uint64_t l = common_denominator(exact);
    auto rg = detail::counts_from_fractions(exact, l);
    rg.source = std::move(source);
    return rg;
  }

  if (!(mode.delta > 0) || !std::isfinite(mode.delta)) throw DomainError("delta must be positive");
  const std::uint64_t grid = detail::decimal_grid(mode.delta);
  const Rational big_grid{BigInt{grid}};
  std::vector<Rational> q;
  q.reserve(exact.size());
  bool clamped = false;
  Rational worst{0};
  for (const auto& p : exact) {
    const Rational scaled = p * big_grid + Rational{1, 2};
    BigInt rounded = numerator_of(scaled) / denominator_of(scaled);  // floor, scaled > 0
    if (rounded == 0 && p > 0) {
      rounded = 1;
      clamped = true;
    }
    Rational qi{rounded, BigInt{grid}};
    Rational diff = qi > p ? Rational{qi - p} : Rational{p - qi};
    if (diff > worst) worst = diff;
    q.push_back(std::move(qi));
  }
  const std::uint64_t l = common_denominator(q);
  auto rg = detail::counts_from_fractions(q, l);
  rg.rounding_delta = to_double(worst);
  rg.clamped = clamped;
  rg.source = std::move(source);
  return rg;
}

/// Real-valued probabilities always go through delta mode.
inline RationalizedGame rationalize(std::span<const double> probs, double delta) {
  return rationalize(BernoulliGame::from_doubles(probs), RationalizeMode::within(delta));
}

// ---------------------------------------------------------------------------
// Estimates

/// 1 - (1 - 1/l)^m, evaluated as -expm1(m log1p(-1/l)) to stay accurate for
/// large m and l.
inline double racs_shared_factor(std::uint64_t m, std::uint64_t l) {
  if (m == 0) return 0.0;
  if (l == 1) return 1.0;
  const long double x = static_cast<long double>(m) * std::log1p(-1.0L / static_cast<long double>(l));
  return static_cast<double>(-std::expm1(x));
}

inline Rational racs_shared_factor_exact(std::uint64_t m, std::uint64_t l) {
  if (m > kMaxExactPower) throw DomainError("exact shared factor is limited to m <= 10^4");
  const Rational base = Rational{1} - Rational{BigInt{1}, BigInt{l}};
  return Rational{1} - pow(base, m);
}

inline Regime classify_regime(const RationalizedGame& rg, RegimeThresholds th = {}) {
  Regime reg;
  reg.r = rg.ratio();
  if (reg.r <= th.sparse_max) {
    reg.label = RegimeLabel::sparse;
  } else if (reg.r <= th.critical_max) {
    reg.label = RegimeLabel::critical;
  } else {
    reg.label = RegimeLabel::dense;
  }
  return reg;
}

/// phi_i(mu) = (m_i/m)(1 - (1 - 1/l)^m) for every player.
inline ShapleyVector shapley_racs(const RationalizedGame& rg, RegimeThresholds th = {}) {
  ShapleyMeta meta;
  meta.regime = std::string{to_string(classify_regime(rg, th).label)};
  std::vector<double> values(rg.counts.size(), 0.0);
  if (rg.total == 0) {
    meta.warnings.emplace_back("all probabilities are zero; every value is 0");
    return make_shapley_vector(std::move(values), Method::racs, std::move(meta));
  }
  const double factor = racs_shared_factor(rg.total, rg.denominator);
  const double m = static_cast<double>(rg.total);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(rg.counts[i]) / m * factor;
  if (rg.clamped) meta.warnings.emplace_back("a positive probability rounded to zero was clamped to 1/l");
  return make_shapley_vector(std::move(values), Method::racs, std::move(meta));
}

/// Exact-arithmetic RACS values (m <= 10^4).
inline std::vector<Rational> shapley_racs_exact(const RationalizedGame& rg) {
  std::vector<Rational> out(rg.counts.size(), Rational{0});
  if (rg.total == 0) return out;
  const Rational factor = racs_shared_factor_exact(rg.total, rg.denominator);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Rational{BigInt{rg.counts[i]}, BigInt{rg.total}} * factor;
  return out;
}

/// Near r = 1:  x = phi_mu / (1 - 1/e),  corrected = x (0.5 + 0.5 x).
inline double correct_situation2(double phi_mu) {
  if (phi_mu < 0) throw DomainError("phi_mu must be non-negative");
  const double x = phi_mu / -std::expm1(-1.0);
  return x * (0.5 + 0.5 * x);
}

enum class NormalizeTarget { te, one };

struct BimodalThresholds {
  double tau_low = 0.2;
  double tau_high = 0.8;
};

/// Dense-regime correction. Players with p >= tau_high share raw score
/// 1/|L|; everyone else gets p_i/n. The raw scores are then scaled by one
/// factor so their total is T(E) (te) or 1 (one).
inline ShapleyVector correct_situation3(const BernoulliGame& game, BimodalThresholds tau = {},
                                        NormalizeTarget target = NormalizeTarget::te,
                                        RegimeThresholds regime = {}) {
  if (!(tau.tau_low < tau.tau_high)) throw DomainError("tau_low must be below tau_high");
  const int n = game.size();
  const auto p = game.probabilities();
  int high = 0;
  double sum_p = 0;
  for (double x : p) {
    if (x >= tau.tau_high) ++high;
    sum_p += x;
  }
  if (high == 0 && sum_p > regime.critical_max) {
    auto fallback = shapley_racs(rationalize(game), regime);
    fallback.meta.warnings.emplace_back("no high-probability players in a dense game; returning uncorrected RACS values");
    return fallback;
  }
  std::vector<double> raw(p.size());
  long double raw_total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    raw[i] = p[i] >= tau.tau_high ? 1.0 / high : p[i] / n;
    raw_total += raw[i];
  }
  ShapleyMeta meta;
  meta.regime = std::string{to_string(RegimeLabel::dense)};
  if (raw_total == 0) return make_shapley_vector(std::move(raw), Method::racs_corrected, std::move(meta));
  const long double goal = target == NormalizeTarget::te ? total_capacity(game) : 1.0L;
  const long double scale = goal / raw_total;
  for (auto& v : raw) v = static_cast<double>(v * scale);
  return make_shapley_vector(std::move(raw), Method::racs_corrected, std::move(meta));
}

struct CorrectionOptions {
  RegimeThresholds regime;
  BimodalThresholds tau;
  NormalizeTarget target = NormalizeTarget::te;
};

/// True when every player is low (p <= tau_low) or high (p >= tau_high) and
/// both groups are present.
inline bool is_bimodal(std::span<const double> probs, BimodalThresholds tau = {}) {
  bool low = false;
  bool high = false;
  for (double p : probs) {
    if (p <= tau.tau_low) {
      low = true;
    } else if (p >= tau.tau_high) {
      high = true;
    } else {
      return false;
    }
  }
  return low && high;
}

/// RACS with the correction that matches the game: the bimodal rescaling when
/// dense or bimodal, the near-critical relation when critical, none when
/// sparse.
inline ShapleyVector shapley_racs_corrected(const RationalizedGame& rg, CorrectionOptions opt = {}) {
  const Regime reg = classify_regime(rg, opt.regime);
  bool bimodal = false;
  if (rg.source) {
    const auto p = rg.source->probabilities();
    bimodal = is_bimodal(p, opt.tau);
  }
  if (reg.label == RegimeLabel::dense || bimodal) {
    if (!rg.source) throw DomainError("dense correction needs the source game");
    return correct_situation3(*rg.source, opt.tau, opt.target, opt.regime);
  }
  auto out = shapley_racs(rg, opt.regime);
  out.method = Method::racs_corrected;
  if (reg.label == RegimeLabel::critical) {
    for (auto& v : out.values) v = correct_situation2(v);
  }
  return out;
}

/// (p_i / p~)(1 - e^{-p~}) with p~ = m/l; the exponential replacement is only
/// accepted while m <= l^2.
inline ShapleyVector meanfield_racs(const RationalizedGame& rg) {
  const unsigned __int128 l2 = static_cast<unsigned __int128>(rg.denominator) * rg.denominator;
  if (static_cast<unsigned __int128>(rg.total) > l2) {
    throw DomainError("mean-field replacement is invalid for m > l^2");
  }
  std::vector<double> values(rg.counts.size(), 0.0);
  if (rg.total != 0) {
    const double p_tilde = rg.ratio();
    const double factor = -std::expm1(-p_tilde) / p_tilde;
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = rg.p(static_cast<int>(i)) * factor;
  }
  ShapleyMeta meta;
  meta.regime = std::string{to_string(classify_regime(rg).label)};
  return make_shapley_vector(std::move(values), Method::meanfield, std::move(meta));
}

// ---------------------------------------------------------------------------
// Error analysis

/// Leading bound m_i m / (2 l^2) plus the weight discrepancy |m_i/m - w_i/W|
/// (computed exactly, and always zero because w_i = m_i/l). The residual order
/// m_i m^2 / l^3 is reported separately.
inline ErrorReport error_bound_thm(const RationalizedGame& rg, int i) {
  detail::require_player(rg.size(), i);
  ErrorReport rep;
  const double mi = static_cast<double>(rg.counts[static_cast<std::size_t>(i)]);
  const double m = static_cast<double>(rg.total);
  const double l = static_cast<double>(rg.denominator);
  if (rg.total != 0) {
    const Rational big_l{BigInt{rg.denominator}};
    const Rational share{BigInt{rg.counts[static_cast<std::size_t>(i)]}, BigInt{rg.total}};
    const Rational wi = Rational{BigInt{rg.counts[static_cast<std::size_t>(i)]}} / big_l;
    const Rational w_total = Rational{BigInt{rg.total}} / big_l;
    const Rational diff = share - wi / w_total;
    rep.weight_discrepancy = to_double(diff < 0 ? Rational{-diff} : diff);
  }
  rep.thm_bound = mi * m / (2.0 * l * l) + rep.weight_discrepancy;
  rep.residual_order = mi * m * m / (l * l * l);
  return rep;
}

/// e1: how far one player's sub-player union probability is from p_i.
/// e2: distance between the one-vs-mean reference expression and phi_i(mu),
/// with p_bar the mean of the other players' probabilities (0 when n = 1).
inline ErrorReport error_decomposition(const RationalizedGame& rg, int i) {
  const int n = rg.size();
  detail::require_player(n, i);
  if (!rg.source) throw DomainError("error decomposition needs the source game");
  ErrorReport rep;
  const auto p = rg.source->probabilities();
  const double pi = p[static_cast<std::size_t>(i)];
  const double l = static_cast<double>(rg.denominator);
  const double mi = static_cast<double>(rg.counts[static_cast<std::size_t>(i)]);
  const double union_prob = -std::expm1(mi * std::log1p(-1.0 / l));
  rep.e1 = std::fabs(pi - (rg.denominator == 1 ? (mi > 0 ? 1.0 : 0.0) : union_prob));

  double p_bar = 0;
  if (n > 1) {
    long double s = 0;
    for (int j = 0; j < n; ++j) {
      if (j != i) s += p[static_cast<std::size_t>(j)];
    }
    p_bar = static_cast<double>(s / (n - 1));
  }
  const double reference = shapley_one_vs_mean_reference(pi, p_bar, n);
  const double estimate = rg.total == 0 ? 0.0 : mi / static_cast<double>(rg.total) * racs_shared_factor(rg.total, rg.denominator);
  rep.e2 = std::fabs(reference - estimate);
  return rep;
}

/// Worst-case change of any Shapley value when each probability moves by at
/// most delta: delta (n + 1) / 2.
inline double perturbation_bound(double delta, int n) {
  if (delta < 0 || n < 1) throw DomainError("perturbation bound needs delta >= 0 and n >= 1");
  return delta * (n + 1) / 2.0;
}

/// Largest rounding tolerance that keeps every Shapley value within epsilon.
inline double pick_delta(double epsilon, int n) {
  if (epsilon <= 0 || n < 1) throw DomainError("pick_delta needs epsilon > 0 and n >= 1");
  return 2.0 * epsilon / (n + 1);
}

}  // namespace racs

#endif  // RACS_RACS_APPROX_HPP
