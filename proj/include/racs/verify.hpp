#ifndef RACS_VERIFY_HPP
#define RACS_VERIFY_HPP

// Cross-module invariant checks on seeded random games. Used by the `verify`
// command and by the acceptance runner.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "racs/exact_engine.hpp"
#include "racs/game_core.hpp"
#include "racs/racs_approx.hpp"

namespace racs {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double millis = 0;
};

using VerifyRng = std::mt19937_64;

/// n uniform in [n_min, n_max]; p_i = k/grid with k uniform in [0, grid].
inline BernoulliGame random_game(VerifyRng& rng, int n_min, int n_max, std::int64_t grid = 1000) {
  std::uniform_int_distribution<int> size(n_min, n_max);
  std::uniform_int_distribution<std::int64_t> num(0, grid);
  const int n = size(rng);
  std::vector<Probability> ps;
  for (int i = 0; i < n; ++i) ps.push_back(Probability::from_fraction(num(rng), grid));
  return BernoulliGame::from_probabilities(ps);
}

/// Belief function with random non-negative masses summing to one, so the
/// capacity is monotone with v(E) = 1.
inline Capacity random_normalized_capacity(VerifyRng& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t size = std::size_t{1} << n;
  std::vector<Real> masses(size, 0.0L);
  long double total = 0;
  for (std::size_t s = 1; s < size; ++s) {
    const double w = u(rng);
    masses[s] = w * w * w;  // skew towards small masses
    total += masses[s];
  }
  for (auto& m : masses) m /= total;
  const SetTable v = zeta_transform(SetTable{n, std::move(masses)});
  std::vector<Real> values(v.values().begin(), v.values().end());
  values.back() = 1.0L;
  return Capacity{n, std::move(values), true};
}

namespace detail {

template <class F>
CheckResult timed_check(std::string name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = std::move(name);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string{"exception: "} + e.what();
  }
  r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace detail

/// shapley_weight(n, s) == beta_weight_identity(n, s) exactly for all n <= n_max.
inline CheckResult check_beta_identity(int n_max = 20) {
  return detail::timed_check("beta-identity", [&](CheckResult& r) {
    int cases = 0;
    int bad = 0;
    for (int n = 1; n <= n_max; ++n) {
      for (int s = 0; s < n; ++s) {
        ++cases;
        if (shapley_weight(n, s) != beta_weight_identity(n, s)) ++bad;
      }
    }
    r.passed = bad == 0;
    r.detail = std::to_string(cases) + " (n, s) pairs, " + std::to_string(bad) + " mismatches";
  });
}

/// zeta(mobius(T)) reproduces T.
inline CheckResult check_mobius_roundtrip(int count = 50, int n_max = 10, std::uint64_t seed = 7, double tol = 1e-12) {
  return detail::timed_check("mobius-roundtrip", [&](CheckResult& r) {
    VerifyRng rng{seed};
    long double worst = 0;
    for (int g = 0; g < count; ++g) {
      const auto game = random_game(rng, 1, n_max);
      const auto cap = build_capacity_table(game);
      const auto back = zeta_transform(mobius_transform(cap));
      for (Subset s = 0; s <= full_set(game.size()); ++s) worst = std::max(worst, std::fabs(back[s] - cap(s)));
    }
    r.passed = worst <= tol;
    r.detail = std::to_string(count) + " games, max deviation " + detail::sci(static_cast<double>(worst));
  });
}

/// Hitting probability from the product-form random-set masses equals
/// 1 - prod_{j in S}(1 - p_j) for every S.
inline CheckResult check_random_set_hitting(int count = 100, int n_max = 10, std::uint64_t seed = 11,
                                            double tol = 1e-12) {
  return detail::timed_check("random-set-hitting", [&](CheckResult& r) {
    VerifyRng rng{seed};
    long double worst = 0;
    for (int g = 0; g < count; ++g) {
      const auto game = random_game(rng, 1, n_max);
      const auto masses = random_set_masses(game);
      for (Subset s = 0; s <= full_set(game.size()); ++s) {
        worst = std::max(worst, std::fabs(hitting_probability(masses, s) - capacity_of_subset(game, s)));
      }
    }
    r.passed = worst <= tol;
    r.detail = std::to_string(count) + " games, max deviation " + detail::sci(static_cast<double>(worst));
  });
}

/// Shapley values of v and of its conjugate u(S) = 1 - v(E \ S) agree.
inline CheckResult check_conjugacy(int count = 100, int n_max = 8, std::uint64_t seed = 13, double tol = 1e-10) {
  return detail::timed_check("conjugacy", [&](CheckResult& r) {
    VerifyRng rng{seed};
    std::uniform_int_distribution<int> size(1, n_max);
    long double worst = 0;
    for (int g = 0; g < count; ++g) {
      const int n = size(rng);
      const auto cap = random_normalized_capacity(rng, n);
      const auto dual = conjugate(cap);
      for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::fabs(shapley_exact_capacity(cap, i) - shapley_exact_capacity(dual, i)));
      }
    }
    r.passed = worst <= tol;
    r.detail = std::to_string(count) + " capacities, max deviation " + detail::sci(static_cast<double>(worst));
  });
}

/// Enumeration, symmetric sums and the integral agree (plus the permutation
/// definition for n <= 8), and each vector sums to T(E).
inline CheckResult check_oracle_agreement(int count = 100, int n_min = 1, int n_max = 8, std::uint64_t seed = 17,
                                          double tol = 1e-10) {
  std::string name = "oracle-agreement n=" + std::to_string(n_min) + ".." + std::to_string(n_max);
  return detail::timed_check(std::move(name), [&](CheckResult& r) {
    VerifyRng rng{seed};
    double worst = 0;
    double worst_eff = 0;
    for (int g = 0; g < count; ++g) {
      const auto game = random_game(rng, n_min, n_max);
      const int n = game.size();
      const auto e = exact_shapley_values<double>(game, Method::exact_enum);
      const auto s = exact_shapley_values<double>(game, Method::exact_symmetric);
      std::vector<std::vector<double>> all{e, s};
      if (n <= kMaxPermutationPlayers) {
        all.push_back(exact_shapley_values<double>(game, Method::exact_integral));
        all.push_back(permutation_shapley(game).values);
      }
      for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
          for (int i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            worst = std::max(worst, std::fabs(all[a][k] - all[b][k]));
          }
        }
      }
      long double sum = 0;
      for (double v : s) sum += v;
      worst_eff = std::max(worst_eff, static_cast<double>(std::fabs(sum - total_capacity(game))));
    }
    r.passed = worst <= tol && worst_eff <= tol;
    r.detail = std::to_string(count) + " games, max pairwise deviation " + detail::sci(worst) +
               ", max efficiency gap " + detail::sci(worst_eff);
  });
}

/// |phi(q) - phi(p)| <= delta (n + 1) / 2 when every |q_i - p_i| <= delta.
inline CheckResult check_perturbation_bound(int count = 100, int n_max = 10, std::vector<double> deltas = {0.01, 0.001},
                                            std::uint64_t seed = 19) {
  return detail::timed_check("perturbation-bound", [&](CheckResult& r) {
    VerifyRng rng{seed};
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int violations = 0;
    double worst_ratio = 0;
    for (int g = 0; g < count; ++g) {
      const auto game = random_game(rng, 1, n_max);
      const int n = game.size();
      const auto base = exact_shapley_values<double>(game, Method::exact_symmetric);
      for (double delta : deltas) {
        std::vector<double> q = game.probabilities();
        for (auto& x : q) x = std::clamp(x + delta * u(rng), 0.0, 1.0);
        const auto moved = exact_shapley_values<double>(BernoulliGame::from_doubles(q), Method::exact_symmetric);
        const double bound = perturbation_bound(delta, n);
        for (int i = 0; i < n; ++i) {
          const auto k = static_cast<std::size_t>(i);
          const double d = std::fabs(moved[k] - base[k]);
          worst_ratio = std::max(worst_ratio, d / bound);
          if (d > bound) ++violations;
        }
      }
    }
    r.passed = violations == 0;
    r.detail = std::to_string(count) + " games, " + std::to_string(violations) +
               " violations, max |change|/bound " + detail::sci(worst_ratio);
  });
}

/// Sparse games (sum p <= max_sum): RACS within rel_tol of the oracle for every
/// player with a positive value.
inline CheckResult check_sparse_accuracy(int count = 100, int n_max = 12, std::uint64_t seed = 23,
                                         double max_sum = 0.1, double rel_tol = 0.06) {
  return detail::timed_check("sparse-accuracy", [&](CheckResult& r) {
    VerifyRng rng{seed};
    std::uniform_int_distribution<int> size(1, n_max);
    constexpr std::int64_t grid = 10'000;
    const auto budget = static_cast<std::int64_t>(std::floor(max_sum * grid + 1e-9));
    double worst = 0;
    for (int g = 0; g < count; ++g) {
      const int n = size(rng);
      // split the budget into n positive shares
      std::uniform_int_distribution<std::int64_t> total_d(n, budget);
      const std::int64_t total = total_d(rng);
      std::vector<std::int64_t> cuts;
      std::uniform_int_distribution<std::int64_t> cut_d(1, total - 1);
      while (static_cast<int>(cuts.size()) < n - 1) {
        const auto c = cut_d(rng);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
      }
      std::sort(cuts.begin(), cuts.end());
      std::vector<Probability> ps;
      std::int64_t prev = 0;
      for (auto c : cuts) {
        ps.push_back(Probability::from_fraction(c - prev, grid));
        prev = c;
      }
      ps.push_back(Probability::from_fraction(total - prev, grid));
      const auto game = BernoulliGame::from_probabilities(ps);
      const auto exact = exact_shapley_values<double>(game, Method::exact_symmetric);
      const auto approx = shapley_racs(rationalize(game)).values;
      for (std::size_t i = 0; i < exact.size(); ++i) {
        if (exact[i] > 0) worst = std::max(worst, std::fabs(approx[i] - exact[i]) / exact[i]);
      }
    }
    r.passed = worst <= rel_tol;
    r.detail = std::to_string(count) + " games, max relative error " + detail::sci(worst);
  });
}

enum class VerifyScope { identity, oracles, bounds, all };

inline VerifyScope parse_scope(std::string_view s) {
  if (s == "identity") return VerifyScope::identity;
  if (s == "oracles") return VerifyScope::oracles;
  if (s == "bounds") return VerifyScope::bounds;
  if (s == "all") return VerifyScope::all;
  throw ValidationError("unknown verify scope '" + std::string{s} + "'");
}

inline std::vector<CheckResult> run_verify(VerifyScope scope) {
  std::vector<CheckResult> out;
  const bool all = scope == VerifyScope::all;
  if (all || scope == VerifyScope::identity) {
    out.push_back(check_beta_identity(20));
    out.push_back(check_mobius_roundtrip());
    out.push_back(check_random_set_hitting());
    out.push_back(check_conjugacy());
  }
  if (all || scope == VerifyScope::oracles) {
    out.push_back(check_oracle_agreement(100, 1, 8));
  }
  if (all || scope == VerifyScope::bounds) {
    out.push_back(check_perturbation_bound());
    out.push_back(check_sparse_accuracy());
  }
  return out;
}

}  // namespace racs

#endif  // RACS_VERIFY_HPP
