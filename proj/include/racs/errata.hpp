#ifndef RACS_ERRATA_HPP
#define RACS_ERRATA_HPP

// Quoted reference values for the three worked games, and the comparison of
// each against what this library computes for the same inputs.

#include <cmath>
#include <string>
#include <vector>

#include "racs/approx_layered.hpp"
#include "racs/exact_engine.hpp"
#include "racs/game_core.hpp"
#include "racs/racs_approx.hpp"

namespace racs {

enum class QuotedKind {
  exact,            // claimed exact Shapley values; compared with the oracle
  racs,             // shared-factor estimate
  racs_normalized,  // dense correction scaled to sum to one
  layered,          // layer decomposition (compared with the unweighted variant)
};

inline std::string_view to_string(QuotedKind k) {
  switch (k) {
    case QuotedKind::exact: return "exact";
    case QuotedKind::racs: return "racs";
    case QuotedKind::racs_normalized: return "racs-corrected(one)";
    case QuotedKind::layered: return "layered(unweighted)";
  }
  return "unknown";
}

struct QuotedSet {
  std::string game;    // short name of the worked game
  std::string label;   // which column
  std::vector<std::string_view> probabilities;
  QuotedKind kind;
  std::vector<double> values;
};

inline const std::vector<QuotedSet>& quoted_sets() {
  static const std::vector<QuotedSet> sets = [] {
    const std::vector<std::string_view> seven{"0.2", "0.5", "0.7", "0.3", "0.1", "0.9", "0.4"};
    const std::vector<std::string_view> network{"1/2", "1/3", "1/6"};
    const std::vector<std::string_view> bimodal{"0.05", "0.95", "0.95"};
    return std::vector<QuotedSet>{
        {"seven-player", "exact (4 dp)", seven, QuotedKind::exact,
         {0.0621, 0.1763, 0.2118, 0.0967, 0.0308, 0.2954, 0.1222}},
        {"seven-player", "exact (6 dp)", seven, QuotedKind::exact,
         {0.062074, 0.176342, 0.211763, 0.096693, 0.030815, 0.295382, 0.122157}},
        {"seven-player", "racs l=10", seven, QuotedKind::racs,
         {0.0632, 0.1580, 0.2212, 0.0948, 0.0316, 0.2844, 0.1264}},
        {"seven-player", "second algorithm", seven, QuotedKind::layered,
         {0.052189, 0.174526, 0.201563, 0.099119, 0.008894, 0.273576, 0.140106}},
        {"network", "exact", network, QuotedKind::exact, {0.3275, 0.2475, 0.1080}},
        {"network", "racs", network, QuotedKind::racs, {0.3326, 0.2217, 0.1108}},
        {"bimodal", "exact", bimodal, QuotedKind::exact, {0.0176, 0.4912, 0.4912}},
        {"bimodal", "second algorithm", bimodal, QuotedKind::layered, {0.0013, 0.4993, 0.4993}},
        {"bimodal", "racs", bimodal, QuotedKind::racs, {0.0222, 0.4213, 0.4213}},
        {"bimodal", "normalized correction", bimodal, QuotedKind::racs_normalized, {0.0164, 0.4918, 0.4918}},
    };
  }();
  return sets;
}

struct ErrataEntry {
  std::string game;
  std::string label;
  QuotedKind kind;
  int player = 0;  // 0-based
  double quoted = 0;
  double computed = 0;
  double deviation = 0;  // computed - quoted
  bool flagged = false;  // |deviation| > threshold
};

inline std::vector<double> compute_quoted_kind(const BernoulliGame& game, QuotedKind kind) {
  switch (kind) {
    case QuotedKind::exact: return exact_shapley_values<double>(game, Method::exact_enum);
    case QuotedKind::racs: return shapley_racs(rationalize(game)).values;
    case QuotedKind::racs_normalized: return correct_situation3(game, {}, NormalizeTarget::one).values;
    case QuotedKind::layered: return shapley_layered(game, LayerVariant::unweighted).values;
  }
  return {};
}

/// Every quoted value next to the library's value. Entries whose absolute
/// deviation exceeds `threshold` are flagged.
inline std::vector<ErrataEntry> errata_report(double threshold = 1e-3) {
  std::vector<ErrataEntry> out;
  for (const auto& set : quoted_sets()) {
    const auto game = BernoulliGame::from_strings(std::span<const std::string_view>{set.probabilities});
    const auto computed = compute_quoted_kind(game, set.kind);
    for (std::size_t i = 0; i < set.values.size(); ++i) {
      ErrataEntry e{set.game, set.label, set.kind, static_cast<int>(i), set.values[i], computed[i], 0, false};
      e.deviation = e.computed - e.quoted;
      e.flagged = std::fabs(e.deviation) > threshold;
      out.push_back(std::move(e));
    }
  }
  return out;
}

/// Quoted sets whose probabilities equal the game's, in order.
inline std::vector<const QuotedSet*> quoted_for(const BernoulliGame& game) {
  std::vector<const QuotedSet*> out;
  for (const auto& set : quoted_sets()) {
    if (static_cast<int>(set.probabilities.size()) != game.size()) continue;
    bool same = true;
    for (int i = 0; i < game.size() && same; ++i) {
      same = parse_rational(set.probabilities[static_cast<std::size_t>(i)]) == game.p(i).exact();
    }
    if (same) out.push_back(&set);
  }
  return out;
}

}  // namespace racs

#endif  // RACS_ERRATA_HPP
