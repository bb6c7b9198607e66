#ifndef RACS_COMMANDS_HPP
#define RACS_COMMANDS_HPP

// Command implementations behind the racs-shapley tool. Each command builds a
// Report (or a list of checks) from a parsed game file; the tool only parses
// arguments, prints, and maps exceptions to exit codes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "racs/analytic_approx.hpp"
#include "racs/approx_layered.hpp"
#include "racs/errata.hpp"
#include "racs/error.hpp"
#include "racs/exact_engine.hpp"
#include "racs/game_core.hpp"
#include "racs/game_file.hpp"
#include "racs/mc_baseline.hpp"
#include "racs/racs_approx.hpp"
#include "racs/report.hpp"
#include "racs/verify.hpp"

namespace racs {

enum class ExitCode : int { ok = 0, usage = 1, validation = 2, infeasible = 3 };

/// Exit code for an exception escaping a command.
inline ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SizeLimitError*>(&e) != nullptr) return ExitCode::infeasible;
  if (dynamic_cast<const OverflowError*>(&e) != nullptr) return ExitCode::infeasible;
  if (dynamic_cast<const ValidationError*>(&e) != nullptr) return ExitCode::validation;
  if (dynamic_cast<const DomainError*>(&e) != nullptr) return ExitCode::validation;
  return ExitCode::validation;
}

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"exact",   "exact-symmetric", "exact-integral", "homogeneous",
                                              "racs",    "racs-corrected",  "layered",        "meanfield",
                                              "binomial", "riemann",        "mc"};
  return names;
}

inline void require_method(const std::string& name) {
  const auto& names = method_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ValidationError("unknown method '" + name + "'");
  }
}

struct MethodOptions {
  std::uint64_t samples = 10'000;
  std::uint64_t seed = 0;
  std::optional<double> delta;        // rationalize probability-form games on a decimal grid
  std::optional<std::string> variant; // layered: literal|unweighted, binomial: closed|literal
  std::optional<std::string> normalize;
  double tau_low = 0.2;
  double tau_high = 0.8;
  bool force_symmetric = false;
  int nodes = 0;  // riemann nodes; 0 means n
};

inline std::string default_method(const GameFile& file) { return file.count_form() ? "racs" : "exact-symmetric"; }

/// The count-form game as given, or the probability-form game rationalized
/// exactly (or on the --delta grid).
inline RationalizedGame rationalized_of(const GameFile& file, const MethodOptions& opt) {
  if (file.rationalized) return *file.rationalized;
  try {
    return rationalize(file.game, opt.delta ? RationalizeMode::within(*opt.delta) : RationalizeMode::exact());
  } catch (const OverflowError& e) {
    throw OverflowError(std::string{e.what()} + "; pass --delta to round onto a decimal grid");
  }
}

struct MethodRun {
  std::string name;
  ShapleyVector result;
  std::vector<std::optional<double>> bounds;
  std::optional<RationalizedGame> rationalized;
  std::vector<std::string> warnings;
};

inline Normalize layered_normalize(const std::optional<std::string>& s) {
  if (!s || *s == "none") return Normalize::none;
  if (*s == "te") return Normalize::te;
  if (*s == "one") return Normalize::one;
  throw ValidationError("--normalize must be none, te or one");
}

inline MethodRun run_method(const GameFile& file, const std::string& name, const MethodOptions& opt) {
  require_method(name);
  const auto& game = file.game;
  MethodRun run;
  run.name = name;
  if (name == "exact") {
    if (game.size() > kDefaultEnumLimit) {
      if (!opt.force_symmetric) {
        throw SizeLimitError("exact enumeration is limited to n <= 24 (got " + std::to_string(game.size()) +
                             "); pass --force-symmetric to use symmetric sums");
      }
      run.result = exact_shapley(game, Method::exact_symmetric);
      run.warnings.emplace_back("n > 24: exact enumeration replaced by symmetric sums");
    } else {
      run.result = exact_shapley(game, Method::exact_enum);
    }
  } else if (name == "exact-symmetric") {
    run.result = exact_shapley(game, Method::exact_symmetric);
  } else if (name == "exact-integral") {
    run.result = exact_shapley(game, Method::exact_integral);
  } else if (name == "homogeneous") {
    run.result = exact_shapley(game, Method::homogeneous);
  } else if (name == "racs") {
    run.rationalized = rationalized_of(file, opt);
    run.result = shapley_racs(*run.rationalized);
    for (int i = 0; i < game.size(); ++i) run.bounds.emplace_back(error_bound_thm(*run.rationalized, i).thm_bound);
  } else if (name == "racs-corrected") {
    run.rationalized = rationalized_of(file, opt);
    CorrectionOptions c;
    c.tau = {opt.tau_low, opt.tau_high};
    if (opt.normalize && *opt.normalize == "one") {
      c.target = NormalizeTarget::one;
    } else if (!opt.normalize || *opt.normalize == "te") {
      c.target = NormalizeTarget::te;
    } else {
      throw ValidationError("racs-corrected normalizes to te or one");
    }
    run.result = shapley_racs_corrected(*run.rationalized, c);
  } else if (name == "meanfield") {
    run.rationalized = rationalized_of(file, opt);
    run.result = meanfield_racs(*run.rationalized);
  } else if (name == "layered") {
    LayerVariant v = LayerVariant::unweighted;
    if (opt.variant && *opt.variant == "literal") {
      v = LayerVariant::literal;
    } else if (opt.variant && *opt.variant != "unweighted") {
      throw ValidationError("layered --variant must be literal or unweighted");
    }
    run.result = shapley_layered(game, v, layered_normalize(opt.normalize));
  } else if (name == "binomial") {
    BinomialVariant v = BinomialVariant::closed;
    if (opt.variant && *opt.variant == "literal") {
      v = BinomialVariant::literal;
    } else if (opt.variant && *opt.variant != "closed" && *opt.variant != "unweighted") {
      throw ValidationError("binomial --variant must be closed or literal");
    }
    const auto p = game.probabilities();
    run.result = shapley_binomial(p, v);
  } else if (name == "riemann") {
    const auto p = game.probabilities();
    run.result = shapley_riemann(p, opt.nodes);
  } else if (name == "mc") {
    run.result = shapley_mc(game, McConfig{opt.samples, opt.seed}).to_shapley_vector();
  }
  for (const auto& w : run.result.meta.warnings) run.warnings.push_back(w);
  return run;
}

namespace detail {

inline nlohmann::json game_json(const BernoulliGame& game) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& pl : game.players()) arr.push_back({{"id", pl.id}, {"p", pl.p.str()}});
  return arr;
}

inline void attach_rationalized(Report& report, const RationalizedGame& rg) {
  const Regime reg = classify_regime(rg);
  report.regime = std::string{to_string(reg.label)};
  report.ratio = reg.r;
  report.extra["denominator"] = rg.denominator;
  report.extra["m"] = rg.total;
  report.extra["shared_factor"] = racs_shared_factor(rg.total, rg.denominator);
}

inline std::vector<std::string> errata_footnotes(const BernoulliGame& game) {
  std::vector<std::string> notes;
  for (const QuotedSet* set : quoted_for(game)) {
    const auto computed = compute_quoted_kind(game, set->kind);
    std::string line = "errata: quoted " + set->label + " values for this game [";
    for (std::size_t i = 0; i < set->values.size(); ++i) {
      line += (i ? ", " : "") + detail::sig6(set->values[i]);
    }
    line += "]; computed " + std::string{to_string(set->kind)} + " [";
    for (std::size_t i = 0; i < computed.size(); ++i) line += (i ? ", " : "") + detail::sig6(computed[i]);
    line += "]";
    notes.push_back(std::move(line));
  }
  return notes;
}

}  // namespace detail

inline Report cmd_compute(const GameFile& file, std::string method, const MethodOptions& opt) {
  if (method.empty()) method = default_method(file);
  const auto run = run_method(file, method, opt);
  const auto& game = file.game;

  Report report;
  report.title = "Shapley values (" + method + ")";
  report.t_e = static_cast<double>(total_capacity(game));
  report.extra["game"] = detail::game_json(game);
  if (run.rationalized) detail::attach_rationalized(report, *run.rationalized);
  for (int i = 0; i < game.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    ReportRow row;
    row.player = game.player(i).id;
    row.method = method;
    row.value = run.result.values[k];
    if (run.rationalized) row.count = run.rationalized->counts[k];
    if (!run.result.meta.std_error.empty()) row.std_error = run.result.meta.std_error[k];
    if (!run.bounds.empty()) row.bound = run.bounds[k];
    report.rows.push_back(std::move(row));
  }
  report.warnings = run.warnings;
  return report;
}

/// Reference exact values for comparisons: enumeration up to n = 20, symmetric
/// sums beyond.
inline std::vector<double> reference_exact(const BernoulliGame& game) {
  return exact_shapley_values<double>(game, game.size() <= 20 ? Method::exact_enum : Method::exact_symmetric);
}

inline Report cmd_compare(const GameFile& file, const std::vector<std::string>& methods, const MethodOptions& opt) {
  if (methods.empty()) throw ValidationError("compare needs at least one method");
  for (const auto& m : methods) require_method(m);
  const auto& game = file.game;
  const auto exact = reference_exact(game);

  Report report;
  report.title = "Shapley value comparison";
  report.t_e = static_cast<double>(total_capacity(game));
  report.extra["game"] = detail::game_json(game);
  report.extra["exact_method"] = game.size() <= 20 ? "exact-enum" : "exact-symmetric";
  bool attached = false;
  for (const auto& m : methods) {
    const auto start = std::chrono::steady_clock::now();
    const auto run = run_method(file, m, opt);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (run.rationalized && !attached) {
      detail::attach_rationalized(report, *run.rationalized);
      attached = true;
    }
    MethodSummary sum;
    sum.method = m;
    sum.millis = ms;
    std::size_t rel_count = 0;
    for (int i = 0; i < game.size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      ReportRow row;
      row.player = game.player(i).id;
      row.method = m;
      row.value = run.result.values[k];
      row.exact = exact[k];
      row.rel_error_pct = relative_error_pct(row.value, exact[k]);
      if (run.rationalized) row.count = run.rationalized->counts[k];
      if (!run.result.meta.std_error.empty()) row.std_error = run.result.meta.std_error[k];
      const double abs_err = std::fabs(row.value - exact[k]);
      sum.max_abs_error = std::max(sum.max_abs_error, abs_err);
      sum.mean_abs_error += abs_err;
      if (row.rel_error_pct) {
        sum.max_rel_error_pct = std::max(sum.max_rel_error_pct, std::fabs(*row.rel_error_pct));
        sum.mean_rel_error_pct += std::fabs(*row.rel_error_pct);
        ++rel_count;
      }
      report.rows.push_back(std::move(row));
    }
    sum.mean_abs_error /= game.size();
    if (rel_count > 0) sum.mean_rel_error_pct /= static_cast<double>(rel_count);
    report.summaries.push_back(sum);
    for (const auto& w : run.warnings) report.warnings.push_back(m + ": " + w);
  }
  report.footnotes = detail::errata_footnotes(game);
  return report;
}

struct RiskOptions {
  std::optional<std::string> device;  // update target
  std::optional<std::uint64_t> vulns;
  bool frozen_baseline = false;
};

/// Per-device systemic risk from vulnerability counts, ranked by descending
/// count. With an update, the named device's count changes; m and the shared
/// factor are recomputed unless the baseline is frozen.
inline Report cmd_risk_report(const GameFile& file, const RiskOptions& opt) {
  if (!file.rationalized) throw ValidationError("risk report needs the vulns/denominator form");
  const RationalizedGame& base = *file.rationalized;
  const auto& ids = file.game.players();
  if (opt.device.has_value() != opt.vulns.has_value()) throw ValidationError("update needs both --device and --vulns");

  std::vector<std::uint64_t> counts = base.counts;
  std::vector<double> values = shapley_racs(base).values;
  RationalizedGame current = base;
  std::string update_note;
  if (opt.device) {
    const auto idx = file.game.index_of(*opt.device);
    if (!idx) throw ValidationError("unknown device '" + *opt.device + "'");
    if (*opt.vulns > base.denominator) throw ValidationError("vulns exceed the denominator");
    const auto k = static_cast<std::size_t>(*idx);
    const std::uint64_t old = counts[k];
    counts[k] = *opt.vulns;
    std::vector<std::string> names;
    for (const auto& pl : ids) names.push_back(pl.id);
    current = RationalizedGame::from_counts(counts, base.denominator, names);
    if (opt.frozen_baseline) {
      const double factor = racs_shared_factor(base.total, base.denominator);
      values[k] = base.total == 0 ? 0.0
                                  : static_cast<double>(*opt.vulns) / static_cast<double>(base.total) * factor;
      update_note = "update " + *opt.device + ": vulns " + std::to_string(old) + " -> " + std::to_string(*opt.vulns) +
                    " with m = " + std::to_string(base.total) + " and the shared factor frozen";
    } else {
      values = shapley_racs(current).values;
      update_note = "update " + *opt.device + ": vulns " + std::to_string(old) + " -> " + std::to_string(*opt.vulns) +
                    " (m " + std::to_string(base.total) + " -> " + std::to_string(current.total) + ")";
    }
  }

  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });

  const BernoulliGame& game = *current.source;
  std::optional<std::vector<double>> exact;
  if (game.size() <= 500) exact = exact_shapley_values<double>(game, Method::exact_symmetric);

  Report report;
  report.title = "Systemic risk report";
  report.percent_column = true;
  report.t_e = static_cast<double>(total_capacity(game));
  detail::attach_rationalized(report, opt.frozen_baseline ? base : current);
  int rank = 0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t k = order[pos];
    if (pos == 0 || counts[k] != counts[order[pos - 1]]) rank = static_cast<int>(pos) + 1;
    ReportRow row;
    row.rank = rank;
    row.player = ids[k].id;
    row.method = "racs";
    row.value = values[k];
    row.count = counts[k];
    if (exact) {
      row.exact = (*exact)[k];
      row.rel_error_pct = relative_error_pct(values[k], (*exact)[k]);
    }
    row.note = rank == 1 ? "highest priority" : "priority " + std::to_string(rank);
    report.rows.push_back(std::move(row));
  }
  if (!update_note.empty()) report.footnotes.push_back(update_note);
  if (opt.frozen_baseline && opt.device) {
    report.warnings.emplace_back("frozen baseline: values no longer sum to 1 - (1 - 1/l)^m of the updated game");
  }
  if (!exact) report.footnotes.emplace_back("exact comparison skipped for more than 500 devices");
  if (!opt.device) {
    for (auto& f : detail::errata_footnotes(game)) report.footnotes.push_back(std::move(f));
  }
  return report;
}

// ---------------------------------------------------------------------------
// verify / errata output

inline std::string emit_checks(const std::vector<CheckResult>& checks, Format format) {
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  std::ostringstream os;
  if (format == Format::json) {
    nlohmann::json doc{{"schema", 1}, {"passed", ok}};
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"millis", c.millis}});
    }
    doc["checks"] = std::move(arr);
    os << doc.dump(2) << "\n";
  } else if (format == Format::csv) {
    os << "check,passed,detail\n";
    for (const auto& c : checks) os << detail::csv_field(c.name) << ',' << (c.passed ? "true" : "false") << ',' << detail::csv_field(c.detail) << "\n";
  } else {
    for (const auto& c : checks) os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    os << (ok ? "all checks passed" : "some checks FAILED") << "\n";
  }
  return os.str();
}

inline std::string emit_errata(const std::vector<ErrataEntry>& entries, Format format, double threshold) {
  std::ostringstream os;
  if (format == Format::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
      arr.push_back({{"game", e.game},
                     {"column", e.label},
                     {"compared_with", std::string{to_string(e.kind)}},
                     {"player", e.player + 1},
                     {"quoted", e.quoted},
                     {"computed", e.computed},
                     {"deviation", e.deviation},
                     {"flagged", e.flagged}});
    }
    os << nlohmann::json{{"schema", 1}, {"threshold", threshold}, {"entries", arr}}.dump(2) << "\n";
    return os.str();
  }
  if (format == Format::csv) {
    os << "game,column,compared_with,player,quoted,computed,deviation,flagged\n";
    for (const auto& e : entries) {
      os << e.game << ',' << detail::csv_field(e.label) << ',' << detail::csv_field(std::string{to_string(e.kind)})
         << ',' << e.player + 1 << ',' << detail::full(e.quoted) << ',' << detail::full(e.computed) << ','
         << detail::full(e.deviation) << ',' << (e.flagged ? "true" : "false") << "\n";
    }
    return os.str();
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-13s %-22s %-20s %6s %10s %10s %10s\n", "Game", "Column", "Compared with",
                "Player", "Quoted", "Computed", "Deviation");
  os << line;
  std::size_t flagged = 0;
  for (const auto& e : entries) {
    std::snprintf(line, sizeof line, "%-13s %-22s %-20s %6d %10.6f %10.6f %+10.6f%s\n", e.game.c_str(),
                  e.label.c_str(), std::string{to_string(e.kind)}.c_str(), e.player + 1, e.quoted, e.computed,
                  e.deviation, e.flagged ? "  *" : "");
    os << line;
    flagged += e.flagged ? 1 : 0;
  }
  os << "\n* |deviation| > " << detail::sig6(threshold) << ": " << flagged << " of " << entries.size()
     << " quoted values\n";
  return os.str();
}

}  // namespace racs

#endif  // RACS_COMMANDS_HPP
