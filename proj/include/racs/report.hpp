#ifndef RACS_REPORT_HPP
#define RACS_REPORT_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "racs/error.hpp"

namespace racs {

struct ReportRow {
  std::string player;
  std::string method;
  double value = 0;
  std::optional<std::uint64_t> count;  // m_i
  std::optional<double> exact;
  std::optional<double> std_error;
  std::optional<double> bound;
  std::optional<double> rel_error_pct;
  std::optional<int> rank;
  std::string note;
};

struct MethodSummary {
  std::string method;
  double max_abs_error = 0;
  double mean_abs_error = 0;
  double max_rel_error_pct = 0;
  double mean_rel_error_pct = 0;
  double millis = 0;
};

struct Report {
  std::string title;
  double t_e = 0;
  std::optional<std::string> regime;
  std::optional<double> ratio;  // r = m / l
  std::vector<ReportRow> rows;
  std::vector<MethodSummary> summaries;
  std::vector<std::string> warnings;
  std::vector<std::string> footnotes;
  bool percent_column = false;  // risk reports show value x 100
  nlohmann::json extra = nlohmann::json::object();
};

enum class Format { table, csv, json };

inline Format parse_format(std::string_view s) {
  if (s == "table") return Format::table;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ValidationError("unknown format '" + std::string{s} + "'");
}

/// (approx - exact) / exact x 100; empty when exact is zero.
inline std::optional<double> relative_error_pct(double approx, double exact) {
  if (exact == 0) return std::nullopt;
  return (approx - exact) / exact * 100.0;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string sig6(double v) { return fmt("%.6g", v); }
// shortest text that reads back to the same double
inline std::string full(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
inline std::string pct(double v) { return fmt("%+.2f", v); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string emit_csv(const Report& r) {
  std::ostringstream os;
  os << "player,method,value,stderr,rel_error_pct\n";
  for (const auto& row : r.rows) {
    os << detail::csv_field(row.player) << ',' << detail::csv_field(row.method) << ',' << detail::full(row.value) << ',';
    if (row.std_error) os << detail::full(*row.std_error);
    os << ',';
    if (row.rel_error_pct) os << detail::full(*row.rel_error_pct);
    os << '\n';
  }
  return os.str();
}

inline nlohmann::json report_to_json(const Report& r) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["t_e"] = r.t_e;
  doc["regime"] = r.regime ? nlohmann::json(*r.regime) : nlohmann::json(nullptr);
  if (r.ratio) doc["ratio"] = *r.ratio;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json j{{"player", row.player}, {"method", row.method}, {"value", row.value}};
    if (row.count) j["m_i"] = *row.count;
    if (row.exact) j["exact"] = *row.exact;
    if (row.std_error) j["stderr"] = *row.std_error;
    if (row.bound) j["bound"] = *row.bound;
    if (row.rel_error_pct) j["rel_error_pct"] = *row.rel_error_pct;
    if (row.rank) j["rank"] = *row.rank;
    if (!row.note.empty()) j["note"] = row.note;
    rows.push_back(std::move(j));
  }
  doc["rows"] = std::move(rows);
  if (!r.summaries.empty()) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& m : r.summaries) {
      s.push_back({{"method", m.method},
                   {"max_abs_error", m.max_abs_error},
                   {"mean_abs_error", m.mean_abs_error},
                   {"max_rel_error_pct", m.max_rel_error_pct},
                   {"mean_rel_error_pct", m.mean_rel_error_pct},
                   {"millis", m.millis}});
    }
    doc["summary"] = std::move(s);
  }
  if (!r.warnings.empty()) doc["warnings"] = r.warnings;
  if (!r.footnotes.empty()) doc["footnotes"] = r.footnotes;
  for (const auto& [k, v] : r.extra.items()) doc[k] = v;
  return doc;
}

inline std::string emit_json(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

/// Aligned text table. Rows are pivoted to one line per player with a value
/// (and error) column per method.
inline std::string emit_table(const Report& r, bool color = false) {
  std::vector<std::string> players;
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, const ReportRow*> cell;
  std::map<std::string, const ReportRow*> first;
  for (const auto& row : r.rows) {
    if (std::find(players.begin(), players.end(), row.player) == players.end()) players.push_back(row.player);
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) methods.push_back(row.method);
    cell[{row.player, row.method}] = &row;
    first.emplace(row.player, &row);
  }
  auto any = [&](auto pred) { return std::any_of(r.rows.begin(), r.rows.end(), pred); };
  const bool has_rank = any([](const ReportRow& x) { return x.rank.has_value(); });
  const bool has_count = any([](const ReportRow& x) { return x.count.has_value(); });
  const bool has_exact = any([](const ReportRow& x) { return x.exact.has_value(); });
  const bool has_se = any([](const ReportRow& x) { return x.std_error.has_value(); });
  const bool has_bound = any([](const ReportRow& x) { return x.bound.has_value(); });
  const bool has_note = any([](const ReportRow& x) { return !x.note.empty(); });
  const bool multi = methods.size() > 1;

  std::vector<std::string> header;
  if (has_rank) header.emplace_back("Rank");
  header.emplace_back(r.percent_column ? "Device" : "Player");
  if (has_count) header.emplace_back("m_i");
  if (has_exact) header.emplace_back("Exact");
  for (const auto& m : methods) {
    const std::string base = has_exact ? "Approx" : "Value";
    header.push_back(multi ? m : base);
    if (r.percent_column) header.emplace_back("Risk(%)");
    if (has_se) header.push_back(multi ? "StdErr " + m : "StdErr");
    if (has_bound) header.push_back(multi ? "Bound " + m : "Bound");
    if (has_exact) header.push_back(multi ? "Error(%) " + m : "Error(%)");
  }
  if (has_note) header.emplace_back("Note");

  std::vector<std::vector<std::string>> lines;
  for (const auto& p : players) {
    const ReportRow& f = *first.at(p);
    std::vector<std::string> line;
    if (has_rank) line.push_back(f.rank ? std::to_string(*f.rank) : "");
    line.push_back(p);
    if (has_count) line.push_back(f.count ? std::to_string(*f.count) : "");
    if (has_exact) line.push_back(f.exact ? detail::sig6(*f.exact) : "");
    for (const auto& m : methods) {
      auto it = cell.find({p, m});
      const ReportRow* row = it == cell.end() ? nullptr : it->second;
      line.push_back(row ? detail::sig6(row->value) : "");
      if (r.percent_column) line.push_back(row ? detail::fmt("%.2f", row->value * 100.0) : "");
      if (has_se) line.push_back(row && row->std_error ? detail::sig6(*row->std_error) : "");
      if (has_bound) line.push_back(row && row->bound ? detail::sig6(*row->bound) : "");
      if (has_exact) line.push_back(row && row->rel_error_pct ? detail::pct(*row->rel_error_pct) : "");
    }
    if (has_note) line.push_back(f.note);
    lines.push_back(std::move(line));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& line : lines) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  auto render = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const bool left = header[c] == "Player" || header[c] == "Device" || header[c] == "Note";
      const std::string pad(width[c] - cells[c].size(), ' ');
      if (c > 0) s += "  ";
      s += left ? cells[c] + pad : pad + cells[c];
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };

  const std::string bold = color ? "\033[1m" : "";
  const std::string dim = color ? "\033[2m" : "";
  const std::string yellow = color ? "\033[33m" : "";
  const std::string reset = color ? "\033[0m" : "";

  std::ostringstream os;
  if (!r.title.empty()) os << bold << r.title << reset << "\n";
  os << "T(E) = " << detail::sig6(r.t_e);
  if (r.regime) os << "   regime = " << *r.regime;
  if (r.ratio) os << " (r = " << detail::sig6(*r.ratio) << ")";
  os << "\n\n";
  os << bold << render(header) << reset << "\n";
  std::size_t total_width = 0;
  for (auto w : width) total_width += w + 2;
  os << std::string(total_width > 2 ? total_width - 2 : 0, '-') << "\n";
  for (const auto& line : lines) os << render(line) << "\n";

  if (!r.summaries.empty()) {
    os << "\n";
    for (const auto& m : r.summaries) {
      os << dim << m.method << ": max |err| " << detail::sig6(m.max_abs_error) << ", mean |err| "
         << detail::sig6(m.mean_abs_error) << ", max |rel| " << detail::fmt("%.2f", m.max_rel_error_pct)
         << "%, mean |rel| " << detail::fmt("%.2f", m.mean_rel_error_pct) << "%, "
         << detail::fmt("%.3f", m.millis) << " ms" << reset << "\n";
    }
  }
  for (const auto& w : r.warnings) os << yellow << "warning: " << w << reset << "\n";
  if (!r.footnotes.empty()) {
    os << "\n";
    for (const auto& f : r.footnotes) os << f << "\n";
  }
  return os.str();
}

inline std::string emit(const Report& r, Format format, bool color = false) {
  switch (format) {
    case Format::table: return emit_table(r, color);
    case Format::csv: return emit_csv(r);
    case Format::json: return emit_json(r);
  }
  return {};
}

/// Colour only for terminals, and never when NO_COLOR is set and non-empty.
inline bool use_color(const char* no_color_env, bool is_terminal) {
  return is_terminal && (no_color_env == nullptr || *no_color_env == '\0');
}

}  // namespace racs

#endif  // RACS_REPORT_HPP
