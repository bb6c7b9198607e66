#ifndef RACS_GAME_FILE_HPP
#define RACS_GAME_FILE_HPP

// JSON game files.
//
// Probability form:
//   {"devices": [{"id": "a", "p": "1/5"}, ...], "metadata": {...}}
// Count form (p_i = vulns_i / denominator):
//   {"denominator": 6, "devices": [{"id": "web", "vulns": 3}, ...]}
//
// p should be a string ("a/b", "0.2", "1e-3"); JSON numbers are accepted and
// read through their shortest decimal spelling.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "racs/error.hpp"
#include "racs/game_core.hpp"
#include "racs/racs_approx.hpp"
#include "racs/rational.hpp"

namespace racs {

struct GameFile {
  BernoulliGame game;
  std::optional<RationalizedGame> rationalized;  // set for the count form
  nlohmann::json metadata = nlohmann::json::object();

  bool count_form() const { return rationalized.has_value(); }
};

namespace detail {

inline std::uint64_t json_count(const nlohmann::json& v, const std::string& what) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ValidationError(what + " must be non-negative");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ValidationError(what + " must be an integer");
}

inline Rational json_probability(const nlohmann::json& v, const std::string& who) {
  std::string text;
  if (v.is_string()) {
    text = v.get<std::string>();
  } else if (v.is_number()) {
    text = v.dump();
  } else {
    throw ValidationError("p of '" + who + "' must be a string");
  }
  Rational r;
  try {
    r = parse_rational(text);
  } catch (const ValidationError& e) {
    throw ValidationError("p of '" + who + "': " + e.what());
  }
  if (r < 0 || r > 1) throw ValidationError("p of '" + who + "' = " + text + " is outside [0, 1]");
  return r;
}

}  // namespace detail

inline GameFile parse_game_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("game file must be a JSON object");
  if (!doc.contains("devices") || !doc["devices"].is_array() || doc["devices"].empty()) {
    throw ValidationError("game file needs a non-empty 'devices' array");
  }
  const auto& devices = doc["devices"];

  std::size_t with_p = 0;
  std::size_t with_vulns = 0;
  for (const auto& d : devices) {
    if (!d.is_object()) throw ValidationError("each device must be an object");
    if (!d.contains("id") || !d["id"].is_string() || d["id"].get<std::string>().empty()) {
      throw ValidationError("each device needs a non-empty string 'id'");
    }
    const bool has_p = d.contains("p");
    const bool has_v = d.contains("vulns");
    if (has_p && has_v) throw ValidationError("device '" + d["id"].get<std::string>() + "' has both p and vulns");
    with_p += has_p ? 1 : 0;
    with_vulns += has_v ? 1 : 0;
  }
  const bool has_denominator = doc.contains("denominator");
  const std::size_t n = devices.size();

  GameFile out;
  if (doc.contains("metadata")) {
    if (!doc["metadata"].is_object()) throw ValidationError("'metadata' must be an object");
    out.metadata = doc["metadata"];
  }

  if (with_p == n && !has_denominator) {
    std::vector<Player> players;
    players.reserve(n);
    for (const auto& d : devices) {
      const auto id = d["id"].get<std::string>();
      players.push_back({id, Probability{detail::json_probability(d["p"], id)}});
    }
    try {
      out.game = BernoulliGame{std::move(players)};
    } catch (const DomainError& e) {
      throw ValidationError(e.what());
    }
    return out;
  }

  if (with_vulns == n && has_denominator) {
    const std::uint64_t l = detail::json_count(doc["denominator"], "denominator");
    if (l < 1) throw ValidationError("denominator must be at least 1");
    if (l > kMaxDenominator) throw ValidationError("denominator exceeds 2^62");
    std::vector<std::uint64_t> counts;
    std::vector<std::string> ids;
    for (const auto& d : devices) {
      const auto id = d["id"].get<std::string>();
      const std::uint64_t m = detail::json_count(d["vulns"], "vulns of '" + id + "'");
      if (m > l) {
        throw ValidationError("vulns of '" + id + "' = " + std::to_string(m) + " exceeds the denominator " +
                              std::to_string(l));
      }
      counts.push_back(m);
      ids.push_back(id);
    }
    try {
      out.rationalized = RationalizedGame::from_counts(std::move(counts), l, std::move(ids));
    } catch (const DomainError& e) {
      throw ValidationError(e.what());
    } catch (const OverflowError& e) {
      throw ValidationError(e.what());
    }
    out.game = *out.rationalized->source;
    return out;
  }

  if (with_p > 0 && (with_vulns > 0 || has_denominator)) {
    throw ValidationError("game file mixes the probability form and the vulns/denominator form");
  }
  if (with_vulns > 0 && !has_denominator) throw ValidationError("vulns need a 'denominator'");
  if (with_vulns == 0 && with_p == 0 && has_denominator) throw ValidationError("devices need 'vulns' counts");
  throw ValidationError("every device needs 'p' (or every device 'vulns' with a denominator)");
}

inline GameFile parse_game_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string{"malformed JSON: "} + e.what());
  }
  return parse_game_json(doc);
}

inline GameFile parse_game_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game_text(buf.str());
}

/// Inverse of parse_game_json; probabilities are written as exact fractions.
inline nlohmann::json game_to_json(const GameFile& file) {
  nlohmann::json doc;
  nlohmann::json devices = nlohmann::json::array();
  if (file.rationalized) {
    doc["denominator"] = file.rationalized->denominator;
    for (int i = 0; i < file.game.size(); ++i) {
      devices.push_back({{"id", file.game.player(i).id}, {"vulns", file.rationalized->counts[static_cast<std::size_t>(i)]}});
    }
  } else {
    for (const auto& pl : file.game.players()) devices.push_back({{"id", pl.id}, {"p", pl.p.str()}});
  }
  doc["devices"] = std::move(devices);
  if (!file.metadata.empty()) doc["metadata"] = file.metadata;
  return doc;
}

}  // namespace racs

#endif  // RACS_GAME_FILE_HPP
