#include <gtest/gtest.h>

#include <sstream>

#include "oracle.hpp"
#include "racs/commands.hpp"

using namespace racs;

namespace {

const std::string kSamples = RACS_SAMPLES_DIR;

GameFile network() { return parse_game_file(kSamples + "/network_devices.json"); }

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

TEST(ParseGame, CountForm) {
  const auto f = network();
  ASSERT_TRUE(f.count_form());
  EXPECT_EQ(f.game.exact_probabilities(), oracle::fracs({"1/2", "1/3", "1/6"}));
  EXPECT_EQ(f.game.player(0).id, "web");
  EXPECT_EQ(f.rationalized->denominator, 6u);
  EXPECT_EQ(default_method(f), "racs");
}

TEST(ParseGame, ProbabilityForm) {
  const auto f = parse_game_text(R"({"devices": [{"id": "a", "p": "0.2"}]})");
  EXPECT_FALSE(f.count_form());
  EXPECT_EQ(f.game.p(0).exact(), Rational(1, 5));
  EXPECT_EQ(default_method(f), "exact-symmetric");

  const auto g = parse_game_text(R"({"devices": [{"id": "a", "p": 0.25}, {"id": "b", "p": "2/7"}]})");
  EXPECT_EQ(g.game.p(0).exact(), Rational(1, 4));
  EXPECT_EQ(g.game.p(1).exact(), Rational(2, 7));
}

TEST(ParseGame, Rejections) {
  const char* bad[] = {
      R"({"denominator": 6, "devices": [{"id": "web", "vulns": 7}]})",
      R"({"denominator": 6, "devices": [{"id": "web", "vulns": 3}, {"id": "db", "p": "0.1"}]})",
      R"({"devices": [{"id": "web", "vulns": 3}]})",
      R"({"devices": [{"id": "a", "p": "7/6"}]})",
      R"({"devices": [{"id": "a", "p": "-0.1"}]})",
      R"({"devices": [{"id": "a", "p": "x"}]})",
      R"({"devices": [{"p": "0.5"}]})",
      R"({"devices": [{"id": "a", "p": "0.5"}, {"id": "a", "p": "0.1"}]})",
      R"({"devices": []})",
      R"({"denominator": 0, "devices": [{"id": "web", "vulns": 0}]})",
      R"({"denominator": 6, "devices": [{"id": "web", "vulns": -1}]})",
      R"({"devices": [{"id": "a", "p": "0.5", "vulns": 1}], "denominator": 2})",
      R"([1, 2])",
      R"({"devices": [)",
  };
  for (const char* text : bad) EXPECT_THROW(parse_game_text(text), ValidationError) << text;
  EXPECT_THROW(parse_game_file(kSamples + "/missing.json"), ValidationError);
}

TEST(ParseGame, ExactRoundTrip) {
  const auto f = parse_game_text(R"({"devices": [{"id": "a", "p": "1/3"}, {"id": "b", "p": "123456789/987654321"}]})");
  const auto back = parse_game_json(nlohmann::json::parse(game_to_json(f).dump()));
  EXPECT_EQ(back.game.exact_probabilities(), f.game.exact_probabilities());
  EXPECT_EQ(game_to_json(f)["devices"][1]["p"], "13717421/109739369");

  const auto n = network();
  const auto again = parse_game_json(game_to_json(n));
  EXPECT_EQ(again.rationalized->counts, n.rationalized->counts);
}

TEST(Compute, RacsOnNetwork) {
  const auto r = cmd_compute(network(), "", {});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].player, "web");
  EXPECT_NEAR(r.rows[0].value, 0.3326, 5e-4);
  EXPECT_NEAR(r.rows[1].value, 0.2217, 5e-4);
  EXPECT_NEAR(r.rows[2].value, 0.1108, 5e-4);
  EXPECT_EQ(r.rows[0].count, 3u);
  ASSERT_TRUE(r.rows[0].bound);
  EXPECT_NEAR(*r.rows[0].bound, 0.25, 1e-15);
  EXPECT_EQ(r.regime, "CRITICAL");
}

TEST(Compute, ExactOnNetwork) {
  const auto r = cmd_compute(network(), "exact", {});
  const auto truth = oracle::d(oracle::shapley_all(oracle::fracs({"1/2", "1/3", "1/6"})));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.rows[i].value, truth[i], 1e-15);
}

TEST(Compute, McIsDeterministicWithStderr) {
  MethodOptions opt;
  opt.samples = 20'000;
  opt.seed = 42;
  const auto a = emit_csv(cmd_compute(network(), "mc", opt));
  const auto b = emit_csv(cmd_compute(network(), "mc", opt));
  EXPECT_EQ(a, b);
  const auto lines = split_lines(a);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_NE(lines[1].find(",mc,"), std::string::npos);
  EXPECT_FALSE(lines[1].ends_with(",,"));
}

TEST(Compute, ExactSizeLimitAndForce) {
  std::vector<double> p(30, 0.05);
  GameFile f;
  f.game = BernoulliGame::from_doubles(p);
  EXPECT_THROW(cmd_compute(f, "exact", {}), SizeLimitError);
  MethodOptions opt;
  opt.force_symmetric = true;
  const auto r = cmd_compute(f, "exact", opt);
  EXPECT_NEAR(r.rows[0].value, shapley_homogeneous(30, 0.05), 1e-12);
}

TEST(Compute, UnknownMethodAndBadVariant) {
  EXPECT_THROW(cmd_compute(network(), "nope", {}), ValidationError);
  MethodOptions opt;
  opt.variant = "sideways";
  EXPECT_THROW(cmd_compute(network(), "layered", opt), ValidationError);
}

TEST(Emit, CsvContract) {
  const auto csv = emit_csv(cmd_compute(network(), "racs", {}));
  const auto lines = split_lines(csv);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "player,method,value,stderr,rel_error_pct");
  EXPECT_TRUE(lines[1].starts_with("web,racs,0.33255"));
}

TEST(Emit, JsonRoundTrip) {
  const auto r = cmd_compute(network(), "racs", {});
  const auto doc = nlohmann::json::parse(emit_json(r));
  EXPECT_EQ(doc["schema"], 1);
  ASSERT_EQ(doc["rows"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(doc["rows"][i]["value"].get<double>(), r.rows[i].value);
    EXPECT_EQ(doc["rows"][i]["player"].get<std::string>(), r.rows[i].player);
  }
  EXPECT_EQ(doc["t_e"].get<double>(), r.t_e);
}

TEST(Emit, TableColumnOrder) {
  const auto f = parse_game_file(kSamples + "/seven_players.json");
  MethodOptions opt;
  const auto table = emit_table(cmd_compare(f, {"racs"}, opt));
  const auto lines = split_lines(table);
  const auto header = std::find_if(lines.begin(), lines.end(), [](const std::string& l) { return l.starts_with("Player"); });
  ASSERT_NE(header, lines.end());
  const auto cols = words(*header);
  ASSERT_GE(cols.size(), 5u);
  EXPECT_EQ(cols[0], "Player");
  EXPECT_EQ(cols[1], "m_i");
  EXPECT_EQ(cols[2], "Exact");
  EXPECT_EQ(cols[3], "Approx");
  EXPECT_EQ(cols[4], "Error(%)");
  EXPECT_EQ(table.find('\x1b'), std::string::npos);
  EXPECT_NE(emit_table(cmd_compare(f, {"racs"}, opt), true).find('\x1b'), std::string::npos);
}

TEST(Emit, FormatNames) {
  EXPECT_EQ(parse_format("table"), Format::table);
  EXPECT_EQ(parse_format("csv"), Format::csv);
  EXPECT_EQ(parse_format("json"), Format::json);
  EXPECT_THROW(parse_format("xml"), ValidationError);
}

TEST(Emit, ColorPolicy) {
  EXPECT_TRUE(use_color(nullptr, true));
  EXPECT_TRUE(use_color("", true));
  EXPECT_FALSE(use_color("1", true));
  EXPECT_FALSE(use_color(nullptr, false));
}

TEST(Compare, ErrorColumnMatchesPrintedValues) {
  const auto f = parse_game_file(kSamples + "/seven_players.json");
  const auto r = cmd_compare(f, {"racs", "layered", "binomial", "mc"}, {});
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.exact && row.rel_error_pct);
    EXPECT_NEAR(*row.rel_error_pct, (row.value - *row.exact) / *row.exact * 100, 1e-12);
  }

  // recompute every printed error from the printed value columns
  const auto table = split_lines(emit_table(cmd_compare(f, {"racs"}, {})));
  int checked = 0;
  for (const auto& line : table) {
    const auto w = words(line);
    if (w.size() != 5 || w[0].empty() || !std::isdigit(static_cast<unsigned char>(w[0][0]))) continue;
    const double exact = std::stod(w[2]);
    const double approx = std::stod(w[3]);
    const double printed = std::stod(w[4]);
    EXPECT_NEAR((approx - exact) / exact * 100, printed, 0.006) << line;
    ++checked;
  }
  EXPECT_EQ(checked, 7);
}

TEST(Compare, RacsErrorsAgainstOracle) {
  const auto f = parse_game_file(kSamples + "/seven_players.json");
  const auto r = cmd_compare(f, {"racs"}, {});
  const auto truth = oracle::d(oracle::shapley_all(f.game.exact_probabilities()));
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(r.rows[i].value, shapley_racs(rationalize(f.game)).values[i], 0);
    EXPECT_NEAR(*r.rows[i].exact, truth[i], 1e-15);
  }
  EXPECT_NEAR(r.rows[0].value, 0.062055, 1e-6);
  ASSERT_EQ(r.summaries.size(), 1u);
  EXPECT_FALSE(r.footnotes.empty());
}

TEST(Compare, BimodalMethods) {
  const auto f = parse_game_file(kSamples + "/bimodal.json");
  const auto r = cmd_compare(f, {"racs", "racs-corrected", "layered"}, {});
  ASSERT_EQ(r.rows.size(), 9u);
  EXPECT_NEAR(r.rows[3].value, 0.016355, 1e-6);
  EXPECT_NEAR(r.rows[6].value, 0.047542, 1e-6);
}

TEST(Compare, SinglePlayerHasZeroError) {
  const auto f = parse_game_text(R"({"devices": [{"id": "solo", "p": "0.4"}]})");
  const auto r = cmd_compare(f, {"exact", "exact-symmetric", "exact-integral", "homogeneous", "binomial", "layered"}, {});
  for (const auto& row : r.rows) EXPECT_NEAR(*row.rel_error_pct, 0.0, 1e-12) << row.method;
}

TEST(RiskReport, Ranking) {
  const auto r = cmd_risk_report(network(), {});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].player, "web");
  EXPECT_EQ(r.rows[1].player, "db");
  EXPECT_EQ(r.rows[2].player, "iot");
  EXPECT_EQ(r.rows[0].rank, 1);
  EXPECT_EQ(r.rows[2].rank, 3);
  EXPECT_NEAR(r.rows[0].value * 100, 33.26, 5e-3);
  EXPECT_NEAR(r.rows[1].value * 100, 22.17, 5e-3);
  EXPECT_NEAR(r.rows[2].value * 100, 11.08, 1e-2);
  EXPECT_TRUE(r.percent_column);
}

TEST(RiskReport, FrozenUpdate) {
  RiskOptions opt{"db", 3, true};
  const auto r = cmd_risk_report(network(), opt);
  const auto db = std::find_if(r.rows.begin(), r.rows.end(), [](const ReportRow& x) { return x.player == "db"; });
  ASSERT_NE(db, r.rows.end());
  EXPECT_EQ(db->value, r.rows[0].value);
  EXPECT_NEAR(db->value, 0.3326, 5e-4);
  EXPECT_EQ(db->rank, 1);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(RiskReport, RecomputedUpdate) {
  RiskOptions opt{"db", 3, false};
  const auto r = cmd_risk_report(network(), opt);
  const auto db = std::find_if(r.rows.begin(), r.rows.end(), [](const ReportRow& x) { return x.player == "db"; });
  EXPECT_NEAR(db->value, 3.0 / 7 * (1 - std::pow(5.0 / 6, 7)), 1e-15);
  EXPECT_NEAR(db->value, 0.308965, 1e-6);
}

TEST(RiskReport, Errors) {
  EXPECT_THROW(cmd_risk_report(network(), RiskOptions{"nope", 1, false}), ValidationError);
  EXPECT_THROW(cmd_risk_report(network(), RiskOptions{"db", 7, false}), ValidationError);
  EXPECT_THROW(cmd_risk_report(network(), RiskOptions{"db", std::nullopt, false}), ValidationError);
  EXPECT_THROW(cmd_risk_report(parse_game_file(kSamples + "/seven_players.json"), {}), ValidationError);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(SizeLimitError("x")), ExitCode::infeasible);
  EXPECT_EQ(exit_code_for(OverflowError("x")), ExitCode::infeasible);
  EXPECT_EQ(exit_code_for(ValidationError("x")), ExitCode::validation);
  EXPECT_EQ(exit_code_for(DomainError("x")), ExitCode::validation);
}

TEST(Errata, FlagsPlayerFive) {
  const auto entries = errata_report();
  const auto it = std::find_if(entries.begin(), entries.end(), [](const ErrataEntry& e) {
    return e.label == "exact (6 dp)" && e.player == 4;
  });
  ASSERT_NE(it, entries.end());
  EXPECT_TRUE(it->flagged);
  EXPECT_DOUBLE_EQ(it->quoted, 0.030815);
  EXPECT_NEAR(it->computed, 0.027318, 1e-6);
  const auto csv = emit_errata(entries, Format::csv, 1e-3);
  EXPECT_NE(csv.find("seven-player,exact (6 dp),exact,5,0.030815,"), std::string::npos);
}

TEST(Errata, NetworkExactColumnViolatesEfficiency) {
  double quoted = 0;
  for (const auto& set : quoted_sets()) {
    if (set.game == "network" && set.kind == QuotedKind::exact) {
      for (double v : set.values) quoted += v;
    }
  }
  EXPECT_NEAR(quoted, 0.683, 1e-9);
  EXPECT_GT(std::fabs(quoted - 13.0 / 18), 0.03);
}
