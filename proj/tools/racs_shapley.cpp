#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "racs/commands.hpp"

namespace {

struct Common {
  std::string file;
  std::string format = "table";
  racs::MethodOptions opt;
  std::optional<double> delta;
  std::optional<std::string> variant;
  std::optional<std::string> normalize;
};

void add_format(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
}

void add_method_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--samples", c.opt.samples, "Monte Carlo permutations")->capture_default_str();
  cmd->add_option("--seed", c.opt.seed, "Monte Carlo seed")->capture_default_str();
  cmd->add_option("--delta", c.delta, "Round probabilities onto a decimal grid finer than delta");
  cmd->add_option("--variant", c.variant, "layered: literal|unweighted; binomial: closed|literal");
  cmd->add_option("--normalize", c.normalize, "none|te|one")->check(CLI::IsMember({"none", "te", "one"}));
  cmd->add_option("--tau-low", c.opt.tau_low, "Dense correction: low-probability threshold")->capture_default_str();
  cmd->add_option("--tau-high", c.opt.tau_high, "Dense correction: high-probability threshold")->capture_default_str();
  cmd->add_flag("--force-symmetric", c.opt.force_symmetric, "Let 'exact' fall back to symmetric sums for n > 24");
  cmd->add_option("--nodes", c.opt.nodes, "Riemann nodes (default n)");
}

void finish_options(Common& c) {
  c.opt.delta = c.delta;
  c.opt.variant = c.variant;
  c.opt.normalize = c.normalize;
}

bool color_enabled() { return racs::use_color(std::getenv("NO_COLOR"), isatty(STDOUT_FILENO) != 0); }

int print(const std::string& text) {
  std::cout << text;
  std::cout.flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and approximate Shapley values for Bernoulli hitting-capacity games", "racs-shapley"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "racs-shapley 0.1.0");

  Common compute;
  std::string compute_method;
  auto* c_compute = app.add_subcommand("compute", "Shapley values of one method");
  c_compute->add_option("file", compute.file, "Game file (JSON)")->required();
  c_compute->add_option("--method", compute_method, "Method (default: racs for vulns files, exact-symmetric otherwise)")
      ->check(CLI::IsMember(racs::method_names()));
  add_format(c_compute, compute.format);
  add_method_flags(c_compute, compute);

  Common compare;
  std::vector<std::string> compare_methods;
  auto* c_compare = app.add_subcommand("compare", "Compare methods against the exact values");
  c_compare->add_option("file", compare.file, "Game file (JSON)")->required();
  c_compare->add_option("--method", compare_methods, "Methods, comma separated or repeated")
      ->delimiter(',')
      ->check(CLI::IsMember(racs::method_names()));
  add_format(c_compare, compare.format);
  add_method_flags(c_compare, compare);

  std::string risk_file;
  std::string risk_format = "table";
  racs::RiskOptions risk;
  std::string update_device;
  std::uint64_t update_vulns = 0;
  std::string update_file;
  auto* c_risk = app.add_subcommand("risk-report", "Ranked per-device risk from vulnerability counts");
  c_risk->alias("risk");
  c_risk->add_option("file", risk_file, "Game file with vulns and denominator");
  c_risk->add_flag("--frozen-baseline", risk.frozen_baseline, "Keep m and the shared factor on update");
  add_format(c_risk, risk_format);
  auto* c_update = c_risk->add_subcommand("update", "Recompute after one device's count changes");
  c_update->add_option("file", update_file, "Game file with vulns and denominator");
  c_update->add_option("--device", update_device, "Device id")->required();
  c_update->add_option("--vulns", update_vulns, "New vulnerability count")->required();
  c_update->add_flag("--frozen-baseline", risk.frozen_baseline, "Keep m and the shared factor");
  add_format(c_update, risk_format);

  std::string scope = "all";
  std::string verify_format = "table";
  auto* c_verify = app.add_subcommand("verify", "Run the invariant checks");
  c_verify->add_option("scope", scope, "identity|oracles|bounds|all")
      ->check(CLI::IsMember({"identity", "oracles", "bounds", "all"}))
      ->capture_default_str();
  add_format(c_verify, verify_format);

  double errata_threshold = 1e-3;
  std::string errata_format = "table";
  auto* c_errata = app.add_subcommand("errata", "Quoted reference values against computed ones");
  c_errata->add_option("--threshold", errata_threshold, "Flag deviations above this")->capture_default_str();
  add_format(c_errata, errata_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(racs::ExitCode::usage);
  }

  try {
    if (c_compute->parsed()) {
      finish_options(compute);
      const auto file = racs::parse_game_file(compute.file);
      const auto report = racs::cmd_compute(file, compute_method, compute.opt);
      return print(racs::emit(report, racs::parse_format(compute.format), color_enabled()));
    }
    if (c_compare->parsed()) {
      finish_options(compare);
      const auto file = racs::parse_game_file(compare.file);
      if (compare_methods.empty()) compare_methods.push_back(racs::default_method(file));
      const auto report = racs::cmd_compare(file, compare_methods, compare.opt);
      return print(racs::emit(report, racs::parse_format(compare.format), color_enabled()));
    }
    if (c_risk->parsed()) {
      std::string path = risk_file;
      if (c_update->parsed()) {
        if (!update_file.empty()) path = update_file;
        risk.device = update_device;
        risk.vulns = update_vulns;
      }
      if (path.empty()) {
        std::cerr << "error: risk-report needs a game file\n";
        return static_cast<int>(racs::ExitCode::usage);
      }
      const auto file = racs::parse_game_file(path);
      const auto report = racs::cmd_risk_report(file, risk);
      return print(racs::emit(report, racs::parse_format(risk_format), color_enabled()));
    }
    if (c_verify->parsed()) {
      const auto checks = racs::run_verify(racs::parse_scope(scope));
      print(racs::emit_checks(checks, racs::parse_format(verify_format)));
      for (const auto& c : checks) {
        if (!c.passed) return static_cast<int>(racs::ExitCode::validation);
      }
      return 0;
    }
    if (c_errata->parsed()) {
      const auto entries = racs::errata_report(errata_threshold);
      return print(racs::emit_errata(entries, racs::parse_format(errata_format), errata_threshold));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(racs::exit_code_for(e));
  }
  return static_cast<int>(racs::ExitCode::usage);
}
