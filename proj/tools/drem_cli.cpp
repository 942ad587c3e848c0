#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drem/acceptance.hpp"
#include "drem/csv.hpp"
#include "drem/errors.hpp"
#include "drem/matalg.hpp"
#include "drem/scenario.hpp"

#ifndef DREM_CONFIG_DIR
#define DREM_CONFIG_DIR "configs"
#endif

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kAcceptance = 3 };

void print_summary(const dremix::RunRecord& rec) {
  std::printf("%s\n", rec.scenario.c_str());
  for (const auto& [key, value] : rec.summary) std::printf("  %-24s %.10g\n", key.c_str(), value);
}

int cmd_run(const std::string& config, const std::string& out_override, bool summary) {
  for (const auto& s : dremix::load_scenarios(config)) {
    const auto records = dremix::run_scenario(s);
    const std::string path = out_override.empty() ? s.output : out_override;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!path.empty()) dremix::emit_csv(records[i], dremix::sweep_path(path, i, records.size()));
      else if (!summary) std::cout << dremix::to_csv(records[i]);
      if (summary) print_summary(records[i]);
    }
  }
  return kOk;
}

int cmd_list() {
  for (const auto& b : dremix::builtin_scenarios()) {
    const auto s = dremix::parse_scenario(b.json);
    std::printf("%-26s %-20s %s\n", b.name.c_str(), dremix::to_string(s.kind).c_str(), b.description.c_str());
  }
  std::printf("\nregressors and systems:");
  for (const auto& r : dremix::builtin_regressors()) std::printf(" %s", r.c_str());
  std::printf("\n");
  return kOk;
}

int cmd_check_pe(const std::string& config, double window) {
  for (auto s : dremix::load_scenarios(config)) {
    if (window > 0.0) s.pe_window = window;
    const dremix::Trajectory pe = dremix::scenario_pe_metric(s);
    double lo = pe[0], hi = pe[0];
    std::size_t arg = 0;
    for (std::size_t k = 0; k < pe.size(); ++k) {
      if (pe[k] < lo) lo = pe[k], arg = k;
      hi = std::max(hi, pe[k]);
    }
    std::printf("%s: window %.6g over [%.6g, %.6g]\n", s.name.c_str(), s.pe_window, pe.grid().t0(), pe.grid().end());
    std::printf("  first %.10g  last %.10g  min %.10g (t = %.6g)  max %.10g\n", pe[0], pe.values().back(), lo,
                pe.time(arg), hi);
  }
  return kOk;
}

int cmd_energy(const std::string& config, double from, double to) {
  for (const auto& s : dremix::load_scenarios(config)) {
    const dremix::Trajectory phi = dremix::scenario_excitation(s);
    const double b = to < 0.0 ? phi.grid().end() : to;
    const double a = from < 0.0 ? phi.grid().t0() : from;
    if (b < a) throw dremix::ValidationError({"--to must not precede --from"});
    if (a < phi.grid().t0() || b > phi.grid().end())
      throw dremix::ValidationError({"interval lies outside the scenario grid"});
    std::printf("%s: int_{%.6g}^{%.6g} phi^2 = %.12g\n", s.name.c_str(), a, b, dremix::l2_energy(phi, a, b));
  }
  return kOk;
}

int cmd_verify(const std::string& config_dir, const std::vector<int>& criteria) {
  bool all = true;
  const auto report = [&](const dremix::CriterionResult& r) {
    all = all && r.pass;
    std::printf("%s\n", dremix::format_result(r).c_str());
    std::fflush(stdout);
  };
  if (criteria.empty()) dremix::run_acceptance(config_dir, report);
  for (const int id : criteria) report(dremix::run_criterion(id, config_dir));
  return all ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DREM parameter estimation scenarios"};
  app.require_subcommand(1);
  bool summary = false;
  app.add_flag("--summary", summary, "print final error norms, energies and decay factors");

  std::string config, out;
  auto* run = app.add_subcommand("run", "execute the scenario(s) in a config file or a built-in");
  run->add_option("config", config, "JSON config file or built-in scenario name")->required();
  run->add_option("-o,--output", out, "CSV path (overrides the config's output)");
  run->add_flag("--summary", summary, "print final error norms, energies and decay factors");

  app.add_subcommand("list-builtins", "list built-in scenarios");

  double window = -1.0;
  auto* pe = app.add_subcommand("check-pe", "report the windowed PE metric of a scenario's regressor");
  pe->add_option("config", config, "JSON config file or built-in scenario name")->required();
  pe->add_option("--window", window, "window length (defaults to the config's)");

  double from = -1.0, to = -1.0;
  auto* en = app.add_subcommand("energy", "integral of phi^2 (or det(Phi)^2) over [from, to]");
  en->add_option("config", config, "JSON config file or built-in scenario name")->required();
  en->add_option("--from", from, "start time (default grid start)");
  en->add_option("--to", to, "end time (default grid end)");

  std::string config_dir = DREM_CONFIG_DIR;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--configs", config_dir, "directory of golden scenario configs");
  std::vector<int> criteria;
  verify->add_option("--criteria", criteria, "criterion ids to run (default all)")
      ->check(CLI::Range(1, dremix::kCriterionCount))
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, summary);
    if (app.got_subcommand("list-builtins")) return cmd_list();
    if (*pe) return cmd_check_pe(config, window);
    if (*en) return cmd_energy(config, from, to);
    if (*verify) return cmd_verify(config_dir, criteria);
  } catch (const dremix::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kValidation;
  } catch (const dremix::NumericalError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  }
  return kOk;
}
