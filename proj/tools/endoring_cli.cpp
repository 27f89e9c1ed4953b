#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "endoring/report.hpp"

int main(int argc, char** argv) {
  endoring::SessionConfig cfg;
  std::string levels = "2,4,6,8";
  std::string only;

  CLI::App app{"Inertial endomorphisms of abelian groups: invariants, verdicts, decompositions and oracles"};
  app.set_version_flag("--version", std::string(endoring::kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--levels", levels, "Truncation levels, ascending, comma separated");
  app.add_option("--samples", cfg.samples, "Random subgroups per profile (or trials for defect)");
  app.add_option("--seed", cfg.seed, "64-bit seed");
  app.add_option("--budget", cfg.budget, "Largest witness family parameter");
  app.add_option("--out", cfg.out, "Write the report here instead of stdout");
  app.add_option("--only", only, "Restrict to the endo or matrix with this name");
  app.add_flag("--enumerate-all", cfg.enumerate_all, "Exhaustive subgroup scan on tiny truncations");
  app.add_flag("--inject-wrong-verdict", cfg.inject_wrong_verdict)->group("");

  const std::pair<const char*, const char*> commands[] = {
      {"analyze", "Group invariants, H-descriptor and NM type"},
      {"check", "Inertial verdict with oracle cross-check"},
      {"decompose", "Decomposition into semi, uniform and mini parts"},
      {"oracle", "Inertness and FS profiles, witness families"},
      {"defect", "Scalar defect of matrices"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("files", cfg.inputs, "Input files")->required()->check(CLI::ExistingFile);
    sub->callback([&cfg, n = std::string(name)] { cfg.command = n; });
  }

  try {
    app.parse(argc, argv);
    cfg.levels = endoring::parse_levels(levels);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const endoring::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!only.empty()) cfg.only = only;

  endoring::RunResult res = endoring::run(cfg);
  if (!res.error.empty()) std::cerr << "error: " << res.error << "\n";
  if (!res.report.empty()) {
    if (cfg.out) {
      std::ofstream out(*cfg.out);
      if (!out) {
        std::cerr << "error: cannot write " << *cfg.out << "\n";
        return 1;
      }
      out << res.report << "\n";
    } else {
      std::cout << res.report << "\n";
    }
  }
  return res.exit_code;
}
