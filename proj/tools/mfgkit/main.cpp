// mfgkit: run mean field game experiments from YAML configs or bundled
// scenarios and write CSV snapshots plus a JSON manifest.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mfg/error.hpp"
#include "mfgcli/config.hpp"
#include "mfgcli/runner.hpp"
#include "mfgcli/scenarios.hpp"

namespace {

using namespace mfg::cli;

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> snapshot_every;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("config", args.config, "config file or bundled scenario name")->required();
  cmd->add_option("--out", args.out, "output directory (default runs/<name>)");
  cmd->add_option("--seed", args.seed, "seed for stochastic tasks (overrides task.seed)");
  cmd->add_option("--workers", args.workers, "worker threads for multistart and sweep")->check(CLI::PositiveNumber);
  cmd->add_option("--snapshot-every", args.snapshot_every, "write snapshots every K time steps")
      ->check(CLI::PositiveNumber);
}

void print_summary(const nlohmann::json& m, const std::string& out) {
  std::cout << m["name"].get<std::string>() << " [" << m["task"].get<std::string>()
            << "]: " << m["status"].get<std::string>() << "\n";
  if (m.contains("runs")) {
    for (const auto& r : m["runs"]) {
      std::cout << "  " << r["id"].get<std::string>() << ": converged=" << (r["converged"].get<bool>() ? "true" : "false")
                << " iterations=" << r["iterations"] << " residual=" << r["residual"] << "\n";
    }
  }
  if (m.contains("multistart")) {
    const auto& ms = m["multistart"];
    std::cout << "  multistart: D=" << ms["max_pairwise_distance"] << " verdict=\"" << ms["verdict"].get<std::string>()
              << "\"\n";
  }
  if (m.contains("diagnostics") && m["diagnostics"].contains("certificate")) {
    const auto& c = m["diagnostics"]["certificate"];
    std::cout << "  psi=" << c["psi"] << " (" << c["verdict"].get<std::string>() << ")\n";
  }
  if (m.contains("sweep")) {
    const auto& s = m["sweep"];
    for (const auto& row : s["results"]) {
      std::cout << "  " << s["parameter"].get<std::string>() << "=" << row["value"] << ": "
                << row["status"].get<std::string>() << "\n";
    }
  }
  if (m.contains("mms")) {
    for (const char* kind : {"spatial", "temporal"}) {
      for (const auto& r : m["mms"][kind]) {
        std::cout << "  " << kind << " cells=" << r["cells"] << " steps=" << r["steps"] << " error=" << r["error"]
                  << " order=" << r["order"] << "\n";
      }
    }
  }
  if (m.contains("error")) std::cerr << "solver error: " << m["error"]["message"].get<std::string>() << "\n";
  std::cout << "  manifest: " << out << "/manifest.json\n";
}

int execute(const RunArgs& args, std::optional<TaskKind> task) {
  const ExperimentConfig cfg = load_config(args.config);
  RunOptions opts;
  opts.out_dir = args.out.empty() ? std::filesystem::path("runs") / cfg.name : std::filesystem::path(args.out);
  opts.task = task;
  opts.seed = args.seed;
  opts.workers = args.workers;
  opts.snapshot_every = args.snapshot_every;
  const RunOutcome res = run_experiment(cfg, opts);
  print_summary(res.manifest, opts.out_dir.string());
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mfgkit: multi-population mean field game solver and diagnostics"};
  app.require_subcommand(1);

  RunArgs args;
  struct Cmd {
    const char* name;
    const char* help;
    std::optional<TaskKind> task;
  };
  const Cmd cmds[] = {
      {"run", "run the task declared in the config", std::nullopt},
      {"solve", "damped Picard solve with snapshots", TaskKind::Solve},
      {"probe", "multistart uniqueness probe", TaskKind::Multistart},
      {"diagnose", "solve and compute the certificate and probes", TaskKind::Diagnose},
      {"sweep", "sweep one config parameter", TaskKind::Sweep},
  };
  std::vector<std::pair<CLI::App*, std::optional<TaskKind>>> run_cmds;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_run_options(sub, args);
    run_cmds.emplace_back(sub, c.task);
  }

  auto* scen = app.add_subcommand("scenarios", "bundled scenarios");
  scen->require_subcommand(1);
  auto* list = scen->add_subcommand("list", "list bundled scenarios");
  std::string show_name;
  auto* show = scen->add_subcommand("show", "print a bundled scenario's config");
  show->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (list->parsed()) {
      for (const auto& s : bundled_scenarios()) std::cout << s.name << "\t" << s.description << "\n";
      return kExitOk;
    }
    if (show->parsed()) {
      const auto* s = find_scenario(show_name);
      if (s == nullptr) {
        std::cerr << "unknown scenario '" << show_name << "'\n";
        return kExitConfigError;
      }
      std::cout << s->yaml;
      return kExitOk;
    }
    for (const auto& [sub, task] : run_cmds) {
      if (sub->parsed()) return execute(args, task);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const mfg::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
