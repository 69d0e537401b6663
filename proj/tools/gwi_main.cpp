// gwi: simulate, verify, aggregate and constants subcommands.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gwi/config.hpp"
#include "gwi/error.hpp"
#include "gwi/experiment.hpp"
#include "gwi/parallel.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
};

void add_common_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "key = value configuration file");
  cmd.add_option("--seed", o.seed, "master seed");
  cmd.add_option("--out", o.out_dir, "output directory");
  cmd.add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
}

gwi::ExperimentConfig resolve(const Overrides& o) {
  gwi::ExperimentConfig config = o.config_path.empty() ? gwi::ExperimentConfig{}
                                                       : gwi::load_config(o.config_path);
  if (o.seed) config.seed = *o.seed;
  if (o.out_dir) config.out_dir = *o.out_dir;
  if (o.format) config.format = gwi::parse_report_format(*o.format);
  gwi::validate(config);
  return config;
}

void print_summary(const gwi::ExperimentResult& result) {
  for (const auto& e : result.report.entries) {
    std::cout << (e.pass ? "PASS " : "FAIL ") << e.check_id << ": " << e.statistic << " = "
              << e.estimate << " (target " << e.target << ", tolerance " << e.tolerance << ")\n";
  }
  for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galton-Watson process with heavy-tailed immigration: simulation and checks"};
  app.require_subcommand(1);
  app.footer("Thread count: GWI_NUM_THREADS (defaults to OpenMP's).\n"
             "Exit status: 0 all checks pass, 1 a check failed, 2 usage or configuration error.");

  Overrides o;
  auto* simulate = app.add_subcommand("simulate", "write stationary paths to <out>/paths.csv");
  auto* verify = app.add_subcommand("verify", "run the configured check list");
  auto* aggregate = app.add_subcommand("aggregate", "iterated aggregation over N copies");
  auto* constants = app.add_subcommand("constants", "print C_alpha, K, b_alpha and the b+ table");
  for (auto* cmd : {simulate, verify, aggregate, constants}) add_common_flags(*cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gwi::kExitPass : gwi::kExitUsage;
  }

  gwi::configure_threads_from_env();
  gwi::ExperimentConfig config;
  try {
    config = resolve(o);
  } catch (const gwi::Error& e) {
    std::cerr << "gwi: " << gwi::to_string(e.kind()) << ": " << e.what() << "\n";
    return gwi::kExitUsage;
  }

  try {
    if (constants->parsed()) {
      std::cout << gwi::constants_table(config);
      return gwi::kExitPass;
    }
    gwi::ExperimentResult result;
    if (simulate->parsed()) {
      result = gwi::simulate_paths(config);
    } else if (aggregate->parsed()) {
      result = gwi::run_aggregate(config);
    } else {
      result = gwi::run_experiment(config);
    }
    print_summary(result);
    return result.exit_status();
  } catch (const gwi::Error& e) {
    std::cerr << "gwi: " << gwi::to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == gwi::ErrorKind::config_error || e.kind() == gwi::ErrorKind::unwritable_path
               ? gwi::kExitUsage
               : gwi::kExitCheckFailure;
  }
}
