// mints: run, validate and aggregate benchmark experiments.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mints/harness/aggregate.hpp"
#include "mints/harness/config.hpp"
#include "mints/harness/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

using namespace mints::harness;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file `" + path + "`");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::size_t jobs = 1;
  std::optional<std::string> out;
};

int run_family(Family family, const RunArgs& a) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(read_file(a.config), family);
    if (a.seed) cfg.seed = *a.seed;
    if (a.reps) {
      if (*a.reps < 1) throw ConfigError("--reps: must be >= 1");
      cfg.replications = *a.reps;
    }
    if (a.out) cfg.output_dir = *a.out;
    if (a.jobs < 1) throw ConfigError("--jobs: must be >= 1");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';

  try {
    const RunSummary s = run_experiment(cfg, {a.jobs, true});
    write_outputs(s, cfg.output_dir);
    std::cout << "family " << to_string(cfg.family) << ", policy " << cfg.policy() << ", config "
              << hex64(s.hash) << ", " << cfg.replications << " replication(s) x " << cfg.horizon
              << " rounds\n";
    for (const auto& c : s.checkpoints) {
      std::cout << "  R(" << c.t << ") = " << format_double(c.mean) << " +/- "
                << format_double(2.0 * c.stderr_mean) << '\n';
    }
    std::printf("  wall clock %.3f s, output in %s\n", s.wall_seconds, cfg.output_dir.c_str());
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int validate(const std::string& path) {
  try {
    const ExperimentConfig cfg = parse_config(read_file(path));
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "# config_hash " << hex64(config_hash(cfg)) << '\n' << canonical_config(cfg);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

int aggregate_dirs(const std::vector<std::string>& dirs, const std::string& out) {
  try {
    std::vector<RunRecord> runs;
    for (const auto& d : dirs) runs.push_back(load_run(d));
    const std::string csv = aggregate_csv(aggregate(runs));
    if (out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream f(out, std::ios::binary | std::ios::trunc);
      if (!(f << csv)) throw RunError("cannot write " + out);
    }
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MINTS benchmark harness"};
  app.require_subcommand(1);

  const std::vector<Family> families{Family::Mab,     Family::MabLipschitz, Family::Pricing,
                                     Family::LipschitzContinuum, Family::Cog, Family::Ellipsoid};
  std::vector<RunArgs> args(families.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < families.size(); ++i) {
    auto* sub = app.add_subcommand(to_string(families[i]), std::string("run the ") +
                                                               to_string(families[i]) + " family");
    RunArgs& a = args[i];
    sub->add_option("--config", a.config, "config file")->required();
    sub->add_option("--seed", a.seed, "master seed (overrides config)");
    sub->add_option("--reps", a.reps, "replications (overrides config)");
    sub->add_option("--jobs", a.jobs, "replications run concurrently")->capture_default_str();
    sub->add_option("--out", a.out, "output directory (overrides config)");
    subs.push_back(sub);
  }

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "parse and check a config file");
  val->add_option("--config", validate_path, "config file")->required();

  std::vector<std::string> agg_dirs;
  std::string agg_out;
  auto* agg = app.add_subcommand("aggregate", "combine run directories into one table");
  agg->add_option("dirs", agg_dirs, "run directories")->required()->check(CLI::ExistingDirectory);
  agg->add_option("--out", agg_out, "write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return run_family(families[i], args[i]);
  }
  if (val->parsed()) return validate(validate_path);
  return aggregate_dirs(agg_dirs, agg_out);
}
