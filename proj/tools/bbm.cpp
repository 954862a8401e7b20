// Command-line front end. Talks to the simulator only through the C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbm/bbm.h"

namespace {

int exit_code(bbm_status s) {
  switch (s) {
    case BBM_OK: return 0;
    case BBM_ERR_CONFIG:
    case BBM_ERR_INVALID_ARGUMENT: return 2;
    case BBM_ERR_DIVERGENCE: return 3;
    case BBM_ERR_WINDOW: return 4;
    case BBM_ERR_ACCEPTANCE: return 5;
    default: return 1;
  }
}

int report(bbm_status s) {
  if (s != BBM_OK) std::fprintf(stderr, "bbm: %s\n", bbm_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic BBM simulator and pullback-attractor diagnostics"};
  app.set_version_flag("--version", std::string(bbm_version()));
  std::string subcommand, config, out = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  bool quiet = false;
  std::vector<std::string> overrides;
  app.add_option("subcommand", subcommand, "constants|simulate|pullback|absorb|tails|spectral|attractor|verify")
      ->required()
      ->check(CLI::IsMember({"constants", "simulate", "pullback", "absorb", "tails", "spectral", "attractor", "verify"}));
  app.add_option("--config", config, "configuration file")->required();
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides noise.seed)");
  app.add_option("--threads", threads, "worker threads for ensembles")->check(CLI::PositiveNumber);
  app.add_option("--set", overrides, "override a config key, key=value (repeatable)");
  app.add_flag("--quiet", quiet, "suppress progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  bbm_config* cfg = nullptr;
  if (bbm_status s = bbm_config_load(config.c_str(), &cfg); s != BBM_OK) return report(s);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "bbm: --set expects key=value, got '%s'\n", kv.c_str());
      bbm_config_free(cfg);
      return 2;
    }
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (bbm_status s = bbm_config_set(cfg, key.c_str(), value.c_str()); s != BBM_OK) {
      bbm_config_free(cfg);
      return report(s);
    }
  }
  bbm_run_options opts{};
  opts.out_dir = out.c_str();
  opts.has_seed = seed_opt->count() > 0;
  opts.seed = seed;
  opts.threads = threads;
  opts.quiet = quiet ? 1 : 0;
  const bbm_status s = bbm_run_command(cfg, subcommand.c_str(), &opts);
  bbm_config_free(cfg);
  return report(s);
}
