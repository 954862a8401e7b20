#pragma once

// Run orchestration used by the CLI and the acceptance harness.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bbm/attractor.hpp"
#include "bbm/dynamics.hpp"
#include "bbm/error.hpp"
#include "bbm/io.hpp"
#include "bbm/noise.hpp"
#include "bbm/parallel.hpp"

namespace bbm {

struct AcceptanceFailure : Error {
  explicit AcceptanceFailure(const std::string& w) : Error(ErrorKind::Acceptance, w) {}
};

SpectralField make_forcing_field(const BasisPtr& basis, const ForcingSpec& spec);
Scheme parse_scheme(const std::string& name);
SystemConstants constants_for(const RunConfig& cfg, const BasisPtr& basis, const SpectralField& h);
PhysicsParams physics_for(const RunConfig& cfg, const SystemConstants& c);
std::shared_ptr<const OUState> noise_for(const RunConfig& cfg, std::uint64_t seed);
SpectralField initial_state(const RunConfig& cfg, const BasisPtr& basis);

/// Everything a command needs, built from one config.
struct Experiment {
  explicit Experiment(const RunConfig& cfg);

  RunConfig cfg;
  BasisPtr basis;
  SystemConstants constants;
  Model model;
  std::shared_ptr<const OUState> ou;
  NoiseFiber fiber;
};

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::ostream* log = nullptr;
};

std::vector<std::string> command_names();
/// Runs one subcommand and writes its artifacts into out_dir. Returns the
/// exit status (0, or 5 when verify finds a failing criterion).
int run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opts);

// Acceptance suite. Tolerances are fixed in verify.cpp.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriteriaCount = 9;

/// Criteria 1..9 at the scale described by `cfg`. Criteria 6 and 7 reuse the
/// pullback states computed for criterion 5.
class AcceptanceSuite {
 public:
  AcceptanceSuite(const RunConfig& cfg, const Parallel& par, std::ostream* log = nullptr);
  ~AcceptanceSuite();
  CriterionResult run(int id);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bbm
