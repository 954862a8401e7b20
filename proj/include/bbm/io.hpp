#pragma once

// Run configuration, binary checkpoints, CSV/JSON outputs.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bbm/dynamics.hpp"
#include "bbm/noise.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

/// Forcing preset: "zero", "bump" (amplitude * exp(-((x3-center)/width)^2)
/// times the lowest cross-section mode, projected on the basis) or "modes"
/// (explicit list "m:n:p:coeff, ...").
struct ForcingSpec {
  std::string kind = "zero";
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
  std::string modes;
  bool operator==(const ForcingSpec&) const = default;
};

struct RunConfig {
  BoxDomain domain{3.14159265358979323846, 3.14159265358979323846, 4.0 * 3.14159265358979323846};
  ModeCounts modes{6, 6, 48};

  double nu = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  std::string flux = "classical";  // classical | custom
  std::array<double, 3> c1{1.0, 1.0, 1.0};
  std::array<double, 3> c2{0.5, 0.5, 0.5};
  std::string scheme = "imex-euler";  // imex-euler | imex-heun
  int refine = 2;

  double dt = 1e-3;
  double T = 10.0;
  long stride = 100;

  std::uint64_t seed = 1;
  double t0 = -200.0;
  double t1 = 20.0;
  double alpha = 2.0;
  std::string ou_init = "burn-in";  // burn-in | stationary | explicit
  double y0 = 0.0;

  std::string beta0_mode = "measured";  // measured | explicit
  double beta0 = 0.0;
  int beta0_samples = 64;
  std::uint64_t beta0_seed = 7;

  ForcingSpec g{"bump", 0.2, 1.0, 0.0, ""};
  ForcingSpec h{"bump", 0.05, 1.0, 0.0, ""};

  std::string initial = "random";  // zero | random
  double initial_radius = 1.0;
  std::uint64_t initial_seed = 3;

  std::vector<double> ladder{10.0, 20.0, 40.0, 80.0};
  std::vector<double> tail_k{1.0, 2.0, 3.0, 4.0, 6.0};
  double spectral_k = 3.0;
  std::vector<long> spectral_n{10, 50, 100, 200, 400, 800, 1600};
  std::size_t ensemble_size = 3;
  std::uint64_t ensemble_seed = 11;
  double tempered_radius = 1.0;
  double c_quad = 1.0;
  double quad_window = 40.0;
  std::vector<double> attraction_times{5.0, 10.0, 20.0, 40.0};
  double attraction_tol = 1e-3;
  double invariance_t = 1.0;

  bool operator==(const RunConfig&) const = default;
};

/// Named starting points: "default", "quick", "unit-pi".
RunConfig preset_config(const std::string& name);

/// Flat `key = value` text with `#` comments. A `preset = name` line selects
/// the base; other keys override it. Errors carry `config:<line>:`.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& cfg);
/// Sets one key from its text form; ConfigError on unknown key or bad value.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);
std::vector<std::string> config_keys();
/// Cross-field checks (grid alignment of the noise window, radii, horizons).
void validate_config(const RunConfig& cfg);

/// %.17g formatting used by every text output.
std::string format_double(double x);

// Binary checkpoints, little-endian 64-bit fields.
inline constexpr std::uint64_t kPathMagic = 0x4854415050424d42ULL;   // "BBMPPATH"
inline constexpr std::uint64_t kStateMagic = 0x4554415453424d42ULL;  // "BBMSTATE"
inline constexpr std::uint64_t kFormatVersion = 1;

void write_path(const std::filesystem::path& file, const WienerPath& path);
WienerPath read_path(const std::filesystem::path& file);

struct StateCheckpoint {
  BoxDomain domain;
  ModeCounts modes{};
  double t = 0.0;
  double y = 0.0;
  std::vector<double> coeffs;

  /// Coefficients as a field on `basis`; ContractViolation on shape mismatch.
  SpectralField field(const BasisPtr& basis) const;
};

void write_state(const std::filesystem::path& file, const SpectralField& v, double t, double y);
StateCheckpoint read_state(const std::filesystem::path& file);

/// Directory of state checkpoints plus index.json listing them.
void write_state_set(const std::filesystem::path& dir, const std::vector<SpectralField>& states, double t,
                     const std::string& description);
std::vector<StateCheckpoint> read_state_set(const std::filesystem::path& dir);

inline constexpr const char* kDiagnosticsHeader = "t,v_l2,v_h1,vdot_h1,energy,grad_sq,y";
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace bbm
