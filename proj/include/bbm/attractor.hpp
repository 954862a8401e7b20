#pragma once

// Pullback machinery: absorbing radii, tail and spectral-truncation masses,
// Hausdorff semi-distances, attractor sampling and the attraction/invariance
// checks.

#include <cstdint>
#include <functional>
#include <vector>

#include "bbm/dynamics.hpp"
#include "bbm/noise.hpp"
#include "bbm/parallel.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

using StateSet = std::vector<SpectralField>;

/// v(0, theta_{-T} omega, v0) for every v0 in the family.
StateSet pullback_state(const Model& model, double T, const NoiseFiber& fiber, const StateSet& v0_family,
                        const Parallel& par = {});
/// Phi(T, theta_{-T} omega, u0) for every u0 in the family.
StateSet pullback_u(const Model& model, double T, const NoiseFiber& fiber, const StateSet& u0_family,
                    const Parallel& par = {});

struct AbsorbingEstimate {
  double r0 = 0.0;
  double r1 = 0.0;
  double z_norm = 0.0;
  double rho = 0.0;
  double window = 0.0;
  double c_quad = 1.0;
  bool alpha_ok = false;
  double T_report = -1.0;  // < 0 until a trajectory series has been attached
};

/// r0 = c_quad * int_{-W}^0 (1 + |y|^2 + |y|^3) exp(delta s + beta int_s^0 |y|) ds
/// by the trapezoid rule, r1 = sqrt(2 r0), rho = r1 + ||z(omega)||_{H1}.
AbsorbingEstimate absorbing_estimate(const NoiseFiber& fiber, const SystemConstants& c, const SpectralField& hz,
                                     double quad_window, double c_quad = 1.0);

/// First entry time after which values[i] <= bound for every later i;
/// negative when the last value is already above the bound.
double report_time(const std::vector<double>& times, const std::vector<double>& values, double bound);

/// int_{|x3| >= k} |v|^2 + |grad v|^2 on the dealiasing grid.
double tail_mass(const SpectralField& v, double k);

/// Sub-box radius closest to k whose walls x3 = +-2k fall on grid nodes.
double snap_subbox_radius(const SineBasis& basis, double k);

struct SpectralTail {
  double k = 0.0;
  std::size_t budget = 0;      // sub-box mode count
  double tilde_h1 = 0.0;       // ||psi v||_{H1(Q_2k)}
  std::vector<double> values;  // ||(I - P_n) psi v||_{H1(Q_2k)} for the requested n
};

/// psi(x3^2/k^2) v re-expanded in the sine basis of (0,a)x(0,b)x(-2k,2k).
/// k must be grid aligned (see snap_subbox_radius).
SpectralTail spectral_tail_series(const SpectralField& v, double k, const std::vector<std::size_t>& ns);
double spectral_tail(const SpectralField& v, double k, std::size_t n);
std::size_t subbox_budget(const SineBasis& basis, double k);

/// sup_{y in Y} inf_{z in Z} ||y - z||_{H1}
double hausdorff_semidist(const StateSet& Y, const StateSet& Z);
double hausdorff_sym(const StateSet& Y, const StateSet& Z);

/// Initial cloud: member i is radius * (i+1)/size times a random smooth
/// direction normalized in H1. Directions are seeded per member.
struct EnsembleSpec {
  std::size_t size = 4;
  std::uint64_t seed = 1;
  double decay = 1.0;  // spectral decay of the directions
};

StateSet ensemble_cloud(const BasisPtr& basis, const EnsembleSpec& spec, double radius);

/// The radius the cloud is drawn with at pullback horizon T.
using RadiusRule = std::function<double(double T)>;

struct AttractorApprox {
  StateSet states;
  std::vector<double> ladder;
  std::vector<StateSet> snapshots;
  std::vector<double> cauchy_residuals;
  std::vector<double> radii;
  EnsembleSpec ensemble;
};

AttractorApprox sample_attractor(const Model& model, const NoiseFiber& fiber, const EnsembleSpec& ensemble,
                                 const std::vector<double>& ladder, const RadiusRule& radius,
                                 const Parallel& par = {});

/// Radius rule from the absorbing estimate on theta_{-T} omega.
RadiusRule absorbing_radius(const Model& model, const NoiseFiber& fiber, double quad_window, double c_quad);

struct AttractionReport {
  std::vector<double> times;
  std::vector<double> distances;
  double last_decade_max = 0.0;
  bool decreasing = false;
  bool pass = false;
};

AttractionReport check_attraction(const Model& model, const NoiseFiber& fiber, const EnsembleSpec& family,
                                  const RadiusRule& radius, const AttractorApprox& attractor,
                                  const std::vector<double>& t_grid, double tolerance, const Parallel& par = {});

/// Symmetric Hausdorff distance between Phi(t, omega, A(omega)) and
/// A(theta_t omega).
double check_invariance(const Model& model, const NoiseFiber& fiber, const AttractorApprox& here,
                        const AttractorApprox& there, double t, const Parallel& par = {});

struct SteadyState {
  SpectralField v;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Newton solve of 0 = -div F(v) + g - nu lambda v (h = 0, y = 0) with a
/// dense finite-difference Jacobian.
SteadyState solve_steady_state(const Model& model, const SpectralField& guess, double tol = 1e-12,
                               int max_iter = 20);
/// max-norm of -div F(v) + g - nu lambda v
double steady_residual(const Model& model, const SpectralField& v);

}  // namespace bbm
