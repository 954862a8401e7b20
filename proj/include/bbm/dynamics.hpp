#pragma once

// Transformed BBM evolution for v = u - z(theta_t omega):
//   v_t - Lap v_t - nu Lap v = -div F(v + z) + g + alpha z + (nu - alpha) Lap z,
// with z = (I - Lap)^{-1} h y, the IMEX stepper and the cocycle Phi.

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "bbm/noise.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

enum class FluxKind { Classical, CustomPolynomial };

/// F_k(s) = c1[k] s + c2[k] s^2. Degree two is the largest allowed by the
/// growth bound |F_k'(s)| <= gamma1 + gamma2 |s|.
struct FluxCoefficients {
  std::array<double, 3> c1{1.0, 1.0, 1.0};
  std::array<double, 3> c2{0.5, 0.5, 0.5};
};

struct PhysicsParams {
  SystemConstants constants;
  FluxKind kind = FluxKind::Classical;
  FluxCoefficients flux;

  static PhysicsParams classical(const SystemConstants& c);
  static PhysicsParams custom(const SystemConstants& c, const FluxCoefficients& f);

  /// Checks F_k(0) = 0 and the growth bound with the configured gammas on a
  /// sampled range; throws ConfigError when violated.
  void validate() const;

  double F(int k, double s) const { return flux.c1[k] * s + flux.c2[k] * s * s; }
  double dF(int k, double s) const { return flux.c1[k] + 2.0 * flux.c2[k] * s; }
  double G(int k, double s) const { return 0.5 * flux.c1[k] * s * s + flux.c2[k] * s * s * s / 3.0; }
  bool has_linear() const;
  bool has_quadratic() const;
};

struct Forcing {
  SpectralField g;
  SpectralField h;
  SpectralField hz;  // (I - Lap)^{-1} h

  static Forcing make(SpectralField g, SpectralField h);
  static Forcing zero(const BasisPtr& basis);
  /// z(theta_t omega) = hz * y
  SpectralField z(double y) const { return y * hz; }
};

enum class Scheme { ImexEuler, ImexHeun };

/// Everything needed to advance one trajectory. Immutable once built and
/// shared freely between ensemble workers.
class Model {
 public:
  Model(BasisPtr basis, PhysicsParams physics, Forcing forcing, Scheme scheme = Scheme::ImexEuler, int refine = 2);

  const BasisPtr& basis() const { return basis_; }
  const PhysicsParams& physics() const { return physics_; }
  const Forcing& forcing() const { return forcing_; }
  Scheme scheme() const { return scheme_; }
  int refine() const { return refine_; }
  double nu() const { return physics_.constants.nu; }
  double alpha() const { return physics_.constants.alpha; }

  Model with_scheme(Scheme s) const;
  Model with_forcing(Forcing f) const;
  Model with_physics(PhysicsParams p) const;

  /// Exact Galerkin matrix of d/dx_axis on the sine modes of that axis.
  const RowMatrix& derivative_matrix(int axis) const { return derivative_[axis]; }

 private:
  BasisPtr basis_;
  PhysicsParams physics_;
  Forcing forcing_;
  Scheme scheme_;
  int refine_;
  std::array<RowMatrix, 3> derivative_;
};

/// (d e_m / dx, e_q) for one axis: 4 m q / (len (q^2 - m^2)) when q + m is
/// odd, zero otherwise. Row q, column m.
RowMatrix galerkin_derivative_matrix(int modes, double length);

std::array<GridField, 3> eval_F(const PhysicsParams& physics, const GridField& u);
std::array<GridField, 3> eval_G(const PhysicsParams& physics, const GridField& u);

/// Projection of div F(v + z). Linear flux part through the exact Galerkin
/// matrices, quadratic part from grid products projected exactly per axis.
SpectralField nonlinear_div(const Model& model, const SpectralField& v, const SpectralField& z);

/// R = -div F(v + z) + g + alpha z + (nu - alpha) Lap z, z = hz * y.
SpectralField rhs(const Model& model, const SpectralField& v, double y);

struct TrajectoryState {
  SpectralField v;
  double t = 0.0;
  double y = 0.0;

  SpectralField z(const Forcing& f) const { return f.z(y); }
  /// u = v + z(theta_t omega)
  SpectralField u(const Forcing& f) const { return v + f.z(y); }
};

/// Guard on coefficient magnitude; larger values raise DivergenceError.
inline constexpr double kOverflowGuard = 1e12;

/// One IMEX step. `decay` = exp(-alpha dt) of the driving OU process; y is
/// advanced with the same recursion as ou_solve.
TrajectoryState step(const Model& model, const TrajectoryState& state, double dt, double dW, double decay);

struct DiagnosticsRow {
  double t, v_l2, v_h1, vdot_h1, energy, grad_sq, y;
};

struct EvolveOptions {
  long stride = 1;      // record every `stride` steps; 0 disables recording
  std::function<void(const TrajectoryState&)> observer;  // called on recorded states
};

struct PullbackRun {
  double horizon = 0.0;
  double shift = 0.0;  // fiber shift the run started from
  long steps = 0;
  std::vector<DiagnosticsRow> rows;
  TrajectoryState final_state;
};

DiagnosticsRow diagnostics_row(const Model& model, const TrajectoryState& s, double vdot_h1);

/// Integrates v from fiber time 0 to T along `fiber`.
PullbackRun evolve(const Model& model, const SpectralField& v0, const NoiseFiber& fiber, double T,
                   const EvolveOptions& options = {});

/// Phi(t, omega, u0) = v(t, omega, u0 - z(omega)) + z(theta_t omega).
SpectralField cocycle_phi(const Model& model, double t, const NoiseFiber& fiber, const SpectralField& u0);

}  // namespace bbm
