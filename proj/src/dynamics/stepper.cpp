#include <cmath>
#include <sstream>

#include "bbm/dynamics.hpp"
#include "bbm/error.hpp"

namespace bbm {

namespace {

[[noreturn]] void diverged(double t, const char* what) {
  std::ostringstream os;
  os.precision(10);
  os << "trajectory diverged at t=" << t << " (" << what << ")";
  throw DivergenceError(os.str(), t);
}

SpectralField guarded_rhs(const Model& model, const SpectralField& v, double y, double t) {
  try {
    return rhs(model, v, y);
  } catch (const DivergenceError& e) {
    diverged(t, e.what());
  }
}

void check_state(const SpectralField& v, double t) {
  for (double c : v.coeffs())
    if (!std::isfinite(c) || std::abs(c) > kOverflowGuard) diverged(t, "coefficient exceeds overflow guard");
}

// Semi-discrete time derivative (I - Lap)^{-1}(R - nu lambda v).
SpectralField time_derivative(const Model& model, const TrajectoryState& s) {
  SpectralField d = guarded_rhs(model, s.v, s.y, s.t);
  const auto lam = model.basis()->eigenvalues();
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = (d[j] - model.nu() * lam[j] * s.v[j]) / (1.0 + lam[j]);
  return d;
}

}  // namespace

TrajectoryState step(const Model& model, const TrajectoryState& state, double dt, double dW, double decay) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  const auto lam = model.basis()->eigenvalues();
  const double nu = model.nu();
  const double t1 = state.t + dt;
  TrajectoryState next;
  next.t = t1;
  next.y = ou_advance(state.y, decay, dW);

  const SpectralField R0 = guarded_rhs(model, state.v, state.y, state.t);
  SpectralField v1(model.basis());
  for (std::size_t j = 0; j < v1.size(); ++j)
    v1[j] = ((1.0 + lam[j]) * state.v[j] + dt * R0[j]) / ((1.0 + lam[j]) + nu * lam[j] * dt);

  if (model.scheme() == Scheme::ImexHeun) {
    check_state(v1, t1);
    const SpectralField R1 = guarded_rhs(model, v1, next.y, t1);
    for (std::size_t j = 0; j < v1.size(); ++j) {
      const double half = 0.5 * nu * lam[j] * dt;
      v1[j] = ((1.0 + lam[j] - half) * state.v[j] + 0.5 * dt * (R0[j] + R1[j])) / ((1.0 + lam[j]) + half);
    }
  }
  check_state(v1, t1);
  next.v = std::move(v1);
  return next;
}

DiagnosticsRow diagnostics_row(const Model& model, const TrajectoryState& s, double vdot_h1) {
  (void)model;
  const double gs = grad_sq(s.v);
  const double l2 = l2_norm(s.v);
  const double energy = l2 * l2 + gs;
  return DiagnosticsRow{s.t, l2, std::sqrt(energy), vdot_h1, energy, gs, s.y};
}

PullbackRun evolve(const Model& model, const SpectralField& v0, const NoiseFiber& fiber, double T,
                   const EvolveOptions& options) {
  if (v0.basis() != model.basis()) throw ContractViolation("evolve: initial state lives on a different basis");
  if (T < 0.0) throw InvalidArgument("evolve: horizon must be >= 0");
  const double dt = fiber.dt();
  const long n = aligned_steps(T, dt, "evolve horizon");
  fiber.require(0, n);

  PullbackRun run;
  run.horizon = T;
  run.shift = fiber.shift();
  run.steps = n;
  TrajectoryState s{v0, 0.0, fiber.y(0)};
  const bool record = options.stride > 0;
  if (record) {
    run.rows.push_back(diagnostics_row(model, s, h1_norm(time_derivative(model, s))));
    if (options.observer) options.observer(s);
  }
  const double decay = fiber.decay();
  for (long j = 0; j < n; ++j) {
    TrajectoryState next = step(model, s, dt, fiber.dW(j), decay);
    // Grid time from the index keeps t exact on long runs.
    next.t = static_cast<double>(j + 1) * dt;
    if (record && ((j + 1) % options.stride == 0 || j + 1 == n)) {
      const double vdot = h1_distance(next.v, s.v) / dt;
      run.rows.push_back(diagnostics_row(model, next, vdot));
      if (options.observer) options.observer(next);
    }
    s = std::move(next);
  }
  run.final_state = std::move(s);
  return run;
}

SpectralField cocycle_phi(const Model& model, double t, const NoiseFiber& fiber, const SpectralField& u0) {
  if (t == 0.0) return u0;
  const Forcing& f = model.forcing();
  const long n = aligned_steps(t, fiber.dt(), "cocycle time");
  SpectralField v0 = u0 - f.z(fiber.y(0));
  PullbackRun run = evolve(model, v0, fiber, t, EvolveOptions{0, {}});
  return run.final_state.v + f.z(fiber.y(n));
}

}  // namespace bbm
