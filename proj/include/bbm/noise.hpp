#pragma once

// Two-sided Wiener paths with theta-shift views, the path-driven OU process
// dy + alpha y dt = dw, and the scalar diagnostics built on it.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace bbm {

/// Per-realization seed derived from a master seed. splitmix64 finalizer
/// applied to master + kSeedMixConstant * (index + 1).
inline constexpr std::uint64_t kSeedMixConstant = 0x9E3779B97F4A7C15ULL;
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

/// Grid index for time t on a grid of step dt; throws if t is not aligned.
long aligned_steps(double t, double dt, const char* what);

class WienerPath {
 public:
  /// Increments i.i.d. N(0, dt) from mt19937_64(seed); omega(0) = 0.
  static WienerPath sample(std::uint64_t seed, double t0, double t1, double dt);
  /// Path with given increments on [t0, t0 + dt*size].
  static WienerPath from_increments(std::uint64_t seed, double t0, double dt, std::vector<double> increments);

  std::uint64_t seed() const { return seed_; }
  double t0() const { return t0_; }
  double t1() const { return t0_ + dt_ * static_cast<double>(increments_.size()); }
  double dt() const { return dt_; }
  std::size_t steps() const { return increments_.size(); }
  /// Index of t = 0 within the node array.
  long origin() const { return origin_; }
  const std::vector<double>& increments() const { return increments_; }

  /// omega at node i (time t0 + i*dt).
  double node_value(long i) const;
  /// Increment from node i to node i+1.
  double node_increment(long i) const;
  /// omega(t) at grid-aligned t; WindowError outside [t0, t1].
  double value(double t) const;

 private:
  WienerPath(std::uint64_t seed, double t0, double dt, std::vector<double> increments);

  std::uint64_t seed_ = 0;
  double t0_ = 0.0;
  double dt_ = 1.0;
  long origin_ = 0;
  std::vector<double> increments_;
  std::vector<double> nodes_;
};

using PathPtr = std::shared_ptr<const WienerPath>;

/// theta_s omega: t -> omega(t + s) - omega(s). Shift is stored in steps.
class ShiftedPath {
 public:
  ShiftedPath() = default;
  explicit ShiftedPath(PathPtr base, long shift_steps = 0);

  const PathPtr& base() const { return base_; }
  long shift_steps() const { return shift_; }
  double shift() const;
  double dt() const { return base_->dt(); }

  /// Composition: shifting by s then t equals shifting by s + t.
  ShiftedPath shifted(double s) const;
  ShiftedPath shifted_steps(long steps) const { return ShiftedPath(base_, shift_ + steps); }

  /// View time window [t0 - s, t1 - s] expressed in view step indices.
  long first_index() const { return -base_->origin() - shift_; }
  long last_index() const { return first_index() + static_cast<long>(base_->steps()); }

  /// (theta_s omega)(j * dt)
  double value_at(long j) const;
  double value(double t) const;
  /// Increment over [j dt, (j+1) dt] of the view (identical to the base).
  double increment_at(long j) const;

 private:
  long base_index(long j) const;

  PathPtr base_;
  long shift_ = 0;
};

enum class OUInit { Stationary, BurnIn, Explicit };

struct OUOptions {
  OUInit mode = OUInit::BurnIn;
  double y0 = 0.0;          // explicit initial value
  double burn_in = -1.0;    // < 0: default 10 / alpha
  std::uint64_t seed = 0;   // stationary sample; 0 = derive from the path seed
};

/// OU values on every node of a path view, from the view's left endpoint:
/// y_{i+1} = exp(-alpha dt) y_i + dW_i.
class OUState {
 public:
  OUState(ShiftedPath path, double alpha, OUInit mode, long valid_from, std::vector<double> y);

  double alpha() const { return alpha_; }
  double decay() const { return decay_; }
  OUInit mode() const { return mode_; }
  const ShiftedPath& path() const { return path_; }
  double dt() const { return path_.dt(); }
  long first_index() const { return path_.first_index(); }
  long last_index() const { return path_.last_index(); }
  /// First view index past the burn-in window.
  long valid_from() const { return valid_from_; }
  const std::vector<double>& values() const { return y_; }

  /// y at view index j; WindowError before valid_from or past the window.
  double at(long j) const;
  double value(double t) const;
  /// max_i |y_{i+1} - decay*y_i - dW_i|
  double recursion_residual() const;

 private:
  ShiftedPath path_;
  double alpha_;
  double decay_;
  OUInit mode_;
  long valid_from_;
  std::vector<double> y_;
};

/// One step of the OU recursion; shared by ou_solve and the PDE stepper so
/// both produce bitwise identical values.
inline double ou_advance(double y, double decay, double dW) { return decay * y + dW; }

OUState ou_solve(const ShiftedPath& path, double alpha, const OUOptions& options = {});

/// The noise realization seen by a trajectory: OU values and increments of
/// theta_s omega, sharing one OU solution computed on the base path.
class NoiseFiber {
 public:
  NoiseFiber() = default;
  explicit NoiseFiber(std::shared_ptr<const OUState> ou, long shift_steps = 0);

  double dt() const { return ou_->dt(); }
  double alpha() const { return ou_->alpha(); }
  double decay() const { return ou_->decay(); }
  long shift_steps() const { return shift_; }
  double shift() const;
  const std::shared_ptr<const OUState>& ou() const { return ou_; }
  ShiftedPath path() const { return ou_->path().shifted_steps(shift_); }

  NoiseFiber shifted(double s) const;
  NoiseFiber shifted_steps(long steps) const { return NoiseFiber(ou_, shift_ + steps); }

  /// y(theta_{j dt} fiber)
  double y(long j) const { return ou_->at(shift_ + j); }
  double dW(long j) const { return ou_->path().increment_at(shift_ + j); }
  /// Throws WindowError unless y is valid on [j0, j1] and dW on [j0, j1).
  void require(long j0, long j1) const;
  long first_valid() const { return ou_->valid_from() - shift_; }
  long last_valid() const { return ou_->last_index() - shift_; }

 private:
  std::shared_ptr<const OUState> ou_;
  long shift_ = 0;
};

/// (1/t) * integral_{-t}^0 |y(theta_tau omega)| dtau, trapezoid on the grid.
double ergodic_average(const NoiseFiber& fiber, double t);

struct TemperednessReport {
  std::vector<double> times;
  std::vector<double> weighted;  // exp(-sigma t) * values(t)
  double last_decade_max = 0.0;
  bool decreasing_trend = false;
  bool pass = false;
};

/// Evaluates exp(-sigma t) values(t) on a log grid (20 points per decade,
/// three decades) ending at `horizon`.
TemperednessReport temperedness_check(const std::function<double(double)>& values, double sigma, double horizon,
                                      double tolerance);

struct DeltaCondReport {
  bool found = false;
  double T0 = 0.0;  // first grid time after which the bound holds to the window end
  double window = 0.0;
};

/// beta * int_{-t}^0 |y| < delta t / 8 for all grid t in [T0, window].
DeltaCondReport deltacond_threshold(const NoiseFiber& fiber, double beta, double delta, double window);

struct SystemConstants {
  double nu = 1.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double lambda = 1.0;
  double beta0 = 0.0;
  double h_h1norm = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double alpha = 1.0;
  bool alpha_ok = false;

  /// 128 beta^2 / delta^2
  double alpha_threshold() const { return 128.0 * beta * beta / (delta * delta); }
};

SystemConstants make_constants(double nu, double gamma1, double gamma2, double lambda, double beta0,
                               double h_h1norm, double alpha);

}  // namespace bbm
