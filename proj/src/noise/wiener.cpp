#include <cmath>
#include <random>
#include <sstream>

#include "bbm/error.hpp"
#include "bbm/noise.hpp"

namespace bbm {

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + kSeedMixConstant * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

long aligned_steps(double t, double dt, const char* what) {
  if (!(dt > 0.0)) throw ConfigError(std::string(what) + ": time step must be positive");
  const double r = t / dt;
  const double n = std::round(r);
  if (!std::isfinite(r) || std::abs(r - n) > 1e-6 * std::max(1.0, std::abs(r))) {
    std::ostringstream os;
    os << what << ": t=" << t << " is not a multiple of dt=" << dt;
    throw ConfigError(os.str());
  }
  return static_cast<long>(n);
}

WienerPath::WienerPath(std::uint64_t seed, double t0, double dt, std::vector<double> increments)
    : seed_(seed), t0_(t0), dt_(dt), increments_(std::move(increments)) {
  origin_ = -aligned_steps(t0, dt, "wiener path t0");
  const long n = static_cast<long>(increments_.size());
  if (origin_ < 0 || origin_ > n) throw ConfigError("wiener path window must contain t = 0");
  nodes_.assign(increments_.size() + 1, 0.0);
  for (long i = origin_ + 1; i <= n; ++i) nodes_[i] = nodes_[i - 1] + increments_[i - 1];
  for (long i = origin_ - 1; i >= 0; --i) nodes_[i] = nodes_[i + 1] - increments_[i];
}

WienerPath WienerPath::sample(std::uint64_t seed, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw ConfigError("sample_wiener: dt must be positive");
  if (!(t0 < t1)) throw ConfigError("sample_wiener: need t0 < t1");
  if (t0 > 0.0 || t1 < 0.0) throw ConfigError("sample_wiener: window must contain t = 0");
  const long i0 = aligned_steps(t0, dt, "sample_wiener t0");
  const long i1 = aligned_steps(t1, dt, "sample_wiener t1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  std::vector<double> inc(static_cast<std::size_t>(i1 - i0));
  for (double& x : inc) x = normal(rng);
  return WienerPath(seed, static_cast<double>(i0) * dt, dt, std::move(inc));
}

WienerPath WienerPath::from_increments(std::uint64_t seed, double t0, double dt, std::vector<double> increments) {
  if (!(dt > 0.0)) throw ConfigError("wiener path: dt must be positive");
  if (increments.empty()) throw ConfigError("wiener path: empty increment array");
  return WienerPath(seed, t0, dt, std::move(increments));
}

double WienerPath::node_value(long i) const {
  if (i < 0 || i >= static_cast<long>(nodes_.size())) throw WindowError("wiener path: node outside sampled window");
  return nodes_[i];
}

double WienerPath::node_increment(long i) const {
  if (i < 0 || i >= static_cast<long>(increments_.size()))
    throw WindowError("wiener path: increment outside sampled window");
  return increments_[i];
}

double WienerPath::value(double t) const { return node_value(origin_ + aligned_steps(t, dt_, "path value")); }

ShiftedPath::ShiftedPath(PathPtr base, long shift_steps) : base_(std::move(base)), shift_(shift_steps) {
  if (!base_) throw ContractViolation("ShiftedPath: null base path");
  base_index(0);
}

double ShiftedPath::shift() const { return static_cast<double>(shift_) * base_->dt(); }

ShiftedPath ShiftedPath::shifted(double s) const {
  return shifted_steps(aligned_steps(s, base_->dt(), "shift"));
}

long ShiftedPath::base_index(long j) const {
  const long i = base_->origin() + shift_ + j;
  if (i < 0 || i > static_cast<long>(base_->steps())) {
    std::ostringstream os;
    os << "path view: time " << static_cast<double>(j) * base_->dt() << " under shift " << shift()
       << " is outside the sampled window [" << base_->t0() << ", " << base_->t1() << "]";
    throw WindowError(os.str());
  }
  return i;
}

double ShiftedPath::value_at(long j) const {
  return base_->node_value(base_index(j)) - base_->node_value(base_index(0));
}

double ShiftedPath::value(double t) const { return value_at(aligned_steps(t, base_->dt(), "path view time")); }

double ShiftedPath::increment_at(long j) const {
  const long i = base_index(j);
  if (i >= static_cast<long>(base_->steps())) throw WindowError("path view: increment past the window end");
  return base_->node_increment(i);
}

}  // namespace bbm
