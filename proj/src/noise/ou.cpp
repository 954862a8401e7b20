#include <cmath>
#include <random>
#include <sstream>

#include "bbm/error.hpp"
#include "bbm/noise.hpp"

namespace bbm {

OUState::OUState(ShiftedPath path, double alpha, OUInit mode, long valid_from, std::vector<double> y)
    : path_(std::move(path)), alpha_(alpha), decay_(std::exp(-alpha * path_.dt())), mode_(mode),
      valid_from_(valid_from), y_(std::move(y)) {}

double OUState::at(long j) const {
  if (j < valid_from_ || j > last_index()) {
    std::ostringstream os;
    os << "OU process: time " << static_cast<double>(j) * dt() << " outside the valid window ["
       << static_cast<double>(valid_from_) * dt() << ", " << static_cast<double>(last_index()) * dt() << "]";
    throw WindowError(os.str());
  }
  return y_[static_cast<std::size_t>(j - first_index())];
}

double OUState::value(double t) const { return at(aligned_steps(t, dt(), "OU time")); }

double OUState::recursion_residual() const {
  double r = 0.0;
  const long j0 = first_index();
  for (std::size_t i = 0; i + 1 < y_.size(); ++i) {
    const double dW = path_.increment_at(j0 + static_cast<long>(i));
    r = std::max(r, std::abs(y_[i + 1] - ou_advance(y_[i], decay_, dW)));
  }
  return r;
}

OUState ou_solve(const ShiftedPath& path, double alpha, const OUOptions& options) {
  if (!(alpha > 0.0)) throw InvalidArgument("ou_solve: alpha must be positive");
  const long j0 = path.first_index();
  const long j1 = path.last_index();
  std::vector<double> y(static_cast<std::size_t>(j1 - j0 + 1));
  long valid_from = j0;
  switch (options.mode) {
    case OUInit::Stationary: {
      const std::uint64_t seed = options.seed ? options.seed : split_seed(path.base()->seed(), 0x4F55);
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / (2.0 * alpha)));
      y[0] = normal(rng);
      break;
    }
    case OUInit::BurnIn: {
      y[0] = 0.0;
      const double burn = options.burn_in < 0.0 ? 10.0 / alpha : options.burn_in;
      valid_from = j0 + static_cast<long>(std::ceil(burn / path.dt() - 1e-9));
      if (valid_from > j1) throw WindowError("ou_solve: burn-in window longer than the sampled path");
      break;
    }
    case OUInit::Explicit:
      y[0] = options.y0;
      break;
  }
  const double decay = std::exp(-alpha * path.dt());
  for (std::size_t i = 0; i + 1 < y.size(); ++i)
    y[i + 1] = ou_advance(y[i], decay, path.increment_at(j0 + static_cast<long>(i)));
  return OUState(path, alpha, options.mode, valid_from, std::move(y));
}

NoiseFiber::NoiseFiber(std::shared_ptr<const OUState> ou, long shift_steps) : ou_(std::move(ou)), shift_(shift_steps) {
  if (!ou_) throw ContractViolation("NoiseFiber: null OU state");
}

double NoiseFiber::shift() const { return static_cast<double>(shift_) * dt(); }

NoiseFiber NoiseFiber::shifted(double s) const { return shifted_steps(aligned_steps(s, dt(), "fiber shift")); }

void NoiseFiber::require(long j0, long j1) const {
  if (shift_ + j0 < ou_->valid_from() || shift_ + j1 > ou_->last_index()) {
    std::ostringstream os;
    os << "noise window exceeded: need fiber times [" << static_cast<double>(j0) * dt() << ", "
       << static_cast<double>(j1) * dt() << "] at shift " << shift() << ", available ["
       << static_cast<double>(first_valid()) * dt() << ", " << static_cast<double>(last_valid()) * dt() << "]";
    throw WindowError(os.str());
  }
}

}  // namespace bbm
