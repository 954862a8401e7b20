#include <algorithm>
#include <cmath>

#include "bbm/error.hpp"
#include "bbm/noise.hpp"

namespace bbm {

double ergodic_average(const NoiseFiber& fiber, double t) {
  const long n = aligned_steps(t, fiber.dt(), "ergodic_average horizon");
  if (n <= 0) throw InvalidArgument("ergodic_average: horizon must be positive");
  fiber.require(-n, 0);
  double s = 0.5 * (std::abs(fiber.y(-n)) + std::abs(fiber.y(0)));
  for (long j = -n + 1; j < 0; ++j) s += std::abs(fiber.y(j));
  return s * fiber.dt() / t;
}

TemperednessReport temperedness_check(const std::function<double(double)>& values, double sigma, double horizon,
                                      double tolerance) {
  if (!(sigma > 0.0)) throw InvalidArgument("temperedness_check: sigma must be positive");
  if (!(horizon > 0.0)) throw InvalidArgument("temperedness_check: horizon must be positive");
  constexpr int kPerDecade = 20;
  constexpr int kDecades = 3;
  TemperednessReport rep;
  for (int i = 0; i <= kPerDecade * kDecades; ++i) {
    const double t = horizon * std::pow(10.0, static_cast<double>(i - kPerDecade * kDecades) / kPerDecade);
    rep.times.push_back(t);
    rep.weighted.push_back(std::exp(-sigma * t) * values(t));
  }
  // Least-squares slope of log(weighted) against t over the last decade.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    if (rep.times[i] < horizon / 10.0 * (1.0 - 1e-12)) continue;
    rep.last_decade_max = std::max(rep.last_decade_max, std::abs(rep.weighted[i]));
    const double ly = std::log(std::abs(rep.weighted[i]) + 1e-300);
    sx += rep.times[i];
    sy += ly;
    sxx += rep.times[i] * rep.times[i];
    sxy += rep.times[i] * ly;
    ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  rep.decreasing_trend = slope < 0.0;
  rep.pass = std::isfinite(rep.last_decade_max) && rep.last_decade_max < tolerance;
  return rep;
}

DeltaCondReport deltacond_threshold(const NoiseFiber& fiber, double beta, double delta, double window) {
  const long n = aligned_steps(window, fiber.dt(), "deltacond window");
  fiber.require(-n, 0);
  DeltaCondReport rep;
  rep.window = window;
  double integral = 0.0;
  long last_fail = 0;
  for (long k = 1; k <= n; ++k) {
    integral += 0.5 * fiber.dt() * (std::abs(fiber.y(-k)) + std::abs(fiber.y(-k + 1)));
    const double t = static_cast<double>(k) * fiber.dt();
    if (!(beta * integral < delta * t / 8.0)) last_fail = k;
  }
  rep.found = last_fail < n;
  rep.T0 = static_cast<double>(last_fail + 1) * fiber.dt();
  return rep;
}

SystemConstants make_constants(double nu, double gamma1, double gamma2, double lambda, double beta0,
                               double h_h1norm, double alpha) {
  if (!(nu > 0.0) || !(lambda > 0.0)) throw InvalidArgument("make_constants: nu and lambda must be positive");
  if (gamma1 < 0.0 || gamma2 < 0.0 || beta0 < 0.0 || h_h1norm < 0.0)
    throw InvalidArgument("make_constants: gamma, beta0 and ||h|| must be non-negative");
  SystemConstants c;
  c.nu = nu;
  c.gamma1 = gamma1;
  c.gamma2 = gamma2;
  c.lambda = lambda;
  c.beta0 = beta0;
  c.h_h1norm = h_h1norm;
  c.alpha = alpha;
  c.delta = std::min(nu, 0.25 * nu * lambda);
  c.beta = 4.0 * beta0 * gamma2 * h_h1norm;
  c.alpha_ok = alpha * c.delta * c.delta > 128.0 * c.beta * c.beta;
  return c;
}

}  // namespace bbm
