#include <cmath>

#include "bbm/attractor.hpp"
#include "bbm/error.hpp"

namespace bbm {

AbsorbingEstimate absorbing_estimate(const NoiseFiber& fiber, const SystemConstants& c, const SpectralField& hz,
                                     double quad_window, double c_quad) {
  if (!(quad_window > 0.0)) throw InvalidArgument("absorbing_estimate: window must be positive");
  if (!(c_quad > 0.0)) throw InvalidArgument("absorbing_estimate: c_quad must be positive");
  const double dt = fiber.dt();
  const long n = aligned_steps(quad_window, dt, "absorbing window");
  fiber.require(-n, 0);

  // Running inner integral beta * int_{s}^0 |y| from s = 0 backwards.
  double inner = 0.0;
  double prev_abs = std::abs(fiber.y(0));
  auto integrand = [&](double s, double y, double in) {
    const double a = std::abs(y);
    return (1.0 + a * a + a * a * a) * std::exp(c.delta * s + in);
  };
  double sum = 0.5 * integrand(0.0, fiber.y(0), 0.0);
  for (long i = 1; i <= n; ++i) {
    const double y = fiber.y(-i);
    const double a = std::abs(y);
    inner += c.beta * 0.5 * dt * (a + prev_abs);
    prev_abs = a;
    const double f = integrand(-static_cast<double>(i) * dt, y, inner);
    sum += (i == n ? 0.5 : 1.0) * f;
  }
  AbsorbingEstimate est;
  est.window = quad_window;
  est.c_quad = c_quad;
  est.alpha_ok = c.alpha_ok;
  est.r0 = c_quad * sum * dt;
  est.r1 = std::sqrt(2.0 * est.r0);
  est.z_norm = std::abs(fiber.y(0)) * h1_norm(hz);
  est.rho = est.r1 + est.z_norm;
  return est;
}

double report_time(const std::vector<double>& times, const std::vector<double>& values, double bound) {
  if (times.size() != values.size()) throw InvalidArgument("report_time: series lengths differ");
  if (values.empty() || values.back() > bound) return -1.0;
  std::size_t i = values.size();
  while (i > 0 && values[i - 1] <= bound) --i;
  return times[i];
}

RadiusRule absorbing_radius(const Model& model, const NoiseFiber& fiber, double quad_window, double c_quad) {
  const SystemConstants c = model.physics().constants;
  const SpectralField hz = model.forcing().hz;
  return [=](double T) { return absorbing_estimate(fiber.shifted(-T), c, hz, quad_window, c_quad).rho; };
}

}  // namespace bbm
