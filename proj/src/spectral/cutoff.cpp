#include <cmath>
#include <sstream>

#include "bbm/error.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

namespace {
double smoothstep5(double u) { return u * u * u * (u * (6.0 * u - 15.0) + 10.0); }
}  // namespace

double cutoff_phi(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) return 0.0;
  if (a >= 2.0) return 1.0;
  return smoothstep5(a - 1.0);
}

double cutoff_phi_prime(double s) {
  const double a = std::abs(s);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double u = a - 1.0;
  const double d = 30.0 * u * u * (u - 1.0) * (u - 1.0);
  return s < 0 ? -d : d;
}

double cutoff_psi(double s) { return 1.0 - cutoff_phi(s); }

double cutoff_weight(double x3, double k, CutoffKind which) {
  const double s = (x3 * x3) / (k * k);
  if (which == CutoffKind::PhiSquared) {
    const double p = cutoff_phi(s);
    return p * p;
  }
  return cutoff_psi(s);
}

void check_cutoff_radius(const BoxDomain& domain, double k) {
  if (!(k >= 1.0) || !(2.0 * k < domain.L)) {
    std::ostringstream os;
    os << "cutoff radius k=" << k << " must satisfy 1 <= k and 2k < L=" << domain.L;
    throw InvalidArgument(os.str());
  }
}

SpectralField cutoff_multiply(const SpectralField& f, double k, CutoffKind which) {
  check_cutoff_radius(f.basis()->domain(), k);
  GridField g = to_grid(f, 2);
  const Grid& grid = g.grid();
  const auto d = grid.dims();
  std::vector<double> w(d[2]);
  for (int kk = 0; kk < d[2]; ++kk) w[kk] = cutoff_weight(grid.coordinate(2, kk), k, which);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] *= w[i % d[2]];
  return from_grid(g);
}

}  // namespace bbm
