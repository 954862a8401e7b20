#include <algorithm>
#include <cmath>
#include <sstream>

#include "bbm/attractor.hpp"
#include "bbm/error.hpp"

namespace bbm {

double tail_mass(const SpectralField& v, double k) {
  if (!std::isfinite(k) || k < 0.0) throw InvalidArgument("tail_mass: radius must be finite and >= 0");
  const BasisPtr& basis = v.basis();
  if (k >= basis->domain().L) return 0.0;
  const Grid& g = basis->grid(2);
  const std::size_t n = g.size();
  std::vector<double> u(n), dx(n), dy(n), dz(n);
  g.synthesize_with_gradient(v.coeffs(), u, dx, dy, dz);
  const auto d = g.dims();
  const auto& w0 = g.axis(0).weights;
  const auto& w1 = g.axis(1).weights;
  const auto& w2 = g.axis(2).weights;
  double s = 0.0;
  for (int kk = 0; kk < d[2]; ++kk) {
    if (std::abs(g.coordinate(2, kk)) < k) continue;
    for (int i = 0; i < d[0]; ++i)
      for (int j = 0; j < d[1]; ++j) {
        const std::size_t f = g.flat(i, j, kk);
        s += w0[i] * w1[j] * w2[kk] * (u[f] * u[f] + dx[f] * dx[f] + dy[f] * dy[f] + dz[f] * dz[f]);
      }
  }
  return s;
}

namespace {

// Number of grid cells between the channel end and the sub-box wall.
long wall_offset(const SineBasis& basis, double k) {
  check_cutoff_radius(basis.domain(), k);
  const double h = basis.grid(2).axis(2).spacing;
  const double cells = (basis.domain().L - 2.0 * k) / h;
  const long i0 = std::lround(cells);
  if (std::abs(cells - static_cast<double>(i0)) > 1e-9 * std::max(1.0, cells)) {
    std::ostringstream os;
    os.precision(12);
    os << "sub-box radius k=" << k << " is not grid aligned; nearest aligned radius is "
       << snap_subbox_radius(basis, k);
    throw InvalidArgument(os.str());
  }
  return i0;
}

}  // namespace

double snap_subbox_radius(const SineBasis& basis, double k) {
  const double L = basis.domain().L;
  const double h = basis.grid(2).axis(2).spacing;
  long i0 = std::max(1L, std::lround((L - 2.0 * k) / h));
  return 0.5 * (L - static_cast<double>(i0) * h);
}

std::size_t subbox_budget(const SineBasis& basis, double k) {
  const long i0 = wall_offset(basis, k);
  const Grid& g = basis.grid(2);
  const long cells = g.axis(2).interior + 1 - 2 * i0;
  return static_cast<std::size_t>(g.axis(0).interior) * g.axis(1).interior * static_cast<std::size_t>(cells - 1);
}

SpectralTail spectral_tail_series(const SpectralField& v, double k, const std::vector<std::size_t>& ns) {
  const SineBasis& basis = *v.basis();
  const long i0 = wall_offset(basis, k);
  const Grid& g = basis.grid(2);
  const int n1 = g.axis(0).interior, n2 = g.axis(1).interior;
  const long cells = g.axis(2).interior + 1 - 2 * i0;
  if (cells < 2) throw InvalidArgument("spectral_tail: sub-box has no interior grid nodes");

  const SineBasis sub(BoxDomain{basis.domain().a, basis.domain().b, 2.0 * k},
                      ModeCounts{n1, n2, static_cast<int>(cells - 1)});
  const std::size_t budget = sub.size();
  for (std::size_t n : ns)
    if (n > budget) {
      std::ostringstream os;
      os << "spectral_tail: n=" << n << " exceeds the sub-box budget " << budget;
      throw InvalidArgument(os.str());
    }

  const std::size_t total = g.size();
  std::vector<double> u(total), dx(total), dy(total), dz(total);
  g.synthesize_with_gradient(v.coeffs(), u, dx, dy, dz);

  const Grid& sg = sub.grid(1);
  const auto sd = sg.dims();
  std::vector<double> vals(sg.size());
  for (int i = 0; i < sd[0]; ++i)
    for (int j = 0; j < sd[1]; ++j)
      for (int kk = 0; kk < sd[2]; ++kk) {
        const int src = static_cast<int>(i0) + kk;
        vals[sg.flat(i, j, kk)] = cutoff_weight(g.coordinate(2, src), k, CutoffKind::Psi) * u[g.flat(i, j, src)];
      }
  std::vector<double> c(budget);
  sg.analyze(vals, c, {AxisKind::Sine, AxisKind::Sine, AxisKind::Sine});

  // Suffix sums over sorted order give ||(I - P_n) psi v||^2 for every n.
  const auto order = sub.sorted_index();
  std::vector<double> suffix(budget + 1, 0.0);
  for (std::size_t r = budget; r-- > 0;) {
    const std::size_t j = order[r];
    suffix[r] = suffix[r + 1] + (1.0 + sub.eigenvalue(j)) * c[j] * c[j];
  }
  SpectralTail out;
  out.k = k;
  out.budget = budget;
  out.tilde_h1 = std::sqrt(suffix[0]);
  for (std::size_t n : ns) out.values.push_back(std::sqrt(suffix[n]));
  return out;
}

double spectral_tail(const SpectralField& v, double k, std::size_t n) {
  return spectral_tail_series(v, k, {n}).values[0];
}

double hausdorff_semidist(const StateSet& Y, const StateSet& Z) {
  if (Y.empty() || Z.empty()) throw InvalidArgument("hausdorff_semidist: empty set");
  double d = 0.0;
  for (const auto& y : Y) {
    double best = INFINITY;
    for (const auto& z : Z) best = std::min(best, h1_distance(y, z));
    d = std::max(d, best);
  }
  return d;
}

double hausdorff_sym(const StateSet& Y, const StateSet& Z) {
  return std::max(hausdorff_semidist(Y, Z), hausdorff_semidist(Z, Y));
}

}  // namespace bbm
