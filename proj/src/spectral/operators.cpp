#include <algorithm>
#include <cmath>
#include <sstream>

#include "bbm/error.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

SpectralField::SpectralField(BasisPtr basis) : basis_(std::move(basis)) {
  if (!basis_) throw ContractViolation("SpectralField: null basis");
  coeffs_.assign(basis_->size(), 0.0);
}

SpectralField::SpectralField(BasisPtr basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw ContractViolation("SpectralField: null basis");
  if (coeffs_.size() != basis_->size()) throw ContractViolation("SpectralField: coefficient count mismatch");
}

SpectralField SpectralField::unit_mode(BasisPtr basis, int m, int n, int p) {
  SpectralField f(basis);
  f[basis->linear_index(m, n, p)] = 1.0;
  return f;
}

void require_same_basis(const SpectralField& a, const SpectralField& b, const char* where) {
  if (!a.compatible(b)) throw ContractViolation(std::string(where) + ": fields live on different bases");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_basis(*this, o, "operator+=");
  for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] += o.coeffs_[j];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_basis(*this, o, "operator-=");
  for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] -= o.coeffs_[j];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
  require_same_basis(*this, o, "axpy");
  for (std::size_t j = 0; j < coeffs_.size(); ++j) coeffs_[j] += s * o.coeffs_[j];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

GridField to_grid(const SpectralField& f, int refine) {
  const Grid& g = f.basis()->grid(refine);
  GridField out{f.basis(), refine, std::vector<double>(g.size())};
  g.synthesize(f.coeffs(), out.values, {AxisKind::Sine, AxisKind::Sine, AxisKind::Sine});
  return out;
}

SpectralField from_grid(const GridField& gf) {
  if (!gf.basis) throw ContractViolation("from_grid: grid field without basis");
  const Grid& g = gf.grid();
  if (gf.values.size() != g.size()) throw ContractViolation("from_grid: value count does not match grid");
  SpectralField f(gf.basis);
  g.analyze(gf.values, f.coeffs(), {AxisKind::Sine, AxisKind::Sine, AxisKind::Sine});
  return f;
}

std::array<GridField, 3> gradient(const SpectralField& f, int refine) {
  const Grid& g = f.basis()->grid(refine);
  std::array<GridField, 3> out;
  for (auto& c : out) c = GridField{f.basis(), refine, std::vector<double>(g.size())};
  std::vector<double> u(g.size());
  g.synthesize_with_gradient(f.coeffs(), u, out[0].values, out[1].values, out[2].values);
  return out;
}

SpectralField div_from_grid(const std::array<GridField, 3>& F, Parity parity) {
  const BasisPtr& basis = F[0].basis;
  if (!basis) throw ContractViolation("div_from_grid: grid field without basis");
  for (const auto& c : F) {
    if (c.basis != basis || c.refine != F[0].refine)
      throw ContractViolation("div_from_grid: component bases or grids differ");
  }
  const Grid& g = basis->grid(F[0].refine);
  SpectralField out(basis);
  std::vector<double> part(basis->size());
  for (int i = 0; i < 3; ++i) {
    if (F[i].values.size() != g.size()) throw ContractViolation("div_from_grid: value count does not match grid");
    const bool even = parity == Parity::Even;
    const AxisKind other = even ? AxisKind::SineOfEven : AxisKind::Sine;
    std::array<AxisKind, 3> kinds{other, other, other};
    kinds[i] = even ? AxisKind::Derivative : AxisKind::DerivativeOfOdd;
    g.analyze(F[i].values, part, kinds);
    for (std::size_t j = 0; j < part.size(); ++j) out[j] -= part[j];
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  SpectralField out = f;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= -f.basis()->eigenvalue(j);
  return out;
}

SpectralField helmholtz_inv(const SpectralField& f) {
  SpectralField out = f;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] /= (1.0 + f.basis()->eigenvalue(j));
  return out;
}

SpectralField helmholtz(const SpectralField& f) {
  SpectralField out = f;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= (1.0 + f.basis()->eigenvalue(j));
  return out;
}

SpectralField project_low(const SpectralField& f, std::size_t n) {
  if (n > f.size()) {
    std::ostringstream os;
    os << "project_low: n=" << n << " exceeds mode count " << f.size();
    throw InvalidArgument(os.str());
  }
  SpectralField out(f.basis());
  const auto order = f.basis()->sorted_index();
  for (std::size_t r = 0; r < n; ++r) out[order[r]] = f[order[r]];
  return out;
}

double l2_norm(const SpectralField& f) { return std::sqrt(inner_l2(f, f)); }

double h1_norm(const SpectralField& f) { return std::sqrt(inner_h1(f, f)); }

double h2_norm(const SpectralField& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = 1.0 + f.basis()->eigenvalue(j);
    s += w * w * f[j] * f[j];
  }
  return std::sqrt(s);
}

double grad_sq(const SpectralField& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.basis()->eigenvalue(j) * f[j] * f[j];
  return s;
}

double inner_l2(const SpectralField& f, const SpectralField& g) {
  require_same_basis(f, g, "inner_l2");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * g[j];
  return s;
}

double inner_h1(const SpectralField& f, const SpectralField& g) {
  require_same_basis(f, g, "inner_h1");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += (1.0 + f.basis()->eigenvalue(j)) * f[j] * g[j];
  return s;
}

double h1_distance(const SpectralField& f, const SpectralField& g) {
  require_same_basis(f, g, "h1_distance");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double d = f[j] - g[j];
    s += (1.0 + f.basis()->eigenvalue(j)) * d * d;
  }
  return std::sqrt(s);
}

double quadrature_l2(const GridField& gf) {
  const Grid& g = gf.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < gf.values.size(); ++i) s += g.weight(i) * gf.values[i] * gf.values[i];
  return std::sqrt(s);
}

double grid_sup(const GridField& gf) {
  double s = 0.0;
  for (double v : gf.values) s = std::max(s, std::abs(v));
  return s;
}

SpectralField random_smooth_field(const BasisPtr& basis, std::mt19937_64& rng, double decay) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(basis);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = normal(rng) * std::pow(1.0 + basis->eigenvalue(j), -decay);
  return f;
}

double embedding_ratio(const SpectralField& f) {
  const double h2 = h2_norm(f);
  if (h2 == 0.0) return 0.0;
  return grid_sup(to_grid(f, 2)) / h2;
}

double estimate_beta0(const BasisPtr& basis, int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("estimate_beta0: samples must be >= 1");
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) best = std::max(best, embedding_ratio(random_smooth_field(basis, rng, 2.0)));
  return best;
}

}  // namespace bbm
