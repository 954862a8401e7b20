#include <cmath>
#include <sstream>

#include "bbm/dynamics.hpp"
#include "bbm/error.hpp"

namespace bbm {

PhysicsParams PhysicsParams::classical(const SystemConstants& c) {
  PhysicsParams p;
  p.constants = c;
  p.kind = FluxKind::Classical;
  p.flux = FluxCoefficients{};
  p.validate();
  return p;
}

PhysicsParams PhysicsParams::custom(const SystemConstants& c, const FluxCoefficients& f) {
  PhysicsParams p;
  p.constants = c;
  p.kind = FluxKind::CustomPolynomial;
  p.flux = f;
  p.validate();
  return p;
}

void PhysicsParams::validate() const {
  if (!(constants.nu > 0.0)) throw ConfigError("physics.nu must be positive");
  if (constants.gamma1 < 0.0 || constants.gamma2 < 0.0) throw ConfigError("physics.gamma1/gamma2 must be >= 0");
  // Polynomial flux has F(0) = 0 by construction; check the derivative bound.
  const double g1 = constants.gamma1, g2 = constants.gamma2;
  for (int k = 0; k < 3; ++k) {
    for (int i = -400; i <= 400; ++i) {
      const double s = 0.25 * i;
      const double bound = g1 + g2 * std::abs(s);
      if (std::abs(dF(k, s)) > bound * (1.0 + 1e-12) + 1e-14) {
        std::ostringstream os;
        os << "flux component " << k + 1 << " violates |F'(s)| <= gamma1 + gamma2|s| at s=" << s
           << " (gamma1=" << g1 << ", gamma2=" << g2 << ")";
        throw ConfigError(os.str());
      }
    }
  }
}

bool PhysicsParams::has_linear() const {
  return flux.c1[0] != 0.0 || flux.c1[1] != 0.0 || flux.c1[2] != 0.0;
}

bool PhysicsParams::has_quadratic() const {
  return flux.c2[0] != 0.0 || flux.c2[1] != 0.0 || flux.c2[2] != 0.0;
}

Forcing Forcing::make(SpectralField g, SpectralField h) {
  require_same_basis(g, h, "Forcing::make");
  Forcing f;
  f.hz = helmholtz_inv(h);
  f.g = std::move(g);
  f.h = std::move(h);
  return f;
}

Forcing Forcing::zero(const BasisPtr& basis) { return make(SpectralField(basis), SpectralField(basis)); }

RowMatrix galerkin_derivative_matrix(int modes, double length) {
  RowMatrix D = RowMatrix::Zero(modes, modes);
  for (int q = 1; q <= modes; ++q)
    for (int m = 1; m <= modes; ++m)
      if ((q + m) % 2 == 1) D(q - 1, m - 1) = 4.0 * m * q / (length * (q * q - m * m));
  return D;
}

Model::Model(BasisPtr basis, PhysicsParams physics, Forcing forcing, Scheme scheme, int refine)
    : basis_(std::move(basis)), physics_(physics), forcing_(std::move(forcing)), scheme_(scheme), refine_(refine) {
  if (!basis_) throw ContractViolation("Model: null basis");
  require_same_basis(forcing_.g, forcing_.h, "Model");
  if (forcing_.g.basis() != basis_) throw ContractViolation("Model: forcing lives on a different basis");
  if (refine_ != 1 && refine_ != 2) throw InvalidArgument("Model: dealiasing factor must be 1 or 2");
  for (int d = 0; d < 3; ++d) derivative_[d] = galerkin_derivative_matrix(basis_->modes()[d], basis_->domain().length(d));
}

Model Model::with_scheme(Scheme s) const {
  Model m = *this;
  m.scheme_ = s;
  return m;
}

Model Model::with_forcing(Forcing f) const {
  Model m = *this;
  m.forcing_ = std::move(f);
  return m;
}

Model Model::with_physics(PhysicsParams p) const {
  Model m = *this;
  m.physics_ = p;
  return m;
}

namespace {

void check_grid(const GridField& u) {
  for (double x : u.values)
    if (!std::isfinite(x) || std::abs(x) > kOverflowGuard)
      throw DivergenceError("grid values overflow", std::nan(""));
}

std::array<GridField, 3> pointwise(const GridField& u, const std::function<double(int, double)>& fn) {
  check_grid(u);
  std::array<GridField, 3> out;
  for (int k = 0; k < 3; ++k) {
    out[k] = GridField{u.basis, u.refine, std::vector<double>(u.values.size())};
    for (std::size_t i = 0; i < u.values.size(); ++i) out[k].values[i] = fn(k, u.values[i]);
  }
  return out;
}

}  // namespace

std::array<GridField, 3> eval_F(const PhysicsParams& physics, const GridField& u) {
  return pointwise(u, [&](int k, double s) { return physics.F(k, s); });
}

std::array<GridField, 3> eval_G(const PhysicsParams& physics, const GridField& u) {
  return pointwise(u, [&](int k, double s) { return physics.G(k, s); });
}

}  // namespace bbm
