#include <cmath>

#include "bbm/dynamics.hpp"
#include "bbm/error.hpp"

namespace bbm {

namespace {

using Map = Eigen::Map<RowMatrix>;
using CMap = Eigen::Map<const RowMatrix>;

// out += s * (D applied along `axis` of the coefficient block).
void apply_axis(const RowMatrix& D, int axis, const ModeCounts& M, const double* in, double* out, double s) {
  const long m1 = M[0], m2 = M[1], m3 = M[2];
  if (axis == 0) {
    Map(out, m1, m2 * m3).noalias() += s * (D * CMap(in, m1, m2 * m3));
  } else if (axis == 1) {
    for (long i = 0; i < m1; ++i)
      Map(out + i * m2 * m3, m2, m3).noalias() += s * (D * CMap(in + i * m2 * m3, m2, m3));
  } else {
    Map(out, m1 * m2, m3).noalias() += s * (CMap(in, m1 * m2, m3) * D.transpose());
  }
}

}  // namespace

SpectralField nonlinear_div(const Model& model, const SpectralField& v, const SpectralField& z) {
  require_same_basis(v, z, "nonlinear_div");
  if (v.basis() != model.basis()) throw ContractViolation("nonlinear_div: field and model bases differ");
  const PhysicsParams& ph = model.physics();
  SpectralField u = v + z;
  SpectralField out(model.basis());
  for (double c : u.coeffs())
    if (!std::isfinite(c) || std::abs(c) > kOverflowGuard) throw DivergenceError("coefficients overflow", std::nan(""));

  if (ph.has_linear()) {
    for (int k = 0; k < 3; ++k)
      if (ph.flux.c1[k] != 0.0)
        apply_axis(model.derivative_matrix(k), k, model.basis()->modes(), u.coeffs().data(), out.coeffs().data(),
                   ph.flux.c1[k]);
  }
  if (ph.has_quadratic()) {
    const Grid& g = model.basis()->grid(model.refine());
    const std::size_t n = g.size();
    std::vector<double> val(n), dx(n), dy(n), dz(n);
    g.synthesize_with_gradient(u.coeffs(), val, dx, dy, dz);
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(val[i]) || std::abs(val[i]) > kOverflowGuard)
        throw DivergenceError("grid values overflow", std::nan(""));
    // u d_k u is sine-type along axis k and cosine-type along the others;
    // each term gets its own exact projection.
    std::vector<double>* d[3] = {&dx, &dy, &dz};
    std::vector<double> q(out.size());
    for (int k = 0; k < 3; ++k) {
      if (ph.flux.c2[k] == 0.0) continue;
      std::vector<double>& p = *d[k];
      for (std::size_t i = 0; i < n; ++i) p[i] *= val[i];
      std::array<AxisKind, 3> kinds{AxisKind::SineOfEven, AxisKind::SineOfEven, AxisKind::SineOfEven};
      kinds[k] = AxisKind::Sine;
      g.analyze(p, q, kinds);
      const double s = 2.0 * ph.flux.c2[k];
      for (std::size_t j = 0; j < q.size(); ++j) out[j] += s * q[j];
    }
  }
  return out;
}

SpectralField rhs(const Model& model, const SpectralField& v, double y) {
  const Forcing& f = model.forcing();
  const double nu = model.nu(), alpha = model.alpha();
  SpectralField R = nonlinear_div(model, v, f.z(y));
  const auto lam = model.basis()->eigenvalues();
  for (std::size_t j = 0; j < R.size(); ++j)
    R[j] = -R[j] + f.g[j] + y * f.hz[j] * (alpha - (nu - alpha) * lam[j]);
  return R;
}

}  // namespace bbm
