#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "bbm/attractor.hpp"
#include "bbm/error.hpp"

namespace bbm {

namespace {

Eigen::VectorXd residual_vec(const Model& model, const SpectralField& v) {
  const SpectralField R = rhs(model, v, 0.0);
  const auto lam = model.basis()->eigenvalues();
  Eigen::VectorXd r(R.size());
  for (std::size_t j = 0; j < R.size(); ++j) r[j] = R[j] - model.nu() * lam[j] * v[j];
  return r;
}

}  // namespace

double steady_residual(const Model& model, const SpectralField& v) {
  return residual_vec(model, v).cwiseAbs().maxCoeff();
}

SteadyState solve_steady_state(const Model& model, const SpectralField& guess, double tol, int max_iter) {
  const std::size_t n = guess.size();
  SteadyState out{guess, 0.0, 0, false};
  // Central differences are exact for the quadratic flux up to rounding.
  const double eps = 1e-3;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd r = residual_vec(model, out.v);
    out.residual = r.cwiseAbs().maxCoeff();
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    Eigen::MatrixXd J(n, n);
    SpectralField probe = out.v;
    for (std::size_t j = 0; j < n; ++j) {
      const double keep = probe[j];
      probe[j] = keep + eps;
      const Eigen::VectorXd rp = residual_vec(model, probe);
      probe[j] = keep - eps;
      const Eigen::VectorXd rm = residual_vec(model, probe);
      probe[j] = keep;
      J.col(static_cast<long>(j)) = (rp - rm) / (2.0 * eps);
    }
    const Eigen::VectorXd delta = J.partialPivLu().solve(-r);
    for (std::size_t j = 0; j < n; ++j) out.v[j] += delta[static_cast<long>(j)];
    out.iterations = it + 1;
  }
  out.residual = steady_residual(model, out.v);
  out.converged = out.residual <= tol;
  return out;
}

}  // namespace bbm
