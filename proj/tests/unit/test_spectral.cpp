#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bbm/error.hpp"
#include "bbm/spectral.hpp"
#include "oracle.hpp"

using namespace bbm;
using std::numbers::pi;

namespace {
BasisPtr small_basis() { return build_basis({pi, pi, pi}, {3, 3, 4}); }
}  // namespace

TEST_CASE("eigenvalues of the box") {
  auto B = build_basis({pi, pi, pi}, {3, 3, 4});
  CHECK(B->eigenvalue(B->linear_index(1, 1, 1)) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(B->eigenvalue(B->linear_index(2, 1, 1)) == doctest::Approx(5.25).epsilon(1e-14));
  auto U = build_basis({1, 1, 1}, {2, 2, 2});
  CHECK(U->poincare() == doctest::Approx(pi * pi * 2.25).epsilon(1e-14));
  CHECK(U->poincare() == doctest::Approx(22.2066).epsilon(1e-5));

  CHECK_THROWS_AS(build_basis({0, 1, 1}, {2, 2, 2}), ConfigError);
  CHECK_THROWS_AS(build_basis({1, 1, -1}, {2, 2, 2}), ConfigError);
  CHECK_THROWS_AS(build_basis({1, 1, 1}, {2, 0, 2}), ConfigError);
}

TEST_CASE("sorted order is a nondecreasing bijection with lexicographic ties") {
  auto B = small_basis();
  auto order = B->sorted_index();
  REQUIRE(order.size() == 36);
  std::vector<int> seen(order.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    seen[order[r]]++;
    CHECK(B->rank(order[r]) == r);
    if (r) CHECK(B->eigenvalue(order[r - 1]) <= B->eigenvalue(order[r]));
  }
  for (int s : seen) CHECK(s == 1);
  // (1,2,1) and (2,1,1) share an eigenvalue; lexicographic order decides.
  CHECK(B->rank(B->linear_index(1, 2, 1)) < B->rank(B->linear_index(2, 1, 1)));
  CHECK(B->poincare() > 0);
}

TEST_CASE("transforms") {
  auto B = small_basis();
  SUBCASE("zero") {
    auto g = to_grid(SpectralField(B), 1);
    for (double v : g.values) CHECK(v == 0.0);
  }
  SUBCASE("unit mode samples the product sine") {
    auto e = SpectralField::unit_mode(B, 1, 1, 1);
    for (int refine : {1, 2}) {
      auto g = to_grid(e, refine);
      const Grid& G = g.grid();
      const auto d = G.dims();
      double err = 0;
      for (int i = 0; i < d[0]; ++i)
        for (int j = 0; j < d[1]; ++j)
          for (int k = 0; k < d[2]; ++k) {
            const double x[3] = {G.coordinate(0, i), G.coordinate(1, j), G.coordinate(2, k)};
            err = std::max(err, std::abs(g.values[G.flat(i, j, k)] - oracle::eval(e, x)));
          }
      CHECK(err < 1e-13);
      auto back = from_grid(g);
      for (std::size_t j = 0; j < back.size(); ++j) CHECK(back[j] == doctest::Approx(e[j]).epsilon(1e-12).scale(1));
    }
  }
  SUBCASE("Parseval and round trips") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto f = oracle::random_field(B, seed, 0.0);
      for (int refine : {1, 2}) {
        auto g = to_grid(f, refine);
        CHECK(std::abs(quadrature_l2(g) - l2_norm(f)) <= 1e-12 * l2_norm(f));
        auto back = from_grid(g);
        CHECK(l2_norm(back - f) <= 1e-12 * l2_norm(f));
      }
      // refine 1: the grid has as many interior nodes as modes, so the grid
      // round trip is the identity too.
      GridField g = to_grid(f, 1);
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> n01;
      const Grid& G = g.grid();
      const auto d = G.dims();
      for (int i = 1; i < d[0] - 1; ++i)
        for (int j = 1; j < d[1] - 1; ++j)
          for (int k = 1; k < d[2] - 1; ++k) g.values[G.flat(i, j, k)] = n01(rng);
      auto g2 = to_grid(from_grid(g), 1);
      double err = 0, scale = 0;
      for (std::size_t i = 0; i < g.values.size(); ++i) {
        err = std::max(err, std::abs(g.values[i] - g2.values[i]));
        scale = std::max(scale, std::abs(g.values[i]));
      }
      CHECK(err <= 1e-12 * scale);
    }
  }
  SUBCASE("basis mismatch") {
    auto other = small_basis();
    CHECK_THROWS_AS(SpectralField(B) + SpectralField(other), ContractViolation);
    CHECK_THROWS_AS(h1_distance(SpectralField(B), SpectralField(other)), ContractViolation);
  }
}

TEST_CASE("Helmholtz operators") {
  auto B = small_basis();
  auto e = SpectralField::unit_mode(B, 1, 1, 1);
  CHECK(helmholtz_inv(e)[B->linear_index(1, 1, 1)] == doctest::Approx(1.0 / 3.25).epsilon(1e-15));
  CHECK(laplacian(e)[B->linear_index(1, 1, 1)] == doctest::Approx(-2.25).epsilon(1e-15));
  auto f = oracle::random_field(B, 9);
  CHECK(l2_norm(helmholtz(helmholtz_inv(f)) - f) <= 1e-15 * l2_norm(f));
  CHECK(l2_norm(helmholtz_inv(SpectralField(B))) == 0.0);
  CHECK(l2_norm(helmholtz(SpectralField(B))) == 0.0);
}

TEST_CASE("gradient matches analytic derivatives") {
  auto B = small_basis();
  auto e = SpectralField::unit_mode(B, 2, 1, 3);
  auto grad = gradient(e, 2);
  const Grid& G = grad[0].grid();
  const auto d = G.dims();
  double err = 0;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int k = 0; k < d[2]; ++k) {
        const double x[3] = {G.coordinate(0, i), G.coordinate(1, j), G.coordinate(2, k)};
        for (int a = 0; a < 3; ++a)
          err = std::max(err, std::abs(grad[a].values[G.flat(i, j, k)] - oracle::eval(e, x, a)));
      }
  CHECK(err < 1e-10);
}

TEST_CASE("weak divergence is the quadrature adjoint of the gradient") {
  auto B = small_basis();
  auto u = oracle::random_field(B, 21, 1.5);
  auto v = oracle::random_field(B, 22, 1.5);
  // F_i = c_i u^2 sampled on the dealiasing grid.
  const double c[3] = {1.0, -0.5, 0.75};
  auto ug = to_grid(u, 2);
  std::array<GridField, 3> F{ug, ug, ug};
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < ug.values.size(); ++i) F[a].values[i] = c[a] * ug.values[i] * ug.values[i];
  const double lhs = inner_l2(div_from_grid(F), v);
  const double rhs = -oracle::integrate(B->domain(), 40, [&](const double* x) {
    const double uu = oracle::eval(u, x);
    double s = 0;
    for (int a = 0; a < 3; ++a) s += c[a] * uu * uu * oracle::eval(v, x, a);
    return s;
  });
  CHECK(std::abs(lhs - rhs) <= 1e-8 * (1 + std::abs(rhs)));

  // Odd flux F_i = c_i u.
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < ug.values.size(); ++i) F[a].values[i] = c[a] * ug.values[i];
  const double lin = inner_l2(div_from_grid(F, Parity::Odd), v);
  const double lin_ref = -oracle::integrate(B->domain(), 40, [&](const double* x) {
    const double uu = oracle::eval(u, x);
    double s = 0;
    for (int a = 0; a < 3; ++a) s += c[a] * uu * oracle::eval(v, x, a);
    return s;
  });
  CHECK(std::abs(lin - lin_ref) <= 1e-10 * (1 + std::abs(lin_ref)));

  std::array<GridField, 3> Z{ug, ug, ug};
  for (auto& z : Z) std::fill(z.values.begin(), z.values.end(), 0.0);
  CHECK(l2_norm(div_from_grid(Z)) == 0.0);
}

TEST_CASE("low-mode projection") {
  auto B = small_basis();
  auto f = oracle::random_field(B, 4);
  auto g = oracle::random_field(B, 5);
  CHECK(l2_norm(project_low(f, 0)) == 0.0);
  CHECK(l2_norm(project_low(f, f.size()) - f) == 0.0);
  CHECK_THROWS_AS(project_low(f, f.size() + 1), InvalidArgument);
  for (std::size_t n : {1u, 7u, 20u}) {
    auto p = project_low(f, n);
    CHECK(l2_norm(project_low(p, n) - p) == 0.0);
    CHECK(std::abs(inner_l2(p, g) - inner_l2(f, project_low(g, n))) <= 1e-15);
    CHECK(h1_norm(p) <= h1_norm(f));
    double direct = 0;
    auto order = B->sorted_index();
    for (std::size_t r = n; r < f.size(); ++r) direct += (1 + B->eigenvalue(order[r])) * f[order[r]] * f[order[r]];
    const double rest = h1_norm(f - p);
    CHECK(rest * rest == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("cutoff profile") {
  CHECK(cutoff_phi(0.5) == 0.0);
  CHECK(cutoff_phi(3.0) == 1.0);
  CHECK(cutoff_phi(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 0, max_slope = 0;
  const double h = 1e-5;
  for (int i = -3000; i <= 3000; ++i) {
    const double s = i * 1e-3;
    CHECK(cutoff_phi(s) + cutoff_psi(s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cutoff_phi(s) >= 0.0);
    CHECK(cutoff_phi(s) <= 1.0);
    if (s >= 1.0 && s <= 2.0) {
      CHECK(cutoff_phi(s) >= prev);
      prev = cutoff_phi(s);
    }
    max_slope = std::max(max_slope, std::abs(cutoff_phi(s + h) - cutoff_phi(s - h)) / (2 * h));
    CHECK(std::abs(cutoff_phi_prime(s) - (cutoff_phi(s + h) - cutoff_phi(s - h)) / (2 * h)) < 1e-6);
  }
  CHECK(max_slope <= 1.875 + 1e-6);

  auto B = build_basis({pi, pi, 8.0}, {2, 2, 8});
  auto f = oracle::random_field(B, 1);
  CHECK_THROWS_AS(cutoff_multiply(f, 0.5, CutoffKind::Psi), InvalidArgument);
  CHECK_THROWS_AS(cutoff_multiply(f, 4.0, CutoffKind::Psi), InvalidArgument);
  CHECK_NOTHROW(cutoff_multiply(f, 3.0, CutoffKind::PhiSquared));
}

TEST_CASE("norms") {
  auto B = small_basis();
  CHECK(h1_norm(SpectralField::unit_mode(B, 1, 1, 1)) == doctest::Approx(std::sqrt(3.25)).epsilon(1e-15));
  CHECK(h1_norm(SpectralField(B)) == 0.0);
  auto f = oracle::random_field(B, 12);
  auto g = to_grid(f, 2);
  auto grad = gradient(f, 2);
  const Grid& G = g.grid();
  double q = 0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    double s = g.values[i] * g.values[i];
    for (auto& c : grad) s += c.values[i] * c.values[i];
    q += G.weight(i) * s;
  }
  CHECK(std::abs(std::sqrt(q) - h1_norm(f)) <= 1e-8 * h1_norm(f));
  CHECK(grad_sq(f) == doctest::Approx(h1_norm(f) * h1_norm(f) - l2_norm(f) * l2_norm(f)).epsilon(1e-12));
}

TEST_CASE("embedding constant estimate") {
  auto B = small_basis();
  auto e = SpectralField::unit_mode(B, 1, 1, 1);
  // Largest sample of the product sine over the refined grid nodes.
  const Grid& G = B->grid(2);
  double sup = 1;
  for (int a = 0; a < 3; ++a) {
    const auto& ax = G.axis(a);
    double m = 0;
    for (int k = 0; k <= ax.interior + 1; ++k)
      m = std::max(m, std::abs(oracle::mode1d(1, ax.offset + k * ax.spacing, ax.length, ax.offset)));
    sup *= m;
  }
  CHECK(embedding_ratio(e) == doctest::Approx(sup / 3.25).epsilon(1e-13));

  CHECK(estimate_beta0(B, 1, 42) == estimate_beta0(B, 1, 42));
  double prev = 0;
  for (int s : {1, 2, 4, 8, 16, 32}) {
    const double b = estimate_beta0(B, s, 42);
    CHECK(b >= prev);
    prev = b;
  }
  CHECK_THROWS_AS(estimate_beta0(B, 0, 1), InvalidArgument);
}
