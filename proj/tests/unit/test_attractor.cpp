#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bbm/attractor.hpp"
#include "bbm/error.hpp"
#include "oracle.hpp"

using namespace bbm;
using std::numbers::pi;

namespace {

BasisPtr cube() {
  static BasisPtr b = build_basis({pi, pi, pi}, {3, 3, 4});
  return b;
}
BasisPtr channel() {
  static BasisPtr b = build_basis({pi, pi, 4 * pi}, {3, 3, 24});
  return b;
}

SystemConstants consts(const BasisPtr& B, double g2 = 1.0) {
  return make_constants(1.0, 1.0, g2, B->poincare(), 1.0, 0.1, 2.0);
}

Model linear_model(const BasisPtr& B) {
  FluxCoefficients f;
  f.c1 = {0, 0, 0};
  f.c2 = {0, 0, 0};
  return Model(B, PhysicsParams::custom(make_constants(1.0, 0, 0, B->poincare(), 1.0, 0, 2.0), f), Forcing::zero(B));
}

NoiseFiber fiber(std::uint64_t seed, double t0, double t1, double dt = 0.01) {
  auto p = std::make_shared<const WienerPath>(WienerPath::sample(seed, t0, t1, dt));
  return NoiseFiber(std::make_shared<const OUState>(ou_solve(ShiftedPath(p), 2.0)));
}

NoiseFiber quiet_fiber(double t0, double dt) {
  const long n = std::lround(-t0 / dt);
  auto p = std::make_shared<const WienerPath>(WienerPath::from_increments(0, t0, dt, std::vector<double>(n, 0.0)));
  OUOptions o;
  o.mode = OUInit::Explicit;
  return NoiseFiber(std::make_shared<const OUState>(ou_solve(ShiftedPath(p), 2.0, o)));
}

// Independent max-min over coefficient vectors.
double brute_semidist(const StateSet& Y, const StateSet& Z) {
  const auto& B = *Y[0].basis();
  double sup = 0;
  for (const auto& y : Y) {
    double inf = INFINITY;
    for (const auto& z : Z) {
      double s = 0;
      for (std::size_t j = 0; j < y.size(); ++j) s += (1 + B.eigenvalue(j)) * (y[j] - z[j]) * (y[j] - z[j]);
      inf = std::min(inf, std::sqrt(s));
    }
    sup = std::max(sup, inf);
  }
  return sup;
}

}  // namespace

TEST_CASE("pullback states") {
  auto B = cube();
  Model lin = linear_model(B);
  NoiseFiber f = fiber(1, -20, 1);
  StateSet fam{oracle::random_field(B, 1), oracle::random_field(B, 2)};
  auto same = pullback_state(lin, 0.0, f, fam);
  CHECK(l2_norm(same[0] - fam[0]) == 0.0);

  // Mode-wise closed form of the implicit step, iterated.
  const double T = 2.0, dt = f.dt();
  auto out = pullback_state(lin, T, f, fam);
  double err = 0;
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = 0; j < B->size(); ++j) {
      const double lam = B->eigenvalue(j);
      const double rho = (1 + lam) / ((1 + lam) + lam * dt);
      err = std::max(err, std::abs(out[i][j] - fam[i][j] * std::pow(rho, 200)));
    }
  CHECK(err < 1e-13);

  Model full(B, PhysicsParams::classical(consts(B)),
             Forcing::make(0.3 * oracle::random_field(B, 3), 0.3 * oracle::random_field(B, 4)));
  auto a = pullback_state(full, 1.0, f, fam);
  auto b = pullback_state(full, 2.0, f, fam);
  CHECK(h1_distance(a[0], b[0]) > 1e-6);
  CHECK_THROWS_AS(pullback_state(full, 40.0, f, fam), WindowError);

  // Schedule independence.
  auto p1 = pullback_u(full, 1.0, f, fam, Parallel{1});
  auto p3 = pullback_u(full, 1.0, f, fam, Parallel{3});
  for (std::size_t i = 0; i < fam.size(); ++i) CHECK(l2_norm(p1[i] - p3[i]) == 0.0);
}

TEST_CASE("absorbing estimate") {
  auto B = cube();
  auto c = make_constants(1.0, 1.0, 1.0, 2.25, 1.0, 0.5, 2.0);
  REQUIRE(c.delta == 0.5625);
  auto hz = helmholtz_inv(oracle::random_field(B, 5));

  auto q = quiet_fiber(-41, 1e-3);
  auto e = absorbing_estimate(q, c, hz, 40.0, 1.0);
  const double exact = (1 - std::exp(-0.5625 * 40)) / 0.5625;
  CHECK(e.r0 == doctest::Approx(exact).epsilon(1e-7));
  CHECK(e.r0 == doctest::Approx(1.7778).epsilon(1e-4));
  CHECK(e.z_norm == 0.0);
  CHECK(e.r1 * e.r1 == doctest::Approx(2 * e.r0).epsilon(1e-15));
  CHECK(e.rho >= e.r1);
  CHECK(absorbing_estimate(q, c, hz, 40.0, 2.5).r0 == doctest::Approx(2.5 * e.r0).epsilon(1e-14));

  // Window convergence needs the integrand to decay: alpha_ok constants.
  auto ok = make_constants(1.0, 1.0, 1.0, 2.25, 1.0, 0.01, 2.0);
  REQUIRE(ok.alpha_ok);
  auto f = fiber(6, -100, 1);
  auto w1 = absorbing_estimate(f, ok, hz, 40.0);
  auto w2 = absorbing_estimate(f, ok, hz, 80.0);
  CHECK(std::abs(w2.r0 - w1.r0) < 0.01 * w1.r0);
  CHECK(w1.z_norm == doctest::Approx(std::abs(f.y(0)) * h1_norm(hz)).epsilon(1e-14));
  CHECK(w1.rho == doctest::Approx(w1.r1 + w1.z_norm).epsilon(1e-15));
  CHECK_THROWS_AS(absorbing_estimate(f, c, hz, 200.0), WindowError);

  CHECK(report_time({1, 2, 3, 4}, {5, 3, 1, 0.5}, 2.0) == 3.0);
  CHECK(report_time({1, 2, 3, 4}, {1, 3, 1, 0.5}, 2.0) == 3.0);
  CHECK(report_time({1, 2, 3, 4}, {1, 1, 1, 0.5}, 2.0) == 1.0);
  CHECK(report_time({1, 2, 3, 4}, {1, 1, 1, 5.0}, 2.0) < 0.0);
}

TEST_CASE("tail mass") {
  auto B = channel();
  auto v = oracle::random_field(B, 7, 1.0);
  const double h = h1_norm(v);
  CHECK(tail_mass(v, 0.0) == doctest::Approx(h * h).epsilon(1e-8));
  CHECK(tail_mass(v, B->domain().L) == 0.0);
  CHECK(tail_mass(v, 100.0) == 0.0);
  CHECK_THROWS_AS(tail_mass(v, -1.0), InvalidArgument);
  double prev = INFINITY;
  for (int i = 0; i <= 40; ++i) {
    const double m = tail_mass(v, 0.1 * pi * i);
    CHECK(m >= 0.0);
    CHECK(m <= prev + 1e-10);
    prev = m;
  }

  // Bump exp(-x3^2/4) in the lowest cross-section mode.
  auto g = to_grid(SpectralField(B), 2);
  const Grid& G = g.grid();
  const auto d = G.dims();
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int k = 0; k < d[2]; ++k) {
        const double x3 = G.coordinate(2, k);
        g.values[G.flat(i, j, k)] =
            std::sin(G.coordinate(0, i)) * std::sin(G.coordinate(1, j)) * std::exp(-x3 * x3 / 4);
      }
  auto bump = from_grid(g);
  const double total = h1_norm(bump) * h1_norm(bump);
  CHECK(tail_mass(bump, B->domain().L / 2) < 1e-3 * total);
}

TEST_CASE("spectral tail") {
  auto B = build_basis({pi, pi, 4 * pi}, {6, 6, 48});
  SpectralField v(B);
  v[B->linear_index(1, 1, 1)] = 1;
  v[B->linear_index(1, 2, 3)] = 0.3;
  v[B->linear_index(2, 1, 5)] = 0.2;
  const double k = snap_subbox_radius(*B, 3.0);
  CHECK(std::abs(k - 3.0) < 0.2);
  const std::size_t budget = subbox_budget(*B, k);

  std::vector<std::size_t> ns{0, 1, 16, 64, 256, 512, 1024, 2048, budget};
  auto t = spectral_tail_series(v, k, ns);
  CHECK(t.budget == budget);
  CHECK(t.values.front() == doctest::Approx(t.tilde_h1).epsilon(1e-12));
  CHECK(t.values.back() <= 1e-8 * t.tilde_h1);
  for (std::size_t i = 1; i < ns.size(); ++i) CHECK(t.values[i] <= t.values[i - 1]);
  CHECK(spectral_tail(v, k, 64) == doctest::Approx(t.values[3]).epsilon(1e-12));

  // Algebraic decay rate in the sub-box eigenvalue over the resolved range.
  SineBasis sub({pi, pi, k}, {B->modes()[0] * 2 + 1, B->modes()[1] * 2 + 1,
                              static_cast<int>(budget / ((B->modes()[0] * 2 + 1) * (B->modes()[1] * 2 + 1)))});
  REQUIRE(sub.size() == budget);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 4; i <= 7; ++i) {
    const double x = std::log(sub.eigenvalue(sub.sorted_index()[ns[i]]));
    const double y = std::log(t.values[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  CHECK(slope < -2.0);

  CHECK_THROWS_AS(spectral_tail(v, 3.0, 10), InvalidArgument);
  CHECK_THROWS_AS(spectral_tail(v, k, budget + 1), InvalidArgument);
  CHECK_THROWS_AS(spectral_tail(v, 7.0, 1), InvalidArgument);
  CHECK(2 * snap_subbox_radius(*B, 7.0) < B->domain().L);
}

TEST_CASE("Hausdorff semi-distance") {
  auto B = cube();
  auto e1 = SpectralField::unit_mode(B, 1, 1, 1);
  e1 *= 1.0 / h1_norm(e1);
  StateSet Y{SpectralField(B), e1}, Z{SpectralField(B)};
  CHECK(hausdorff_semidist(Y, Z) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hausdorff_semidist(Z, Y) == 0.0);
  CHECK(hausdorff_semidist(Y, Y) == 0.0);
  CHECK(hausdorff_sym(Y, Z) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(hausdorff_semidist({}, Z), InvalidArgument);
  CHECK_THROWS_AS(hausdorff_semidist(Y, {}), InvalidArgument);

  for (std::uint64_t s = 0; s < 10; ++s) {
    StateSet X, P, Q;
    for (int i = 0; i < 5; ++i) {
      X.push_back(oracle::random_field(B, 100 * s + i));
      P.push_back(oracle::random_field(B, 100 * s + 10 + i));
      Q.push_back(oracle::random_field(B, 100 * s + 20 + i));
    }
    CHECK(hausdorff_semidist(X, P) == doctest::Approx(brute_semidist(X, P)).epsilon(1e-13));
    CHECK(hausdorff_semidist(X, Q) <= hausdorff_semidist(X, P) + hausdorff_semidist(P, Q) + 1e-12);
    StateSet sup = P;
    sup.insert(sup.end(), X.begin(), X.end());
    CHECK(hausdorff_semidist(X, sup) == 0.0);
  }
}

TEST_CASE("ensemble cloud") {
  auto B = cube();
  EnsembleSpec spec{4, 9, 1.0};
  auto a = ensemble_cloud(B, spec, 2.0);
  auto b = ensemble_cloud(B, spec, 2.0);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(h1_norm(a[i]) == doctest::Approx(2.0 * (i + 1) / 4).epsilon(1e-14));
    CHECK(l2_norm(a[i] - b[i]) == 0.0);
  }
  CHECK_THROWS_AS(ensemble_cloud(B, EnsembleSpec{0, 1, 1.0}, 1.0), InvalidArgument);
}

TEST_CASE("attractor sampling") {
  auto B = cube();
  EnsembleSpec ens{3, 5, 1.0};
  SUBCASE("linear contraction collapses to zero") {
    Model lin = linear_model(B);
    NoiseFiber f = fiber(2, -100, 2);
    const double T = 90.0;  // > 50 / delta
    auto A = sample_attractor(lin, f, ens, {10.0, 30.0, T}, [](double) { return 5.0; });
    REQUIRE(A.cauchy_residuals.size() == 2);
    for (double r : A.cauchy_residuals) CHECK(r >= 0.0);
    for (const auto& s : A.states) CHECK(h1_norm(s) < 1e-6);
    CHECK(check_invariance(lin, f, A, A, 0.0) == 0.0);
    auto later = sample_attractor(lin, f.shifted(1.0), ens, {T}, [](double) { return 5.0; });
    CHECK(check_invariance(lin, f, A, later, 1.0) < 1e-6);

    auto rep = check_attraction(lin, f, EnsembleSpec{3, 77, 1.0}, [](double) { return 10.0; }, A, {2, 4, 8, 16},
                                1e-2);
    CHECK(rep.decreasing);
    CHECK(rep.distances.back() < rep.distances.front());
    CHECK_THROWS_AS(sample_attractor(lin, f, ens, {}, [](double) { return 1.0; }), InvalidArgument);
    CHECK_THROWS_AS(sample_attractor(lin, f, ens, {2.0, 1.0}, [](double) { return 1.0; }), InvalidArgument);
  }
  SUBCASE("deterministic forcing approaches the Newton steady state") {
    Model det(B, PhysicsParams::classical(consts(B)),
              Forcing::make(0.2 * oracle::random_field(B, 11, 1.0), SpectralField(B)));
    NoiseFiber f = fiber(3, -50, 2);
    auto A = sample_attractor(det, f, ens, {20.0, 40.0}, [](double) { return 1.0; });
    auto ss = solve_steady_state(det, SpectralField(B));
    REQUIRE(ss.converged);
    CHECK(steady_residual(det, ss.v) < 1e-10);
    for (const auto& s : A.states) CHECK(h1_distance(s, ss.v) < 1e-4);
  }
  SUBCASE("stochastic ladder and schedule independence") {
    Model full(B, PhysicsParams::classical(consts(B)),
               Forcing::make(0.2 * oracle::random_field(B, 11, 1.0), 0.1 * oracle::random_field(B, 12, 1.0)));
    NoiseFiber f = fiber(4, -60, 2);
    auto rule = absorbing_radius(full, f, 10.0, 1.0);
    CHECK(rule(5.0) > 0.0);
    auto A1 = sample_attractor(full, f, ens, {5.0, 10.0, 20.0}, rule, Parallel{1});
    auto A3 = sample_attractor(full, f, ens, {5.0, 10.0, 20.0}, rule, Parallel{3});
    for (std::size_t i = 0; i < A1.states.size(); ++i) CHECK(l2_norm(A1.states[i] - A3.states[i]) == 0.0);
    CHECK(A1.cauchy_residuals == A3.cauchy_residuals);
    CHECK(A1.cauchy_residuals[1] < A1.cauchy_residuals[0]);

    // B equal to the attractor family at its own horizon: distance zero.
    auto self = check_attraction(full, f, ens, rule, A1, {20.0}, 1e-3);
    CHECK(self.distances[0] == 0.0);
  }
}
