#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "bbm/app.hpp"

namespace bbm {

namespace {

// Pinned tolerances.
constexpr double kOperatorTol = 1e-10;
constexpr double kCocycleTol = 1e-10;
constexpr double kEnergyTolEuler = 0.02;
constexpr double kEnergyTolHeun = 0.002;
constexpr double kOrthogonalityTol = 1e-8;
constexpr double kVarianceTol = 0.10;
constexpr int kSeeds = 10;
constexpr int kSeedsRequired = 9;
constexpr double kTailTol = 0.01;
constexpr double kSpectralTol = 0.05;
constexpr double kLinearCollapseTol = 1e-6;
constexpr double kSteadyTol = 1e-4;
constexpr double kInvarianceFactor = 3.0;
constexpr double kEulerOrder[2] = {0.7, 1.3};
constexpr double kHeunOrder[2] = {1.7, 2.3};
// Step used by the long pullback runs of criteria 5-8.
constexpr double kLongDt = 1e-2;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

RunConfig long_config(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.dt = std::max(cfg.dt, kLongDt);
  return c;
}

RunConfig without(RunConfig c, bool g, bool h) {
  if (g) c.g.kind = "zero";
  if (h) c.h.kind = "zero";
  return c;
}

SpectralField seeded_field(const BasisPtr& basis, std::uint64_t seed, double decay, double h1) {
  std::mt19937_64 rng(seed);
  SpectralField f = random_smooth_field(basis, rng, decay);
  f *= h1 / h1_norm(f);
  return f;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

double max_abs(const SpectralField& a) {
  double m = 0.0;
  for (double c : a.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

EnsembleSpec family_for(const RunConfig& cfg, std::uint64_t salt) {
  return EnsembleSpec{cfg.ensemble_size, split_seed(cfg.ensemble_seed, salt), 1.0};
}

}  // namespace

struct AcceptanceSuite::Impl {
  RunConfig cfg;
  Parallel par;
  std::ostream* log;

  // Criterion 5 output reused by 6 and 7: v states at time 0 per seed, per
  // ladder horizon.
  std::optional<std::vector<std::vector<StateSet>>> absorbed;
  std::optional<std::string> absorbed_error;

  void say(const std::string& s) const {
    if (log) *log << "  " << s << "\n" << std::flush;
  }

  CriterionResult c1();
  CriterionResult c2();
  CriterionResult c3();
  CriterionResult c4();
  CriterionResult c5();
  CriterionResult c6();
  CriterionResult c7();
  CriterionResult c8();
  CriterionResult c9();
};

AcceptanceSuite::AcceptanceSuite(const RunConfig& cfg, const Parallel& par, std::ostream* log)
    : impl_(std::make_unique<Impl>(Impl{cfg, par, log, std::nullopt, std::nullopt})) {}

AcceptanceSuite::~AcceptanceSuite() = default;

CriterionResult AcceptanceSuite::run(int id) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = impl_->c1(); break;
      case 2: r = impl_->c2(); break;
      case 3: r = impl_->c3(); break;
      case 4: r = impl_->c4(); break;
      case 5: r = impl_->c5(); break;
      case 6: r = impl_->c6(); break;
      case 7: r = impl_->c7(); break;
      case 8: r = impl_->c8(); break;
      case 9: r = impl_->c9(); break;
      default: throw InvalidArgument("unknown criterion " + std::to_string(id));
    }
  } catch (const InvalidArgument&) {
    throw;
  } catch (const std::exception& e) {
    static const char* names[] = {"",
                                  "operator-exactness",
                                  "cocycle",
                                  "energy-law",
                                  "ou-statistics",
                                  "pullback-absorption",
                                  "tail-smallness",
                                  "spectral-truncation",
                                  "attractor-sanity",
                                  "scheme-convergence"};
    r.name = names[id];
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = id;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CriterionResult AcceptanceSuite::Impl::c1() {
  CriterionResult r{1, "operator-exactness", false, "", 0};
  const BasisPtr basis = build_basis(cfg.domain, cfg.modes);
  double worst = 0.0;
  std::string which;
  auto note = [&](const char* name, double v) {
    if (v > worst || which.empty()) {
      worst = std::max(worst, v);
      which = name;
    }
  };
  for (int trial = 0; trial < 3; ++trial) {
    const SpectralField f = seeded_field(basis, split_seed(cfg.seed, 100 + trial), 0.5, 1.0);
    const SpectralField g = seeded_field(basis, split_seed(cfg.seed, 200 + trial), 0.5, 1.0);
    for (int refine : {1, 2}) {
      const GridField gf = to_grid(f, refine);
      note("parseval", std::abs(quadrature_l2(gf) - l2_norm(f)) / l2_norm(f));
      note("roundtrip-coeffs", max_abs_diff(from_grid(gf), f) / max_abs(f));
    }
    // Grid-side round trip on the square transform.
    {
      std::mt19937_64 rng(split_seed(cfg.seed, 300 + trial));
      std::normal_distribution<double> normal;
      GridField gv{basis, 1, std::vector<double>(basis->grid(1).size(), 0.0)};
      const Grid& grid = basis->grid(1);
      const auto d = grid.dims();
      double gmax = 0.0;
      for (int i = 1; i + 1 < d[0]; ++i)
        for (int j = 1; j + 1 < d[1]; ++j)
          for (int k = 1; k + 1 < d[2]; ++k) {
            gv.values[grid.flat(i, j, k)] = normal(rng);
            gmax = std::max(gmax, std::abs(gv.values[grid.flat(i, j, k)]));
          }
      const GridField back = to_grid(from_grid(gv), 1);
      double e = 0.0;
      for (std::size_t i = 0; i < back.values.size(); ++i) e = std::max(e, std::abs(back.values[i] - gv.values[i]));
      note("roundtrip-grid", e / gmax);
    }
    note("h1-quadrature", std::abs(tail_mass(f, 0.0) - h1_norm(f) * h1_norm(f)) / (h1_norm(f) * h1_norm(f)));
    note("helmholtz", max_abs_diff(helmholtz(helmholtz_inv(f)), f) / max_abs(f));
    note("helmholtz-inv", max_abs_diff(helmholtz_inv(helmholtz(f)), f) / max_abs(f));
    for (std::size_t n : {std::size_t{0}, basis->size() / 3, basis->size()}) {
      const SpectralField pf = project_low(f, n);
      note("idempotence", max_abs_diff(project_low(pf, n), pf) / max_abs(f));
      note("self-adjoint", std::abs(inner_l2(pf, g) - inner_l2(f, project_low(g, n))) / (l2_norm(f) * l2_norm(g)));
      note("non-expansive", std::max(0.0, h1_norm(pf) - h1_norm(f)) / h1_norm(f));
    }
  }
  r.pass = worst <= kOperatorTol;
  r.detail = "max relative residual " + fmt(worst) + " (" + which + "), tol " + fmt(kOperatorTol);
  return r;
}

CriterionResult AcceptanceSuite::Impl::c2() {
  CriterionResult r{2, "cocycle", false, "", 0};
  const Experiment ex(cfg);
  const SpectralField u0 = seeded_field(ex.basis, split_seed(cfg.seed, 21), 1.0, 1.0);
  const bool identity = [&] {
    const SpectralField same = cocycle_phi(ex.model, 0.0, ex.fiber, u0);
    for (std::size_t j = 0; j < u0.size(); ++j)
      if (same[j] != u0[j]) return false;
    return true;
  }();
  const long total = aligned_steps(2.0, cfg.dt, "cocycle horizon");
  const SpectralField one = cocycle_phi(ex.model, 2.0, ex.fiber, u0);
  double worst = 0.0;
  for (double frac : {0.4, 0.75}) {
    const long s = static_cast<long>(std::lround(frac * static_cast<double>(total)));
    const double ts = static_cast<double>(s) * cfg.dt, tt = static_cast<double>(total - s) * cfg.dt;
    const SpectralField mid = cocycle_phi(ex.model, ts, ex.fiber, u0);
    const SpectralField two = cocycle_phi(ex.model, tt, ex.fiber.shifted_steps(s), mid);
    worst = std::max(worst, h1_distance(one, two) / h1_norm(one));
  }
  r.pass = identity && worst <= kCocycleTol;
  r.detail = "max relative H1 gap " + fmt(worst) + " over t+s=2, identity at t=0 " + (identity ? "exact" : "broken");
  return r;
}

CriterionResult AcceptanceSuite::Impl::c3() {
  CriterionResult r{3, "energy-law", false, "", 0};
  const RunConfig c = without(cfg, true, true);
  const Experiment ex(c);
  const SpectralField v0 = seeded_field(ex.basis, split_seed(cfg.seed, 31), 1.0, 0.5);
  const double T = 1.0;
  double rel[2] = {0, 0};
  bool monotone = true;
  int idx = 0;
  for (Scheme s : {Scheme::ImexEuler, Scheme::ImexHeun}) {
    const PullbackRun run = evolve(ex.model.with_scheme(s), v0, ex.fiber, T, EvolveOptions{1, {}});
    double integral = 0.0;
    for (std::size_t i = 1; i < run.rows.size(); ++i)
      integral += 0.5 * (run.rows[i].t - run.rows[i - 1].t) * (run.rows[i].grad_sq + run.rows[i - 1].grad_sq);
    const double dE = run.rows.back().energy - run.rows.front().energy;
    rel[idx++] = std::abs(dE + 2.0 * c.nu * integral) / std::abs(dE);
    for (std::size_t i = 1; i < run.rows.size(); ++i) monotone = monotone && run.rows[i].v_h1 <= run.rows[i - 1].v_h1;
  }
  double orth = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const SpectralField v = seeded_field(ex.basis, split_seed(cfg.seed, 32 + trial), 1.0, 0.5 + trial);
    const double lhs = std::abs(inner_l2(nonlinear_div(ex.model, v, SpectralField(ex.basis)), v));
    orth = std::max(orth, lhs / (1.0 + std::pow(h1_norm(v), 3)));
  }
  r.pass = rel[0] <= kEnergyTolEuler && rel[1] <= kEnergyTolHeun && orth <= kOrthogonalityTol;
  r.detail = "energy mismatch euler " + fmt(rel[0]) + " (tol " + fmt(kEnergyTolEuler) + "), heun " + fmt(rel[1]) +
             " (tol " + fmt(kEnergyTolHeun) + "); orthogonality " + fmt(orth) + "; H1 monotone " +
             (monotone ? "yes" : "no");
  return r;
}

CriterionResult AcceptanceSuite::Impl::c4() {
  CriterionResult r{4, "ou-statistics", false, "", 0};
  const Experiment ex(cfg);
  const double alpha = cfg.alpha, dt = cfg.dt;
  const double H = std::round(1000.0 / alpha / dt) * dt;
  const double burn = std::ceil(10.0 / alpha / dt) * dt;
  const long n = aligned_steps(H, dt, "OU horizon");
  const double target = 1.0 / (2.0 * alpha);
  const double ergodic_bound = 2.0 / std::sqrt(2.0 * alpha);
  double pooled = 0.0;
  long count = 0;
  int ergodic_ok = 0, delta_ok = 0, var_ok = 0;
  double worst_T0 = 0.0, worst_avg = 0.0;
  for (int i = 0; i < kSeeds; ++i) {
    RunConfig c = cfg;
    c.t0 = -(H + burn);
    c.t1 = 0.0;
    const auto ou = noise_for(c, split_seed(cfg.seed, 400 + i));
    const NoiseFiber fiber(ou, 0);
    double mean = 0.0;
    for (long j = -n; j <= 0; ++j) mean += fiber.y(j);
    mean /= static_cast<double>(n + 1);
    double ss = 0.0;
    for (long j = -n; j <= 0; ++j) ss += (fiber.y(j) - mean) * (fiber.y(j) - mean);
    pooled += ss;
    count += n + 1;
    if (std::abs(ss / static_cast<double>(n + 1) - target) <= kVarianceTol * target) ++var_ok;
    const double avg = ergodic_average(fiber, H);
    worst_avg = std::max(worst_avg, avg);
    if (avg <= ergodic_bound) {
      ++ergodic_ok;
      const DeltaCondReport d = deltacond_threshold(fiber, ex.constants.beta, ex.constants.delta, H);
      if (d.found) {
        ++delta_ok;
        worst_T0 = std::max(worst_T0, d.T0);
      }
    }
  }
  const double var = pooled / static_cast<double>(count);
  const double var_err = std::abs(var - target) / target;
  r.pass = ex.constants.alpha_ok && var_err <= kVarianceTol && ergodic_ok >= kSeedsRequired && delta_ok == ergodic_ok;
  r.detail = "pooled Var(y) " + fmt(var) + " vs " + fmt(target) + " (rel " + fmt(var_err) + ", " +
             std::to_string(var_ok) + "/10 paths within 10% alone); ergodic avg <= " + fmt(ergodic_bound) + " on " +
             std::to_string(ergodic_ok) + "/10 (max " + fmt(worst_avg) + "); deltacond T0 found on " +
             std::to_string(delta_ok) + " (max T0 " + fmt(worst_T0) + "); alpha_ok " +
             (ex.constants.alpha_ok ? "true" : "false");
  return r;
}

CriterionResult AcceptanceSuite::Impl::c5() {
  CriterionResult r{5, "pullback-absorption", false, "", 0};
  const RunConfig c = long_config(cfg);
  const Experiment ex(c);
  const double delta = ex.constants.delta;
  std::vector<std::vector<StateSet>> states(kSeeds);
  int passed = 0;
  std::string worst;
  double max_ratio = 0.0;
  for (int i = 0; i < kSeeds; ++i) {
    const NoiseFiber fiber(noise_for(c, split_seed(cfg.seed, 500 + i)), 0);
    const AbsorbingEstimate est = absorbing_estimate(fiber, ex.constants, ex.model.forcing().hz, c.quad_window, c.c_quad);
    const SpectralField z0 = ex.model.forcing().z(fiber.y(0));
    std::vector<double> norms;
    for (double T : c.ladder) {
      const StateSet cloud = ensemble_cloud(ex.basis, family_for(c, 50 + i), c.tempered_radius * std::exp(delta * T / 16.0));
      const StateSet u = pullback_u(ex.model, T, fiber, cloud, par);
      double m = 0.0;
      StateSet v;
      for (const auto& s : u) {
        m = std::max(m, h1_norm(s));
        v.push_back(s - z0);
      }
      norms.push_back(m);
      states[i].push_back(std::move(v));
    }
    const double T_report = report_time(c.ladder, norms, est.rho);
    const double top = *std::max_element(norms.begin(), norms.end());
    max_ratio = std::max(max_ratio, top / est.rho);
    const bool ok = T_report >= 0.0 && std::isfinite(top);
    passed += ok;
    say("seed " + std::to_string(i) + ": rho " + fmt(est.rho) + ", norms " + fmt(norms.front()) + ".." +
        fmt(norms.back()) + ", T_report " + fmt(T_report));
  }
  absorbed = std::move(states);
  r.pass = passed >= kSeedsRequired;
  r.detail = std::to_string(passed) + "/10 seeds absorbed into rho (dt " + fmt(c.dt) + ", max ||u||/rho " +
             fmt(max_ratio) + ")";
  return r;
}

CriterionResult AcceptanceSuite::Impl::c6() {
  CriterionResult r{6, "tail-smallness", false, "", 0};
  if (!absorbed) (void)c5();
  const double L = cfg.domain.L;
  std::vector<double> radii;
  for (double k : cfg.tail_k)
    if (k <= 0.5 * L) radii.push_back(k);
  double best_k = -1.0, best = INFINITY;
  for (double k : radii) {
    double worst = 0.0;
    for (const auto& seed : *absorbed)
      for (const auto& v : seed.back()) worst = std::max(worst, tail_mass(v, k) / (h1_norm(v) * h1_norm(v)));
    if (worst < best) {
      best = worst;
      best_k = k;
    }
  }
  // Monotonicity on a fine radius grid.
  double rise = 0.0;
  for (const auto& seed : *absorbed)
    for (const auto& v : seed.back()) {
      double prev = tail_mass(v, 0.0);
      for (int i = 1; i <= 64; ++i) {
        const double m = tail_mass(v, L * i / 64.0);
        rise = std::max(rise, m - prev);
        prev = m;
      }
    }
  r.pass = best <= kTailTol && rise <= 1e-10;
  r.detail = "min over k<=L/2 of max tail ratio " + fmt(best) + " at k=" + fmt(best_k) + " (tol " + fmt(kTailTol) +
             "), max increase in k " + fmt(rise);
  return r;
}

CriterionResult AcceptanceSuite::Impl::c7() {
  CriterionResult r{7, "spectral-truncation", false, "", 0};
  if (!absorbed) (void)c5();
  const BasisPtr basis = absorbed->front().front().front().basis();
  const double k = snap_subbox_radius(*basis, cfg.spectral_k);
  const std::size_t budget = subbox_budget(*basis, k);
  std::vector<std::size_t> ns;
  for (long n : cfg.spectral_n)
    if (2 * static_cast<std::size_t>(n) <= budget) ns.push_back(static_cast<std::size_t>(n));
  if (ns.empty()) ns.push_back(budget / 2);
  std::vector<double> worst(ns.size(), 0.0);
  const std::size_t levels = absorbed->front().size();
  for (const auto& seed : *absorbed)
    for (std::size_t l = levels / 2; l < levels; ++l)
      for (const auto& v : seed[l]) {
        const SpectralTail t = spectral_tail_series(v, k, ns);
        for (std::size_t i = 0; i < ns.size(); ++i) worst[i] = std::max(worst[i], t.values[i] / t.tilde_h1);
      }
  std::size_t found = 0;
  bool ok = false;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (worst[i] <= kSpectralTol) {
      ok = true;
      found = ns[i];
      break;
    }
  r.pass = ok;
  r.detail = "k aligned " + fmt(k) + ", budget " + std::to_string(budget) + (ok ? ", ratio <= " + fmt(kSpectralTol) + " from n=" + std::to_string(found) : ", no n reached the tolerance") +
             " (ratio at largest n " + fmt(worst.back()) + ")";
  return r;
}

CriterionResult AcceptanceSuite::Impl::c8() {
  CriterionResult r{8, "attractor-sanity", false, "", 0};
  const RunConfig c = long_config(cfg);
  const Experiment ex(c);
  const EnsembleSpec ens = family_for(c, 80);
  std::ostringstream detail;

  // (a) linear contraction: F = 0, g = h = 0.
  bool ok_a;
  {
    const SystemConstants lc = make_constants(c.nu, 0.0, 0.0, ex.basis->poincare(), ex.constants.beta0, 0.0, c.alpha);
    const Model lin(ex.basis, PhysicsParams::custom(lc, FluxCoefficients{{0, 0, 0}, {0, 0, 0}}), Forcing::zero(ex.basis),
                    ex.model.scheme(), c.refine);
    const double T = std::ceil(50.0 / lc.delta / c.dt) * c.dt;
    const std::vector<double> ladder{std::round(0.25 * T / c.dt) * c.dt, std::round(0.5 * T / c.dt) * c.dt, T};
    const AttractorApprox A =
        sample_attractor(lin, ex.fiber, ens, ladder, absorbing_radius(lin, ex.fiber, c.quad_window, c.c_quad), par);
    double m = 0.0;
    for (const auto& s : A.states) m = std::max(m, h1_norm(s));
    ok_a = m <= kLinearCollapseTol;
    detail << "(a) linear max ||u|| " << fmt(m) << " at T=" << fmt(T);
  }
  // (b) deterministic forcing against Newton.
  bool ok_b;
  {
    const RunConfig dc = without(c, false, true);
    const Experiment det(dc);
    const AttractorApprox A = sample_attractor(det.model, det.fiber, ens, dc.ladder,
                                               absorbing_radius(det.model, det.fiber, dc.quad_window, dc.c_quad), par);
    const SteadyState ss = solve_steady_state(det.model, SpectralField(det.basis));
    double d = 0.0;
    for (const auto& s : A.states) d = std::max(d, h1_distance(s, ss.v));
    ok_b = ss.converged && d <= kSteadyTol;
    detail << "; (b) distance to Newton steady state " << fmt(d) << " (newton residual " << fmt(ss.residual) << ", "
           << ss.iterations << " its)";
  }
  // (c) stochastic: Cauchy residuals along the ladder and invariance.
  bool ok_c;
  {
    const AttractorApprox A = sample_attractor(ex.model, ex.fiber, ens, c.ladder,
                                               absorbing_radius(ex.model, ex.fiber, c.quad_window, c.c_quad), par);
    const NoiseFiber later = ex.fiber.shifted(c.invariance_t);
    const AttractorApprox B = sample_attractor(ex.model, later, ens, {c.ladder.back()},
                                               absorbing_radius(ex.model, later, c.quad_window, c.c_quad), par);
    const double defect = check_invariance(ex.model, ex.fiber, A, B, c.invariance_t, par);
    bool decreasing = !A.cauchy_residuals.empty();
    for (std::size_t i = 1; i < A.cauchy_residuals.size(); ++i)
      decreasing = decreasing && A.cauchy_residuals[i] < A.cauchy_residuals[i - 1];
    const double last = A.cauchy_residuals.empty() ? 0.0 : A.cauchy_residuals.back();
    ok_c = decreasing && defect <= kInvarianceFactor * last;
    detail << "; (c) cauchy residuals";
    for (double x : A.cauchy_residuals) detail << " " << fmt(x);
    detail << (decreasing ? " (strictly decreasing)" : " (NOT strictly decreasing)") << ", invariance defect "
           << fmt(defect);
  }
  r.pass = ok_a && ok_b && ok_c;
  r.detail = detail.str();
  return r;
}

CriterionResult AcceptanceSuite::Impl::c9() {
  CriterionResult r{9, "scheme-convergence", false, "", 0};
  const double dt = kLongDt, T = 1.0;
  const RunConfig base = without(cfg, false, true);
  const Experiment ex(base);
  const SpectralField v0 = seeded_field(ex.basis, split_seed(cfg.seed, 91), 1.0, 1.0);
  // Same model at every step size; only the noise grid changes.
  auto final_state = [&](Scheme s, double step) {
    RunConfig c = base;
    c.dt = step;
    const NoiseFiber fiber(noise_for(c, c.seed), 0);
    return evolve(ex.model.with_scheme(s), v0, fiber, T, EvolveOptions{0, {}}).final_state.v;
  };
  double orders[2];
  int idx = 0;
  for (Scheme s : {Scheme::ImexEuler, Scheme::ImexHeun}) {
    const SpectralField ref = final_state(s, dt / 8.0);
    const double e_coarse = h1_distance(final_state(s, 2.0 * dt), ref);
    const double e_fine = h1_distance(final_state(s, dt), ref);
    orders[idx++] = std::log2(e_coarse / e_fine);
  }
  r.pass = orders[0] >= kEulerOrder[0] && orders[0] <= kEulerOrder[1] && orders[1] >= kHeunOrder[0] &&
           orders[1] <= kHeunOrder[1];
  r.detail = "observed order euler " + fmt(orders[0]) + ", heun " + fmt(orders[1]) + " (dt " + fmt(dt) + ", T " +
             fmt(T) + ")";
  return r;
}

}  // namespace bbm
