#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bbm/app.hpp"

namespace bbm {

SpectralField make_forcing_field(const BasisPtr& basis, const ForcingSpec& spec) {
  if (spec.kind == "zero") return SpectralField(basis);
  if (spec.kind == "bump") {
    // amplitude * exp(-((x3 - center)/width)^2) * sin(pi x/a) sin(pi y/b)
    GridField g{basis, 2, {}};
    const Grid& grid = basis->grid(2);
    g.values.resize(grid.size());
    const auto d = grid.dims();
    const BoxDomain& dom = basis->domain();
    for (int i = 0; i < d[0]; ++i) {
      const double sx = std::sin(std::numbers::pi * grid.coordinate(0, i) / dom.a);
      for (int j = 0; j < d[1]; ++j) {
        const double sy = std::sin(std::numbers::pi * grid.coordinate(1, j) / dom.b);
        for (int k = 0; k < d[2]; ++k) {
          const double r = (grid.coordinate(2, k) - spec.center) / spec.width;
          g.values[grid.flat(i, j, k)] = spec.amplitude * sx * sy * std::exp(-r * r);
        }
      }
    }
    return from_grid(g);
  }
  if (spec.kind == "modes") {
    SpectralField f(basis);
    std::stringstream ss(spec.modes);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      int m = 0, n = 0, p = 0;
      double c = 0.0;
      char extra = 0;
      if (std::sscanf(item.c_str(), " %d:%d:%d:%lf %c", &m, &n, &p, &c, &extra) != 4)
        throw ConfigError("forcing modes: cannot parse '" + item + "' (expected m:n:p:coeff)");
      const auto& M = basis->modes();
      if (m < 1 || n < 1 || p < 1 || m > M[0] || n > M[1] || p > M[2])
        throw ConfigError("forcing modes: mode '" + item + "' outside the basis");
      f[basis->linear_index(m, n, p)] += c;
    }
    return f;
  }
  throw ConfigError("unknown forcing kind '" + spec.kind + "'");
}

Scheme parse_scheme(const std::string& name) {
  if (name == "imex-euler") return Scheme::ImexEuler;
  if (name == "imex-heun") return Scheme::ImexHeun;
  throw ConfigError("unknown scheme '" + name + "'");
}

SystemConstants constants_for(const RunConfig& cfg, const BasisPtr& basis, const SpectralField& h) {
  const double beta0 =
      cfg.beta0_mode == "explicit" ? cfg.beta0 : estimate_beta0(basis, cfg.beta0_samples, cfg.beta0_seed);
  return make_constants(cfg.nu, cfg.gamma1, cfg.gamma2, basis->poincare(), beta0, h1_norm(h), cfg.alpha);
}

PhysicsParams physics_for(const RunConfig& cfg, const SystemConstants& c) {
  if (cfg.flux == "classical") return PhysicsParams::classical(c);
  FluxCoefficients f;
  f.c1 = cfg.c1;
  f.c2 = cfg.c2;
  return PhysicsParams::custom(c, f);
}

std::shared_ptr<const OUState> noise_for(const RunConfig& cfg, std::uint64_t seed) {
  auto path = std::make_shared<const WienerPath>(WienerPath::sample(seed, cfg.t0, cfg.t1, cfg.dt));
  OUOptions opt;
  opt.mode = cfg.ou_init == "stationary" ? OUInit::Stationary
             : cfg.ou_init == "explicit" ? OUInit::Explicit
                                         : OUInit::BurnIn;
  opt.y0 = cfg.y0;
  return std::make_shared<const OUState>(ou_solve(ShiftedPath(path), cfg.alpha, opt));
}

SpectralField initial_state(const RunConfig& cfg, const BasisPtr& basis) {
  SpectralField u(basis);
  if (cfg.initial == "zero" || cfg.initial_radius == 0.0) return u;
  std::mt19937_64 rng(cfg.initial_seed);
  u = random_smooth_field(basis, rng, 1.0);
  u *= cfg.initial_radius / h1_norm(u);
  return u;
}

namespace {

Model build_model(const RunConfig& cfg, const BasisPtr& basis, SystemConstants& constants) {
  SpectralField g = make_forcing_field(basis, cfg.g);
  SpectralField h = make_forcing_field(basis, cfg.h);
  constants = constants_for(cfg, basis, h);
  return Model(basis, physics_for(cfg, constants), Forcing::make(std::move(g), std::move(h)), parse_scheme(cfg.scheme),
               cfg.refine);
}

}  // namespace

Experiment::Experiment(const RunConfig& c)
    : cfg(c),
      basis(build_basis(c.domain, c.modes)),
      model(build_model(c, basis, constants)),
      ou(noise_for(c, c.seed)),
      fiber(ou, 0) {}

}  // namespace bbm
