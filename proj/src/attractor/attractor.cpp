#include <algorithm>
#include <cmath>
#include <random>

#include "bbm/attractor.hpp"
#include "bbm/error.hpp"

namespace bbm {

StateSet pullback_state(const Model& model, double T, const NoiseFiber& fiber, const StateSet& v0_family,
                        const Parallel& par) {
  if (T == 0.0) return v0_family;
  const long n = aligned_steps(T, fiber.dt(), "pullback horizon");
  const NoiseFiber start = fiber.shifted_steps(-n);
  StateSet out(v0_family.size());
  par.for_each(v0_family.size(),
               [&](std::size_t i) { out[i] = evolve(model, v0_family[i], start, T, EvolveOptions{0, {}}).final_state.v; });
  return out;
}

StateSet pullback_u(const Model& model, double T, const NoiseFiber& fiber, const StateSet& u0_family,
                    const Parallel& par) {
  if (T == 0.0) return u0_family;
  const long n = aligned_steps(T, fiber.dt(), "pullback horizon");
  const NoiseFiber start = fiber.shifted_steps(-n);
  StateSet out(u0_family.size());
  par.for_each(u0_family.size(), [&](std::size_t i) { out[i] = cocycle_phi(model, T, start, u0_family[i]); });
  return out;
}

StateSet ensemble_cloud(const BasisPtr& basis, const EnsembleSpec& spec, double radius) {
  if (spec.size == 0) throw InvalidArgument("ensemble size must be >= 1");
  StateSet out;
  out.reserve(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    std::mt19937_64 rng(split_seed(spec.seed, i));
    SpectralField f = random_smooth_field(basis, rng, spec.decay);
    const double r = radius * static_cast<double>(i + 1) / static_cast<double>(spec.size);
    f *= r / h1_norm(f);
    out.push_back(std::move(f));
  }
  return out;
}

AttractorApprox sample_attractor(const Model& model, const NoiseFiber& fiber, const EnsembleSpec& ensemble,
                                 const std::vector<double>& ladder, const RadiusRule& radius, const Parallel& par) {
  if (ladder.empty()) throw InvalidArgument("sample_attractor: empty horizon ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1])) throw InvalidArgument("sample_attractor: ladder must be increasing");

  AttractorApprox out;
  out.ladder = ladder;
  out.ensemble = ensemble;
  std::vector<StateSet> clouds;
  for (double T : ladder) {
    out.radii.push_back(radius(T));
    clouds.push_back(ensemble_cloud(model.basis(), ensemble, out.radii.back()));
  }
  out.snapshots.assign(ladder.size(), StateSet(ensemble.size));
  const std::size_t m = ensemble.size;
  // One task per (horizon, member); longest horizons first for balance.
  par.for_each(ladder.size() * m, [&](std::size_t task) {
    const std::size_t li = ladder.size() - 1 - task / m, i = task % m;
    const double T = ladder[li];
    const NoiseFiber start = fiber.shifted_steps(-aligned_steps(T, fiber.dt(), "pullback horizon"));
    out.snapshots[li][i] = cocycle_phi(model, T, start, clouds[li][i]);
  });
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
    out.cauchy_residuals.push_back(hausdorff_semidist(out.snapshots[i + 1], out.snapshots[i]) +
                                   hausdorff_semidist(out.snapshots[i], out.snapshots[i + 1]));
  out.states = out.snapshots.back();
  return out;
}

AttractionReport check_attraction(const Model& model, const NoiseFiber& fiber, const EnsembleSpec& family,
                                  const RadiusRule& radius, const AttractorApprox& attractor,
                                  const std::vector<double>& t_grid, double tolerance, const Parallel& par) {
  if (t_grid.empty()) throw InvalidArgument("check_attraction: empty time grid");
  AttractionReport rep;
  rep.times = t_grid;
  rep.distances.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const StateSet cloud = ensemble_cloud(model.basis(), family, radius(t_grid[i]));
    rep.distances[i] = hausdorff_semidist(pullback_u(model, t_grid[i], fiber, cloud, par), attractor.states);
  }
  const double tmax = *std::max_element(t_grid.begin(), t_grid.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] >= 0.1 * tmax) rep.last_decade_max = std::max(rep.last_decade_max, rep.distances[i]);
    const double ly = std::log(std::max(rep.distances[i], 1e-300));
    sx += t_grid[i];
    sy += ly;
    sxx += t_grid[i] * t_grid[i];
    sxy += t_grid[i] * ly;
    ++cnt;
  }
  const double den = cnt * sxx - sx * sx;
  rep.decreasing = cnt >= 2 && den > 0 && (cnt * sxy - sx * sy) / den < 0.0;
  rep.pass = rep.decreasing && rep.last_decade_max <= tolerance;
  return rep;
}

double check_invariance(const Model& model, const NoiseFiber& fiber, const AttractorApprox& here,
                        const AttractorApprox& there, double t, const Parallel& par) {
  if (t == 0.0) return hausdorff_sym(here.states, there.states);
  StateSet moved(here.states.size());
  par.for_each(moved.size(), [&](std::size_t i) { moved[i] = cocycle_phi(model, t, fiber, here.states[i]); });
  return hausdorff_sym(moved, there.states);
}

}  // namespace bbm
