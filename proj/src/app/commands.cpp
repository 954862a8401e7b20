#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bbm/app.hpp"

namespace bbm {

namespace {

using json = nlohmann::ordered_json;

struct Context {
  const RunConfig& cfg;
  const CommandOptions& opts;
  Parallel par;

  std::ostream* log() const { return opts.log; }
  std::filesystem::path out(const std::string& name) const { return opts.out_dir / name; }
  void say(const std::string& line) const {
    if (opts.log) *opts.log << line << "\n";
  }
};

void write_json(const std::filesystem::path& file, const json& j) { write_text_file(file, j.dump(2) + "\n"); }

json constants_json(const SystemConstants& c) {
  return json{{"nu", c.nu},         {"gamma1", c.gamma1},   {"gamma2", c.gamma2},
              {"lambda", c.lambda}, {"beta0", c.beta0},     {"h_h1norm", c.h_h1norm},
              {"delta", c.delta},   {"beta", c.beta},       {"alpha", c.alpha},
              {"alpha_threshold", c.alpha_threshold()}, {"alpha_ok", c.alpha_ok}};
}

EnsembleSpec ensemble_of(const RunConfig& cfg) { return EnsembleSpec{cfg.ensemble_size, cfg.ensemble_seed, 1.0}; }

// Tempered test family: radius R exp(delta T / 16) at pullback horizon T.
RadiusRule tempered_rule(const RunConfig& cfg, const SystemConstants& c) {
  const double r = cfg.tempered_radius, d = c.delta;
  return [r, d](double T) { return r * std::exp(d * T / 16.0); };
}

struct LadderRun {
  std::vector<double> max_norm;
  std::vector<StateSet> states;  // u at time 0, per horizon
};

LadderRun pullback_ladder(const Experiment& ex, const Context& ctx) {
  LadderRun out;
  const RadiusRule rule = tempered_rule(ex.cfg, ex.constants);
  for (double T : ex.cfg.ladder) {
    const StateSet cloud = ensemble_cloud(ex.basis, ensemble_of(ex.cfg), rule(T));
    StateSet u = pullback_u(ex.model, T, ex.fiber, cloud, ctx.par);
    double m = 0.0;
    for (const auto& s : u) m = std::max(m, h1_norm(s));
    out.max_norm.push_back(m);
    out.states.push_back(std::move(u));
  }
  return out;
}

StateSet to_v(const Experiment& ex, const StateSet& u) {
  StateSet v;
  const SpectralField z = ex.model.forcing().z(ex.fiber.y(0));
  for (const auto& s : u) v.push_back(s - z);
  return v;
}

json tail_json(const StateSet& v, const std::vector<double>& radii) {
  json arr = json::array();
  for (double k : radii) {
    double mass = 0.0, rel = 0.0;
    for (const auto& s : v) {
      const double m = tail_mass(s, k);
      const double e = std::max(h1_norm(s) * h1_norm(s), 1e-300);
      mass = std::max(mass, m);
      rel = std::max(rel, m / e);
    }
    arr.push_back(json{{"k", k}, {"mass", mass}, {"relative", rel}});
  }
  return arr;
}

json spectral_json(const StateSet& v, const RunConfig& cfg, json& meta) {
  const SineBasis& basis = *v.front().basis();
  const double k = snap_subbox_radius(basis, cfg.spectral_k);
  const std::size_t budget = subbox_budget(basis, k);
  std::vector<std::size_t> ns;
  for (long n : cfg.spectral_n)
    if (static_cast<std::size_t>(n) <= budget) ns.push_back(static_cast<std::size_t>(n));
  meta["k"] = cfg.spectral_k;
  meta["k_aligned"] = k;
  meta["budget"] = budget;
  std::vector<double> value(ns.size(), 0.0), rel(ns.size(), 0.0);
  for (const auto& s : v) {
    const SpectralTail t = spectral_tail_series(s, k, ns);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      value[i] = std::max(value[i], t.values[i]);
      rel[i] = std::max(rel[i], t.tilde_h1 > 0 ? t.values[i] / t.tilde_h1 : 0.0);
    }
  }
  json arr = json::array();
  for (std::size_t i = 0; i < ns.size(); ++i) arr.push_back(json{{"n", ns[i]}, {"value", value[i]}, {"relative", rel[i]}});
  return arr;
}

int cmd_constants(const Experiment& ex, const Context& ctx) {
  const SystemConstants& c = ex.constants;
  write_json(ctx.out("constants.json"), constants_json(c));
  std::ostringstream os;
  os << "lambda = " << format_double(c.lambda) << "\nbeta0 = " << format_double(c.beta0)
     << "\n||h||_H1 = " << format_double(c.h_h1norm) << "\ndelta = " << format_double(c.delta)
     << "\nbeta = " << format_double(c.beta) << "\nalpha = " << format_double(c.alpha)
     << "\nalpha threshold = " << format_double(c.alpha_threshold()) << "\nalpha_ok = " << (c.alpha_ok ? "true" : "false");
  ctx.say(os.str());
  if (!c.alpha_ok) ctx.say("warning: alpha does not exceed 128 beta^2 / delta^2");
  return 0;
}

int cmd_simulate(const Experiment& ex, const Context& ctx) {
  const SpectralField u0 = initial_state(ex.cfg, ex.basis);
  const SpectralField v0 = u0 - ex.model.forcing().z(ex.fiber.y(0));
  const PullbackRun run = evolve(ex.model, v0, ex.fiber, ex.cfg.T, EvolveOptions{ex.cfg.stride, {}});
  std::ostringstream csv;
  write_diagnostics_csv(csv, run.rows);
  write_text_file(ctx.out("diagnostics.csv"), csv.str());
  write_state(ctx.out("final_state.bin"), run.final_state.v, run.final_state.t, run.final_state.y);
  write_json(ctx.out("summary.json"),
             json{{"T", run.horizon}, {"steps", run.steps}, {"v_h1", h1_norm(run.final_state.v)},
                  {"u_h1", h1_norm(run.final_state.u(ex.model.forcing()))}, {"y", run.final_state.y}});
  ctx.say("simulated " + std::to_string(run.steps) + " steps, final ||v||_H1 = " +
          format_double(h1_norm(run.final_state.v)));
  return 0;
}

int cmd_pullback(const Experiment& ex, const Context& ctx) {
  const LadderRun lr = pullback_ladder(ex, ctx);
  std::ostringstream csv;
  csv << "T,member,u_h1,v_h1\n";
  const SpectralField z = ex.model.forcing().z(ex.fiber.y(0));
  for (std::size_t i = 0; i < lr.states.size(); ++i)
    for (std::size_t m = 0; m < lr.states[i].size(); ++m)
      csv << format_double(ex.cfg.ladder[i]) << ',' << m << ',' << format_double(h1_norm(lr.states[i][m])) << ','
          << format_double(h1_distance(lr.states[i][m], z)) << "\n";
  write_text_file(ctx.out("pullback.csv"), csv.str());
  write_state_set(ctx.out("pullback_states"), lr.states.back(), 0.0,
                  "pullback of the tempered family from T=" + format_double(ex.cfg.ladder.back()));
  write_json(ctx.out("report.json"), json{{"ladder", ex.cfg.ladder}, {"max_norm", lr.max_norm}});
  return 0;
}

json absorb_json(const Experiment& ex, const LadderRun& lr) {
  AbsorbingEstimate est =
      absorbing_estimate(ex.fiber, ex.constants, ex.model.forcing().hz, ex.cfg.quad_window, ex.cfg.c_quad);
  est.T_report = report_time(ex.cfg.ladder, lr.max_norm, est.rho);
  json j{{"r0", est.r0},
         {"r1", est.r1},
         {"rho", est.rho},
         {"z_norm", est.z_norm},
         {"T_report", est.T_report >= 0 ? json(est.T_report) : json(nullptr)},
         {"quad_window", est.window},
         {"c_quad", est.c_quad},
         {"alpha_ok", est.alpha_ok},
         {"ladder", ex.cfg.ladder},
         {"max_norm", lr.max_norm}};
  return j;
}

int cmd_absorb(const Experiment& ex, const Context& ctx) {
  const LadderRun lr = pullback_ladder(ex, ctx);
  const json j = absorb_json(ex, lr);
  write_json(ctx.out("report.json"), j);
  ctx.say("r0 = " + format_double(j["r0"]) + ", rho = " + format_double(j["rho"]));
  return 0;
}

int cmd_tails(const Experiment& ex, const Context& ctx) {
  const LadderRun lr = pullback_ladder(ex, ctx);
  const StateSet v = to_v(ex, lr.states.back());
  write_json(ctx.out("report.json"), json{{"T", ex.cfg.ladder.back()}, {"tail", tail_json(v, ex.cfg.tail_k)}});
  return 0;
}

int cmd_spectral(const Experiment& ex, const Context& ctx) {
  const LadderRun lr = pullback_ladder(ex, ctx);
  const StateSet v = to_v(ex, lr.states.back());
  json meta;
  const json arr = spectral_json(v, ex.cfg, meta);
  json j{{"T", ex.cfg.ladder.back()}};
  j.update(meta);
  j["spectral_tail"] = arr;
  write_json(ctx.out("report.json"), j);
  return 0;
}

int cmd_attractor(const Experiment& ex, const Context& ctx) {
  const RunConfig& cfg = ex.cfg;
  const RadiusRule absorbing = absorbing_radius(ex.model, ex.fiber, cfg.quad_window, cfg.c_quad);
  const AttractorApprox A = sample_attractor(ex.model, ex.fiber, ensemble_of(cfg), cfg.ladder, absorbing, ctx.par);
  const NoiseFiber later = ex.fiber.shifted(cfg.invariance_t);
  const AttractorApprox B = sample_attractor(ex.model, later, ensemble_of(cfg), {cfg.ladder.back()},
                                             absorbing_radius(ex.model, later, cfg.quad_window, cfg.c_quad), ctx.par);
  const double defect = check_invariance(ex.model, ex.fiber, A, B, cfg.invariance_t, ctx.par);
  EnsembleSpec family = ensemble_of(cfg);
  family.seed = split_seed(cfg.ensemble_seed, 0xB);
  const AttractionReport att = check_attraction(ex.model, ex.fiber, family, tempered_rule(cfg, ex.constants), A,
                                                cfg.attraction_times, cfg.attraction_tol, ctx.par);
  const LadderRun lr{[&] {
                       std::vector<double> m;
                       for (const auto& s : A.snapshots) {
                         double x = 0.0;
                         for (const auto& u : s) x = std::max(x, h1_norm(u));
                         m.push_back(x);
                       }
                       return m;
                     }(),
                     A.snapshots};
  json j = absorb_json(ex, lr);
  const StateSet v = to_v(ex, A.states);
  j["tail"] = tail_json(v, cfg.tail_k);
  json meta;
  j["spectral_tail"] = spectral_json(v, cfg, meta);
  j["spectral_k_aligned"] = meta["k_aligned"];
  j["cauchy_residuals"] = A.cauchy_residuals;
  json series = json::array();
  for (std::size_t i = 0; i < att.times.size(); ++i) series.push_back(json{{"t", att.times[i]}, {"d", att.distances[i]}});
  j["attraction_series"] = series;
  j["attraction_pass"] = att.pass;
  j["invariance_defect"] = defect;
  j["invariance_t"] = cfg.invariance_t;
  j["ensemble_radii"] = A.radii;
  write_json(ctx.out("report.json"), j);
  write_state_set(ctx.out("attractor_states"), A.states, 0.0,
                  "attractor sample, pullback horizon " + format_double(cfg.ladder.back()));
  ctx.say("cauchy residuals: " + json(A.cauchy_residuals).dump() + ", invariance defect " + format_double(defect));
  return 0;
}

int cmd_verify(const RunConfig& cfg, const Context& ctx) {
  json arr = json::array();
  bool ok = true;
  AcceptanceSuite suite(cfg, ctx.par, ctx.log());
  for (int id = 1; id <= kCriteriaCount; ++id) {
    const CriterionResult r = suite.run(id);
    ok = ok && r.pass;
    ctx.say(std::string(r.pass ? "PASS" : "FAIL") + " C" + std::to_string(r.id) + " " + r.name + ": " + r.detail);
    arr.push_back(json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  write_json(ctx.out("verify.json"), json{{"pass", ok}, {"criteria", arr}});
  return ok ? 0 : static_cast<int>(ErrorKind::Acceptance);
}

}  // namespace

std::vector<std::string> command_names() {
  return {"constants", "simulate", "pullback", "absorb", "tails", "spectral", "attractor", "verify"};
}

int run_command(const std::string& name, const RunConfig& base, const CommandOptions& opts) {
  RunConfig cfg = base;
  if (opts.seed) cfg.seed = *opts.seed;
  validate_config(cfg);
  Context ctx{cfg, opts, Parallel{std::max(1, opts.threads)}};
  {
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + opts.out_dir.string() + "'");
  }
  if (name == "verify") return cmd_verify(cfg, ctx);
  const auto names = command_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw InvalidArgument("unknown subcommand '" + name + "'");
  const Experiment ex(cfg);
  if (name == "constants") return cmd_constants(ex, ctx);
  if (name == "simulate") return cmd_simulate(ex, ctx);
  if (name == "pullback") return cmd_pullback(ex, ctx);
  if (name == "absorb") return cmd_absorb(ex, ctx);
  if (name == "tails") return cmd_tails(ex, ctx);
  if (name == "spectral") return cmd_spectral(ex, ctx);
  return cmd_attractor(ex, ctx);
}

}  // namespace bbm
