#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "bbm/error.hpp"
#include "bbm/io.hpp"

namespace bbm {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

// Accepts plain numbers plus `pi`, `<x>pi` and `<x>*pi`.
double parse_double(const std::string& raw) {
  std::string s = trim(raw);
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty()) return scale;
  }
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("'" + raw + "' is not a number");
  return v * scale;
}

template <class Int>
Int parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  Int v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("'" + raw + "' is not an integer");
  return v;
}

std::string parse_choice(const std::string& raw, std::initializer_list<const char*> allowed) {
  const std::string s = trim(raw);
  for (const char* a : allowed)
    if (s == a) return s;
  std::string msg = "'" + s + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg);
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field real(std::string key, double RunConfig::*m) {
  return {std::move(key), [m](RunConfig& c, const std::string& v) { c.*m = parse_double(v); },
          [m](const RunConfig& c) { return format_double(c.*m); }};
}

template <class Int>
Field integer(std::string key, Int RunConfig::*m) {
  return {std::move(key), [m](RunConfig& c, const std::string& v) { c.*m = parse_int<Int>(v); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field choice(std::string key, std::string RunConfig::*m, std::initializer_list<const char*> allowed) {
  std::vector<std::string> keep(allowed.begin(), allowed.end());
  return {std::move(key),
          [m, keep](RunConfig& c, const std::string& v) {
            const std::string s = trim(v);
            if (std::find(keep.begin(), keep.end(), s) == keep.end()) {
              std::string msg = "'" + s + "' is not one of";
              for (const auto& a : keep) msg += " " + a;
              throw ConfigError(msg);
            }
            c.*m = s;
          },
          [m](const RunConfig& c) { return c.*m; }};
}

Field triple(std::string key, std::array<double, 3> RunConfig::*m) {
  return {std::move(key),
          [m](RunConfig& c, const std::string& v) {
            const auto items = split_list(v);
            if (items.size() != 3) throw ConfigError("expected three comma-separated numbers");
            for (int i = 0; i < 3; ++i) (c.*m)[i] = parse_double(items[i]);
          },
          [m](const RunConfig& c) {
            return format_double((c.*m)[0]) + ", " + format_double((c.*m)[1]) + ", " + format_double((c.*m)[2]);
          }};
}

Field real_list(std::string key, std::vector<double> RunConfig::*m) {
  return {std::move(key),
          [m](RunConfig& c, const std::string& v) {
            std::vector<double> out;
            for (const auto& s : split_list(v)) out.push_back(parse_double(s));
            c.*m = out;
          },
          [m](const RunConfig& c) { return join(c.*m, [](double x) { return format_double(x); }); }};
}

Field long_list(std::string key, std::vector<long> RunConfig::*m) {
  return {std::move(key),
          [m](RunConfig& c, const std::string& v) {
            std::vector<long> out;
            for (const auto& s : split_list(v)) out.push_back(parse_int<long>(s));
            c.*m = out;
          },
          [m](const RunConfig& c) { return join(c.*m, [](long x) { return std::to_string(x); }); }};
}

void forcing_fields(std::vector<Field>& f, const std::string& name, ForcingSpec RunConfig::*m) {
  f.push_back({"forcing." + name,
               [m](RunConfig& c, const std::string& v) { (c.*m).kind = parse_choice(v, {"zero", "bump", "modes"}); },
               [m](const RunConfig& c) { return (c.*m).kind; }});
  f.push_back({"forcing." + name + ".amplitude",
               [m](RunConfig& c, const std::string& v) { (c.*m).amplitude = parse_double(v); },
               [m](const RunConfig& c) { return format_double((c.*m).amplitude); }});
  f.push_back({"forcing." + name + ".width", [m](RunConfig& c, const std::string& v) { (c.*m).width = parse_double(v); },
               [m](const RunConfig& c) { return format_double((c.*m).width); }});
  f.push_back({"forcing." + name + ".center",
               [m](RunConfig& c, const std::string& v) { (c.*m).center = parse_double(v); },
               [m](const RunConfig& c) { return format_double((c.*m).center); }});
  f.push_back({"forcing." + name + ".modes", [m](RunConfig& c, const std::string& v) { (c.*m).modes = trim(v); },
               [m](const RunConfig& c) { return (c.*m).modes; }});
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"domain.a", [](RunConfig& c, const std::string& v) { c.domain.a = parse_double(v); },
                 [](const RunConfig& c) { return format_double(c.domain.a); }});
    f.push_back({"domain.b", [](RunConfig& c, const std::string& v) { c.domain.b = parse_double(v); },
                 [](const RunConfig& c) { return format_double(c.domain.b); }});
    f.push_back({"domain.L", [](RunConfig& c, const std::string& v) { c.domain.L = parse_double(v); },
                 [](const RunConfig& c) { return format_double(c.domain.L); }});
    for (int i = 0; i < 3; ++i)
      f.push_back({"modes.m" + std::to_string(i + 1),
                   [i](RunConfig& c, const std::string& v) { c.modes[i] = parse_int<int>(v); },
                   [i](const RunConfig& c) { return std::to_string(c.modes[i]); }});
    f.push_back(real("physics.nu", &RunConfig::nu));
    f.push_back(real("physics.gamma1", &RunConfig::gamma1));
    f.push_back(real("physics.gamma2", &RunConfig::gamma2));
    f.push_back(choice("physics.flux", &RunConfig::flux, {"classical", "custom"}));
    f.push_back(triple("physics.flux.c1", &RunConfig::c1));
    f.push_back(triple("physics.flux.c2", &RunConfig::c2));
    f.push_back(choice("time.scheme", &RunConfig::scheme, {"imex-euler", "imex-heun"}));
    f.push_back(integer("grid.refine", &RunConfig::refine));
    f.push_back(real("time.dt", &RunConfig::dt));
    f.push_back(real("time.T", &RunConfig::T));
    f.push_back(integer("time.stride", &RunConfig::stride));
    f.push_back(integer("noise.seed", &RunConfig::seed));
    f.push_back(real("noise.t0", &RunConfig::t0));
    f.push_back(real("noise.t1", &RunConfig::t1));
    f.push_back(real("noise.alpha", &RunConfig::alpha));
    f.push_back(choice("noise.init", &RunConfig::ou_init, {"burn-in", "stationary", "explicit"}));
    f.push_back(real("noise.y0", &RunConfig::y0));
    f.push_back(choice("constants.beta0_mode", &RunConfig::beta0_mode, {"measured", "explicit"}));
    f.push_back(real("constants.beta0", &RunConfig::beta0));
    f.push_back(integer("constants.beta0_samples", &RunConfig::beta0_samples));
    f.push_back(integer("constants.beta0_seed", &RunConfig::beta0_seed));
    forcing_fields(f, "g", &RunConfig::g);
    forcing_fields(f, "h", &RunConfig::h);
    f.push_back(choice("initial.kind", &RunConfig::initial, {"zero", "random"}));
    f.push_back(real("initial.radius", &RunConfig::initial_radius));
    f.push_back(integer("initial.seed", &RunConfig::initial_seed));
    f.push_back(real_list("experiment.ladder", &RunConfig::ladder));
    f.push_back(real_list("experiment.tail_k", &RunConfig::tail_k));
    f.push_back(real("experiment.spectral_k", &RunConfig::spectral_k));
    f.push_back(long_list("experiment.spectral_n", &RunConfig::spectral_n));
    f.push_back(integer("experiment.ensemble_size", &RunConfig::ensemble_size));
    f.push_back(integer("experiment.ensemble_seed", &RunConfig::ensemble_seed));
    f.push_back(real("experiment.tempered_radius", &RunConfig::tempered_radius));
    f.push_back(real("experiment.c_quad", &RunConfig::c_quad));
    f.push_back(real("experiment.quad_window", &RunConfig::quad_window));
    f.push_back(real_list("experiment.attraction_times", &RunConfig::attraction_times));
    f.push_back(real("experiment.attraction_tol", &RunConfig::attraction_tol));
    f.push_back(real("experiment.invariance_t", &RunConfig::invariance_t));
    return f;
  }();
  return table;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw ConfigError("unknown key '" + key + "'");
}

}  // namespace

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "default") return c;
  if (name == "quick") {
    c.domain = {std::numbers::pi, std::numbers::pi, 2.0 * std::numbers::pi};
    c.modes = {3, 3, 12};
    c.dt = 1e-2;
    c.T = 1.0;
    c.stride = 10;
    c.t0 = -30.0;
    c.t1 = 4.0;
    c.ladder = {2.0, 4.0};
    c.tail_k = {0.5, 1.0, 2.0};
    c.spectral_k = 1.5;
    c.spectral_n = {5, 20, 50};
    c.ensemble_size = 2;
    c.quad_window = 10.0;
    c.attraction_times = {1.0, 2.0};
    c.invariance_t = 0.5;
    c.beta0_samples = 8;
    return c;
  }
  if (name == "unit-pi") {
    c.domain = {std::numbers::pi, std::numbers::pi, std::numbers::pi};
    c.modes = {4, 4, 4};
    c.tail_k = {0.5, 1.0};
    c.spectral_k = 1.0;
    c.spectral_n = {4, 16};
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_field(key).set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) { return find_field(key).get(cfg); }

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.key);
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::string preset = "default";
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  auto fail = [&](int ln, const std::string& msg) -> void {
    throw ConfigError(origin + ":" + std::to_string(ln) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    for (const auto& e : entries)
      if (e.key == key) fail(line, "duplicate key '" + key + "' (first set on line " + std::to_string(e.line) + ")");
    if (key == "preset") {
      preset = value;
      continue;
    }
    entries.push_back({line, key, value});
  }
  RunConfig cfg;
  try {
    cfg = preset_config(preset);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  for (const auto& e : entries) {
    try {
      set_config_value(cfg, e.key, e.value);
    } catch (const ConfigError& err) {
      const std::string msg = err.what();
      fail(e.line, msg.rfind("unknown key", 0) == 0 ? msg : e.key + ": " + msg);
    }
  }
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

void validate_config(const RunConfig& c) {
  auto bad = [](const std::string& key, const std::string& msg) { throw ConfigError(key + ": " + msg); };
  c.domain.validate();
  for (int i = 0; i < 3; ++i)
    if (c.modes[i] < 1) bad("modes.m" + std::to_string(i + 1), "mode counts must be positive");
  if (!(c.nu > 0.0)) bad("physics.nu", "must be positive");
  if (c.gamma1 < 0.0 || c.gamma2 < 0.0) bad("physics.gamma1", "gammas must be >= 0");
  if (c.refine != 1 && c.refine != 2) bad("grid.refine", "must be 1 or 2");
  if (!(c.dt > 0.0)) bad("time.dt", "must be positive");
  if (c.T < 0.0) bad("time.T", "must be >= 0");
  aligned_steps(c.T, c.dt, "time.T");
  if (c.stride < 1) bad("time.stride", "must be >= 1");
  if (!(c.t0 <= 0.0 && 0.0 <= c.t1 && c.t0 < c.t1)) bad("noise.t0", "window must satisfy t0 <= 0 <= t1, t0 < t1");
  aligned_steps(c.t0, c.dt, "noise.t0");
  aligned_steps(c.t1, c.dt, "noise.t1");
  if (!(c.alpha > 0.0)) bad("noise.alpha", "must be positive");
  if (c.beta0_mode == "explicit" && c.beta0 < 0.0) bad("constants.beta0", "must be >= 0");
  if (c.beta0_samples < 1) bad("constants.beta0_samples", "must be >= 1");
  for (const ForcingSpec* f : {&c.g, &c.h})
    if (f->kind == "bump" && !(f->width > 0.0)) bad("forcing", "bump width must be positive");
  if (!(c.initial_radius >= 0.0)) bad("initial.radius", "must be >= 0");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (!(c.ladder[i] > 0.0)) bad("experiment.ladder", "horizons must be positive");
    if (i && !(c.ladder[i] > c.ladder[i - 1])) bad("experiment.ladder", "horizons must be increasing");
    aligned_steps(c.ladder[i], c.dt, "experiment.ladder");
  }
  for (double k : c.tail_k)
    if (!(k >= 0.0)) bad("experiment.tail_k", "radii must be >= 0");
  if (!(c.spectral_k >= 1.0 && 2.0 * c.spectral_k < c.domain.L))
    bad("experiment.spectral_k", "must satisfy 1 <= k and 2k < L");
  for (long n : c.spectral_n)
    if (n < 0) bad("experiment.spectral_n", "mode counts must be >= 0");
  if (c.ensemble_size < 1) bad("experiment.ensemble_size", "must be >= 1");
  if (!(c.c_quad > 0.0)) bad("experiment.c_quad", "must be positive");
  if (!(c.quad_window > 0.0)) bad("experiment.quad_window", "must be positive");
  aligned_steps(c.quad_window, c.dt, "experiment.quad_window");
  for (double t : c.attraction_times) aligned_steps(t, c.dt, "experiment.attraction_times");
  if (c.invariance_t < 0.0) bad("experiment.invariance_t", "must be >= 0");
  aligned_steps(c.invariance_t, c.dt, "experiment.invariance_t");
}

}  // namespace bbm
