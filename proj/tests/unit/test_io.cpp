#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "bbm/app.hpp"
#include "bbm/error.hpp"
#include "bbm/io.hpp"
#include "oracle.hpp"

using namespace bbm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("bbm_test_io_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config round trip") {
  for (const char* name : {"default", "quick", "unit-pi"}) {
    RunConfig c = preset_config(name);
    CHECK(parse_config(dump_config(c)) == c);
  }
  RunConfig c = preset_config("quick");
  set_config_value(c, "physics.flux", "custom");
  set_config_value(c, "physics.flux.c2", "0.1, 0.2, 0.3");
  set_config_value(c, "noise.seed", "18446744073709551615");
  set_config_value(c, "forcing.g.center", "0.1");
  set_config_value(c, "experiment.spectral_n", "1, 2, 3");
  const RunConfig back = parse_config(dump_config(c));
  CHECK(back == c);
  CHECK(back.seed == 18446744073709551615ULL);
  CHECK(dump_config(back) == dump_config(c));

  auto dir = scratch("cfg");
  write_text_file(dir / "a.cfg", dump_config(c));
  CHECK(load_config(dir / "a.cfg") == c);
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);

  for (const auto& key : config_keys()) CHECK_NOTHROW(get_config_value(c, key));
}

TEST_CASE("config parsing") {
  auto c = parse_config("preset = quick\n# comment\n  time.dt = 0.005   # trailing\n\ndomain.L = 2pi\n");
  CHECK(c.dt == 0.005);
  CHECK(c.modes == ModeCounts{3, 3, 12});
  CHECK(c.domain.L == doctest::Approx(2 * std::numbers::pi).epsilon(1e-15));
  CHECK(parse_config("domain.a = pi").domain.a == std::numbers::pi);
  CHECK(parse_config("domain.L = 4*pi").domain.L == doctest::Approx(4 * std::numbers::pi));

  CHECK(error_of("time.dt = 0.01\nbogus.key = 1\n").rfind("cfg:2: unknown key 'bogus.key'", 0) == 0);
  CHECK(error_of("\n\ntime.dt = fast\n").rfind("cfg:3: time.dt:", 0) == 0);
  CHECK(error_of("time.dt = 0.01\ntime.dt = 0.02\n").find("cfg:2: duplicate key") == 0);
  CHECK(error_of("just words\n").rfind("cfg:1:", 0) == 0);
  CHECK(error_of("preset = nope\n").find("unknown preset") != std::string::npos);
  CHECK(error_of("modes.m1 = 1.5\n").rfind("cfg:1:", 0) == 0);
  CHECK(error_of("physics.nu = -1\n").find("physics.nu") != std::string::npos);
  // Cross-field checks.
  CHECK(error_of("experiment.spectral_k = 7\n").find("experiment.spectral_k") != std::string::npos);
  CHECK(error_of("noise.t0 = -200.0005\n").find("noise.t0") != std::string::npos);
  CHECK(error_of("experiment.ladder = 20, 10\n").find("increasing") != std::string::npos);

  RunConfig q = preset_config("quick");
  CHECK_THROWS_AS(set_config_value(q, "nope", "1"), ConfigError);
  CHECK_THROWS_AS(get_config_value(q, "nope"), ConfigError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("path and state checkpoints") {
  auto dir = scratch("ckpt");
  auto p = WienerPath::sample(12, -3, 2, 0.01);
  write_path(dir / "p.bin", p);
  auto q = read_path(dir / "p.bin");
  CHECK(q.increments() == p.increments());
  CHECK(q.seed() == 12);
  CHECK(q.t0() == p.t0());
  CHECK(q.dt() == p.dt());
  CHECK(q.value(1.5) == p.value(1.5));

  auto B = build_basis({2.0, 3.0, 4.0}, {2, 3, 4});
  auto v = oracle::random_field(B, 4);
  write_state(dir / "s.bin", v, 1.25, -0.5);
  auto s = read_state(dir / "s.bin");
  CHECK(s.t == 1.25);
  CHECK(s.y == -0.5);
  CHECK(s.modes == ModeCounts{2, 3, 4});
  CHECK(s.domain == B->domain());
  CHECK(l2_norm(s.field(B) - v) == 0.0);
  CHECK_THROWS_AS(s.field(build_basis({2.0, 3.0, 4.0}, {2, 3, 5})), ContractViolation);

  // Header bytes are little-endian regardless of the host.
  const std::string raw = slurp(dir / "s.bin");
  REQUIRE(raw.size() > 16);
  std::uint64_t magic = 0;
  for (int i = 0; i < 8; ++i) magic |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
  CHECK(magic == kStateMagic);

  CHECK_THROWS_AS(read_path(dir / "s.bin"), IoError);
  CHECK_THROWS_AS(read_state(dir / "missing.bin"), IoError);
  write_text_file(dir / "short.bin", raw.substr(0, raw.size() - 3));
  CHECK_THROWS_AS(read_state(dir / "short.bin"), IoError);
  write_text_file(dir / "long.bin", raw + "12345678");
  CHECK_THROWS_AS(read_state(dir / "long.bin"), IoError);

  StateSet set{oracle::random_field(B, 1), oracle::random_field(B, 2), oracle::random_field(B, 3)};
  write_state_set(dir / "set", set, 0.0, "test set");
  CHECK(fs::exists(dir / "set" / "index.json"));
  auto back = read_state_set(dir / "set");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(l2_norm(back[i].field(B) - set[i]) == 0.0);
  CHECK_THROWS_AS(read_state_set(dir / "nothing"), IoError);
}

TEST_CASE("diagnostics CSV") {
  std::ostringstream os;
  write_diagnostics_csv(os, {DiagnosticsRow{0.0, 1, 2, 3, 4, 5, 6}, DiagnosticsRow{0.5, 1, 2, 3, 4, 5, -6}});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,v_l2,v_h1,vdot_h1,energy,grad_sq,y");
  CHECK(line == kDiagnosticsHeader);
  std::getline(in, line);
  CHECK(line == "0,1,2,3,4,5,6");
  std::getline(in, line);
  CHECK(line == "0.5,1,2,3,4,5,-6");
}

TEST_CASE("commands") {
  RunConfig c = preset_config("quick");
  auto dir = scratch("cmd");
  CommandOptions o;

  SUBCASE("constants") {
    o.out_dir = dir / "constants";
    CHECK(run_command("constants", c, o) == 0);
    auto j = nlohmann::json::parse(slurp(o.out_dir / "constants.json"));
    const double delta = j["delta"];
    const double lambda = j["lambda"];
    CHECK(delta == std::min(1.0, lambda / 4));
  }
  SUBCASE("simulate at T = 0 writes one row") {
    c.T = 0;
    o.out_dir = dir / "sim0";
    CHECK(run_command("simulate", c, o) == 0);
    std::istringstream csv(slurp(o.out_dir / "diagnostics.csv"));
    std::string line;
    int rows = 0;
    std::getline(csv, line);
    CHECK(line == kDiagnosticsHeader);
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 1);
    auto s = read_state(o.out_dir / "final_state.bin");
    Experiment ex(c);
    // The checkpoint holds v = u - z(y).
    const SpectralField v0 = initial_state(c, ex.basis) - ex.model.forcing().z(ex.fiber.y(0));
    CHECK(l2_norm(s.field(ex.basis) - v0) == 0.0);
    CHECK(s.y == ex.fiber.y(0));
  }
  SUBCASE("deterministic outputs") {
    for (const char* cmd : {"simulate", "absorb", "tails", "spectral"}) {
      CommandOptions a, b;
      a.out_dir = dir / (std::string(cmd) + "_a");
      b.out_dir = dir / (std::string(cmd) + "_b");
      a.threads = 1;
      b.threads = 3;
      REQUIRE(run_command(cmd, c, a) == 0);
      REQUIRE(run_command(cmd, c, b) == 0);
      for (const auto& e : fs::directory_iterator(a.out_dir)) {
        if (!e.is_regular_file()) continue;
        CHECK_MESSAGE(slurp(e.path()) == slurp(b.out_dir / e.path().filename()), e.path());
      }
    }
    auto r = nlohmann::json::parse(slurp(dir / "absorb_a" / "report.json"));
    const double r0 = r["r0"], r1 = r["r1"];
    CHECK(r1 * r1 == doctest::Approx(2 * r0).epsilon(1e-14));
    auto t = nlohmann::json::parse(slurp(dir / "tails_a" / "report.json"));
    CHECK(t["tail"].size() == c.tail_k.size());
    auto sp = nlohmann::json::parse(slurp(dir / "spectral_a" / "report.json"));
    CHECK(sp["spectral_tail"].size() == c.spectral_n.size());
  }
  SUBCASE("errors") {
    o.out_dir = dir / "err";
    CHECK_THROWS_AS(run_command("nope", c, o), InvalidArgument);
    RunConfig w = c;
    w.ladder = {2.0, 40.0};
    CHECK_THROWS_AS(run_command("pullback", w, o), WindowError);
    RunConfig d = c;
    d.initial_radius = 1e9;
    d.dt = 0.5;
    d.T = 10;
    d.t0 = -30;
    d.t1 = 10;
    d.stride = 1;
    CHECK_THROWS_AS(run_command("simulate", d, o), DivergenceError);
  }
}
