#include "bbm/bbm.h"

#include <cstring>
#include <iostream>
#include <memory>
#include <string>

#include "bbm/app.hpp"

struct bbm_config {
  bbm::RunConfig cfg;
};

struct bbm_basis {
  bbm::BasisPtr basis;
};

struct bbm_path {
  bbm::WienerPath path;
};

namespace {

thread_local std::string g_last_error;

bbm_status fail(bbm_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
bbm_status guarded(F&& fn) {
  try {
    return fn();
  } catch (const bbm::Error& e) {
    return fail(static_cast<bbm_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(BBM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BBM_ERR_INTERNAL, e.what());
  }
}

bbm_status copy_out(const std::string& s, char* buf, size_t size, size_t* needed) {
  if (needed) *needed = s.size();
  if (buf && size > 0) {
    const size_t n = std::min(size - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
    if (n < s.size()) return fail(BBM_ERR_INVALID_ARGUMENT, "buffer too small");
  }
  return BBM_OK;
}

#define BBM_REQUIRE(p)                                              \
  do {                                                              \
    if (!(p)) return fail(BBM_ERR_INVALID_ARGUMENT, #p " is null"); \
  } while (0)

}  // namespace

extern "C" {

const char* bbm_version(void) { return "0.1.0"; }

const char* bbm_last_error(void) { return g_last_error.c_str(); }

bbm_status bbm_config_load(const char* path, bbm_config** out) {
  BBM_REQUIRE(path);
  BBM_REQUIRE(out);
  return guarded([&] {
    *out = new bbm_config{bbm::load_config(path)};
    return BBM_OK;
  });
}

bbm_status bbm_config_parse(const char* text, bbm_config** out) {
  BBM_REQUIRE(text);
  BBM_REQUIRE(out);
  return guarded([&] {
    *out = new bbm_config{bbm::parse_config(text)};
    return BBM_OK;
  });
}

bbm_status bbm_config_preset(const char* name, bbm_config** out) {
  BBM_REQUIRE(name);
  BBM_REQUIRE(out);
  return guarded([&] {
    *out = new bbm_config{bbm::preset_config(name)};
    return BBM_OK;
  });
}

bbm_status bbm_config_set(bbm_config* cfg, const char* key, const char* value) {
  BBM_REQUIRE(cfg);
  BBM_REQUIRE(key);
  BBM_REQUIRE(value);
  return guarded([&] {
    bbm::RunConfig next = cfg->cfg;
    bbm::set_config_value(next, key, value);
    cfg->cfg = next;
    return BBM_OK;
  });
}

bbm_status bbm_config_get(const bbm_config* cfg, const char* key, char* buf, size_t size, size_t* needed) {
  BBM_REQUIRE(cfg);
  BBM_REQUIRE(key);
  return guarded([&] { return copy_out(bbm::get_config_value(cfg->cfg, key), buf, size, needed); });
}

bbm_status bbm_config_dump(const bbm_config* cfg, char* buf, size_t size, size_t* needed) {
  BBM_REQUIRE(cfg);
  return guarded([&] { return copy_out(bbm::dump_config(cfg->cfg), buf, size, needed); });
}

bbm_status bbm_config_validate(const bbm_config* cfg) {
  BBM_REQUIRE(cfg);
  return guarded([&] {
    bbm::validate_config(cfg->cfg);
    return BBM_OK;
  });
}

void bbm_config_free(bbm_config* cfg) { delete cfg; }

bbm_status bbm_run_command(const bbm_config* cfg, const char* subcommand, const bbm_run_options* opts) {
  BBM_REQUIRE(cfg);
  BBM_REQUIRE(subcommand);
  return guarded([&] {
    bbm::CommandOptions o;
    if (opts) {
      if (opts->out_dir) o.out_dir = opts->out_dir;
      if (opts->has_seed) o.seed = opts->seed;
      o.threads = opts->threads > 0 ? opts->threads : 1;
      if (!opts->quiet) o.log = &std::cout;
    } else {
      o.log = &std::cout;
    }
    const int code = bbm::run_command(subcommand, cfg->cfg, o);
    if (code != 0) return fail(static_cast<bbm_status>(code), "acceptance suite reported failing criteria");
    return BBM_OK;
  });
}

bbm_status bbm_basis_create(double a, double b, double L, int m1, int m2, int m3, bbm_basis** out) {
  BBM_REQUIRE(out);
  return guarded([&] {
    *out = new bbm_basis{bbm::build_basis(bbm::BoxDomain{a, b, L}, bbm::ModeCounts{m1, m2, m3})};
    return BBM_OK;
  });
}

size_t bbm_basis_mode_count(const bbm_basis* basis) { return basis ? basis->basis->size() : 0; }

double bbm_basis_poincare(const bbm_basis* basis) { return basis ? basis->basis->poincare() : 0.0; }

bbm_status bbm_basis_eigenvalue(const bbm_basis* basis, int m, int n, int p, double* out) {
  BBM_REQUIRE(basis);
  BBM_REQUIRE(out);
  const auto& M = basis->basis->modes();
  if (m < 1 || n < 1 || p < 1 || m > M[0] || n > M[1] || p > M[2])
    return fail(BBM_ERR_INVALID_ARGUMENT, "mode index outside the basis");
  *out = basis->basis->eigenvalue(basis->basis->linear_index(m, n, p));
  return BBM_OK;
}

void bbm_basis_free(bbm_basis* basis) { delete basis; }

bbm_status bbm_path_sample(uint64_t seed, double t0, double t1, double dt, bbm_path** out) {
  BBM_REQUIRE(out);
  return guarded([&] {
    *out = new bbm_path{bbm::WienerPath::sample(seed, t0, t1, dt)};
    return BBM_OK;
  });
}

bbm_status bbm_path_load(const char* file, bbm_path** out) {
  BBM_REQUIRE(file);
  BBM_REQUIRE(out);
  return guarded([&] {
    *out = new bbm_path{bbm::read_path(file)};
    return BBM_OK;
  });
}

bbm_status bbm_path_save(const bbm_path* path, const char* file) {
  BBM_REQUIRE(path);
  BBM_REQUIRE(file);
  return guarded([&] {
    bbm::write_path(file, path->path);
    return BBM_OK;
  });
}

bbm_status bbm_path_value(const bbm_path* path, double t, double* out) {
  BBM_REQUIRE(path);
  BBM_REQUIRE(out);
  return guarded([&] {
    *out = path->path.value(t);
    return BBM_OK;
  });
}

void bbm_path_free(bbm_path* path) { delete path; }

bbm_status bbm_constants_compute(const bbm_config* cfg, bbm_constants* out) {
  BBM_REQUIRE(cfg);
  BBM_REQUIRE(out);
  return guarded([&] {
    const bbm::RunConfig& c = cfg->cfg;
    const bbm::BasisPtr basis = bbm::build_basis(c.domain, c.modes);
    const bbm::SystemConstants k = bbm::constants_for(c, basis, bbm::make_forcing_field(basis, c.h));
    *out = bbm_constants{k.nu, k.gamma1, k.gamma2, k.lambda, k.beta0, k.h_h1norm, k.delta, k.beta, k.alpha,
                         k.alpha_ok ? 1 : 0};
    return BBM_OK;
  });
}

uint64_t bbm_split_seed(uint64_t master, uint64_t index) { return bbm::split_seed(master, index); }

}  // extern "C"
