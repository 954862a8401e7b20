#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "bbm/error.hpp"
#include "bbm/io.hpp"

namespace bbm {

namespace {

class Writer {
 public:
  explicit Writer(const std::filesystem::path& file) : file_(file), out_(file, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + file.string() + "' for writing");
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + file_.string() + "'");
  }

 private:
  std::filesystem::path file_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& file) : file_(file), in_(file, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + file.string() + "'");
  }
  std::uint64_t u64() {
    unsigned char b[8];
    in_.read(reinterpret_cast<char*>(b), 8);
    if (in_.gcount() != 8) throw IoError("'" + file_.string() + "' is truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::filesystem::path file_;
  std::ifstream in_;
};

void expect_header(Reader& r, std::uint64_t magic, const std::filesystem::path& file) {
  if (r.u64() != magic) throw IoError("'" + file.string() + "' has the wrong magic number");
  const std::uint64_t version = r.u64();
  if (version != kFormatVersion)
    throw IoError("'" + file.string() + "' has unsupported format version " + std::to_string(version));
}

}  // namespace

void write_path(const std::filesystem::path& file, const WienerPath& path) {
  Writer w(file);
  w.u64(kPathMagic);
  w.u64(kFormatVersion);
  w.u64(path.seed());
  w.f64(path.t0());
  w.f64(path.t1());
  w.f64(path.dt());
  for (double x : path.increments()) w.f64(x);
  w.close();
}

WienerPath read_path(const std::filesystem::path& file) {
  Reader r(file);
  expect_header(r, kPathMagic, file);
  const std::uint64_t seed = r.u64();
  const double t0 = r.f64(), t1 = r.f64(), dt = r.f64();
  if (!(dt > 0.0) || !(t1 > t0)) throw IoError("'" + file.string() + "' has an invalid time window");
  const long n = std::lround((t1 - t0) / dt);
  std::vector<double> inc(static_cast<std::size_t>(n));
  for (double& x : inc) x = r.f64();
  if (!r.at_end()) throw IoError("'" + file.string() + "' has trailing data");
  return WienerPath::from_increments(seed, t0, dt, std::move(inc));
}

SpectralField StateCheckpoint::field(const BasisPtr& basis) const {
  if (!(basis->domain() == domain) || basis->modes() != modes)
    throw ContractViolation("state checkpoint does not match the basis");
  return SpectralField(basis, coeffs);
}

void write_state(const std::filesystem::path& file, const SpectralField& v, double t, double y) {
  const SineBasis& b = *v.basis();
  Writer w(file);
  w.u64(kStateMagic);
  w.u64(kFormatVersion);
  for (int i = 0; i < 3; ++i) w.u64(static_cast<std::uint64_t>(b.modes()[i]));
  w.f64(b.domain().a);
  w.f64(b.domain().b);
  w.f64(b.domain().L);
  w.f64(t);
  w.f64(y);
  for (double c : v.coeffs()) w.f64(c);
  w.close();
}

StateCheckpoint read_state(const std::filesystem::path& file) {
  Reader r(file);
  expect_header(r, kStateMagic, file);
  StateCheckpoint s;
  for (int i = 0; i < 3; ++i) {
    const std::uint64_t m = r.u64();
    if (m == 0 || m > 1u << 20) throw IoError("'" + file.string() + "' has invalid mode counts");
    s.modes[i] = static_cast<int>(m);
  }
  s.domain.a = r.f64();
  s.domain.b = r.f64();
  s.domain.L = r.f64();
  s.t = r.f64();
  s.y = r.f64();
  s.coeffs.resize(static_cast<std::size_t>(s.modes[0]) * s.modes[1] * s.modes[2]);
  for (double& c : s.coeffs) c = r.f64();
  if (!r.at_end()) throw IoError("'" + file.string() + "' has trailing data");
  return s;
}

void write_state_set(const std::filesystem::path& dir, const std::vector<SpectralField>& states, double t,
                     const std::string& description) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  nlohmann::json index;
  index["description"] = description;
  index["t"] = t;
  index["count"] = states.size();
  index["files"] = nlohmann::json::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "state_%04zu.bin", i);
    write_state(dir / name, states[i], t, 0.0);
    index["files"].push_back(name);
  }
  write_text_file(dir / "index.json", index.dump(2) + "\n");
}

std::vector<StateCheckpoint> read_state_set(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) throw IoError("'" + dir.string() + "' has no index.json");
  nlohmann::json index;
  try {
    in >> index;
  } catch (const std::exception& e) {
    throw IoError("'" + (dir / "index.json").string() + "': " + e.what());
  }
  std::vector<StateCheckpoint> out;
  for (const auto& f : index.at("files")) out.push_back(read_state(dir / f.get<std::string>()));
  return out;
}

}  // namespace bbm
