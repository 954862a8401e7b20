#include <cmath>
#include <numbers>

#include "bbm/error.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

namespace {

using Map = Eigen::Map<RowMatrix>;
using CMap = Eigen::Map<const RowMatrix>;

// sin(pi * r / d) and cos(pi * r / d) with r reduced modulo 2d first.
double sin_frac(long r, long d) {
  r %= 2 * d;
  if (r == 0 || r == d) return 0.0;
  return std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(d));
}

double cos_frac(long r, long d) {
  r %= 2 * d;
  if (r == 0) return 1.0;
  if (r == d) return -1.0;
  if (2 * r == d || 2 * r == 3 * d) return 0.0;
  return std::cos(std::numbers::pi * static_cast<double>(r) / static_cast<double>(d));
}

const RowMatrix& pick(const Grid::Axis& ax, AxisKind kind, bool weighted) {
  switch (kind) {
    case AxisKind::Sine:
      return weighted ? ax.sine_w : ax.sine;
    case AxisKind::Derivative:
      return weighted ? ax.derivative_w : ax.derivative;
    case AxisKind::SineOfEven:
      if (weighted) return ax.sine_of_even;
      break;
    case AxisKind::DerivativeOfOdd:
      if (weighted) return ax.derivative_of_odd;
      break;
  }
  throw ContractViolation("exact projection kinds are analysis only");
}

// Row j, column m: coefficient of the m-th normalized sine (or its
// derivative) in the exact integral of the DCT-I (or DST-I) interpolant of
// node values. n = number of cells.
void exact_matrices(Grid::Axis& ax, long n) {
  const int nodes = static_cast<int>(n) + 1;
  const double len = ax.length;
  const double norm = std::sqrt(2.0 / len);
  const double pi = std::numbers::pi;
  // int_0^len sin(m x pi/len) cos(k x pi/len) dx
  auto sc = [&](long m, long k) {
    if ((m + k) % 2 == 0) return 0.0;
    return len / pi * 2.0 * static_cast<double>(m) / static_cast<double>(m * m - k * k);
  };
  ax.sine_of_even = RowMatrix::Zero(nodes, ax.modes);
  ax.derivative_of_odd = RowMatrix::Zero(nodes, ax.modes);
  for (int j = 0; j < nodes; ++j) {
    const double cj = (j == 0 || j == n) ? 2.0 : 1.0;
    for (int m = 1; m <= ax.modes; ++m) {
      double e = 0.0, o = 0.0;
      for (long k = 0; k <= n; ++k) {
        const double ck = (k == 0 || k == n) ? 2.0 : 1.0;
        e += 2.0 / (n * cj * ck) * cos_frac(k * j, n) * sc(m, k);
        if (k >= 1 && k < n && j >= 1 && j < n)
          o += 2.0 / n * sin_frac(k * j, n) * sc(k, m);
      }
      ax.sine_of_even(j, m - 1) = norm * e;
      ax.derivative_of_odd(j, m - 1) = norm * (m * pi / len) * o;
    }
  }
}

}  // namespace

Grid::Grid(const BoxDomain& domain, const ModeCounts& modes, int refine) : modes_(modes), refine_(refine) {
  if (refine < 1) throw InvalidArgument("dealiasing factor must be >= 1");
  for (int d = 0; d < 3; ++d) {
    Axis& ax = axes_[d];
    ax.modes = modes[d];
    ax.interior = refine * (modes[d] + 1) - 1;
    ax.length = domain.length(d);
    ax.offset = domain.offset(d);
    const long cells = ax.interior + 1;
    ax.spacing = ax.length / static_cast<double>(cells);
    const int nodes = ax.interior + 2;
    const double norm = std::sqrt(2.0 / ax.length);
    ax.sine.resize(nodes, ax.modes);
    ax.derivative.resize(nodes, ax.modes);
    ax.weights.assign(nodes, ax.spacing);
    ax.weights.front() = ax.weights.back() = 0.5 * ax.spacing;
    for (int k = 0; k < nodes; ++k) {
      for (int m = 1; m <= ax.modes; ++m) {
        const long r = static_cast<long>(m) * k;
        ax.sine(k, m - 1) = norm * sin_frac(r, cells);
        ax.derivative(k, m - 1) = norm * (m * std::numbers::pi / ax.length) * cos_frac(r, cells);
      }
    }
    Eigen::Map<const Eigen::VectorXd> w(ax.weights.data(), nodes);
    ax.sine_w = w.asDiagonal() * ax.sine;
    ax.derivative_w = w.asDiagonal() * ax.derivative;
    exact_matrices(ax, cells);
  }
}

std::size_t Grid::size() const {
  const auto d = dims();
  return static_cast<std::size_t>(d[0]) * d[1] * d[2];
}

std::size_t Grid::flat(int i, int j, int k) const {
  const auto d = dims();
  return (static_cast<std::size_t>(i) * d[1] + j) * d[2] + k;
}

double Grid::weight(std::size_t flat_index) const {
  const auto d = dims();
  const std::size_t k = flat_index % d[2];
  const std::size_t r = flat_index / d[2];
  const std::size_t j = r % d[1];
  const std::size_t i = r / d[1];
  return axes_[0].weights[i] * axes_[1].weights[j] * axes_[2].weights[k];
}

void Grid::synthesize(std::span<const double> coeffs, std::span<double> values,
                      const std::array<AxisKind, 3>& kinds) const {
  const int M1 = modes_[0], M2 = modes_[1], M3 = modes_[2];
  const auto P = dims();
  if (coeffs.size() != static_cast<std::size_t>(M1) * M2 * M3 || values.size() != size())
    throw ContractViolation("synthesize: size mismatch");
  const RowMatrix& A1 = pick(axes_[0], kinds[0], false);
  const RowMatrix& A2 = pick(axes_[1], kinds[1], false);
  const RowMatrix& A3 = pick(axes_[2], kinds[2], false);

  std::vector<double> t3(static_cast<std::size_t>(M1) * M2 * P[2]);
  Map(t3.data(), M1 * M2, P[2]).noalias() = CMap(coeffs.data(), M1 * M2, M3) * A3.transpose();
  std::vector<double> t2(static_cast<std::size_t>(M1) * P[1] * P[2]);
  for (int m = 0; m < M1; ++m) {
    Map(t2.data() + static_cast<std::size_t>(m) * P[1] * P[2], P[1], P[2]).noalias() =
        A2 * CMap(t3.data() + static_cast<std::size_t>(m) * M2 * P[2], M2, P[2]);
  }
  Map(values.data(), P[0], P[1] * P[2]).noalias() = A1 * CMap(t2.data(), M1, P[1] * P[2]);
}

void Grid::analyze(std::span<const double> values, std::span<double> coeffs,
                   const std::array<AxisKind, 3>& kinds) const {
  const int M1 = modes_[0], M2 = modes_[1], M3 = modes_[2];
  const auto P = dims();
  if (coeffs.size() != static_cast<std::size_t>(M1) * M2 * M3 || values.size() != size())
    throw ContractViolation("analyze: size mismatch");
  const RowMatrix& B1 = pick(axes_[0], kinds[0], true);
  const RowMatrix& B2 = pick(axes_[1], kinds[1], true);
  const RowMatrix& B3 = pick(axes_[2], kinds[2], true);

  std::vector<double> t2(static_cast<std::size_t>(M1) * P[1] * P[2]);
  Map(t2.data(), M1, P[1] * P[2]).noalias() = B1.transpose() * CMap(values.data(), P[0], P[1] * P[2]);
  std::vector<double> t3(static_cast<std::size_t>(M1) * M2 * P[2]);
  for (int m = 0; m < M1; ++m) {
    Map(t3.data() + static_cast<std::size_t>(m) * M2 * P[2], M2, P[2]).noalias() =
        B2.transpose() * CMap(t2.data() + static_cast<std::size_t>(m) * P[1] * P[2], P[1], P[2]);
  }
  Map(coeffs.data(), M1 * M2, M3).noalias() = CMap(t3.data(), M1 * M2, P[2]) * B3;
}

void Grid::synthesize_with_gradient(std::span<const double> coeffs, std::span<double> u, std::span<double> dx,
                                    std::span<double> dy, std::span<double> dz) const {
  const int M1 = modes_[0], M2 = modes_[1], M3 = modes_[2];
  const auto P = dims();
  const std::size_t n = size();
  if (coeffs.size() != static_cast<std::size_t>(M1) * M2 * M3 || u.size() != n || dx.size() != n ||
      dy.size() != n || dz.size() != n)
    throw ContractViolation("synthesize_with_gradient: size mismatch");
  const Axis &X = axes_[0], &Y = axes_[1], &Z = axes_[2];
  const std::size_t s3 = static_cast<std::size_t>(M1) * M2 * P[2];
  const std::size_t s2 = static_cast<std::size_t>(M1) * P[1] * P[2];

  std::vector<double> zs(s3), zd(s3);
  CMap c(coeffs.data(), M1 * M2, M3);
  Map(zs.data(), M1 * M2, P[2]).noalias() = c * Z.sine.transpose();
  Map(zd.data(), M1 * M2, P[2]).noalias() = c * Z.derivative.transpose();

  std::vector<double> ss(s2), ds(s2), sd(s2);  // (y-kind, z-kind)
  for (int m = 0; m < M1; ++m) {
    const std::size_t o3 = static_cast<std::size_t>(m) * M2 * P[2];
    const std::size_t o2 = static_cast<std::size_t>(m) * P[1] * P[2];
    CMap zsm(zs.data() + o3, M2, P[2]);
    Map(ss.data() + o2, P[1], P[2]).noalias() = Y.sine * zsm;
    Map(ds.data() + o2, P[1], P[2]).noalias() = Y.derivative * zsm;
    Map(sd.data() + o2, P[1], P[2]).noalias() = Y.sine * CMap(zd.data() + o3, M2, P[2]);
  }
  const int cols = P[1] * P[2];
  Map(u.data(), P[0], cols).noalias() = X.sine * CMap(ss.data(), M1, cols);
  Map(dx.data(), P[0], cols).noalias() = X.derivative * CMap(ss.data(), M1, cols);
  Map(dy.data(), P[0], cols).noalias() = X.sine * CMap(ds.data(), M1, cols);
  Map(dz.data(), P[0], cols).noalias() = X.sine * CMap(sd.data(), M1, cols);
}

}  // namespace bbm
