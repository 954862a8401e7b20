#pragma once

// Dirichlet sine eigenbasis of the truncated channel (0,a) x (0,b) x (-L,L),
// spectral/physical transforms and the mode-wise linear operators.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bbm {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ModeCounts = std::array<int, 3>;

struct BoxDomain {
  double a = 1.0;
  double b = 1.0;
  double L = 1.0;  // half-length of the channel

  void validate() const;
  double length(int axis) const { return axis == 0 ? a : axis == 1 ? b : 2.0 * L; }
  double offset(int axis) const { return axis == 2 ? -L : 0.0; }
  bool operator==(const BoxDomain&) const = default;
};

struct ModeTriple {
  int m, n, p;
};

class SineBasis;

/// Per-axis transform kind: plain sine or its derivative (cosine). The two
/// exact kinds are analysis only: they interpolate cosine-type (even) or
/// sine-type (odd) samples by DCT-I / DST-I and integrate against the sine
/// (resp. derivative) modes analytically, so products of two sine fields
/// are projected without quadrature error.
enum class AxisKind { Sine, Derivative, SineOfEven, DerivativeOfOdd };

/// Collocation grid for one basis at a dealiasing factor. Nodes include the
/// walls (index 0 and N+1 per axis) so trapezoid weights integrate cosine-type
/// products exactly; sine fields vanish there.
class Grid {
 public:
  struct Axis {
    int modes = 0;
    int interior = 0;  // N
    double length = 0;
    double offset = 0;
    double spacing = 0;
    RowMatrix sine;        // (N+2) x modes, orthonormal sine samples
    RowMatrix derivative;  // (N+2) x modes, d/dx of the sine samples
    RowMatrix sine_w;      // weight-scaled copies used by the adjoint maps
    RowMatrix derivative_w;
    RowMatrix sine_of_even;  // exact analysis matrices, same shape
    RowMatrix derivative_of_odd;
    std::vector<double> weights;  // trapezoid weights, N+2 entries
  };

  Grid(const BoxDomain& domain, const ModeCounts& modes, int refine);

  int refine() const { return refine_; }
  std::array<int, 3> dims() const { return {axes_[0].interior + 2, axes_[1].interior + 2, axes_[2].interior + 2}; }
  std::size_t size() const;
  const Axis& axis(int i) const { return axes_[i]; }
  double coordinate(int axis, int k) const { return axes_[axis].offset + k * axes_[axis].spacing; }
  double weight(std::size_t flat) const;
  std::size_t flat(int i, int j, int k) const;

  /// values = sum_j coeffs_j * prod_axis basis_axis(x), with per-axis kind.
  void synthesize(std::span<const double> coeffs, std::span<double> values,
                  const std::array<AxisKind, 3>& kinds) const;
  /// coeffs_j = sum_x w(x) values(x) prod_axis basis_axis(x): the quadrature
  /// adjoint of `synthesize`.
  void analyze(std::span<const double> values, std::span<double> coeffs,
               const std::array<AxisKind, 3>& kinds) const;
  /// Field and its three partial derivatives in one pass (shared partial sums).
  void synthesize_with_gradient(std::span<const double> coeffs, std::span<double> u,
                                std::span<double> dx, std::span<double> dy, std::span<double> dz) const;

 private:
  ModeCounts modes_;
  int refine_;
  std::array<Axis, 3> axes_;
};

class SineBasis {
 public:
  SineBasis(const BoxDomain& domain, const ModeCounts& modes);

  const BoxDomain& domain() const { return domain_; }
  const ModeCounts& modes() const { return modes_; }
  std::size_t size() const { return eigen_.size(); }

  double eigenvalue(std::size_t j) const { return eigen_[j]; }
  std::span<const double> eigenvalues() const { return eigen_; }
  /// sorted_index()[r] = linear index of the r-th smallest eigenvalue.
  std::span<const std::size_t> sorted_index() const { return sorted_; }
  /// Position of linear mode j within sorted order.
  std::size_t rank(std::size_t j) const { return rank_[j]; }
  /// Smallest eigenvalue: the discrete Poincare constant.
  double poincare() const { return eigen_[sorted_[0]]; }
  double max_eigenvalue() const { return eigen_[sorted_.back()]; }

  std::size_t linear_index(int m, int n, int p) const;
  ModeTriple mode(std::size_t j) const;

  /// Grid at dealiasing factor 1 or 2 (prebuilt at construction).
  const Grid& grid(int refine) const;

 private:
  BoxDomain domain_;
  ModeCounts modes_;
  std::vector<double> eigen_;
  std::vector<std::size_t> sorted_;
  std::vector<std::size_t> rank_;
  std::unique_ptr<Grid> grid1_;
  std::unique_ptr<Grid> grid2_;
};

using BasisPtr = std::shared_ptr<const SineBasis>;

/// Throws ConfigError on non-positive dimensions or mode counts.
BasisPtr build_basis(const BoxDomain& domain, const ModeCounts& modes);

/// Coefficients in the L2-orthonormal sine basis.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(BasisPtr basis);
  SpectralField(BasisPtr basis, std::vector<double> coeffs);

  static SpectralField unit_mode(BasisPtr basis, int m, int n, int p);

  const BasisPtr& basis() const { return basis_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<double> coeffs() { return coeffs_; }
  std::span<const double> coeffs() const { return coeffs_; }
  double& operator[](std::size_t j) { return coeffs_[j]; }
  double operator[](std::size_t j) const { return coeffs_[j]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  SpectralField& axpy(double s, const SpectralField& o);

  bool compatible(const SpectralField& o) const { return basis_ && basis_ == o.basis_; }

 private:
  BasisPtr basis_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Grid samples (walls included), shape Grid::dims(), last axis fastest.
struct GridField {
  BasisPtr basis;
  int refine = 1;
  std::vector<double> values;

  const Grid& grid() const { return basis->grid(refine); }
};

void require_same_basis(const SpectralField& a, const SpectralField& b, const char* where);

GridField to_grid(const SpectralField& f, int refine = 1);
SpectralField from_grid(const GridField& g);
/// Spectral gradient sampled on the grid.
std::array<GridField, 3> gradient(const SpectralField& f, int refine = 2);
enum class Parity { Even, Odd };

/// Weak divergence: coefficient j = -sum_i int F_i * d_i e_j. Even F (e.g.
/// quadratic in sine fields, cosine-type along every axis) and odd F (sine
/// type) are projected exactly when their degree fits the grid.
SpectralField div_from_grid(const std::array<GridField, 3>& F, Parity parity = Parity::Even);

SpectralField laplacian(const SpectralField& f);
SpectralField helmholtz_inv(const SpectralField& f);
/// (I - Laplacian) f
SpectralField helmholtz(const SpectralField& f);
SpectralField project_low(const SpectralField& f, std::size_t n);

double l2_norm(const SpectralField& f);
double h1_norm(const SpectralField& f);
double h2_norm(const SpectralField& f);
/// ||grad f||^2
double grad_sq(const SpectralField& f);
double inner_l2(const SpectralField& f, const SpectralField& g);
double inner_h1(const SpectralField& f, const SpectralField& g);
double h1_distance(const SpectralField& f, const SpectralField& g);

/// Trapezoid quadrature of |g|^2 on its grid, square-rooted.
double quadrature_l2(const GridField& g);
double grid_sup(const GridField& g);

/// Gaussian coefficients scaled by (1+lambda_j)^(-decay).
SpectralField random_smooth_field(const BasisPtr& basis, std::mt19937_64& rng, double decay);

/// sup-norm on the refined grid divided by the H2 norm.
double embedding_ratio(const SpectralField& f);
/// Running maximum of embedding_ratio over `samples` seeded trial fields.
double estimate_beta0(const BasisPtr& basis, int samples, std::uint64_t seed);

// Cutoff profile phi of the tail argument s = x3^2/k^2 (quintic smoothstep
// between the plateaus |s|<=1 and |s|>=2) and its complement psi = 1 - phi.
double cutoff_phi(double s);
double cutoff_phi_prime(double s);
double cutoff_psi(double s);

enum class CutoffKind { PhiSquared, Psi };

/// Weight w(x3) applied pointwise on the refined grid.
double cutoff_weight(double x3, double k, CutoffKind which);
/// Validates 1 <= k and 2k < L.
void check_cutoff_radius(const BoxDomain& domain, double k);
SpectralField cutoff_multiply(const SpectralField& f, double k, CutoffKind which);

}  // namespace bbm
