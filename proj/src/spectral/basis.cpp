#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bbm/error.hpp"
#include "bbm/spectral.hpp"

namespace bbm {

void BoxDomain::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !(L > 0.0)) {
    std::ostringstream os;
    os << "box dimensions must be positive (a=" << a << ", b=" << b << ", L=" << L << ")";
    throw ConfigError(os.str());
  }
}

SineBasis::SineBasis(const BoxDomain& domain, const ModeCounts& modes) : domain_(domain), modes_(modes) {
  domain_.validate();
  for (int d = 0; d < 3; ++d) {
    if (modes_[d] < 1) throw ConfigError("mode counts must be positive");
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double la = domain_.a, lb = domain_.b, lc = 2.0 * domain_.L;
  eigen_.resize(static_cast<std::size_t>(modes_[0]) * modes_[1] * modes_[2]);
  std::size_t j = 0;
  for (int m = 1; m <= modes_[0]; ++m)
    for (int n = 1; n <= modes_[1]; ++n)
      for (int p = 1; p <= modes_[2]; ++p)
        eigen_[j++] = pi2 * ((m * m) / (la * la) + (n * n) / (lb * lb) + (p * p) / (lc * lc));

  // Linear order already is lexicographic in (m,n,p), so a stable sort on
  // the eigenvalue gives the required tie-break.
  sorted_.resize(eigen_.size());
  std::iota(sorted_.begin(), sorted_.end(), std::size_t{0});
  std::stable_sort(sorted_.begin(), sorted_.end(),
                   [this](std::size_t x, std::size_t y) { return eigen_[x] < eigen_[y]; });
  rank_.resize(eigen_.size());
  for (std::size_t r = 0; r < sorted_.size(); ++r) rank_[sorted_[r]] = r;

  grid1_ = std::make_unique<Grid>(domain_, modes_, 1);
  grid2_ = std::make_unique<Grid>(domain_, modes_, 2);
}

std::size_t SineBasis::linear_index(int m, int n, int p) const {
  if (m < 1 || m > modes_[0] || n < 1 || n > modes_[1] || p < 1 || p > modes_[2])
    throw InvalidArgument("mode triple out of range");
  return (static_cast<std::size_t>(m - 1) * modes_[1] + (n - 1)) * modes_[2] + (p - 1);
}

ModeTriple SineBasis::mode(std::size_t j) const {
  const int p = static_cast<int>(j % modes_[2]);
  const std::size_t r = j / modes_[2];
  const int n = static_cast<int>(r % modes_[1]);
  const int m = static_cast<int>(r / modes_[1]);
  return {m + 1, n + 1, p + 1};
}

const Grid& SineBasis::grid(int refine) const {
  if (refine == 1) return *grid1_;
  if (refine == 2) return *grid2_;
  throw InvalidArgument("only dealiasing factors 1 and 2 are prebuilt");
}

BasisPtr build_basis(const BoxDomain& domain, const ModeCounts& modes) {
  return std::make_shared<const SineBasis>(domain, modes);
}

}  // namespace bbm
